// SPDX-License-Identifier: Apache-2.0
//
// mmimo-ee: massive MIMO array configuration and energy efficiency simulator
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include "mmimo/adaptation.hpp"
#include "mmimo/mu_mimo.hpp"
#include "mmimo/power_model.hpp"
#include "mmimo/rng.hpp"
#include "mmimo/scenario.hpp"
#include "mmimo/simulation.hpp"
#include "mmimo/ul_sounding.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>
#include <thread>

using namespace mmimo;
namespace fs = std::filesystem;

namespace {

// Collects the individual checks of one criterion.
class Criterion {
public:
    explicit Criterion(int id) : id_(id), start_(std::chrono::steady_clock::now()) {}

    void check(bool ok, const std::string& what)
    {
        ++checks_;
        if (!ok)
            failures_.push_back(what);
    }

    void note(const std::string& s) { notes_.push_back(s); }

    bool report(std::optional<double> budget_s) const
    {
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        const bool in_time = !budget_s || secs <= *budget_s;
        const bool ok = failures_.empty() && in_time;
        std::cout << fmt::format("criterion {}: {} ({} checks, {:.1f} s{})\n", id_, ok ? "PASS" : "FAIL", checks_,
                                 secs, budget_s ? fmt::format(", budget {:.0f} s", *budget_s) : "");
        for (const auto& n : notes_)
            std::cout << "    " << n << '\n';
        for (const auto& f : failures_)
            std::cout << "    failed: " << f << '\n';
        if (!in_time)
            std::cout << "    failed: runtime over budget\n";
        std::cout << std::flush;
        return ok;
    }

private:
    int id_;
    std::chrono::steady_clock::time_point start_;
    int checks_ = 0;
    std::vector<std::string> failures_;
    std::vector<std::string> notes_;
};

// Wraps a criterion body so an exception is a failure, not a crash.
bool run(int id, std::optional<double> budget_s, const std::function<void(Criterion&)>& body)
{
    Criterion c(id);
    try {
        body(c);
    } catch (const std::exception& e) {
        c.check(false, std::string("exception: ") + e.what());
    }
    return c.report(budget_s);
}

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

const double kFullDbm = 53.0;
const double kHalfDbm = 53.0 - 10.0 * std::log10(2.0);
const double kQuarterDbm = 53.0 - 10.0 * std::log10(4.0);

// Per-unit sum at the reference per-element operating point.
double hand_sum(int n_elements, int n_ports)
{
    return n_elements * (2.07 + 0.28) + n_ports * (2.34 + 0.9);
}

double total_w(ArrayType t, double dbm)
{
    return total_power(build_array(t), {0, dbm}, BlockPowers{}, default_pa_params()).total_w;
}

void power_anchors(Criterion& c)
{
    const BlockPowers b;
    const auto pa = default_pa_params();
    const auto a = build_array(ArrayType::A);
    const double p_el = per_element_tx_power(kFullDbm, a.n_elements);
    const double pa_w = pa_dc_power(p_el, pa);
    c.check(near(pa_w, 2.07, 5e-4), fmt::format("PA draw {:.4f} W vs 2.07", pa_w));
    c.check(near(b.lna_w, 0.28, 5e-4), "LNA 0.28 W");
    c.check(near(b.tx_conv_w, 2.34, 5e-4), "TX conversion 2.34 W");
    c.check(near(b.rx_conv_w, 0.9, 5e-4), "RX conversion 0.9 W");
    const auto per_unit = total_power(1, 1, {0, 10.0 * std::log10(p_el * 1e3)}, b, pa);
    c.check(near(per_unit.pa_total_w, 2.07, 5e-4), "single-element PA draw");
    c.check(near(per_unit.lna_total_w, 0.28, 5e-4), "single-element LNA draw");
    c.check(near(per_unit.tx_conv_total_w, 2.34, 5e-4), "single-port TX conversion");
    c.check(near(per_unit.rx_conv_total_w, 0.9, 5e-4), "single-port RX conversion");
    c.check(pa_efficiency(8.0, pa) == 0.40, "efficiency at 8 dB");
    c.check(pa_efficiency(11.0, pa) == 0.29, "efficiency at 11 dB");
    c.check(pa_efficiency(14.0, pa) == 0.185, "efficiency at 14 dB");
    c.note(fmt::format("PA {:.4f} W, eta(8/11/14 dB) = {}/{}/{}", pa_w, pa_efficiency(8.0, pa),
                       pa_efficiency(11.0, pa), pa_efficiency(14.0, pa)));
}

void power_totals(Criterion& c)
{
    struct Case {
        ArrayType t;
        double dbm;
        double expect;
    };
    for (const auto& k : {Case{ArrayType::A, kFullDbm, 808.96}, Case{ArrayType::K, kHalfDbm, 404.48},
                          Case{ArrayType::F, kQuarterDbm, 357.76}}) {
        const auto arr = build_array(k.t);
        const double got = total_w(k.t, k.dbm);
        const double hand = hand_sum(arr.n_elements, arr.n_ports);
        c.check(near(got, hand, 0.01), fmt::format("{}: {:.4f} W vs hand sum {:.4f} W", to_string(k.t), got, hand));
        c.check(near(got, k.expect, 0.01), fmt::format("{}: {:.4f} W vs {:.2f} W", to_string(k.t), got, k.expect));
        c.note(fmt::format("{} at {:.2f} dBm: {:.2f} W", to_string(k.t), k.dbm, got));
    }
}

void power_savings(Criterion& c)
{
    const double a_full = total_w(ArrayType::A, kFullDbm);
    const double a_half = total_w(ArrayType::A, kHalfDbm);
    const double e_half = total_w(ArrayType::E, kHalfDbm);
    const double k_half = total_w(ArrayType::K, kHalfDbm);
    const double f_quarter = total_w(ArrayType::F, kQuarterDbm);
    const auto band = [&](const char* name, double v, double lo, double hi) {
        c.check(v >= lo && v <= hi, fmt::format("{} saving {:.1f}% outside [{:.0f}%, {:.0f}%]", name, 100 * v,
                                                100 * lo, 100 * hi));
        c.note(fmt::format("{} saving {:.1f}%", name, 100 * v));
    };
    band("A half load vs A full", 1.0 - a_half / a_full, 0.12, 0.25);
    band("E half load vs A half load", 1.0 - e_half / a_half, 0.15, 0.30);
    band("K half load vs A half load", 1.0 - k_half / a_half, 0.30, 0.46);
    band("F at 4 UEs vs A full", 1.0 - f_quarter / a_full, 0.48, 0.62);
}

const MetricSummary& cell_se(const RunResult& r, ArrayType t, int n)
{
    const auto* cell = r.find(t, n);
    if (!cell)
        throw std::runtime_error(fmt::format("missing cell {}@{}", to_string(t), n));
    return cell->cell_se;
}

double mean_se(const RunResult& r, ArrayType t, int n) { return cell_se(r, t, n).mean; }

void simulation_trends(Criterion& c, const RunResult& r)
{
    c.check(r.config.n_drops >= 20, "at least 20 drops");
    c.check(!r.any_failed(), "no failed cells");
    const auto& ues = r.config.ues;

    for (auto t : {ArrayType::A, ArrayType::E, ArrayType::F}) {
        for (std::size_t i = 1; i < ues.size(); ++i) {
            const double lo = mean_se(r, t, ues[i - 1]);
            const double hi = mean_se(r, t, ues[i]);
            const double tol = std::max(cell_se(r, t, ues[i - 1]).stderr_mean, cell_se(r, t, ues[i]).stderr_mean);
            c.check(hi >= lo - tol, fmt::format("(a) {} SE {}->{}: {:.3f} -> {:.3f} (se {:.3f})", to_string(t),
                                                ues[i - 1], ues[i], lo, hi, tol));
        }
    }
    for (int n : ues) {
        std::vector<double> v;
        for (auto t : {ArrayType::A, ArrayType::E, ArrayType::F})
            v.push_back(mean_se(r, t, n));
        const auto [mn, mx] = std::minmax_element(v.begin(), v.end());
        const double spread = (*mx - *mn) / *mn;
        c.check(spread <= 0.10, fmt::format("(b) A/E/F spread at {} UEs {:.1f}%", n, 100 * spread));
        if (n == ues.back())
            c.note(fmt::format("(b) A/E/F spread at {} UEs: {:.1f}%", n, 100 * spread));
    }
    const double gain_a = mean_se(r, ArrayType::A, 16) - mean_se(r, ArrayType::A, 8);
    const double gain_l = mean_se(r, ArrayType::L, 16) - mean_se(r, ArrayType::L, 8);
    c.check(gain_a > 0.0 && gain_l < 0.15 * gain_a,
            fmt::format("(c) L gain 8->16 {:.3f} vs A gain {:.3f} (ratio {:.2f}, limit 0.15)", gain_l, gain_a,
                        gain_l / gain_a));
    c.note(fmt::format("(c) SE gain 8->16: A {:.2f}, L {:.2f}, ratio {:.2f}", gain_a, gain_l, gain_l / gain_a));
    {
        std::vector<double> v;
        for (auto t : kAllArrayTypes)
            v.push_back(mean_se(r, t, 1));
        const auto [mn, mx] = std::minmax_element(v.begin(), v.end());
        const double spread = (*mx - *mn) / *mn;
        c.check(spread <= 0.15, fmt::format("(d) spread at 1 UE {:.1f}%", 100 * spread));
        c.note(fmt::format("(d) spread at 1 UE: {:.1f}%", 100 * spread));
    }
}

void throughput_maintenance(Criterion& c, const RunResult& r)
{
    const PerfTable table = r.perf_table();
    const auto tput = [&](ArrayType t, int n) {
        const auto* e = table.find(t, n);
        if (!e)
            throw std::runtime_error(fmt::format("perf table lacks {}@{}", to_string(t), n));
        return e->ue_throughput_mbps;
    };
    const double target = tput(ArrayType::A, 12);
    c.note(fmt::format("target (A at 12 UEs) {:.2f} Mb/s; K@8 {:.2f}, L@4 {:.2f}, F@4 {:.2f}", target,
                       tput(ArrayType::K, 8), tput(ArrayType::L, 4), tput(ArrayType::F, 4)));
    c.check(tput(ArrayType::K, 8) >= target, "K at 8 UEs meets the A-at-12 target");
    c.check(tput(ArrayType::L, 4) >= target, "L at 4 UEs meets the target");
    c.check(tput(ArrayType::F, 4) >= target, "F at 4 UEs meets the target");

    const std::vector<ArrayType> catalog(kAllArrayTypes.begin(), kAllArrayTypes.end());
    for (int load : {8, 4}) {
        const auto d = select_config(load, target, table, catalog);
        const double a_power = table.find(ArrayType::A, load)->power.total_w;
        const double saving = 1.0 - d.predicted_power_w / a_power;
        c.note(fmt::format("load {}: chose {} at {:.1f} W, saving {:.1f}% vs A", load, to_string(d.chosen),
                           d.predicted_power_w, 100 * saving));
        c.check(d.target_met, fmt::format("load {}: target met", load));
        c.check(d.chosen != ArrayType::A, fmt::format("load {}: non-A type chosen", load));
        c.check(saving > 0.30, fmt::format("load {}: saving {:.1f}% > 30%", load, 100 * saving));
    }
}

arma::cx_mat gaussian(Rng& rng, int rows, int cols, double var = 1.0)
{
    std::normal_distribution<double> g(0.0, std::sqrt(var / 2.0));
    arma::cx_mat m(rows, cols);
    for (auto& x : m)
        x = {g(rng), g(rng)};
    return m;
}

ChannelEstimate estimate_of(int ue, arma::cx_mat h)
{
    ChannelEstimate e;
    e.ue = ue;
    e.h_hat_port = std::move(h);
    return e;
}

// Lexicographically best orthogonal-component sequence over all orderings.
std::vector<int> exhaustive_sus(const std::vector<arma::cx_rowvec>& cand, int k)
{
    std::vector<int> idx(cand.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::vector<double> best_seq;
    std::vector<int> best;
    do {
        std::vector<double> seq;
        std::vector<arma::cx_rowvec> basis;
        for (int i = 0; i < k; ++i) {
            arma::cx_rowvec g = cand[idx[i]];
            for (const auto& q : basis)
                g -= arma::as_scalar(g * q.t()) * q;
            seq.push_back(arma::norm(g));
            basis.push_back(g / arma::norm(g));
        }
        if (best.empty() || seq > best_seq) {
            best_seq = seq;
            best.assign(idx.begin(), idx.begin() + k);
        }
    } while (std::next_permutation(idx.begin(), idx.end()));
    return best;
}

void precoder_oracles(Criterion& c)
{
    double worst_zf = 0.0;
    for (int t = 0; t < 1000; ++t) {
        Rng rng = make_rng(101, Stream::kTest, {static_cast<std::uint64_t>(t)});
        const int k = 1 + t % 8;
        const arma::cx_mat h = gaussian(rng, k, 16 + 16 * (t % 4));
        const auto p = zf_precode(h, 1.0);
        const arma::cx_mat g = h * p.w;
        const double rel = arma::norm(g - arma::diagmat(g), "fro") / arma::norm(arma::diagvec(g));
        worst_zf = std::max(worst_zf, rel);
    }
    c.check(worst_zf < 1e-9, fmt::format("ZF worst relative residual {:.2e}", worst_zf));
    c.note(fmt::format("ZF worst relative off-diagonal residual over 1000 trials: {:.2e}", worst_zf));

    double worst_sinr_db = 1e9;
    for (int t = 0; t < 200; ++t) {
        Rng rng = make_rng(102, Stream::kTest, {static_cast<std::uint64_t>(t)});
        const int n = 2 + t % 15;
        PortChannelSet truth(n, 1);
        std::vector<ChannelEstimate> est;
        for (int u = 0; u < n; ++u) {
            truth.at(u, 0) = gaussian(rng, 2, 64);
            est.push_back(estimate_of(u, truth.at(u, 0)));
        }
        SusOptions o;
        o.k_max = 64;
        auto d = sus_schedule(est, o);
        SectorTransmission tx;
        tx.sector = 0;
        tx.precoder = zf_precode_dropping(d, 1.0);
        tx.selected = d.selected;
        const std::vector<SectorTransmission> txs = {tx};
        // with negligible noise the SINR is the inverse of the intra-cell leakage
        const auto sinr = dl_sinr(txs, truth, 1e-30);
        for (double v : sinr[0])
            worst_sinr_db = std::min(worst_sinr_db, linear_to_db(v));
    }
    c.check(worst_sinr_db > 40.0, fmt::format("perfect-CSI worst SIR {:.1f} dB", worst_sinr_db));
    c.note(fmt::format("perfect-CSI intra-cell interference at most {:.1f} dB below signal", worst_sinr_db));

    int matched = 0;
    const int instances = 200;
    for (int inst = 0; inst < instances; ++inst) {
        Rng rng = make_rng(103, Stream::kTest, {static_cast<std::uint64_t>(inst)});
        std::vector<ChannelEstimate> est;
        std::vector<arma::cx_rowvec> cand;
        for (int u = 0; u < 5; ++u) {
            est.push_back(estimate_of(u, gaussian(rng, 2, 6)));
            const auto& h = est.back().h_hat_port;
            cand.push_back(arma::norm(h.row(1)) > arma::norm(h.row(0)) ? h.row(1) : h.row(0));
        }
        SusOptions o;
        o.k_max = 3;
        o.alpha = 1.0;
        const auto d = sus_schedule(est, o);
        const auto oracle = exhaustive_sus(cand, 3);
        bool same = d.k() == 3;
        for (int i = 0; same && i < 3; ++i)
            same = d.selected[i].ue == oracle[i];
        matched += same;
    }
    c.check(matched == instances, fmt::format("SUS matched exhaustive search on {}/{}", matched, instances));
    c.note(fmt::format("SUS matched exhaustive search on {}/{} instances", matched, instances));
}

void estimation_oracles(Criterion& c)
{
    const auto layout = build_layout(500.0, 25.0);

    {
        const auto drop = drop_ues(layout, 3, 4, ChannelParams{}, ElementPattern{});
        const auto plan = assign_pilots(drop, layout);
        Rng rng = make_rng(201, Stream::kTest, {1});
        PortChannelSet truth(drop.n_ues(), kSectorCount);
        for (int u = 0; u < drop.n_ues(); ++u) {
            const bool home = layout.sectors[drop.ues[u].serving_sector].site == 0;
            for (int s = 0; s < kSectorCount; ++s)
                truth.at(u, s) = home || layout.sectors[s].site != 0 ? gaussian(rng, 2, 16, 1e-9)
                                                                     : arma::cx_mat(2, 16, arma::fill::zeros);
        }
        std::vector<double> q(drop.n_ues(), 0.1);
        double worst = 0.0;
        for (int s = 0; s < kSectorsPerSite; ++s)
            for (const auto& e : estimate_channels(s, drop, layout, plan, q, truth, 0.0, 1))
                worst = std::max(worst, arma::norm(e.h_hat_port - truth.at(e.ue, s), "fro") /
                                            arma::norm(truth.at(e.ue, s), "fro"));
        c.check(worst <= 1e-12, fmt::format("noiseless relative error {:.2e}", worst));
        c.note(fmt::format("noiseless single-cell relative error {:.2e}", worst));
    }

    {
        const auto drop = drop_ues(layout, 2, 9, ChannelParams{}, ElementPattern{});
        const auto plan = assign_pilots(drop, layout);
        const int ports = 16;
        const int sector = 0;
        Rng prng = make_rng(202, Stream::kTest, {2});
        std::uniform_real_distribution<double> upow(0.01, 1.0);
        std::vector<double> q(drop.n_ues());
        std::vector<double> var(drop.n_ues());
        for (auto& x : q)
            x = upow(prng);
        for (auto& v : var)
            v = upow(prng);
        const int u0 = drop.sector_ues[sector][0];
        // sum over co-pilot users of (a_j / a_k)^2 E||h_j||^2
        double closed_form = 0.0;
        for (int j = 0; j < drop.n_ues(); ++j) {
            if (layout.sectors[drop.ues[j].serving_sector].site == 0)
                continue;
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b)
                    if (plan.sequence_of(j, b) == plan.sequence_of(u0, a))
                        closed_form += q[j] / q[u0] * var[j] * ports;
        }
        double acc = 0.0;
        const int trials = 500;
        Rng rng = make_rng(203, Stream::kTest, {3});
        for (int t = 0; t < trials; ++t) {
            PortChannelSet truth(drop.n_ues(), kSectorCount);
            for (int u = 0; u < drop.n_ues(); ++u)
                truth.at(u, sector) = gaussian(rng, 2, ports, var[u]);
            const auto est = estimate_channels(sector, drop, layout, plan, q, truth, 0.0, 1);
            acc += std::pow(arma::norm(est.front().h_hat_port - truth.at(u0, sector), "fro"), 2);
        }
        const double empirical = acc / trials;
        const double rel = std::abs(empirical - closed_form) / closed_form;
        c.check(closed_form > 0.0 && rel <= 0.05,
                fmt::format("contamination {:.4f} vs closed form {:.4f} ({:.1f}%)", empirical, closed_form, 100 * rel));
        c.note(fmt::format("contamination second moment {:.4f} vs closed form {:.4f} ({:.2f}% off)", empirical,
                           closed_form, 100 * rel));
    }
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void determinism(Criterion& c)
{
    ScenarioConfig cfg;
    cfg.types = {ArrayType::A, ArrayType::K, ArrayType::L};
    cfg.ues = {1, 4, 8};
    cfg.n_drops = 3;
    cfg.n_blocks = 2;
    cfg.seed = 2024;
    const fs::path root = fs::current_path() / "acceptance_determinism";
    fs::remove_all(root);
    emit_reports(run_sweep(cfg, 1), root / "w1");
    emit_reports(run_sweep(cfg, 4), root / "w4");
    int files = 0;
    for (const auto& e : fs::directory_iterator(root / "w1")) {
        const auto other = root / "w4" / e.path().filename();
        c.check(fs::exists(other), e.path().filename().string() + " missing from the 4-worker run");
        c.check(slurp(e.path()) == slurp(other), e.path().filename().string() + " differs");
        ++files;
    }
    c.check(files >= 10, "all report files produced");
    c.note(fmt::format("{} report files identical for 1 and 4 workers", files));
}

} // namespace

int main(int argc, char** argv)
{
    // An optional argument limits the drop count, for quick manual runs only.
    std::optional<int> drops;
    if (argc > 1)
        drops = std::stoi(argv[1]);

    bool ok = true;
    ok &= run(1, 1.0, power_anchors);
    ok &= run(2, 1.0, power_totals);
    ok &= run(3, 1.0, power_savings);

    ScenarioConfig cfg;
    if (drops)
        cfg.n_drops = *drops;
    const int workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    std::optional<RunResult> sweep;
    const auto t0 = std::chrono::steady_clock::now();
    std::string sweep_error;
    try {
        sweep = run_sweep(cfg, workers);
        emit_reports(*sweep, fs::current_path() / "acceptance_sweep");
    } catch (const std::exception& e) {
        sweep_error = e.what();
    }
    const double sweep_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    ok &= run(4, std::nullopt, [&](Criterion& c) {
        c.note(fmt::format("default sweep: {} drops x {} blocks, {} workers, {:.1f} s", cfg.n_drops,
                           cfg.n_blocks * cfg.n_freq, workers, sweep_s));
        c.check(sweep_error.empty(), "sweep raised: " + sweep_error);
        c.check(sweep_s <= 15 * 60.0, fmt::format("full sweep took {:.0f} s, budget 900 s", sweep_s));
        if (sweep)
            simulation_trends(c, *sweep);
    });
    ok &= run(5, std::nullopt, [&](Criterion& c) {
        c.check(sweep.has_value(), "default sweep unavailable");
        if (sweep)
            throughput_maintenance(c, *sweep);
    });
    ok &= run(6, 30.0, precoder_oracles);
    ok &= run(7, 30.0, estimation_oracles);
    ok &= run(8, 600.0, determinism);

    std::cout << (ok ? "all acceptance criteria passed\n" : "some acceptance criteria failed\n");
    return ok ? 0 : 1;
}
