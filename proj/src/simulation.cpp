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

#include "mmimo/simulation.hpp"

#include "mmimo/mu_mimo.hpp"
#include "mmimo/parallel.hpp"
#include "mmimo/rng.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <array>

namespace mmimo {

namespace {

double percentile(const std::vector<double>& sorted, double p)
{
    if (sorted.size() == 1)
        return sorted.front();
    const double pos = p * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double sample_stderr(std::span<const double> x)
{
    if (x.size() < 2)
        return 0.0;
    const double m = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
    double ss = 0.0;
    for (double v : x)
        ss += (v - m) * (v - m);
    return std::sqrt(ss / static_cast<double>(x.size() - 1) / static_cast<double>(x.size()));
}

double sector_power_w(const ScenarioConfig& config, const ArrayConfig& array)
{
    return dbm_to_watt(config.phy.bs_power_dbm_for(array.n_elements));
}

} // namespace

MetricSummary summarize(std::span<const double> samples, std::span<const double> group_means)
{
    MetricSummary s;
    s.count = static_cast<int>(samples.size());
    if (samples.empty())
        return s;
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    s.mean = std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(samples.size());
    s.stderr_mean = group_means.empty() ? sample_stderr(samples) : sample_stderr(group_means);
    s.p5 = percentile(sorted, 0.05);
    s.p50 = percentile(sorted, 0.50);
    s.p95 = percentile(sorted, 0.95);
    return s;
}

DropContext prepare_drop(const ScenarioConfig& config, const NetworkLayout& layout, int n_per_sector,
                         int drop_index)
{
    DropContext ctx;
    ctx.n_per_sector = n_per_sector;
    ctx.drop_index = drop_index;
    ctx.seed = derive_seed(config.seed, {static_cast<std::uint64_t>(Stream::kDrop),
                                         static_cast<std::uint64_t>(n_per_sector),
                                         static_cast<std::uint64_t>(drop_index)});

    DropOptions opts;
    opts.min_distance_m = config.min_distance_m;
    opts.max_candidates = config.max_drop_candidates;
    ctx.drop = drop_ues(layout, n_per_sector, ctx.seed, config.channel, config.array.pattern, opts);

    const int n_ues = ctx.drop.n_ues();
    ctx.links.reserve(static_cast<std::size_t>(n_ues) * kSectorCount);
    for (const auto& ue : ctx.drop.ues)
        for (int s = 0; s < kSectorCount; ++s)
            ctx.links.push_back(link_state(layout, ue.position, ue.seed_id, s, config.channel,
                                           config.array.pattern, ctx.seed, LinkDetail::kFull));

    ctx.pilots = assign_pilots(ctx.drop, layout);

    std::vector<double> serving_cl(n_ues);
    ctx.interference_cl.assign(n_ues, 0.0);
    for (int u = 0; u < n_ues; ++u) {
        const int serving = ctx.drop.ues[u].serving_sector;
        serving_cl[u] = ctx.link(u, serving).coupling_loss_db;
        for (int s = 0; s < kSectorCount; ++s)
            if (s != serving)
                ctx.interference_cl[u] += db_to_linear(-ctx.link(u, s).coupling_loss_db);
    }
    ctx.pilot_power = pilot_tx_psd(serving_cl, config.ul);

    // The PSD is specified per 10 MHz; both UE antennas share it.
    const double bw_scale = config.bandwidth_mhz / 10.0;
    ctx.pilot_power_w.resize(n_ues);
    for (int u = 0; u < n_ues; ++u)
        ctx.pilot_power_w[u] = dbm_to_watt(ctx.pilot_power.psd_dbm_10mhz[u]) * bw_scale / kUeAntennas;
    return ctx;
}

std::vector<SectorSample> simulate_drop(const ScenarioConfig& config, const NetworkLayout& layout,
                                        const DropContext& ctx, const ArrayConfig& array)
{
    const int n_ues = ctx.drop.n_ues();
    const int n_blocks = config.n_blocks * config.n_freq;
    const double bw_hz = config.bandwidth_mhz * 1e6;
    const double p_sector = sector_power_w(config, array);
    const double ul_noise = noise_power_w(bw_hz, config.ul.bs_noise_figure_db);
    const double dl_noise = noise_power_w(bw_hz, config.phy.ue_noise_figure_db);

    // All blocks of every link in one pass; blocks are the outer index here.
    std::vector<PortChannelSet> truth(n_blocks, PortChannelSet(n_ues, kSectorCount));
    for (int u = 0; u < n_ues; ++u) {
        for (int s = 0; s < kSectorCount; ++s) {
            auto h = port_channels(ctx.link(u, s), array, 0, n_blocks);
            for (int b = 0; b < n_blocks; ++b)
                truth[b].at(u, s) = std::move(h[b]);
        }
    }

    SusOptions sus;
    sus.k_max = config.sched.k_max > 0 ? std::min(config.sched.k_max, array.n_ports) : array.n_ports;
    sus.alpha = config.sched.alpha;
    sus.stop_on_throughput_decrease = config.sched.stop_on_throughput_decrease;
    sus.sector_power_w = p_sector;
    sus.se_cap = config.phy.se_cap;
    sus.max_condition = config.phy.max_condition;

    std::vector<SectorSample> out;
    out.reserve(static_cast<std::size_t>(n_blocks) * kSectorCount);
    for (int b = 0; b < n_blocks; ++b) {
        std::vector<SectorTransmission> tx;
        tx.reserve(kSectorCount);
        for (int s = 0; s < kSectorCount; ++s) {
            const auto noise_seed =
                derive_seed(ctx.seed, {static_cast<std::uint64_t>(Stream::kPilotNoise), static_cast<std::uint64_t>(b),
                                       static_cast<std::uint64_t>(s)});
            auto est = estimate_channels(s, ctx.drop, layout, ctx.pilots, ctx.pilot_power_w, truth[b], ul_noise,
                                         noise_seed);
            std::vector<double> impairment(est.size());
            for (std::size_t i = 0; i < est.size(); ++i)
                impairment[i] = dl_noise + p_sector * ctx.interference_cl[est[i].ue];
            ScheduleDecision decision = sus_schedule(est, sus, impairment);
            SectorTransmission t;
            t.sector = s;
            t.precoder = zf_precode_dropping(decision, p_sector, sus.max_condition);
            t.selected = decision.selected;
            tx.push_back(std::move(t));
        }
        const auto sinr = dl_sinr(tx, truth[b], dl_noise);
        for (int s = 0; s < kSectorCount; ++s) {
            const auto m = sector_metrics(tx[s].selected, sinr[s], bw_hz, config.phy.overhead, ctx.n_per_sector,
                                          config.phy.se_cap);
            SectorSample sample;
            sample.drop = ctx.drop_index;
            sample.block = b;
            sample.sector = s;
            sample.n_scheduled = static_cast<int>(m.per_ue.size());
            sample.cell_se_bps_hz = m.cell_se_bps_hz;
            sample.cell_throughput_mbps = m.cell_throughput_mbps;
            sample.avg_ue_throughput_mbps = m.avg_ue_throughput_mbps.value_or(0.0);
            sample.avg_scheduled_ue_throughput_mbps = m.avg_scheduled_ue_throughput_mbps;
            for (const auto& u : m.per_ue)
                sample.sinr_db.push_back(u.sinr_db);
            out.push_back(std::move(sample));
        }
    }
    return out;
}

const CellResult* RunResult::find(ArrayType type, int n_ues) const
{
    for (const auto& c : cells)
        if (c.type == type && c.n_ues == n_ues)
            return &c;
    return nullptr;
}

bool RunResult::any_failed() const
{
    return std::any_of(cells.begin(), cells.end(), [](const CellResult& c) { return c.failed(); });
}

PerfTable RunResult::perf_table() const
{
    PerfTable t;
    t.reference_type = config.policy.reference_type;
    t.reference_load = *std::max_element(config.ues.begin(), config.ues.end());
    for (const auto& c : cells) {
        if (c.samples.empty())
            continue;
        PerfEntry e;
        e.type = c.type;
        e.n_ues = c.n_ues;
        e.n_elements = c.n_elements;
        e.n_ports = c.n_ports;
        e.cell_se_bps_hz = c.cell_se.mean;
        e.ue_throughput_mbps = c.ue_throughput.mean;
        e.tx_power_dbm = c.tx_power_dbm;
        e.power = c.power;
        e.ee_w_per_ue_mbps = c.ee_w_per_ue_mbps;
        t.add(e);
    }
    return t;
}

namespace {

struct DropOutcome {
    std::vector<SectorSample> samples;
    std::string error;
};

void finalize_cell(CellResult& cell)
{
    std::vector<double> se, tput, sinr;
    std::map<int, std::array<double, 3>> drop_sums; // se, tput, sinr
    std::map<int, std::array<int, 2>> drop_counts;  // sectors, layers
    for (const auto& s : cell.samples) {
        se.push_back(s.cell_se_bps_hz);
        tput.push_back(s.avg_ue_throughput_mbps);
        auto& sums = drop_sums[s.drop];
        auto& counts = drop_counts[s.drop];
        sums[0] += s.cell_se_bps_hz;
        sums[1] += s.avg_ue_throughput_mbps;
        counts[0] += 1;
        for (double v : s.sinr_db) {
            sinr.push_back(v);
            sums[2] += v;
            counts[1] += 1;
        }
    }
    std::vector<double> se_g, tput_g, sinr_g;
    for (const auto& [d, sums] : drop_sums) {
        const auto& n = drop_counts[d];
        se_g.push_back(sums[0] / n[0]);
        tput_g.push_back(sums[1] / n[0]);
        if (n[1] > 0)
            sinr_g.push_back(sums[2] / n[1]);
    }
    cell.cell_se = summarize(se, se_g);
    cell.ue_throughput = summarize(tput, tput_g);
    cell.sinr_db = summarize(sinr, sinr_g);
}

} // namespace

RunResult run_sweep(const ScenarioConfig& config, int workers)
{
    validate(config);
    RunResult result;
    result.config = config;

    const NetworkLayout layout = build_layout(config.isd_m, config.bs_height_m, config.array.downtilt_deg);
    std::vector<ArrayConfig> arrays;
    for (auto t : config.types)
        arrays.push_back(build_array(t, config.array));

    const int n_loads = static_cast<int>(config.ues.size());
    const int n_types = static_cast<int>(config.types.size());
    const std::size_t n_tasks = static_cast<std::size_t>(n_loads) * config.n_drops;

    // outcomes[task][type]; a task is one (load, drop) pair
    std::vector<std::vector<DropOutcome>> outcomes(n_tasks, std::vector<DropOutcome>(n_types));
    parallel_for(n_tasks, workers, [&](std::size_t task) {
        const int load = static_cast<int>(task) / config.n_drops;
        const int drop = static_cast<int>(task) % config.n_drops;
        DropContext ctx;
        try {
            ctx = prepare_drop(config, layout, config.ues[load], drop);
        } catch (const std::exception& e) {
            for (auto& o : outcomes[task])
                o.error = "drop " + std::to_string(drop) + ": " + e.what();
            return;
        }
        for (int t = 0; t < n_types; ++t) {
            try {
                outcomes[task][t].samples = simulate_drop(config, layout, ctx, arrays[t]);
            } catch (const std::exception& e) {
                outcomes[task][t].error = "drop " + std::to_string(drop) + ": " + e.what();
            }
        }
    });

    const PaParams pa = config.power.resolved_pa();
    for (int t = 0; t < n_types; ++t) {
        for (int l = 0; l < n_loads; ++l) {
            CellResult cell;
            cell.type = config.types[t];
            cell.n_ues = config.ues[l];
            cell.n_elements = arrays[t].n_elements;
            cell.n_ports = arrays[t].n_ports;
            for (int d = 0; d < config.n_drops; ++d) {
                auto& o = outcomes[static_cast<std::size_t>(l) * config.n_drops + d][t];
                if (!o.error.empty()) {
                    ++cell.failed_drops;
                    cell.errors.push_back(o.error);
                    continue;
                }
                cell.samples.insert(cell.samples.end(), std::make_move_iterator(o.samples.begin()),
                                    std::make_move_iterator(o.samples.end()));
            }
            finalize_cell(cell);
            cell.tx_power_dbm = tx_power_for_load(cell.n_ues, config.power.ref_ues, config.power.anchor.total_tx_dbm);
            cell.power = total_power(arrays[t], {cell.n_ues, cell.tx_power_dbm}, config.power.blocks, pa);
            if (!cell.samples.empty())
                cell.ee_w_per_ue_mbps = energy_efficiency(cell.power, cell.ue_throughput.mean, cell.n_ues);
            result.cells.push_back(std::move(cell));
        }
    }

    const int full_load = *std::max_element(config.ues.begin(), config.ues.end());
    const CellResult* ref = result.find(config.policy.reference_type, full_load);
    if (ref && ref->ee_w_per_ue_mbps) {
        const double base = *ref->ee_w_per_ue_mbps;
        for (auto& c : result.cells)
            if (c.ee_w_per_ue_mbps)
                c.ee_relative = *c.ee_w_per_ue_mbps / base;
    }
    return result;
}

} // namespace mmimo
