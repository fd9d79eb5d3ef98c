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

#include "mmimo/mu_mimo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mmimo {

std::optional<double> expected_sum_se(const arma::cx_mat& rows, std::span<const double> impairment_w,
                                      double sector_power_w, double se_cap, double max_condition)
{
    if (rows.n_rows == 0)
        return 0.0;
    Precoder pre;
    try {
        pre = zf_precode(rows, sector_power_w, max_condition);
    } catch (const PrecodingError&) {
        return std::nullopt;
    }
    double sum = 0.0;
    for (arma::uword k = 0; k < rows.n_rows; ++k) {
        const double gain = std::norm(arma::as_scalar(rows.row(k) * pre.w.col(k)));
        sum += truncated_shannon_se(pre.per_layer_power_w * gain / impairment_w[k], se_cap);
    }
    return sum;
}

ScheduleDecision sus_schedule(std::span<const ChannelEstimate> estimates, const SusOptions& options,
                              std::span<const double> impairment_w)
{
    if (estimates.empty())
        throw SchedulingError("SUS called with no channel estimates");
    if (!(options.alpha > 0.0 && options.alpha <= 1.0))
        throw ConfigError("sched.alpha must lie in (0, 1]");
    const bool use_stop_rule = options.stop_on_throughput_decrease && !impairment_w.empty();
    if (use_stop_rule && impairment_w.size() != estimates.size())
        throw SchedulingError("impairment vector does not match the estimate list");

    const std::size_t n = estimates.size();
    const arma::uword n_ports = estimates.front().h_hat_port.n_cols;
    const int k_max = std::min<int>(options.k_max, static_cast<int>(n_ports));

    std::vector<arma::cx_rowvec> cand(n);
    std::vector<int> cand_antenna(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& h = estimates[i].h_hat_port;
        const int a = arma::norm(h.row(1)) > arma::norm(h.row(0)) ? 1 : 0;
        cand[i] = h.row(a);
        cand_antenna[i] = a;
    }

    ScheduleDecision decision;
    decision.rows.set_size(0, n_ports);
    std::vector<arma::cx_rowvec> basis;
    std::vector<bool> in_pool(n, true);
    std::vector<double> chosen_impairment;
    double current_se = 0.0;

    while (decision.k() < k_max) {
        int best = -1;
        double best_norm = 0.0;
        arma::cx_rowvec best_orth;
        for (std::size_t i = 0; i < n; ++i) {
            if (!in_pool[i])
                continue;
            arma::cx_rowvec g = cand[i];
            for (const auto& q : basis)
                g -= arma::as_scalar(g * q.t()) * q;
            const double hn = arma::norm(cand[i]);
            const double gn = arma::norm(g);
            if (hn == 0.0 || gn == 0.0)
                continue;
            const double proj = std::sqrt(std::max(0.0, 1.0 - (gn * gn) / (hn * hn)));
            if (proj >= options.alpha)
                continue;
            if (gn > best_norm) {
                best_norm = gn;
                best = static_cast<int>(i);
                best_orth = g;
            }
        }
        if (best < 0)
            break;

        if (use_stop_rule) {
            const arma::cx_mat trial = arma::join_cols(decision.rows, cand[best]);
            chosen_impairment.push_back(impairment_w[best]);
            const auto se = expected_sum_se(trial, chosen_impairment, options.sector_power_w, options.se_cap,
                                            options.max_condition);
            if (!se || *se < current_se) {
                chosen_impairment.pop_back();
                break;
            }
            current_se = *se;
        }

        decision.selected.push_back({estimates[best].ue, cand_antenna[best]});
        decision.rows = arma::join_cols(decision.rows, cand[best]);
        basis.push_back(best_orth / best_norm);
        in_pool[best] = false;
    }
    return decision;
}

Precoder zf_precode(const arma::cx_mat& h, double sector_power_w, double max_condition)
{
    Precoder pre;
    const arma::uword k = h.n_rows;
    if (k == 0) {
        pre.w.set_size(h.n_cols, 0);
        return pre;
    }
    const arma::vec s = arma::svd(h);
    if (s.min() <= 0.0 || s.max() / s.min() > max_condition)
        throw PrecodingError("channel rows are rank deficient (condition number above threshold)");

    const arma::cx_mat gram = h * h.t();
    arma::cx_mat w = arma::solve(gram, h).t(); // H^H (H H^H)^-1
    for (arma::uword c = 0; c < k; ++c)
        w.col(c) /= arma::norm(w.col(c));
    pre.w = std::move(w);
    pre.per_layer_power_w = sector_power_w / static_cast<double>(k);
    return pre;
}

Precoder zf_precode_dropping(ScheduleDecision& decision, double sector_power_w, double max_condition)
{
    for (;;) {
        try {
            return zf_precode(decision.rows, sector_power_w, max_condition);
        } catch (const PrecodingError&) {
            arma::uword weakest = 0;
            double weakest_norm = arma::norm(decision.rows.row(0));
            for (arma::uword r = 1; r < decision.rows.n_rows; ++r) {
                const double nr = arma::norm(decision.rows.row(r));
                if (nr < weakest_norm) {
                    weakest_norm = nr;
                    weakest = r;
                }
            }
            decision.rows.shed_row(weakest);
            decision.selected.erase(decision.selected.begin() + static_cast<long>(weakest));
        }
    }
}

std::vector<std::vector<double>> dl_sinr(std::span<const SectorTransmission> tx, const PortChannelSet& truth,
                                         double noise_w)
{
    std::vector<std::vector<double>> out(tx.size());
    for (std::size_t s = 0; s < tx.size(); ++s) {
        const auto& own = tx[s];
        out[s].resize(own.selected.size());
        for (std::size_t k = 0; k < own.selected.size(); ++k) {
            const auto [ue, ant] = own.selected[k];
            double signal = 0.0;
            double interference = 0.0;
            for (std::size_t t = 0; t < tx.size(); ++t) {
                const auto& other = tx[t];
                if (other.precoder.k() == 0)
                    continue;
                const arma::cx_rowvec y = truth.at(ue, other.sector).row(ant) * other.precoder.w;
                for (arma::uword j = 0; j < y.n_elem; ++j) {
                    const double p = other.precoder.per_layer_power_w * std::norm(y(j));
                    if (t == s && j == k)
                        signal = p;
                    else
                        interference += p;
                }
            }
            out[s][k] = signal / (interference + noise_w);
        }
    }
    return out;
}

double truncated_shannon_se(double sinr, double cap)
{
    return std::min(std::log2(1.0 + std::max(sinr, 0.0)), cap);
}

LinkMetrics sector_metrics(std::span<const ScheduledUe> selected, std::span<const double> sinr,
                           double bandwidth_hz, double overhead_fraction, int n_active_ues, double se_cap)
{
    if (!(overhead_fraction >= 0.0 && overhead_fraction < 1.0))
        throw std::invalid_argument("overhead fraction must lie in [0, 1)");
    if (selected.size() != sinr.size())
        throw std::invalid_argument("one SINR value per scheduled UE is required");

    LinkMetrics m;
    const double data_fraction = 1.0 - overhead_fraction;
    for (std::size_t k = 0; k < selected.size(); ++k) {
        UeLinkMetrics u;
        u.ue = selected[k].ue;
        u.sinr_db = linear_to_db(sinr[k]);
        u.se_bps_hz = truncated_shannon_se(sinr[k], se_cap) * data_fraction;
        u.throughput_mbps = bandwidth_hz * u.se_bps_hz / 1e6;
        m.cell_se_bps_hz += u.se_bps_hz;
        m.cell_throughput_mbps += u.throughput_mbps;
        m.per_ue.push_back(u);
    }
    if (!m.per_ue.empty())
        m.avg_scheduled_ue_throughput_mbps = m.cell_throughput_mbps / static_cast<double>(m.per_ue.size());
    if (n_active_ues > 0)
        m.avg_ue_throughput_mbps = m.cell_throughput_mbps / n_active_ues;
    return m;
}

} // namespace mmimo
