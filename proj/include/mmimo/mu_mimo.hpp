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

#ifndef MMIMO_MU_MIMO_HPP
#define MMIMO_MU_MIMO_HPP

#include "mmimo/channel.hpp"
#include "mmimo/ul_sounding.hpp"

#include <armadillo>

#include <optional>
#include <span>
#include <vector>

namespace mmimo {

struct ScheduledUe {
    int ue = 0;
    int antenna = 0;
};

struct ScheduleDecision {
    std::vector<ScheduledUe> selected;
    arma::cx_mat rows; // K x P estimated channel rows, in selection order

    int k() const { return static_cast<int>(selected.size()); }
};

struct SusOptions {
    int k_max = 64;
    double alpha = 0.5;
    bool stop_on_throughput_decrease = true;
    double sector_power_w = 1.0;
    double se_cap = 8.0;
    double max_condition = 1e6;
};

// Semi-orthogonal user selection. Each UE contributes the estimated row of
// its stronger antenna. `impairment_w` (noise plus expected other-cell
// interference per estimate) feeds the estimated-throughput stopping rule;
// an empty span disables that rule.
ScheduleDecision sus_schedule(std::span<const ChannelEstimate> estimates, const SusOptions& options,
                              std::span<const double> impairment_w = {});

// Sum of truncated-Shannon rates the scheduler expects for `rows` under ZF
// with equal power. Returns nullopt when the rows are not precodable.
std::optional<double> expected_sum_se(const arma::cx_mat& rows, std::span<const double> impairment_w,
                                      double sector_power_w, double se_cap, double max_condition);

struct Precoder {
    arma::cx_mat w; // P x K, unit-norm columns
    double per_layer_power_w = 0.0;

    int k() const { return static_cast<int>(w.n_cols); }
};

// Zero forcing with equal power per layer. Throws PrecodingError when the
// condition number of the rows exceeds `max_condition`.
Precoder zf_precode(const arma::cx_mat& h_hat_rows, double sector_power_w, double max_condition = 1e6);

// Drops the weakest-norm UE from `decision` until zf_precode succeeds.
Precoder zf_precode_dropping(ScheduleDecision& decision, double sector_power_w, double max_condition = 1e6);

struct SectorTransmission {
    int sector = 0;
    std::vector<ScheduledUe> selected;
    Precoder precoder;
};

// SINR (linear) per scheduled layer, indexed [transmission][layer]. Each UE
// receives on the antenna chosen at scheduling time.
std::vector<std::vector<double>> dl_sinr(std::span<const SectorTransmission> transmissions,
                                         const PortChannelSet& truth, double noise_w);

double truncated_shannon_se(double sinr, double cap = 8.0);

struct UeLinkMetrics {
    int ue = 0;
    double sinr_db = 0.0;
    double se_bps_hz = 0.0;
    double throughput_mbps = 0.0;
};

struct LinkMetrics {
    std::vector<UeLinkMetrics> per_ue;
    double cell_se_bps_hz = 0.0;
    double cell_throughput_mbps = 0.0;
    std::optional<double> avg_scheduled_ue_throughput_mbps; // absent when nobody is scheduled
    std::optional<double> avg_ue_throughput_mbps;           // over all active UEs
};

LinkMetrics sector_metrics(std::span<const ScheduledUe> selected, std::span<const double> sinr,
                           double bandwidth_hz, double overhead_fraction, int n_active_ues, double se_cap = 8.0);

} // namespace mmimo

#endif
