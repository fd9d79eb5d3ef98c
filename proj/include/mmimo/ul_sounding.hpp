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

#ifndef MMIMO_UL_SOUNDING_HPP
#define MMIMO_UL_SOUNDING_HPP

#include "mmimo/channel.hpp"
#include "mmimo/drop.hpp"
#include "mmimo/layout.hpp"

#include <armadillo>

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace mmimo {

inline constexpr int kUeAntennas = 2;

// Pilot sequences are orthogonal inside a cell (3 sectors) and repeated in every cell.
struct PilotPlan {
    int n_per_sector = 0;
    int pilot_length = 0;
    std::vector<std::array<int, kUeAntennas>> sequence; // per UE

    int sequence_of(int ue, int antenna) const { return sequence[ue][antenna]; }
};

PilotPlan assign_pilots(const UeDrop& drop, const NetworkLayout& layout);

struct UlPowerControl {
    double coverage_fraction = 0.9;
    double max_psd_dbm_10mhz = 23.0;
    double bs_noise_figure_db = 5.0;
};

struct PilotPower {
    double threshold_cl_db = 0.0; // coupling loss of the coverage percentile
    double target_rx_psd_dbm = 0.0;
    std::vector<double> psd_dbm_10mhz;
};

// Fractional compensation: UEs up to the coverage percentile of coupling loss
// exactly compensate it, the rest transmit at the PSD limit.
PilotPower pilot_tx_psd(std::span<const double> coupling_loss_db, const UlPowerControl& pc);

struct ChannelEstimate {
    int ue = 0;
    arma::cx_mat h_hat_port; // 2 x P
    double noise_var = 0.0;  // per entry of h_hat_port
};

// Least-squares pilot correlation at `sector` for all UEs it serves.
// `pilot_power_w` is indexed by UE; noise_w = 0 disables the noise term.
std::vector<ChannelEstimate> estimate_channels(int sector, const UeDrop& drop, const NetworkLayout& layout,
                                               const PilotPlan& plan, std::span<const double> pilot_power_w,
                                               const PortChannelSet& truth, double noise_w,
                                               std::uint64_t noise_seed);

} // namespace mmimo

#endif
