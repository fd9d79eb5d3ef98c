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

#ifndef MMIMO_POWER_MODEL_HPP
#define MMIMO_POWER_MODEL_HPP

#include "mmimo/array_model.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace mmimo {

struct EfficiencyPoint {
    double backoff_db = 0.0;
    double efficiency = 0.0;
};

// Doherty PA line-up. `loss_factor` covers the insertion losses between the
// PA output and the radiating element (filters, splitters, phase shifters).
struct PaParams {
    std::vector<EfficiencyPoint> eff_table = {{8.0, 0.40}, {11.0, 0.29}, {14.0, 0.185}};
    double efficiency_floor = 0.05;
    double preamp_w = 0.5;
    double loss_factor = 1.16;
    double peak_power_w = 4.70;
    double duty_cycle = 0.75;
};

// Per-unit consumption of the four functional blocks. `pa_anchor_w` is the
// PA draw at the calibration operating point, the other three are constants.
struct BlockPowers {
    double pa_anchor_w = 2.07;
    double lna_w = 0.28;
    double tx_conv_w = 2.34;
    double rx_conv_w = 0.9;
};

// Operating point that pins loss_factor and peak_power_w: the reference
// array at full transmit power runs at `backoff_db` and draws pa_anchor_w per PA.
struct PaCalibration {
    double total_tx_dbm = 53.0;
    int n_elements = 256;
    double backoff_db = 7.8;
};

// Back-solves loss_factor and peak_power_w so the anchor holds exactly.
PaParams calibrate_pa(PaParams base, const BlockPowers& blocks, const PaCalibration& anchor = {});

// Calibrated defaults.
PaParams default_pa_params();

double pa_efficiency(double backoff_db, const PaParams& params);
double per_element_tx_power(double total_dbm, int n_elements);
double backoff_db(double p_out_element_w, const PaParams& params);
double pa_dc_power(double p_out_element_w, const PaParams& params);

struct PowerBreakdown {
    double tx_conv_total_w = 0.0;
    double rx_conv_total_w = 0.0;
    double pa_total_w = 0.0;
    double lna_total_w = 0.0;
    double total_w = 0.0;
};

struct LoadPoint {
    int n_active_ues = 0;
    double total_tx_power_dbm = 0.0;
};

PowerBreakdown total_power(int n_elements, int n_ports, const LoadPoint& load, const BlockPowers& blocks,
                           const PaParams& params);
PowerBreakdown total_power(const ArrayConfig& array, const LoadPoint& load, const BlockPowers& blocks,
                           const PaParams& params);

// Watts per UE per Mb/s; absent for zero throughput or no UEs.
std::optional<double> energy_efficiency(const PowerBreakdown& power, double avg_ue_throughput_mbps, int n_ues);

} // namespace mmimo

#endif
