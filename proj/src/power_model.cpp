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

#include "mmimo/power_model.hpp"

#include <cmath>
#include <string>

namespace mmimo {

PaParams calibrate_pa(PaParams base, const BlockPowers& blocks, const PaCalibration& anchor)
{
    const double p_out = per_element_tx_power(anchor.total_tx_dbm, anchor.n_elements);
    base.peak_power_w = p_out * db_to_linear(anchor.backoff_db);
    const double eta = pa_efficiency(anchor.backoff_db, base);
    base.loss_factor = (blocks.pa_anchor_w / base.duty_cycle - base.preamp_w) * eta / p_out;
    return base;
}

PaParams default_pa_params()
{
    return calibrate_pa(PaParams{}, BlockPowers{});
}

double pa_efficiency(double backoff, const PaParams& params)
{
    const auto& t = params.eff_table;
    if (t.empty())
        throw ConfigError("power.eff_table must not be empty");
    if (backoff <= t.front().backoff_db || t.size() == 1)
        return t.front().efficiency;
    for (std::size_t i = 1; i < t.size(); ++i) {
        if (backoff <= t[i].backoff_db) {
            const double f = (backoff - t[i - 1].backoff_db) / (t[i].backoff_db - t[i - 1].backoff_db);
            return t[i - 1].efficiency + f * (t[i].efficiency - t[i - 1].efficiency);
        }
    }
    const auto& a = t[t.size() - 2];
    const auto& b = t.back();
    const double slope = (b.efficiency - a.efficiency) / (b.backoff_db - a.backoff_db);
    return std::max(b.efficiency + slope * (backoff - b.backoff_db), params.efficiency_floor);
}

double per_element_tx_power(double total_dbm, int n_elements)
{
    if (n_elements < 1)
        throw std::invalid_argument("per_element_tx_power needs at least one element");
    return dbm_to_watt(total_dbm) / n_elements;
}

double backoff_db(double p_out_w, const PaParams& params)
{
    if (!(p_out_w > 0.0))
        throw std::invalid_argument("PA output power must be positive to define a back-off");
    if (p_out_w > params.peak_power_w * (1.0 + 1e-12))
        throw SaturationError("PA output " + std::to_string(p_out_w) + " W exceeds peak power " +
                              std::to_string(params.peak_power_w) + " W");
    return linear_to_db(params.peak_power_w / p_out_w);
}

double pa_dc_power(double p_out_w, const PaParams& params)
{
    if (p_out_w <= 0.0)
        return params.duty_cycle * params.preamp_w;
    const double eta = pa_efficiency(backoff_db(p_out_w, params), params);
    return params.duty_cycle * (p_out_w * params.loss_factor / eta + params.preamp_w);
}

PowerBreakdown total_power(int n_elements, int n_ports, const LoadPoint& load, const BlockPowers& blocks,
                           const PaParams& params)
{
    PowerBreakdown b;
    b.tx_conv_total_w = n_ports * blocks.tx_conv_w;
    b.rx_conv_total_w = n_ports * blocks.rx_conv_w;
    b.lna_total_w = n_elements * blocks.lna_w;
    if (n_elements > 0)
        b.pa_total_w = n_elements * pa_dc_power(per_element_tx_power(load.total_tx_power_dbm, n_elements), params);
    b.total_w = b.tx_conv_total_w + b.rx_conv_total_w + b.pa_total_w + b.lna_total_w;
    return b;
}

PowerBreakdown total_power(const ArrayConfig& array, const LoadPoint& load, const BlockPowers& blocks,
                           const PaParams& params)
{
    return total_power(array.n_elements, array.n_ports, load, blocks, params);
}

std::optional<double> energy_efficiency(const PowerBreakdown& power, double avg_ue_throughput_mbps, int n_ues)
{
    if (n_ues < 1 || !(avg_ue_throughput_mbps > 0.0))
        return std::nullopt;
    return power.total_w / (n_ues * avg_ue_throughput_mbps);
}

} // namespace mmimo
