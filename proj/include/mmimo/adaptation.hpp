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

#ifndef MMIMO_ADAPTATION_HPP
#define MMIMO_ADAPTATION_HPP

#include "mmimo/array_model.hpp"
#include "mmimo/power_model.hpp"

#include "json.hpp"

#include <optional>
#include <span>
#include <vector>

namespace mmimo {

// Total transmit power that keeps the per-UE power of the reference load.
double tx_power_for_load(int n_ues, int n_ref, double p_ref_dbm);

struct PerfEntry {
    ArrayType type = ArrayType::A;
    int n_ues = 0;
    int n_elements = 0;
    int n_ports = 0;
    double cell_se_bps_hz = 0.0;
    double ue_throughput_mbps = 0.0;
    double tx_power_dbm = 0.0;
    PowerBreakdown power;
    std::optional<double> ee_w_per_ue_mbps;
};

class PerfTable {
public:
    ArrayType reference_type = ArrayType::A;
    int reference_load = 16;

    void add(PerfEntry entry);
    const PerfEntry* find(ArrayType type, int n_ues) const;
    // Entry at the load closest to n_ues (ties resolve to the higher load).
    const PerfEntry* nearest(ArrayType type, int n_ues) const;
    const std::vector<PerfEntry>& entries() const { return entries_; }
    bool empty() const { return entries_.empty(); }

    nlohmann::json to_json() const;
    static PerfTable from_json(const nlohmann::json& j);

private:
    std::vector<PerfEntry> entries_;
};

struct Savings {
    double tx_conv = 0.0;
    double rx_conv = 0.0;
    double pa = 0.0;
    double lna = 0.0;
    double total = 0.0;
};

// Relative savings (P_ref - P_chosen) / P_ref per functional block and in total.
Savings savings_report(const PowerBreakdown& chosen, const PowerBreakdown& reference);

struct AdaptDecision {
    ArrayType chosen = ArrayType::A;
    int requested_load = 0;
    int table_load = 0;
    bool nearest_load_used = false;
    double target_mbps = 0.0;
    bool target_met = false;
    double predicted_throughput_mbps = 0.0;
    double predicted_power_w = 0.0;
    PowerBreakdown predicted_breakdown;
    std::optional<Savings> vs_reference_full_load;
    std::optional<Savings> vs_reference_same_load;
};

// Per-UE throughput of the reference type at its highest tabulated load.
std::optional<double> default_target(const PerfTable& table);

// Minimum-power type meeting the per-UE throughput target at this load; ties
// go to fewer elements, then fewer ports. Falls back to the highest-throughput
// type with target_met = false.
AdaptDecision select_config(int n_active_ues, double target_mbps, const PerfTable& table,
                            std::span<const ArrayType> catalog);

nlohmann::json to_json(const AdaptDecision& decision);

} // namespace mmimo

#endif
