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

#ifndef MMIMO_SIMULATION_HPP
#define MMIMO_SIMULATION_HPP

#include "mmimo/adaptation.hpp"
#include "mmimo/drop.hpp"
#include "mmimo/layout.hpp"
#include "mmimo/scenario.hpp"
#include "mmimo/ul_sounding.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mmimo {

struct MetricSummary {
    int count = 0;
    double mean = 0.0;
    double stderr_mean = 0.0;
    double p5 = 0.0;
    double p50 = 0.0;
    double p95 = 0.0;
};

// Percentiles interpolate linearly between order statistics. `group_means`
// supplies the independent replicas the standard error is computed from;
// when empty the samples themselves are treated as independent.
MetricSummary summarize(std::span<const double> samples, std::span<const double> group_means = {});

// Everything about one drop that does not depend on the array type.
struct DropContext {
    int n_per_sector = 0;
    int drop_index = 0;
    std::uint64_t seed = 0;
    UeDrop drop;
    std::vector<LinkState> links; // [ue * kSectorCount + sector]
    PilotPlan pilots;
    PilotPower pilot_power;
    std::vector<double> pilot_power_w;   // per UE antenna
    std::vector<double> interference_cl; // serving-sector-excluded sum of 10^(-CL/10), per UE

    const LinkState& link(int ue, int sector) const
    {
        return links[static_cast<std::size_t>(ue) * kSectorCount + sector];
    }
};

DropContext prepare_drop(const ScenarioConfig& config, const NetworkLayout& layout, int n_per_sector,
                         int drop_index);

// One (drop, block, sector) observation.
struct SectorSample {
    int drop = 0;
    int block = 0;
    int sector = 0;
    int n_scheduled = 0;
    double cell_se_bps_hz = 0.0;
    double cell_throughput_mbps = 0.0;
    double avg_ue_throughput_mbps = 0.0; // cell throughput over all active UEs
    std::optional<double> avg_scheduled_ue_throughput_mbps;
    std::vector<double> sinr_db; // per scheduled layer
};

std::vector<SectorSample> simulate_drop(const ScenarioConfig& config, const NetworkLayout& layout,
                                        const DropContext& context, const ArrayConfig& array);

struct CellResult {
    ArrayType type = ArrayType::A;
    int n_ues = 0;
    int n_elements = 0;
    int n_ports = 0;
    std::vector<SectorSample> samples;
    MetricSummary cell_se;
    MetricSummary ue_throughput;
    MetricSummary sinr_db;
    double tx_power_dbm = 0.0;
    PowerBreakdown power;
    std::optional<double> ee_w_per_ue_mbps;
    std::optional<double> ee_relative; // to the reference type at full load
    int failed_drops = 0;
    std::vector<std::string> errors;

    bool failed() const { return failed_drops > 0; }
};

struct RunResult {
    ScenarioConfig config;
    std::vector<CellResult> cells; // type-major, loads in config order

    const CellResult* find(ArrayType type, int n_ues) const;
    bool any_failed() const;
    PerfTable perf_table() const;
};

// Runs the whole grid. Drops are shared by all array types of a load, and
// results do not depend on `workers`.
RunResult run_sweep(const ScenarioConfig& config, int workers = 1);

// Writes the CSV tables, perf_table.json, summary.json and the effective
// configuration. Throws std::runtime_error naming the path on I/O failure.
void emit_reports(const RunResult& result, const std::filesystem::path& out_dir);

} // namespace mmimo

#endif
