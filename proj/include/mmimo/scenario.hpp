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

#ifndef MMIMO_SCENARIO_HPP
#define MMIMO_SCENARIO_HPP

#include "mmimo/adaptation.hpp"
#include "mmimo/array_model.hpp"
#include "mmimo/channel.hpp"
#include "mmimo/power_model.hpp"
#include "mmimo/ul_sounding.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace mmimo {

struct SchedConfig {
    double alpha = 0.5;
    int k_max = 0; // 0: number of ports
    bool stop_on_throughput_decrease = true;
};

struct PhyConfig {
    double se_cap = 8.0;
    double overhead = 1.0 / 14.0;
    double ue_noise_figure_db = 9.0;
    double max_condition = 1e6;
    // Sector DL power at the simulation bandwidth, keyed by element count.
    std::map<int, double> bs_power_dbm = {{256, 43.0}, {128, 40.0}, {64, 37.0}};

    double bs_power_dbm_for(int n_elements) const;
};

struct PowerConfig {
    PaParams pa;                       // loss_factor / peak_power_w resolved by calibration unless set
    std::optional<double> loss_factor; // explicit override
    std::optional<double> peak_pa_w;   // explicit override
    BlockPowers blocks;
    PaCalibration anchor;
    int ref_ues = 16;

    PaParams resolved_pa() const;
};

struct PolicyConfig {
    ArrayType reference_type = ArrayType::A;
    std::optional<double> target_mbps;
};

struct ScenarioConfig {
    double isd_m = 500.0;
    double bs_height_m = 25.0;
    double min_distance_m = 35.0;
    long max_drop_candidates = 2'000'000;
    double carrier_ghz = 2.0;
    double bandwidth_mhz = 10.0;
    int n_drops = 20;
    int n_blocks = 4;
    int n_freq = 1;
    std::uint64_t seed = 1;
    int workers = 1;
    std::vector<ArrayType> types = {ArrayType::A, ArrayType::E, ArrayType::F, ArrayType::K, ArrayType::L};
    std::vector<int> ues = {1, 2, 4, 8, 12, 16};
    std::string out_dir = "out";

    ArrayGeometry array;
    ChannelParams channel;
    UlPowerControl ul;
    SchedConfig sched;
    PhyConfig phy;
    PowerConfig power;
    PolicyConfig policy;
};

// Parses and validates; unknown keys and out-of-range values raise
// ConfigError naming the offending key path.
ScenarioConfig parse_scenario(const nlohmann::json& j);
// An empty or whitespace-only file yields all defaults.
ScenarioConfig load_scenario(const std::filesystem::path& path);
void validate(const ScenarioConfig& config);
// Effective configuration, every key present.
nlohmann::json to_json(const ScenarioConfig& config);

// Array catalog entries as echoed in the effective configuration.
nlohmann::json catalog_json(const ScenarioConfig& config);

} // namespace mmimo

#endif
