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

#include "mmimo/adaptation.hpp"
#include "mmimo/power_model.hpp"
#include "mmimo/scenario.hpp"
#include "mmimo/simulation.hpp"

#include "CLI11.hpp"
#include <fmt/format.h>

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace mmimo;

struct RunOptions {
    std::string scenario;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<int> workers;
    std::optional<int> drops;
    std::optional<int> blocks;
};

void add_run_options(CLI::App* cmd, RunOptions& o)
{
    cmd->add_option("--scenario", o.scenario, "Scenario JSON file (defaults when omitted)")->check(CLI::ExistingFile);
    cmd->add_option("--seed", o.seed, "Root seed");
    cmd->add_option("--out", o.out, "Output directory");
    cmd->add_option("--workers", o.workers, "Worker threads")->check(CLI::PositiveNumber);
    cmd->add_option("--drops", o.drops, "Number of drops")->check(CLI::PositiveNumber);
    cmd->add_option("--blocks", o.blocks, "Coherence blocks per drop")->check(CLI::PositiveNumber);
}

ScenarioConfig resolve(const RunOptions& o)
{
    ScenarioConfig c = o.scenario.empty() ? parse_scenario(nlohmann::json::object()) : load_scenario(o.scenario);
    if (o.seed)
        c.seed = *o.seed;
    if (o.out)
        c.out_dir = *o.out;
    if (o.drops)
        c.n_drops = *o.drops;
    if (o.blocks)
        c.n_blocks = *o.blocks;
    return c;
}

int run_and_report(ScenarioConfig config, const RunOptions& o)
{
    validate(config);
    const int workers = o.workers.value_or(config.workers);
    const auto t0 = std::chrono::steady_clock::now();
    const RunResult result = run_sweep(config, workers);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    emit_reports(result, config.out_dir);

    std::cout << fmt::format("{:>4} {:>5} {:>12} {:>9} {:>14} {:>10} {:>12}\n", "type", "n_ues", "cell_se", "stderr",
                             "ue_tput_mbps", "power_w", "ee_w/ue/mbps");
    for (const auto& c : result.cells) {
        std::cout << fmt::format("{:>4} {:>5} {:>12.3f} {:>9.3f} {:>14.3f} {:>10.2f} {:>12}\n", to_string(c.type),
                                 c.n_ues, c.cell_se.mean, c.cell_se.stderr_mean, c.ue_throughput.mean,
                                 c.power.total_w,
                                 c.ee_w_per_ue_mbps ? fmt::format("{:.3f}", *c.ee_w_per_ue_mbps) : "-");
        for (const auto& e : c.errors)
            std::cerr << fmt::format("cell {}@{} failed: {}\n", to_string(c.type), c.n_ues, e);
    }
    std::cout << fmt::format("wrote reports to {} in {:.1f} s\n", config.out_dir, secs);
    return result.any_failed() ? 1 : 0;
}

std::vector<std::string> split_list(const std::string& s)
{
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty())
            out.push_back(item);
    return out;
}

PerfTable read_table(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open performance table " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
    return PerfTable::from_json(j);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Massive MIMO array configuration and energy efficiency simulator"};
    app.require_subcommand(1);

    RunOptions sim_opts;
    auto* simulate = app.add_subcommand("simulate", "Run the sweep defined by a scenario file");
    add_run_options(simulate, sim_opts);

    RunOptions sweep_opts;
    std::string sweep_types = "A,E,F,K,L";
    std::string sweep_ues = "1,2,4,8,12,16";
    auto* sweep = app.add_subcommand("sweep", "Run a sweep over array types and loads");
    add_run_options(sweep, sweep_opts);
    sweep->add_option("--types", sweep_types, "Comma-separated array types");
    sweep->add_option("--ues", sweep_ues, "Comma-separated active UEs per sector");

    std::string power_type = "A";
    std::vector<double> power_dbm;
    std::string power_scenario;
    auto* power = app.add_subcommand("power", "Power breakdown of an array type at a total TX power");
    power->add_option("--type", power_type, "Array type (A, E, F, K, L)");
    power->add_option("--dbm", power_dbm, "Total transmit power in dBm (repeatable)")->required();
    power->add_option("--scenario", power_scenario, "Scenario file for power-model overrides")
        ->check(CLI::ExistingFile);

    std::string adapt_table;
    int adapt_load = 0;
    std::optional<double> adapt_target;
    std::string adapt_trace;
    auto* adapt = app.add_subcommand("adapt", "Pick the minimum-power array type for a load");
    adapt->add_option("--table", adapt_table, "perf_table.json from a sweep")->required()->check(CLI::ExistingFile);
    auto* load_opt = adapt->add_option("--load", adapt_load, "Active UEs per sector");
    adapt->add_option("--target", adapt_target, "Per-UE throughput target in Mb/s");
    adapt->add_option("--trace", adapt_trace, "File with one load per line")->check(CLI::ExistingFile);

    std::string catalog_scenario;
    auto* catalog = app.add_subcommand("catalog", "Print the array catalog");
    catalog->add_option("--scenario", catalog_scenario, "Scenario file")->check(CLI::ExistingFile);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*simulate) {
            return run_and_report(resolve(sim_opts), sim_opts);
        }
        if (*sweep) {
            ScenarioConfig c = resolve(sweep_opts);
            c.types.clear();
            for (const auto& t : split_list(sweep_types))
                c.types.push_back(parse_array_type(t));
            c.ues.clear();
            for (const auto& u : split_list(sweep_ues)) {
                try {
                    c.ues.push_back(std::stoi(u));
                } catch (const std::exception&) {
                    throw ConfigError("--ues: '" + u + "' is not an integer");
                }
            }
            return run_and_report(c, sweep_opts);
        }
        if (*power) {
            ScenarioConfig c =
                power_scenario.empty() ? parse_scenario(nlohmann::json::object()) : load_scenario(power_scenario);
            const ArrayConfig array = build_array(parse_array_type(power_type), c.array);
            const PaParams pa = c.power.resolved_pa();
            nlohmann::json rows = nlohmann::json::array();
            for (double dbm : power_dbm) {
                const auto b = total_power(array, {0, dbm}, c.power.blocks, pa);
                const double p_el = per_element_tx_power(dbm, array.n_elements);
                rows.push_back({{"type", to_string(array.type)},
                                {"total_tx_dbm", dbm},
                                {"n_elements", array.n_elements},
                                {"n_ports", array.n_ports},
                                {"per_element_w", p_el},
                                {"backoff_db", backoff_db(p_el, pa)},
                                {"pa_efficiency", pa_efficiency(backoff_db(p_el, pa), pa)},
                                {"tx_conv_w", b.tx_conv_total_w},
                                {"rx_conv_w", b.rx_conv_total_w},
                                {"pa_w", b.pa_total_w},
                                {"lna_w", b.lna_total_w},
                                {"total_w", b.total_w}});
            }
            std::cout << (rows.size() == 1 ? rows[0] : rows).dump(2) << '\n';
            return 0;
        }
        if (*adapt) {
            const PerfTable table = read_table(adapt_table);
            const auto target = adapt_target ? adapt_target : default_target(table);
            if (!target)
                throw PolicyError("no --target given and the table has no reference-type entries");
            const auto catalog = std::vector<ArrayType>(kAllArrayTypes.begin(), kAllArrayTypes.end());
            if (!adapt_trace.empty()) {
                std::ifstream in(adapt_trace);
                nlohmann::json seq = nlohmann::json::array();
                std::string line;
                int lineno = 0;
                while (std::getline(in, line)) {
                    ++lineno;
                    if (line.find_first_not_of(" \t\r") == std::string::npos)
                        continue;
                    int load = 0;
                    try {
                        load = std::stoi(line);
                    } catch (const std::exception&) {
                        throw ConfigError(fmt::format("{}:{}: expected an integer load", adapt_trace, lineno));
                    }
                    seq.push_back(to_json(select_config(load, *target, table, catalog)));
                }
                std::cout << seq.dump(2) << '\n';
                return 0;
            }
            if (load_opt->count() == 0)
                throw ConfigError("adapt needs --load or --trace");
            std::cout << to_json(select_config(adapt_load, *target, table, catalog)).dump(2) << '\n';
            return 0;
        }
        if (*catalog) {
            ScenarioConfig c = catalog_scenario.empty() ? parse_scenario(nlohmann::json::object())
                                                        : load_scenario(catalog_scenario);
            std::cout << catalog_json(c).dump(2) << '\n';
            return 0;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const PolicyError& e) {
        std::cerr << "policy error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
