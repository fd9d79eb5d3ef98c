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

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>
#include <tuple>

namespace mmimo {

double tx_power_for_load(int n_ues, int n_ref, double p_ref_dbm)
{
    if (n_ues < 1 || n_ues > n_ref)
        throw std::out_of_range("load of " + std::to_string(n_ues) + " UEs outside [1, " + std::to_string(n_ref) +
                                "]");
    return p_ref_dbm + 10.0 * std::log10(static_cast<double>(n_ues) / n_ref);
}

void PerfTable::add(PerfEntry entry)
{
    for (auto& e : entries_) {
        if (e.type == entry.type && e.n_ues == entry.n_ues) {
            e = std::move(entry);
            return;
        }
    }
    entries_.push_back(std::move(entry));
}

const PerfEntry* PerfTable::find(ArrayType type, int n_ues) const
{
    for (const auto& e : entries_)
        if (e.type == type && e.n_ues == n_ues)
            return &e;
    return nullptr;
}

const PerfEntry* PerfTable::nearest(ArrayType type, int n_ues) const
{
    const PerfEntry* best = nullptr;
    for (const auto& e : entries_) {
        if (e.type != type)
            continue;
        if (!best) {
            best = &e;
            continue;
        }
        const int d = std::abs(e.n_ues - n_ues);
        const int bd = std::abs(best->n_ues - n_ues);
        if (d < bd || (d == bd && e.n_ues > best->n_ues))
            best = &e;
    }
    return best;
}

namespace {

nlohmann::json breakdown_json(const PowerBreakdown& b)
{
    return {{"tx_conv_w", b.tx_conv_total_w},
            {"rx_conv_w", b.rx_conv_total_w},
            {"pa_w", b.pa_total_w},
            {"lna_w", b.lna_total_w},
            {"total_w", b.total_w}};
}

PowerBreakdown breakdown_from_json(const nlohmann::json& j)
{
    PowerBreakdown b;
    b.tx_conv_total_w = j.at("tx_conv_w").get<double>();
    b.rx_conv_total_w = j.at("rx_conv_w").get<double>();
    b.pa_total_w = j.at("pa_w").get<double>();
    b.lna_total_w = j.at("lna_w").get<double>();
    b.total_w = j.at("total_w").get<double>();
    return b;
}

nlohmann::json savings_json(const Savings& s)
{
    return {{"tx_conv", s.tx_conv}, {"rx_conv", s.rx_conv}, {"pa", s.pa}, {"lna", s.lna}, {"total", s.total}};
}

} // namespace

nlohmann::json PerfTable::to_json() const
{
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& e : entries_) {
        rows.push_back({{"type", to_string(e.type)},
                        {"n_ues", e.n_ues},
                        {"n_elements", e.n_elements},
                        {"n_ports", e.n_ports},
                        {"cell_se_bps_hz", e.cell_se_bps_hz},
                        {"ue_throughput_mbps", e.ue_throughput_mbps},
                        {"tx_power_dbm", e.tx_power_dbm},
                        {"power", breakdown_json(e.power)},
                        {"ee_w_per_ue_mbps", e.ee_w_per_ue_mbps ? nlohmann::json(*e.ee_w_per_ue_mbps) : nullptr}});
    }
    return {{"reference_type", to_string(reference_type)}, {"reference_load", reference_load}, {"entries", rows}};
}

PerfTable PerfTable::from_json(const nlohmann::json& j)
{
    PerfTable t;
    try {
        t.reference_type = parse_array_type(j.value("reference_type", std::string("A")));
        t.reference_load = j.value("reference_load", 16);
        for (const auto& r : j.at("entries")) {
            PerfEntry e;
            e.type = parse_array_type(r.at("type").get<std::string>());
            e.n_ues = r.at("n_ues").get<int>();
            e.n_elements = r.at("n_elements").get<int>();
            e.n_ports = r.at("n_ports").get<int>();
            e.cell_se_bps_hz = r.at("cell_se_bps_hz").get<double>();
            e.ue_throughput_mbps = r.at("ue_throughput_mbps").get<double>();
            e.tx_power_dbm = r.at("tx_power_dbm").get<double>();
            e.power = breakdown_from_json(r.at("power"));
            if (r.contains("ee_w_per_ue_mbps") && !r.at("ee_w_per_ue_mbps").is_null())
                e.ee_w_per_ue_mbps = r.at("ee_w_per_ue_mbps").get<double>();
            t.add(std::move(e));
        }
    } catch (const nlohmann::json::exception& ex) {
        throw ConfigError(std::string("malformed performance table: ") + ex.what());
    }
    return t;
}

Savings savings_report(const PowerBreakdown& chosen, const PowerBreakdown& reference)
{
    if (!(reference.total_w > 0.0))
        throw PolicyError("reference power must be positive");
    auto rel = [](double c, double r) { return r > 0.0 ? (r - c) / r : 0.0; };
    return {rel(chosen.tx_conv_total_w, reference.tx_conv_total_w),
            rel(chosen.rx_conv_total_w, reference.rx_conv_total_w), rel(chosen.pa_total_w, reference.pa_total_w),
            rel(chosen.lna_total_w, reference.lna_total_w), rel(chosen.total_w, reference.total_w)};
}

std::optional<double> default_target(const PerfTable& table)
{
    const PerfEntry* best = nullptr;
    for (const auto& e : table.entries())
        if (e.type == table.reference_type && (!best || e.n_ues > best->n_ues))
            best = &e;
    if (!best)
        return std::nullopt;
    return best->ue_throughput_mbps;
}

AdaptDecision select_config(int n_active_ues, double target_mbps, const PerfTable& table,
                            std::span<const ArrayType> catalog)
{
    if (table.empty())
        throw PolicyError("performance table is empty");

    AdaptDecision d;
    d.requested_load = n_active_ues;
    d.target_mbps = target_mbps;

    const PerfEntry* best_feasible = nullptr;
    const PerfEntry* best_tput = nullptr;
    auto power_key = [](const PerfEntry* e) { return std::make_tuple(e->power.total_w, e->n_elements, e->n_ports); };
    for (auto type : catalog) {
        const PerfEntry* e = table.find(type, n_active_ues);
        if (!e) {
            e = table.nearest(type, n_active_ues);
            if (!e)
                continue;
            d.nearest_load_used = true;
        }
        if (!best_tput || e->ue_throughput_mbps > best_tput->ue_throughput_mbps)
            best_tput = e;
        if (e->ue_throughput_mbps >= target_mbps && (!best_feasible || power_key(e) < power_key(best_feasible)))
            best_feasible = e;
    }
    if (!best_tput)
        throw PolicyError("performance table has no entry for any catalog type");

    const PerfEntry* chosen = best_feasible ? best_feasible : best_tput;
    d.chosen = chosen->type;
    d.table_load = chosen->n_ues;
    d.target_met = best_feasible != nullptr;
    d.predicted_throughput_mbps = chosen->ue_throughput_mbps;
    d.predicted_power_w = chosen->power.total_w;
    d.predicted_breakdown = chosen->power;

    if (const PerfEntry* full = table.find(table.reference_type, table.reference_load))
        d.vs_reference_full_load = savings_report(chosen->power, full->power);
    if (const PerfEntry* same = table.find(table.reference_type, chosen->n_ues))
        d.vs_reference_same_load = savings_report(chosen->power, same->power);
    return d;
}

nlohmann::json to_json(const AdaptDecision& d)
{
    nlohmann::json j = {{"chosen", to_string(d.chosen)},
                        {"requested_load", d.requested_load},
                        {"table_load", d.table_load},
                        {"nearest_load_used", d.nearest_load_used},
                        {"target_mbps", d.target_mbps},
                        {"target_met", d.target_met},
                        {"predicted_throughput_mbps", d.predicted_throughput_mbps},
                        {"predicted_power_w", d.predicted_power_w},
                        {"predicted_breakdown", breakdown_json(d.predicted_breakdown)}};
    j["savings_vs_reference_full_load"] =
        d.vs_reference_full_load ? savings_json(*d.vs_reference_full_load) : nlohmann::json(nullptr);
    j["savings_vs_reference_same_load"] =
        d.vs_reference_same_load ? savings_json(*d.vs_reference_same_load) : nlohmann::json(nullptr);
    return j;
}

} // namespace mmimo
