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

#include "mmimo/scenario.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace mmimo {

double PhyConfig::bs_power_dbm_for(int n_elements) const
{
    auto it = bs_power_dbm.find(n_elements);
    if (it == bs_power_dbm.end())
        throw ConfigError("phy.bs_power_dbm has no entry for " + std::to_string(n_elements) + " elements");
    return it->second;
}

PaParams PowerConfig::resolved_pa() const
{
    PaParams p = calibrate_pa(pa, blocks, anchor);
    if (loss_factor)
        p.loss_factor = *loss_factor;
    if (peak_pa_w)
        p.peak_power_w = *peak_pa_w;
    return p;
}

namespace {

using nlohmann::json;

// Reads one JSON object, remembering which keys were consumed so that
// leftovers can be reported as unknown.
class Reader {
public:
    Reader(const json& j, std::string path) : j_(j), path_(std::move(path))
    {
        if (!j_.is_object())
            throw ConfigError((path_.empty() ? std::string("scenario") : path_) + ": expected an object");
    }

    std::string key_path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    bool has(const std::string& key) const { return j_.contains(key); }

    template <typename T>
    void read(const std::string& key, T& out)
    {
        seen_.insert(key);
        auto it = j_.find(key);
        if (it == j_.end())
            return;
        try {
            out = it->template get<T>();
        } catch (const json::exception&) {
            throw ConfigError(key_path(key) + ": wrong value type");
        }
    }

    template <typename T>
    void read(const std::string& key, std::optional<T>& out)
    {
        seen_.insert(key);
        auto it = j_.find(key);
        if (it == j_.end() || it->is_null())
            return;
        try {
            out = it->template get<T>();
        } catch (const json::exception&) {
            throw ConfigError(key_path(key) + ": wrong value type");
        }
    }

    const json* raw(const std::string& key)
    {
        seen_.insert(key);
        auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    Reader child(const std::string& key)
    {
        static const json empty = json::object();
        seen_.insert(key);
        auto it = j_.find(key);
        return Reader(it == j_.end() ? empty : *it, key_path(key));
    }

    void finish() const
    {
        for (const auto& item : j_.items())
            if (!seen_.count(item.key()))
                throw ConfigError("unknown key '" + key_path(item.key()) + "'");
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

void require(bool ok, const std::string& key, const std::string& what)
{
    if (!ok)
        throw ConfigError(key + ": " + what);
}

} // namespace

ScenarioConfig parse_scenario(const json& j)
{
    ScenarioConfig c;
    Reader r(j, "");

    r.read("isd_m", c.isd_m);
    r.read("bs_height_m", c.bs_height_m);
    r.read("min_distance_m", c.min_distance_m);
    r.read("max_drop_candidates", c.max_drop_candidates);
    r.read("carrier_ghz", c.carrier_ghz);
    r.read("bandwidth_mhz", c.bandwidth_mhz);
    r.read("n_drops", c.n_drops);
    r.read("n_blocks", c.n_blocks);
    r.read("n_freq", c.n_freq);
    r.read("seed", c.seed);
    r.read("workers", c.workers);
    r.read("out_dir", c.out_dir);

    std::optional<int> n_per_sector;
    r.read("n_per_sector", n_per_sector);
    if (n_per_sector)
        require(*n_per_sector >= 1, "n_per_sector", "must be >= 1");
    if (r.has("ues"))
        r.read("ues", c.ues);
    else {
        r.read("ues", c.ues);
        if (n_per_sector)
            c.ues = {*n_per_sector};
    }
    if (const json* types = r.raw("types")) {
        require(types->is_array(), "types", "expected a list of array types");
        c.types.clear();
        for (const auto& t : *types) {
            require(t.is_string(), "types", "expected a list of array types");
            try {
                c.types.push_back(parse_array_type(t.get<std::string>()));
            } catch (const ConfigError& e) {
                throw ConfigError(std::string("types: ") + e.what());
            }
        }
    }

    {
        Reader a = r.child("array");
        a.read("spacing_h_lambda", c.array.spacing_h_lambda);
        a.read("spacing_v_lambda", c.array.spacing_v_lambda);
        a.read("downtilt_deg", c.array.downtilt_deg);
        a.read("element_gain_dbi", c.array.pattern.max_gain_dbi);
        a.read("hpbw_az_deg", c.array.pattern.hpbw_az_deg);
        a.read("hpbw_el_deg", c.array.pattern.hpbw_el_deg);
        a.read("front_back_db", c.array.pattern.front_back_db);
        a.finish();
    }
    {
        Reader ch = r.child("channel");
        auto& p = c.channel;
        ch.read("ue_height_m", p.ue_height_m);
        ch.read("n_clusters_nlos", p.n_clusters_nlos);
        ch.read("n_clusters_los", p.n_clusters_los);
        ch.read("n_rays", p.n_rays);
        ch.read("asd_deg", p.asd_deg);
        ch.read("zsd_deg", p.zsd_deg);
        ch.read("cluster_asd_deg", p.cluster_asd_deg);
        ch.read("cluster_zsd_deg", p.cluster_zsd_deg);
        ch.read("delay_spread_los_ns", p.delay_spread_los_ns);
        ch.read("delay_spread_nlos_ns", p.delay_spread_nlos_ns);
        ch.read("delay_scaling_los", p.delay_scaling_los);
        ch.read("delay_scaling_nlos", p.delay_scaling_nlos);
        ch.read("cluster_shadow_db", p.cluster_shadow_db);
        ch.read("xpr_db", p.xpr_db);
        ch.read("k_factor_db", p.k_factor_db);
        ch.read("los_d1_m", p.los_d1_m);
        ch.read("los_d2_m", p.los_d2_m);
        Reader pl = ch.child("pathloss");
        pl.read("los_a", p.pathloss.los_a);
        pl.read("los_b", p.pathloss.los_b);
        pl.read("los_c", p.pathloss.los_c);
        pl.read("nlos_a", p.pathloss.nlos_a);
        pl.read("nlos_b", p.pathloss.nlos_b);
        pl.read("nlos_c", p.pathloss.nlos_c);
        pl.read("shadow_los_db", p.pathloss.shadow_los_db);
        pl.read("shadow_nlos_db", p.pathloss.shadow_nlos_db);
        pl.finish();
        ch.finish();
    }
    c.channel.carrier_ghz = c.carrier_ghz;
    {
        Reader u = r.child("ul");
        u.read("coverage_fraction", c.ul.coverage_fraction);
        u.read("max_psd_dbm_10mhz", c.ul.max_psd_dbm_10mhz);
        u.read("bs_noise_figure_db", c.ul.bs_noise_figure_db);
        u.finish();
    }
    {
        Reader s = r.child("sched");
        s.read("alpha", c.sched.alpha);
        s.read("k_max", c.sched.k_max);
        s.read("stop_on_throughput_decrease", c.sched.stop_on_throughput_decrease);
        s.finish();
    }
    {
        Reader ph = r.child("phy");
        ph.read("se_cap", c.phy.se_cap);
        ph.read("overhead", c.phy.overhead);
        ph.read("ue_noise_figure_db", c.phy.ue_noise_figure_db);
        ph.read("max_condition", c.phy.max_condition);
        if (const json* table = ph.raw("bs_power_dbm")) {
            require(table->is_object(), "phy.bs_power_dbm", "expected an object keyed by element count");
            for (const auto& item : table->items()) {
                int n = 0;
                try {
                    n = std::stoi(item.key());
                } catch (const std::exception&) {
                    throw ConfigError("phy.bs_power_dbm." + item.key() + ": key must be an element count");
                }
                require(item.value().is_number(), "phy.bs_power_dbm." + item.key(), "expected a number");
                c.phy.bs_power_dbm[n] = item.value().get<double>();
            }
        }
        ph.finish();
    }
    {
        Reader pw = r.child("power");
        if (const json* table = pw.raw("eff_table")) {
            require(table->is_array(), "power.eff_table", "expected a list of [backoff_db, efficiency] pairs");
            c.power.pa.eff_table.clear();
            for (const auto& row : *table) {
                require(row.is_array() && row.size() == 2 && row[0].is_number() && row[1].is_number(),
                        "power.eff_table", "expected a list of [backoff_db, efficiency] pairs");
                c.power.pa.eff_table.push_back({row[0].get<double>(), row[1].get<double>()});
            }
        }
        pw.read("efficiency_floor", c.power.pa.efficiency_floor);
        pw.read("preamp_w", c.power.pa.preamp_w);
        pw.read("duty_cycle", c.power.pa.duty_cycle);
        pw.read("loss_factor", c.power.loss_factor);
        pw.read("peak_pa_w", c.power.peak_pa_w);
        pw.read("ref_ues", c.power.ref_ues);
        Reader an = pw.child("anchor");
        an.read("total_tx_dbm", c.power.anchor.total_tx_dbm);
        an.read("n_elements", c.power.anchor.n_elements);
        an.read("backoff_db", c.power.anchor.backoff_db);
        an.finish();
        Reader bl = pw.child("blocks");
        bl.read("pa_anchor_w", c.power.blocks.pa_anchor_w);
        bl.read("lna_w", c.power.blocks.lna_w);
        bl.read("tx_conv_w", c.power.blocks.tx_conv_w);
        bl.read("rx_conv_w", c.power.blocks.rx_conv_w);
        bl.finish();
        pw.finish();
    }
    {
        Reader po = r.child("policy");
        std::optional<std::string> ref;
        po.read("reference_type", ref);
        if (ref) {
            try {
                c.policy.reference_type = parse_array_type(*ref);
            } catch (const ConfigError& e) {
                throw ConfigError(std::string("policy.reference_type: ") + e.what());
            }
        }
        po.read("target_mbps", c.policy.target_mbps);
        po.finish();
    }
    r.finish();

    validate(c);
    return c;
}

ScenarioConfig load_scenario(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open scenario file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    if (text.find_first_not_of(" \t\r\n") == std::string::npos)
        return parse_scenario(json::object());
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return parse_scenario(j);
}

void validate(const ScenarioConfig& c)
{
    require(c.isd_m > 0.0, "isd_m", "must be positive");
    require(c.bs_height_m > 0.0, "bs_height_m", "must be positive");
    require(c.min_distance_m >= 0.0, "min_distance_m", "must be non-negative");
    require(c.min_distance_m < 0.5 * c.isd_m, "min_distance_m", "must be below half the inter-site distance");
    require(c.max_drop_candidates >= 1, "max_drop_candidates", "must be >= 1");
    require(c.carrier_ghz > 0.0, "carrier_ghz", "must be positive");
    require(c.bandwidth_mhz > 0.0, "bandwidth_mhz", "must be positive");
    require(c.n_drops >= 1, "n_drops", "must be >= 1");
    require(c.n_blocks >= 1, "n_blocks", "must be >= 1");
    require(c.n_freq >= 1, "n_freq", "must be >= 1");
    require(c.workers >= 1, "workers", "must be >= 1");
    require(!c.types.empty(), "types", "must list at least one array type");
    require(!c.ues.empty(), "ues", "must list at least one load");
    for (int n : c.ues) {
        require(n >= 1, "ues", "every load must be >= 1 (n_per_sector)");
        require(n <= c.power.ref_ues, "ues", "loads above power.ref_ues have no defined transmit power");
    }

    require(c.array.spacing_h_lambda > 0.0, "array.spacing_h_lambda", "must be positive");
    require(c.array.spacing_v_lambda > 0.0, "array.spacing_v_lambda", "must be positive");
    require(c.array.pattern.hpbw_az_deg > 0.0, "array.hpbw_az_deg", "must be positive");
    require(c.array.pattern.hpbw_el_deg > 0.0, "array.hpbw_el_deg", "must be positive");
    require(c.array.pattern.front_back_db >= 0.0, "array.front_back_db", "must be non-negative");

    const auto& ch = c.channel;
    require(ch.ue_height_m > 0.0, "channel.ue_height_m", "must be positive");
    require(ch.n_clusters_nlos >= 1, "channel.n_clusters_nlos", "must be >= 1");
    require(ch.n_clusters_los >= 1, "channel.n_clusters_los", "must be >= 1");
    require(ch.n_rays >= 1, "channel.n_rays", "must be >= 1");
    require(ch.asd_deg >= 0.0, "channel.asd_deg", "must be non-negative");
    require(ch.zsd_deg >= 0.0, "channel.zsd_deg", "must be non-negative");
    require(ch.delay_spread_los_ns > 0.0, "channel.delay_spread_los_ns", "must be positive");
    require(ch.delay_spread_nlos_ns > 0.0, "channel.delay_spread_nlos_ns", "must be positive");
    require(ch.delay_scaling_los > 1.0, "channel.delay_scaling_los", "must exceed 1");
    require(ch.delay_scaling_nlos > 1.0, "channel.delay_scaling_nlos", "must exceed 1");
    require(ch.los_d1_m > 0.0, "channel.los_d1_m", "must be positive");
    require(ch.los_d2_m > 0.0, "channel.los_d2_m", "must be positive");
    require(ch.pathloss.shadow_los_db >= 0.0, "channel.pathloss.shadow_los_db", "must be non-negative");
    require(ch.pathloss.shadow_nlos_db >= 0.0, "channel.pathloss.shadow_nlos_db", "must be non-negative");

    require(c.ul.coverage_fraction > 0.0 && c.ul.coverage_fraction <= 1.0, "ul.coverage_fraction",
            "must lie in (0, 1]");

    require(c.sched.alpha > 0.0 && c.sched.alpha <= 1.0, "sched.alpha", "must lie in (0, 1]");
    require(c.sched.k_max >= 0, "sched.k_max", "must be >= 0 (0 selects the port count)");

    require(c.phy.se_cap > 0.0, "phy.se_cap", "must be positive");
    require(c.phy.overhead >= 0.0 && c.phy.overhead < 1.0, "phy.overhead", "must lie in [0, 1)");
    require(c.phy.max_condition > 1.0, "phy.max_condition", "must exceed 1");
    for (auto t : c.types) {
        const int n = build_array(t, c.array).n_elements;
        require(c.phy.bs_power_dbm.count(n) == 1, "phy.bs_power_dbm",
                "missing entry for " + std::to_string(n) + " elements (type " + to_string(t) + ")");
    }

    const auto& pa = c.power.pa;
    require(!pa.eff_table.empty(), "power.eff_table", "must not be empty");
    for (std::size_t i = 0; i < pa.eff_table.size(); ++i) {
        require(pa.eff_table[i].efficiency > 0.0 && pa.eff_table[i].efficiency < 1.0, "power.eff_table",
                "efficiencies must lie in (0, 1)");
        if (i > 0) {
            require(pa.eff_table[i].backoff_db > pa.eff_table[i - 1].backoff_db, "power.eff_table",
                    "back-off values must be strictly increasing");
            require(pa.eff_table[i].efficiency < pa.eff_table[i - 1].efficiency, "power.eff_table",
                    "efficiency must strictly decrease with back-off");
        }
    }
    require(pa.efficiency_floor > 0.0, "power.efficiency_floor", "must be positive");
    require(pa.preamp_w >= 0.0, "power.preamp_w", "must be non-negative");
    require(pa.duty_cycle > 0.0 && pa.duty_cycle <= 1.0, "power.duty_cycle", "must lie in (0, 1]");
    if (c.power.loss_factor)
        require(*c.power.loss_factor >= 1.0, "power.loss_factor", "must be >= 1");
    if (c.power.peak_pa_w)
        require(*c.power.peak_pa_w > 0.0, "power.peak_pa_w", "must be positive");
    require(c.power.ref_ues >= 1, "power.ref_ues", "must be >= 1");
    require(c.power.anchor.n_elements >= 1, "power.anchor.n_elements", "must be >= 1");
    require(c.power.blocks.pa_anchor_w > 0.0, "power.blocks.pa_anchor_w", "must be positive");
    require(c.power.blocks.lna_w >= 0.0, "power.blocks.lna_w", "must be non-negative");
    require(c.power.blocks.tx_conv_w >= 0.0, "power.blocks.tx_conv_w", "must be non-negative");
    require(c.power.blocks.rx_conv_w >= 0.0, "power.blocks.rx_conv_w", "must be non-negative");
    if (c.policy.target_mbps)
        require(*c.policy.target_mbps > 0.0, "policy.target_mbps", "must be positive");
}

nlohmann::json to_json(const ScenarioConfig& c)
{
    json types = json::array();
    for (auto t : c.types)
        types.push_back(to_string(t));
    json bs_power = json::object();
    for (const auto& [n, dbm] : c.phy.bs_power_dbm)
        bs_power[std::to_string(n)] = dbm;
    json eff = json::array();
    for (const auto& p : c.power.pa.eff_table)
        eff.push_back({p.backoff_db, p.efficiency});
    const PaParams pa = c.power.resolved_pa();
    const auto& ch = c.channel;

    return {
        {"isd_m", c.isd_m},
        {"bs_height_m", c.bs_height_m},
        {"min_distance_m", c.min_distance_m},
        {"max_drop_candidates", c.max_drop_candidates},
        {"n_per_sector", *std::max_element(c.ues.begin(), c.ues.end())},
        {"carrier_ghz", c.carrier_ghz},
        {"bandwidth_mhz", c.bandwidth_mhz},
        {"n_drops", c.n_drops},
        {"n_blocks", c.n_blocks},
        {"n_freq", c.n_freq},
        {"seed", c.seed},
        {"workers", c.workers},
        {"types", types},
        {"ues", c.ues},
        {"out_dir", c.out_dir},
        {"array",
         {{"spacing_h_lambda", c.array.spacing_h_lambda},
          {"spacing_v_lambda", c.array.spacing_v_lambda},
          {"downtilt_deg", c.array.downtilt_deg},
          {"element_gain_dbi", c.array.pattern.max_gain_dbi},
          {"hpbw_az_deg", c.array.pattern.hpbw_az_deg},
          {"hpbw_el_deg", c.array.pattern.hpbw_el_deg},
          {"front_back_db", c.array.pattern.front_back_db}}},
        {"channel",
         {{"ue_height_m", ch.ue_height_m},
          {"n_clusters_nlos", ch.n_clusters_nlos},
          {"n_clusters_los", ch.n_clusters_los},
          {"n_rays", ch.n_rays},
          {"asd_deg", ch.asd_deg},
          {"zsd_deg", ch.zsd_deg},
          {"cluster_asd_deg", ch.cluster_asd_deg},
          {"cluster_zsd_deg", ch.cluster_zsd_deg},
          {"delay_spread_los_ns", ch.delay_spread_los_ns},
          {"delay_spread_nlos_ns", ch.delay_spread_nlos_ns},
          {"delay_scaling_los", ch.delay_scaling_los},
          {"delay_scaling_nlos", ch.delay_scaling_nlos},
          {"cluster_shadow_db", ch.cluster_shadow_db},
          {"xpr_db", ch.xpr_db},
          {"k_factor_db", ch.k_factor_db},
          {"los_d1_m", ch.los_d1_m},
          {"los_d2_m", ch.los_d2_m},
          {"pathloss",
           {{"los_a", ch.pathloss.los_a},
            {"los_b", ch.pathloss.los_b},
            {"los_c", ch.pathloss.los_c},
            {"nlos_a", ch.pathloss.nlos_a},
            {"nlos_b", ch.pathloss.nlos_b},
            {"nlos_c", ch.pathloss.nlos_c},
            {"shadow_los_db", ch.pathloss.shadow_los_db},
            {"shadow_nlos_db", ch.pathloss.shadow_nlos_db}}}}},
        {"ul",
         {{"coverage_fraction", c.ul.coverage_fraction},
          {"max_psd_dbm_10mhz", c.ul.max_psd_dbm_10mhz},
          {"bs_noise_figure_db", c.ul.bs_noise_figure_db}}},
        {"sched",
         {{"alpha", c.sched.alpha},
          {"k_max", c.sched.k_max},
          {"stop_on_throughput_decrease", c.sched.stop_on_throughput_decrease}}},
        {"phy",
         {{"se_cap", c.phy.se_cap},
          {"overhead", c.phy.overhead},
          {"ue_noise_figure_db", c.phy.ue_noise_figure_db},
          {"max_condition", c.phy.max_condition},
          {"bs_power_dbm", bs_power}}},
        {"power",
         {{"eff_table", eff},
          {"efficiency_floor", c.power.pa.efficiency_floor},
          {"preamp_w", c.power.pa.preamp_w},
          {"duty_cycle", c.power.pa.duty_cycle},
          {"loss_factor", pa.loss_factor},
          {"peak_pa_w", pa.peak_power_w},
          {"ref_ues", c.power.ref_ues},
          {"anchor",
           {{"total_tx_dbm", c.power.anchor.total_tx_dbm},
            {"n_elements", c.power.anchor.n_elements},
            {"backoff_db", c.power.anchor.backoff_db}}},
          {"blocks",
           {{"pa_anchor_w", c.power.blocks.pa_anchor_w},
            {"lna_w", c.power.blocks.lna_w},
            {"tx_conv_w", c.power.blocks.tx_conv_w},
            {"rx_conv_w", c.power.blocks.rx_conv_w}}}}},
        {"policy",
         {{"reference_type", to_string(c.policy.reference_type)},
          {"target_mbps", c.policy.target_mbps ? json(*c.policy.target_mbps) : json(nullptr)}}},
        {"catalog", catalog_json(c)},
    };
}

nlohmann::json catalog_json(const ScenarioConfig& c)
{
    json out = json::array();
    for (auto t : kAllArrayTypes) {
        const auto a = build_array(t, c.array);
        out.push_back({{"type", to_string(t)},
                       {"n_elements", a.n_elements},
                       {"n_ports", a.n_ports},
                       {"subarray_size", a.subarray_size},
                       {"spacing_h_lambda", a.spacing_h_lambda},
                       {"spacing_v_lambda", a.spacing_v_lambda},
                       {"downtilt_deg", a.downtilt_deg},
                       {"element_gain_dbi", a.pattern.max_gain_dbi}});
    }
    return out;
}

} // namespace mmimo
