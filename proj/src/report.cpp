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

#include "mmimo/simulation.hpp"

#include <fmt/format.h>

#include <fstream>
#include <stdexcept>

namespace mmimo {

namespace {

std::string num(double v) { return fmt::format("{:.10g}", v); }

class CsvFile {
public:
    CsvFile(const std::filesystem::path& path, const std::string& header) : path_(path), out_(path)
    {
        if (!out_)
            throw std::runtime_error("cannot open " + path_.string() + " for writing");
        out_ << header << '\n';
    }

    void row(const std::string& line) { out_ << line << '\n'; }

    ~CsvFile() noexcept(false)
    {
        out_.flush();
        if (!out_ && std::uncaught_exceptions() == 0)
            throw std::runtime_error("write to " + path_.string() + " failed");
    }

private:
    std::filesystem::path path_;
    std::ofstream out_;
};

constexpr const char* kMetricHeader = "array_type,n_ues,metric,value,stderr";

std::string metric_row(const CellResult& c, const std::string& metric, double value, std::optional<double> se)
{
    return fmt::format("{},{},{},{},{}", to_string(c.type), c.n_ues, metric, num(value), se ? num(*se) : "");
}

void summary_rows(CsvFile& f, const CellResult& c, const std::string& name, const MetricSummary& m)
{
    f.row(metric_row(c, name + "_mean", m.mean, m.stderr_mean));
    f.row(metric_row(c, name + "_p5", m.p5, std::nullopt));
    f.row(metric_row(c, name + "_p50", m.p50, std::nullopt));
    f.row(metric_row(c, name + "_p95", m.p95, std::nullopt));
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << j.dump(2) << '\n';
    if (!out)
        throw std::runtime_error("write to " + path.string() + " failed");
}

nlohmann::json summary_json(const MetricSummary& m)
{
    return {{"count", m.count}, {"mean", m.mean},   {"stderr", m.stderr_mean},
            {"p5", m.p5},       {"p50", m.p50},     {"p95", m.p95}};
}

nlohmann::json optional_json(const std::optional<double>& v)
{
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

} // namespace

void emit_reports(const RunResult& result, const std::filesystem::path& out_dir)
{
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec)
        throw std::runtime_error("cannot create output directory " + out_dir.string() + ": " + ec.message());

    const double bw_hz = result.config.bandwidth_mhz * 1e6;
    {
        CsvFile f(out_dir / "se_vs_ues.csv", kMetricHeader);
        for (const auto& c : result.cells)
            summary_rows(f, c, "cell_se_bps_hz", c.cell_se);
    }
    {
        CsvFile f(out_dir / "tput_vs_ues.csv", kMetricHeader);
        for (const auto& c : result.cells) {
            summary_rows(f, c, "ue_throughput_mbps", c.ue_throughput);
            f.row(metric_row(c, "cell_throughput_mbps_mean", c.cell_se.mean * bw_hz / 1e6,
                             c.cell_se.stderr_mean * bw_hz / 1e6));
        }
    }
    {
        CsvFile f(out_dir / "sinr_vs_ues.csv", kMetricHeader);
        for (const auto& c : result.cells)
            summary_rows(f, c, "sinr_db", c.sinr_db);
    }
    {
        CsvFile f(out_dir / "power_breakdown.csv",
                  std::string(kMetricHeader) + ",tx_power_dbm,tx_conv_w,rx_conv_w,pa_w,lna_w,total_w");
        for (const auto& c : result.cells) {
            const auto& p = c.power;
            f.row(metric_row(c, "total_power_w", p.total_w, 0.0) +
                  fmt::format(",{},{},{},{},{},{}", num(c.tx_power_dbm), num(p.tx_conv_total_w),
                              num(p.rx_conv_total_w), num(p.pa_total_w), num(p.lna_total_w), num(p.total_w)));
        }
    }
    {
        CsvFile f(out_dir / "ee.csv", kMetricHeader);
        for (const auto& c : result.cells) {
            if (!c.ee_w_per_ue_mbps)
                continue;
            // delta method through the mean per-UE throughput
            const double ee = *c.ee_w_per_ue_mbps;
            const double rel_se = c.ue_throughput.stderr_mean / c.ue_throughput.mean;
            f.row(metric_row(c, "ee_w_per_ue_mbps", ee, ee * rel_se));
            if (c.ee_relative)
                f.row(metric_row(c, "ee_relative", *c.ee_relative, *c.ee_relative * rel_se));
        }
    }
    {
        CsvFile f(out_dir / "samples.csv", "array_type,n_ues,drop,block,sector,n_scheduled,cell_se_bps_hz,"
                                           "cell_throughput_mbps,avg_ue_throughput_mbps");
        for (const auto& c : result.cells)
            for (const auto& s : c.samples)
                f.row(fmt::format("{},{},{},{},{},{},{},{},{}", to_string(c.type), c.n_ues, s.drop, s.block,
                                  s.sector, s.n_scheduled, num(s.cell_se_bps_hz), num(s.cell_throughput_mbps),
                                  num(s.avg_ue_throughput_mbps)));
    }
    {
        CsvFile f(out_dir / "sinr_samples.csv", "array_type,n_ues,drop,block,sector,layer,sinr_db");
        for (const auto& c : result.cells)
            for (const auto& s : c.samples)
                for (std::size_t k = 0; k < s.sinr_db.size(); ++k)
                    f.row(fmt::format("{},{},{},{},{},{},{}", to_string(c.type), c.n_ues, s.drop, s.block,
                                      s.sector, k, num(s.sinr_db[k])));
    }

    write_json(out_dir / "perf_table.json", result.perf_table().to_json());

    nlohmann::json cells = nlohmann::json::array();
    for (const auto& c : result.cells) {
        const auto& p = c.power;
        cells.push_back({{"array_type", to_string(c.type)},
                         {"n_ues", c.n_ues},
                         {"n_elements", c.n_elements},
                         {"n_ports", c.n_ports},
                         {"cell_se_bps_hz", summary_json(c.cell_se)},
                         {"ue_throughput_mbps", summary_json(c.ue_throughput)},
                         {"sinr_db", summary_json(c.sinr_db)},
                         {"tx_power_dbm", c.tx_power_dbm},
                         {"power",
                          {{"tx_conv_w", p.tx_conv_total_w},
                           {"rx_conv_w", p.rx_conv_total_w},
                           {"pa_w", p.pa_total_w},
                           {"lna_w", p.lna_total_w},
                           {"total_w", p.total_w}}},
                         {"ee_w_per_ue_mbps", optional_json(c.ee_w_per_ue_mbps)},
                         {"ee_relative", optional_json(c.ee_relative)},
                         {"failed_drops", c.failed_drops},
                         {"errors", c.errors}});
    }
    write_json(out_dir / "summary.json",
               {{"seed", result.config.seed},
                {"n_drops", result.config.n_drops},
                {"n_blocks", result.config.n_blocks * result.config.n_freq},
                {"any_failed", result.any_failed()},
                {"cells", cells}});
    write_json(out_dir / "effective_config.json", to_json(result.config));
}

} // namespace mmimo
