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

#include "mmimo/ul_sounding.hpp"
#include "mmimo/rng.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

namespace mmimo {

PilotPlan assign_pilots(const UeDrop& drop, const NetworkLayout& layout)
{
    PilotPlan plan;
    plan.n_per_sector = drop.n_per_sector;
    plan.pilot_length = kSectorsPerSite * drop.n_per_sector * kUeAntennas;
    plan.sequence.resize(drop.ues.size());
    for (std::size_t u = 0; u < drop.ues.size(); ++u) {
        const auto& ue = drop.ues[u];
        const int k = layout.sectors[ue.serving_sector].index_in_site;
        for (int a = 0; a < kUeAntennas; ++a)
            plan.sequence[u][a] = (k * drop.n_per_sector + ue.index_in_sector) * kUeAntennas + a;
    }
    return plan;
}

PilotPower pilot_tx_psd(std::span<const double> coupling_loss_db, const UlPowerControl& pc)
{
    PilotPower out;
    const std::size_t n = coupling_loss_db.size();
    if (n == 0)
        return out;

    std::vector<double> sorted(coupling_loss_db.begin(), coupling_loss_db.end());
    std::sort(sorted.begin(), sorted.end());
    // ceil((1 - coverage) * n) UEs sit at or above the threshold.
    const auto n_full = static_cast<std::size_t>(std::ceil((1.0 - pc.coverage_fraction) * n - 1e-9));
    const std::size_t idx = n - std::clamp<std::size_t>(n_full, 1, n);
    out.threshold_cl_db = sorted[idx];
    out.target_rx_psd_dbm = pc.max_psd_dbm_10mhz - out.threshold_cl_db;

    out.psd_dbm_10mhz.reserve(n);
    for (double cl : coupling_loss_db)
        out.psd_dbm_10mhz.push_back(std::min(pc.max_psd_dbm_10mhz, out.target_rx_psd_dbm + cl));
    return out;
}

std::vector<ChannelEstimate> estimate_channels(int sector, const UeDrop& drop, const NetworkLayout& layout,
                                               const PilotPlan& plan, std::span<const double> pilot_power_w,
                                               const PortChannelSet& truth, double noise_w,
                                               std::uint64_t noise_seed)
{
    const int site = layout.sectors[sector].site;

    // Colliding transmitters per sequence index, outside this cell.
    std::map<int, std::vector<std::pair<int, int>>> colliders;
    for (int u = 0; u < drop.n_ues(); ++u) {
        if (layout.sectors[drop.ues[u].serving_sector].site == site)
            continue;
        for (int a = 0; a < kUeAntennas; ++a)
            colliders[plan.sequence_of(u, a)].push_back({u, a});
    }

    std::vector<ChannelEstimate> out;
    out.reserve(drop.sector_ues[sector].size());
    for (int u : drop.sector_ues[sector]) {
        const double q_k = pilot_power_w[u];
        if (!(q_k > 0.0))
            throw EstimationError("UE " + std::to_string(u) + " has zero pilot amplitude at sector " +
                                  std::to_string(sector));
        const arma::cx_mat& h = truth.at(u, sector);

        ChannelEstimate est;
        est.ue = u;
        est.h_hat_port = h;
        est.noise_var = noise_w / (q_k * plan.pilot_length);

        for (int a = 0; a < kUeAntennas; ++a) {
            auto it = colliders.find(plan.sequence_of(u, a));
            if (it == colliders.end())
                continue;
            for (auto [j, aj] : it->second)
                est.h_hat_port.row(a) += std::sqrt(pilot_power_w[j] / q_k) * truth.at(j, sector).row(aj);
        }

        if (noise_w > 0.0) {
            Rng rng = make_rng(noise_seed, Stream::kPilotNoise,
                               {static_cast<std::uint64_t>(sector), static_cast<std::uint64_t>(u)});
            std::normal_distribution<double> gauss(0.0, std::sqrt(est.noise_var / 2.0));
            for (arma::uword i = 0; i < est.h_hat_port.n_elem; ++i)
                est.h_hat_port(i) += std::complex<double>(gauss(rng), gauss(rng));
        }
        out.push_back(std::move(est));
    }
    return out;
}

} // namespace mmimo
