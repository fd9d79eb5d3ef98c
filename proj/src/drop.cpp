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

#include "mmimo/drop.hpp"
#include "mmimo/rng.hpp"

#include <limits>
#include <string>

namespace mmimo {

namespace {

Vec2 draw_position(const NetworkLayout& layout, Rng& rng)
{
    std::uniform_int_distribution<int> pick_site(0, kSitesPerLayout - 1);
    const int site = pick_site(rng);
    const double r = layout.isd_m / std::sqrt(3.0); // hexagon circumradius
    std::uniform_real_distribution<double> box(-r, r);
    for (;;) {
        const Vec2 p = layout.sites[site] + Vec2{box(rng), box(rng)};
        if (layout.in_site_cell(site, p))
            return p;
    }
}

} // namespace

UeDrop drop_ues(const NetworkLayout& layout, int n_per_sector, std::uint64_t seed, const ChannelParams& channel,
                const ElementPattern& pattern, const DropOptions& options)
{
    if (n_per_sector < 1)
        throw ConfigError("n_per_sector must be >= 1");

    const int n_sectors = static_cast<int>(layout.sectors.size());
    UeDrop drop;
    drop.n_per_sector = n_per_sector;
    drop.sector_ues.assign(n_sectors, {});

    std::vector<UeRecord> accepted;
    int remaining = n_sectors * n_per_sector;
    long candidate = 0;
    while (remaining > 0) {
        if (candidate >= options.max_candidates)
            throw DropError("UE drop did not reach " + std::to_string(n_per_sector) +
                            " UEs per sector within " + std::to_string(options.max_candidates) + " candidates");
        const int id = static_cast<int>(candidate++);
        Rng rng = make_rng(seed, Stream::kUeCandidate, {static_cast<std::uint64_t>(id)});
        const Vec2 p = draw_position(layout, rng);

        bool too_close = false;
        for (int s = 0; s < kSitesPerLayout && !too_close; ++s)
            too_close = layout.wrapped_distance(s, p) < options.min_distance_m;
        if (too_close)
            continue;

        const Vec3 pos{p.x, p.y, channel.ue_height_m};
        int best = -1;
        double best_cl = std::numeric_limits<double>::infinity();
        for (int s = 0; s < n_sectors; ++s) {
            const auto link = link_state(layout, pos, id, s, channel, pattern, seed, LinkDetail::kLargeScale);
            if (link.coupling_loss_db < best_cl) {
                best_cl = link.coupling_loss_db;
                best = s;
            }
        }
        if (static_cast<int>(drop.sector_ues[best].size()) >= n_per_sector)
            continue;

        UeRecord ue;
        ue.seed_id = id;
        ue.position = pos;
        ue.serving_sector = best;
        ue.index_in_sector = static_cast<int>(drop.sector_ues[best].size());
        ue.coupling_loss_db = best_cl;
        drop.sector_ues[best].push_back(static_cast<int>(accepted.size()));
        accepted.push_back(ue);
        --remaining;
    }
    drop.candidates_drawn = candidate;

    // Regroup by sector so UE k of sector s sits at s * n_per_sector + k.
    drop.ues.reserve(accepted.size());
    for (int s = 0; s < n_sectors; ++s) {
        for (int& idx : drop.sector_ues[s]) {
            drop.ues.push_back(accepted[idx]);
            idx = static_cast<int>(drop.ues.size()) - 1;
        }
    }
    return drop;
}

} // namespace mmimo
