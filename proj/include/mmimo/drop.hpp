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

#ifndef MMIMO_DROP_HPP
#define MMIMO_DROP_HPP

#include "mmimo/channel.hpp"
#include "mmimo/layout.hpp"

#include <cstdint>
#include <vector>

namespace mmimo {

struct UeRecord {
    int seed_id = 0; // candidate index, the key of all per-UE random streams
    Vec3 position;
    int serving_sector = 0;
    int index_in_sector = 0;
    double coupling_loss_db = 0.0; // toward the serving sector
};

struct UeDrop {
    int n_per_sector = 0;
    std::vector<UeRecord> ues;                 // grouped by serving sector
    std::vector<std::vector<int>> sector_ues;  // sector -> indices into `ues`
    long candidates_drawn = 0;

    int n_ues() const { return static_cast<int>(ues.size()); }
};

struct DropOptions {
    double min_distance_m = 35.0;
    long max_candidates = 2'000'000;
};

// Uniform placement over the 7 wrapped cells with attachment to the sector
// of lowest coupling loss; candidates landing in full sectors are redrawn.
UeDrop drop_ues(const NetworkLayout& layout, int n_per_sector, std::uint64_t seed, const ChannelParams& channel,
                const ElementPattern& pattern, const DropOptions& options = {});

} // namespace mmimo

#endif
