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

#ifndef MMIMO_LAYOUT_HPP
#define MMIMO_LAYOUT_HPP

#include "mmimo/array_model.hpp"
#include "mmimo/common.hpp"

#include <array>
#include <vector>

namespace mmimo {

inline constexpr int kSitesPerLayout = 7;
inline constexpr int kSectorsPerSite = 3;
inline constexpr int kSectorCount = kSitesPerLayout * kSectorsPerSite;

struct Sector {
    int id = 0;
    int site = 0;
    int index_in_site = 0;
    double azimuth_deg = 0.0;
    double bs_height_m = 25.0;
    double downtilt_deg = 12.0;

    PanelOrientation panel() const { return {azimuth_deg, downtilt_deg}; }
};

// 7 tri-sector sites on a hexagonal grid with toroidal wrap-around.
struct NetworkLayout {
    double isd_m = 500.0;
    double bs_height_m = 25.0;
    std::vector<Vec2> sites;
    std::vector<Sector> sectors;
    // wrap_offsets[0] is the zero translation.
    std::array<Vec2, kSitesPerLayout> wrap_offsets{};

    // Displacement from the nearest wrapped image of `site` to `point`.
    Vec2 wrapped_displacement(int site, Vec2 point) const;
    double wrapped_distance(int site, Vec2 point) const { return wrapped_displacement(site, point).norm(); }

    // True when `point` lies inside the hexagonal cell of `site` (unwrapped).
    bool in_site_cell(int site, Vec2 point) const;
};

NetworkLayout build_layout(double isd_m, double bs_height_m, double downtilt_deg = 12.0);

} // namespace mmimo

#endif
