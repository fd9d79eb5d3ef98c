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

#include "mmimo/layout.hpp"

#include <cmath>
#include <limits>

namespace mmimo {

NetworkLayout build_layout(double isd_m, double bs_height_m, double downtilt_deg)
{
    if (!(isd_m > 0.0))
        throw ConfigError("isd_m must be positive");

    NetworkLayout layout;
    layout.isd_m = isd_m;
    layout.bs_height_m = bs_height_m;

    layout.sites.push_back({0.0, 0.0});
    for (int k = 0; k < 6; ++k) {
        const double a = k * 60.0 * kDegToRad;
        layout.sites.push_back({isd_m * std::cos(a), isd_m * std::sin(a)});
    }

    for (int s = 0; s < kSitesPerLayout; ++s) {
        for (int k = 0; k < kSectorsPerSite; ++k) {
            Sector sec;
            sec.id = s * kSectorsPerSite + k;
            sec.site = s;
            sec.index_in_site = k;
            sec.azimuth_deg = 120.0 * k;
            sec.bs_height_m = bs_height_m;
            sec.downtilt_deg = downtilt_deg;
            layout.sectors.push_back(sec);
        }
    }

    // Translation vectors of the 7-site supercell (|T| = sqrt(7) * isd).
    const double r3 = std::sqrt(3.0);
    const Vec2 t1{2.5 * isd_m, 0.5 * r3 * isd_m};
    const Vec2 t2{0.5 * isd_m, 1.5 * r3 * isd_m};
    const Vec2 t3 = t2 - t1;
    layout.wrap_offsets = {Vec2{0.0, 0.0}, t1, t2, t3, Vec2{0.0, 0.0} - t1, Vec2{0.0, 0.0} - t2,
                           Vec2{0.0, 0.0} - t3};
    return layout;
}

Vec2 NetworkLayout::wrapped_displacement(int site, Vec2 point) const
{
    // Express the offset in lattice coordinates of (t1, t2), round, then
    // search the 3x3 neighbourhood so points outside the cluster fold too.
    const Vec2 t1 = wrap_offsets[1];
    const Vec2 t2 = wrap_offsets[2];
    const Vec2 d0 = point - sites[site];
    const double det = t1.x * t2.y - t1.y * t2.x;
    const double a = (d0.x * t2.y - d0.y * t2.x) / det;
    const double b = (t1.x * d0.y - t1.y * d0.x) / det;
    const double ra = std::round(a);
    const double rb = std::round(b);

    Vec2 best{};
    double best_d = std::numeric_limits<double>::infinity();
    for (int i = -1; i <= 1; ++i) {
        for (int j = -1; j <= 1; ++j) {
            const double ca = ra + i;
            const double cb = rb + j;
            const Vec2 d{d0.x - ca * t1.x - cb * t2.x, d0.y - ca * t1.y - cb * t2.y};
            const double n = d.norm();
            if (n < best_d) {
                best_d = n;
                best = d;
            }
        }
    }
    return best;
}

bool NetworkLayout::in_site_cell(int site, Vec2 point) const
{
    const Vec2 d = point - sites[site];
    for (int k = 0; k < 6; ++k) {
        const double a = k * 60.0 * kDegToRad;
        if (d.x * std::cos(a) + d.y * std::sin(a) > 0.5 * isd_m)
            return false;
    }
    return true;
}

} // namespace mmimo
