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

#include "doctest.h"

#include "mmimo/channel.hpp"
#include "mmimo/layout.hpp"
#include "mmimo/rng.hpp"

#include <numeric>

using namespace mmimo;

namespace {

LinkState sample_link(const NetworkLayout& layout, int ue_id, Vec3 pos, int sector, const ChannelParams& p = {},
                      std::uint64_t seed = 7)
{
    return link_state(layout, pos, ue_id, sector, p, ElementPattern{}, seed);
}

} // namespace

TEST_SUITE("channel")
{
    TEST_CASE("layout geometry")
    {
        const auto layout = build_layout(500.0, 25.0);
        REQUIRE(layout.sites.size() == 7);
        REQUIRE(layout.sectors.size() == 21);
        double dmin = 1e9;
        for (std::size_t i = 0; i < layout.sites.size(); ++i)
            for (std::size_t j = i + 1; j < layout.sites.size(); ++j)
                dmin = std::min(dmin, (layout.sites[i] - layout.sites[j]).norm());
        CHECK(dmin == doctest::Approx(500.0));
        CHECK(layout.sites[0].norm() == doctest::Approx(0.0));
        for (const auto& s : layout.sectors) {
            CHECK(s.azimuth_deg == doctest::Approx(120.0 * s.index_in_site));
            CHECK(s.bs_height_m == doctest::Approx(25.0));
            CHECK(s.downtilt_deg == doctest::Approx(12.0));
        }
        for (int s = 0; s < 7; ++s)
            CHECK(layout.wrapped_distance(s, layout.sites[s]) == doctest::Approx(0.0));
        CHECK_THROWS_AS(build_layout(0.0, 25.0), ConfigError);
        CHECK_THROWS_AS(build_layout(-10.0, 25.0), ConfigError);
    }

    TEST_CASE("wrap-around picks the nearest image")
    {
        const auto layout = build_layout(500.0, 25.0);
        Rng rng = make_rng(3, Stream::kTest, {1});
        std::uniform_real_distribution<double> u(-1500.0, 1500.0);
        const double cell_radius = 500.0 / std::sqrt(3.0);
        for (int trial = 0; trial < 500; ++trial) {
            const Vec2 p{u(rng), u(rng)};
            for (int s = 0; s < 7; ++s) {
                double brute = 1e18;
                for (const auto& off : layout.wrap_offsets) {
                    brute = std::min(brute, (p - (layout.sites[s] + off)).norm());
                    brute = std::min(brute, (p - (layout.sites[s] - off)).norm());
                }
                const double w = layout.wrapped_distance(s, p);
                CHECK(w <= brute + 1e-9);
                // The wrapped network tiles the plane with 7-cell clusters, so
                // the nearest image of any site is within the cluster radius.
                CHECK(w <= std::sqrt(7.0) * cell_radius + 1e-9);
            }
        }
    }

    TEST_CASE("wrap translation leaves distances unchanged")
    {
        const auto layout = build_layout(500.0, 25.0);
        const Vec2 p{123.0, -321.0};
        for (const auto& off : layout.wrap_offsets)
            for (int s = 0; s < 7; ++s)
                CHECK(layout.wrapped_distance(s, p + off) == doctest::Approx(layout.wrapped_distance(s, p)));
    }

    TEST_CASE("pathloss formulas")
    {
        ChannelParams p;
        CHECK(pathloss_db(100.0, true, p) == doctest::Approx(28.0 + 44.0 + 20.0 * std::log10(2.0)));
        CHECK(pathloss_db(100.0, true, p) == doctest::Approx(78.02).epsilon(1e-4));
        for (double d : {10.0, 35.0, 100.0, 400.0, 1000.0})
            CHECK(pathloss_db(d, false, p) >= pathloss_db(d, true, p));
        CHECK(pathloss_db(300.0, false, p) ==
              doctest::Approx(14.4 + 39.1 * std::log10(300.0) + 20.0 * std::log10(2.0)));
    }

    TEST_CASE("LOS probability")
    {
        ChannelParams p;
        CHECK(los_probability(10.0, p) == doctest::Approx(1.0));
        const double d = 200.0;
        CHECK(los_probability(d, p) ==
              doctest::Approx(18.0 / d * (1.0 - std::exp(-d / 63.0)) + std::exp(-d / 63.0)));
        CHECK(los_probability(400.0, p) < los_probability(100.0, p));
    }

    TEST_CASE("default angular spreads are narrower in elevation")
    {
        ChannelParams p;
        CHECK(p.zsd_deg < p.asd_deg);
        CHECK(p.cluster_zsd_deg < p.cluster_asd_deg);
    }

    TEST_CASE("link state invariants")
    {
        const auto layout = build_layout(500.0, 25.0);
        for (int ue = 0; ue < 40; ++ue) {
            const Vec3 pos{-200.0 + 10.0 * ue, 50.0 + 3.0 * ue, 1.5};
            for (int s : {0, 4, 17}) {
                const auto link = sample_link(layout, ue, pos, s);
                double sum = 0.0;
                for (const auto& c : link.clusters)
                    sum += c.power;
                CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
                CHECK(link.coupling_loss_db ==
                      doctest::Approx(link.pathloss_db + link.shadowing_db - link.element_gain_db));
                const auto rays = link.rays();
                double rp = 0.0;
                for (const auto& r : rays)
                    rp += r.power;
                CHECK(rp == doctest::Approx(1.0).epsilon(1e-12));
            }
        }
    }

    TEST_CASE("zero shadowing sigma")
    {
        const auto layout = build_layout(500.0, 25.0);
        ChannelParams p;
        p.pathloss.shadow_los_db = 0.0;
        p.pathloss.shadow_nlos_db = 0.0;
        const auto link = sample_link(layout, 3, {100.0, 40.0, 1.5}, 0, p);
        CHECK(link.shadowing_db == doctest::Approx(0.0));
        CHECK(link.coupling_loss_db == doctest::Approx(link.pathloss_db - link.element_gain_db));
    }

    TEST_CASE("link state is deterministic")
    {
        const auto layout = build_layout(500.0, 25.0);
        const auto a = sample_link(layout, 11, {80.0, 90.0, 1.5}, 1);
        const auto b = sample_link(layout, 11, {80.0, 90.0, 1.5}, 1);
        CHECK(a.pathloss_db == b.pathloss_db);
        CHECK(a.shadowing_db == b.shadowing_db);
        REQUIRE(a.clusters.size() == b.clusters.size());
        for (std::size_t i = 0; i < a.clusters.size(); ++i)
            CHECK(a.clusters[i].mean.azimuth_deg == b.clusters[i].mean.azimuth_deg);
        // sectors of one site share the propagation environment
        const auto c = sample_link(layout, 11, {80.0, 90.0, 1.5}, 2);
        CHECK(a.shadowing_db == c.shadowing_db);
        CHECK(a.los == c.los);
    }

    TEST_CASE("port channel is the element channel through the feeder")
    {
        const auto layout = build_layout(500.0, 25.0);
        const auto link = sample_link(layout, 5, {150.0, 60.0, 1.5}, 0);
        for (auto t : kAllArrayTypes) {
            const auto array = build_array(t);
            const auto feeder = feeder_matrix(array);
            const auto r = realize_channel(link, array, feeder, 2);
            CHECK(r.h_element.n_rows == 2);
            CHECK(r.h_element.n_cols == static_cast<arma::uword>(array.n_elements));
            CHECK(arma::norm(r.h_port - r.h_element * feeder.weights, "fro") == 0.0);
            const auto fast = port_channels(link, array, 2, 1);
            CHECK(arma::norm(fast[0] - r.h_port, "fro") < 1e-9 * arma::norm(r.h_port, "fro"));
            CHECK(arma::rank(r.h_port) <= 2);
        }
    }

    TEST_CASE("blocks: deterministic per block, independent across blocks")
    {
        const auto layout = build_layout(500.0, 25.0);
        const auto link = sample_link(layout, 9, {-120.0, 210.0, 1.5}, 10);
        const auto array = build_array(ArrayType::L);
        const auto feeder = feeder_matrix(array);
        const auto a = realize_channel(link, array, feeder, 1);
        const auto b = realize_channel(link, array, feeder, 1);
        const auto c = realize_channel(link, array, feeder, 2);
        CHECK(arma::norm(a.h_element - b.h_element, "fro") == 0.0);
        CHECK(arma::norm(a.h_element - c.h_element, "fro") > 0.0);
        const auto multi = port_channels(link, array, 0, 3);
        CHECK(arma::norm(multi[1] - a.h_port, "fro") < 1e-9 * arma::norm(a.h_port, "fro"));
    }

    TEST_CASE("single ray gives uniform port amplitudes")
    {
        const auto layout = build_layout(500.0, 25.0);
        LinkState link;
        link.panel = layout.sectors[0].panel();
        link.pathloss_db = 80.0;
        link.phase_seed = 42;
        Cluster c;
        c.power = 1.0;
        c.mean = Direction{10.0, 95.0};
        c.ray_azimuth_offsets_deg = {0.0};
        c.ray_zenith_offsets_deg = {0.0};
        c.xpr_db = 0.0;
        link.clusters = {c};
        const auto array = build_array(ArrayType::F);
        const auto r = realize_channel(link, array, feeder_matrix(array), 0);
        const arma::mat mag = arma::abs(r.h_port);
        for (arma::uword a = 0; a < 2; ++a)
            for (arma::uword p = 0; p < mag.n_cols; ++p)
                CHECK(mag(a, p) == doctest::Approx(mag(a, 0)));
    }

    TEST_CASE("power conservation over small-scale realizations")
    {
        const auto layout = build_layout(500.0, 25.0);
        const auto array = build_array(ArrayType::K);
        const auto feeder = feeder_matrix(array);
        for (const Vec3 pos : {Vec3{120.0, 30.0, 1.5}, Vec3{-60.0, 210.0, 1.5}}) {
            const auto link = sample_link(layout, 21, pos, 0);
            const double expected = expected_element_power(link, array);
            double acc = 0.0;
            const int n = 1000;
            for (int b = 0; b < n; ++b) {
                const auto r = realize_channel(link, array, feeder, b);
                acc += std::pow(arma::norm(r.h_element, "fro"), 2);
            }
            CHECK(acc / n == doctest::Approx(expected).epsilon(0.05));
        }
    }
}
