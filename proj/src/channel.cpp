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

#include "mmimo/channel.hpp"
#include "mmimo/rng.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>

namespace mmimo {

double los_probability(double d2d, const ChannelParams& p)
{
    const double tail = std::exp(-d2d / p.los_d2_m);
    return std::min(p.los_d1_m / d2d, 1.0) * (1.0 - tail) + tail;
}

double pathloss_db(double d3d, bool los, const ChannelParams& p)
{
    const auto& m = p.pathloss;
    const double lf = std::log10(p.carrier_ghz);
    const double pl_los = m.los_a + m.los_b * std::log10(d3d) + m.los_c * lf;
    if (los)
        return pl_los;
    return std::max(pl_los, m.nlos_a + m.nlos_b * std::log10(d3d) + m.nlos_c * lf);
}

namespace {

std::vector<double> ray_offset_table(int n_rays, double spread_deg)
{
    // Evenly spaced offsets with standard deviation `spread_deg`.
    std::vector<double> off(n_rays);
    if (n_rays == 1)
        return {0.0};
    const double half_width = std::sqrt(3.0) * spread_deg;
    for (int i = 0; i < n_rays; ++i)
        off[i] = half_width * (2.0 * (i + 0.5) / n_rays - 1.0);
    return off;
}

std::vector<Cluster> draw_clusters(bool los, Direction los_dir, const ChannelParams& p, Rng& rng)
{
    const int n = los ? p.n_clusters_los : p.n_clusters_nlos;
    const double ds = 1e-9 * (los ? p.delay_spread_los_ns : p.delay_spread_nlos_ns);
    const double r_tau = los ? p.delay_scaling_los : p.delay_scaling_nlos;

    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    std::vector<double> delays(n);
    for (auto& d : delays)
        d = -r_tau * ds * std::log(1.0 - uni(rng));
    std::sort(delays.begin(), delays.end());
    const double d0 = delays.empty() ? 0.0 : delays.front();
    for (auto& d : delays)
        d -= d0;

    std::vector<double> powers(n);
    for (int i = 0; i < n; ++i)
        powers[i] = std::exp(-delays[i] * (r_tau - 1.0) / (r_tau * ds)) *
                    std::pow(10.0, -p.cluster_shadow_db * gauss(rng) / 10.0);
    const double total = std::accumulate(powers.begin(), powers.end(), 0.0);

    const double k = los ? db_to_linear(p.k_factor_db) : 0.0;
    const auto az_offsets = ray_offset_table(p.n_rays, p.cluster_asd_deg);
    const auto zen_base = ray_offset_table(p.n_rays, p.cluster_zsd_deg);

    std::vector<Cluster> clusters;
    clusters.reserve(n + (los ? 1 : 0));
    if (los) {
        Cluster c;
        c.delay_s = 0.0;
        c.power = k / (k + 1.0);
        c.mean = los_dir;
        c.ray_azimuth_offsets_deg = {0.0};
        c.ray_zenith_offsets_deg = {0.0};
        c.specular = true;
        clusters.push_back(std::move(c));
    }
    for (int i = 0; i < n; ++i) {
        Cluster c;
        c.delay_s = delays[i];
        c.power = powers[i] / total / (k + 1.0);
        c.mean.azimuth_deg = los_dir.azimuth_deg + p.asd_deg * gauss(rng);
        c.mean.zenith_deg = std::clamp(los_dir.zenith_deg + p.zsd_deg * gauss(rng), 0.0, 180.0);
        c.ray_azimuth_offsets_deg = az_offsets;
        // Random azimuth/zenith pairing of the rays inside a cluster.
        c.ray_zenith_offsets_deg = zen_base;
        std::shuffle(c.ray_zenith_offsets_deg.begin(), c.ray_zenith_offsets_deg.end(), rng);
        c.xpr_db = p.xpr_db;
        clusters.push_back(std::move(c));
    }
    return clusters;
}

} // namespace

std::vector<Ray> LinkState::rays() const
{
    std::vector<Ray> out;
    for (const auto& c : clusters) {
        const double x = db_to_linear(c.xpr_db);
        const double co = c.specular ? std::sqrt(2.0) : std::sqrt(2.0 * x / (1.0 + x));
        const double cross = c.specular ? 0.0 : std::sqrt(2.0 / (1.0 + x));
        const double p = c.power / c.n_rays();
        for (int r = 0; r < c.n_rays(); ++r) {
            Ray ray;
            ray.direction.azimuth_deg = c.mean.azimuth_deg + c.ray_azimuth_offsets_deg[r];
            ray.direction.zenith_deg = std::clamp(c.mean.zenith_deg + c.ray_zenith_offsets_deg[r], 0.0, 180.0);
            ray.power = p;
            ray.co_amplitude = co;
            ray.cross_amplitude = cross;
            out.push_back(ray);
        }
    }
    return out;
}

LinkState link_state(const NetworkLayout& layout, Vec3 ue_position, int ue_id, int sector, const ChannelParams& params,
                     const ElementPattern& pattern, std::uint64_t seed, LinkDetail detail)
{
    const Sector& sec = layout.sectors.at(sector);
    const Vec2 disp = layout.wrapped_displacement(sec.site, {ue_position.x, ue_position.y});
    const double dz = ue_position.z - sec.bs_height_m;

    LinkState link;
    link.ue_id = ue_id;
    link.sector = sector;
    link.panel = sec.panel();
    link.distance_2d_m = disp.norm();
    link.distance_3d_m = std::max(std::hypot(link.distance_2d_m, dz), 1.0);
    link.los_direction = Direction::from_unit({disp.x, disp.y, dz});

    const auto uid = static_cast<std::uint64_t>(ue_id);
    const auto site = static_cast<std::uint64_t>(sec.site);
    Rng rng = make_rng(seed, Stream::kLargeScale, {uid, site});
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    link.los = uni(rng) < los_probability(std::max(link.distance_2d_m, 1.0), params);
    const double sigma = link.los ? params.pathloss.shadow_los_db : params.pathloss.shadow_nlos_db;
    link.shadowing_db = sigma * gauss(rng);
    link.pathloss_db = pathloss_db(link.distance_3d_m, link.los, params);

    const Direction local = link.panel.local_direction(link.los_direction);
    link.element_gain_db = element_gain_db(pattern, local.azimuth_deg, local.zenith_deg);
    link.coupling_loss_db = link.pathloss_db + link.shadowing_db - link.element_gain_db;

    link.phase_seed = derive_seed(seed, {static_cast<std::uint64_t>(Stream::kRayPhases), uid,
                                         static_cast<std::uint64_t>(sector)});
    if (detail == LinkDetail::kFull) {
        Rng crng = make_rng(seed, Stream::kClusters, {uid, site});
        link.clusters = draw_clusters(link.los, link.los_direction, params, crng);
    }
    return link;
}

arma::cx_mat ray_coefficients(const LinkState& link, const std::vector<Ray>& rays, int block)
{
    Rng rng = make_rng(link.phase_seed, Stream::kRayPhases, {static_cast<std::uint64_t>(block)});
    std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
    const double g = link.path_gain();

    arma::cx_mat coef(rays.size(), 4);
    for (std::size_t r = 0; r < rays.size(); ++r) {
        const double amp = std::sqrt(g * rays[r].power);
        for (int a = 0; a < 2; ++a) {
            for (int q = 0; q < 2; ++q) {
                const double pol = (a == q) ? rays[r].co_amplitude : rays[r].cross_amplitude;
                coef(r, 2 * a + q) = std::polar(amp * pol, phase(rng));
            }
        }
    }
    return coef;
}

ChannelRealization realize_channel(const LinkState& link, const ArrayConfig& array, const FeederNetwork& feeder,
                                   int block)
{
    const auto rays = link.rays();
    const arma::cx_mat coef = ray_coefficients(link, rays, block);

    ChannelRealization out;
    out.coherence_block = block;
    out.h_element.zeros(2, array.n_elements);
    for (std::size_t r = 0; r < rays.size(); ++r) {
        const arma::cx_vec steer = element_array_response(array, link.panel, rays[r].direction);
        for (int n = 0; n < array.n_elements; ++n) {
            const int q = static_cast<int>(array.element_polarizations[n]);
            out.h_element(0, n) += coef(r, q) * steer(n);
            out.h_element(1, n) += coef(r, 2 + q) * steer(n);
        }
    }
    out.h_port = out.h_element * feeder.weights;
    return out;
}

std::vector<arma::cx_mat> port_channels(const LinkState& link, const ArrayConfig& array, int first_block,
                                        int n_blocks)
{
    const auto rays = link.rays();
    const int n_rays = static_cast<int>(rays.size());
    const int half = array.ports_per_polarization();
    const double inv_sqrt_ms = 1.0 / std::sqrt(static_cast<double>(array.subarray_size));

    // Subarray-domain response of every ray, shared by both polarizations.
    arma::cx_mat resp(half, n_rays);
    std::vector<std::complex<double>> col(array.n_columns);
    std::vector<std::complex<double>> row(array.n_element_rows());
    for (int r = 0; r < n_rays; ++r) {
        const Vec3 u = link.panel.to_local(rays[r].direction.unit());
        const Direction local = Direction::from_unit(u);
        const double amp = std::sqrt(db_to_linear(element_gain_db(array.pattern, local.azimuth_deg, local.zenith_deg)));

        const auto col0 = std::polar(1.0, 2.0 * kPi * array.column_y(0) * u.y);
        const auto col_step = std::polar(1.0, 2.0 * kPi * array.spacing_h_lambda * u.y);
        col[0] = col0 * amp;
        for (int c = 1; c < array.n_columns; ++c)
            col[c] = col[c - 1] * col_step;
        const auto row0 = std::polar(1.0, 2.0 * kPi * array.row_z(0) * u.z);
        const auto row_step = std::polar(1.0, 2.0 * kPi * array.spacing_v_lambda * u.z);
        row[0] = row0;
        for (int k = 1; k < array.n_element_rows(); ++k)
            row[k] = row[k - 1] * row_step;

        for (int sr = 0; sr < array.n_subarray_rows; ++sr) {
            std::complex<double> v{0.0, 0.0};
            for (int m : array.rows_in_slot)
                v += row[sr * array.slot_rows + m];
            v *= inv_sqrt_ms;
            for (int c = 0; c < array.n_columns; ++c)
                resp(sr * array.n_columns + c, r) = col[c] * v;
        }
    }

    arma::cx_mat coef(n_rays, 4 * n_blocks);
    for (int b = 0; b < n_blocks; ++b)
        coef.cols(4 * b, 4 * b + 3) = ray_coefficients(link, rays, first_block + b);
    const arma::cx_mat mixed = resp * coef; // half x 4*n_blocks

    std::vector<arma::cx_mat> out(n_blocks);
    for (int b = 0; b < n_blocks; ++b) {
        arma::cx_mat h(2, array.n_ports);
        for (int a = 0; a < 2; ++a)
            for (int q = 0; q < 2; ++q)
                h.row(a).cols(q * half, q * half + half - 1) = mixed.col(4 * b + 2 * a + q).st();
        out[b] = std::move(h);
    }
    return out;
}

double expected_element_power(const LinkState& link, const ArrayConfig& array)
{
    double acc = 0.0;
    for (const auto& ray : link.rays()) {
        const Direction local = link.panel.local_direction(ray.direction);
        acc += ray.power * db_to_linear(element_gain_db(array.pattern, local.azimuth_deg, local.zenith_deg));
    }
    return 2.0 * array.n_elements * link.path_gain() * acc;
}

} // namespace mmimo
