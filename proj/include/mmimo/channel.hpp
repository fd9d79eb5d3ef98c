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

#ifndef MMIMO_CHANNEL_HPP
#define MMIMO_CHANNEL_HPP

#include "mmimo/array_model.hpp"
#include "mmimo/layout.hpp"

#include <armadillo>

#include <cstdint>
#include <vector>

namespace mmimo {

// Log-distance pathloss, PL = a + b*log10(d_3D) + c*log10(f_GHz).
// NLOS is lower-bounded by the LOS value.
struct PathlossModel {
    double los_a = 28.0;
    double los_b = 22.0;
    double los_c = 20.0;
    double nlos_a = 14.4;
    double nlos_b = 39.1;
    double nlos_c = 20.0;
    double shadow_los_db = 4.0;
    double shadow_nlos_db = 6.0;
};

// Clustered geometric channel with UMa-like defaults.
struct ChannelParams {
    double carrier_ghz = 2.0;
    double ue_height_m = 1.5;
    int n_clusters_nlos = 12;
    int n_clusters_los = 8;
    int n_rays = 10;
    double asd_deg = 30.0;        // spread of cluster azimuths of departure
    double zsd_deg = 8.0;         // spread of cluster zeniths of departure
    double cluster_asd_deg = 2.0; // intra-cluster ray spread
    double cluster_zsd_deg = 1.0;
    double delay_spread_los_ns = 93.0;
    double delay_spread_nlos_ns = 363.0;
    double delay_scaling_los = 2.5;
    double delay_scaling_nlos = 2.3;
    double cluster_shadow_db = 3.0;
    double xpr_db = 8.0;
    double k_factor_db = 9.0;
    double los_d1_m = 18.0;
    double los_d2_m = 63.0;
    PathlossModel pathloss;
};

double los_probability(double distance_2d_m, const ChannelParams& params);
double pathloss_db(double distance_3d_m, bool los, const ChannelParams& params);

struct Cluster {
    double delay_s = 0.0;
    double power = 0.0; // fraction of the link's total power
    Direction mean;     // global frame
    std::vector<double> ray_azimuth_offsets_deg;
    std::vector<double> ray_zenith_offsets_deg;
    double xpr_db = 8.0;
    bool specular = false; // LOS ray, no cross-polar leakage

    int n_rays() const { return static_cast<int>(ray_azimuth_offsets_deg.size()); }
};

struct Ray {
    Direction direction; // global frame
    double power = 0.0;  // fraction of the link's total power
    double co_amplitude = 1.0;
    double cross_amplitude = 0.0;
};

struct LinkState {
    int ue_id = 0;
    int sector = 0;
    PanelOrientation panel;
    double distance_2d_m = 0.0;
    double distance_3d_m = 0.0;
    Direction los_direction;
    bool los = false;
    double pathloss_db = 0.0;
    double shadowing_db = 0.0;
    double element_gain_db = 0.0; // toward the UE (LOS direction)
    double coupling_loss_db = 0.0;
    std::vector<Cluster> clusters; // empty for large-scale-only links
    std::uint64_t phase_seed = 0;  // root of the per-block ray phases

    double path_gain() const { return db_to_linear(-(pathloss_db + shadowing_db)); }
    std::vector<Ray> rays() const;
};

enum class LinkDetail { kLargeScale, kFull };

// Randomness is seeded per (ue_id, site), so the three sectors of a site
// see the same propagation environment.
LinkState link_state(const NetworkLayout& layout, Vec3 ue_position, int ue_id, int sector,
                     const ChannelParams& params, const ElementPattern& pattern, std::uint64_t seed,
                     LinkDetail detail = LinkDetail::kFull);

struct ChannelRealization {
    arma::cx_mat h_element; // 2 x N
    arma::cx_mat h_port;    // 2 x P
    int coherence_block = 0;
};

// Per-ray complex coefficients for one coherence block, R x 4 with column
// index 2*ue_antenna + bs_polarization. Element gain is not included.
arma::cx_mat ray_coefficients(const LinkState& link, const std::vector<Ray>& rays, int block);

ChannelRealization realize_channel(const LinkState& link, const ArrayConfig& array, const FeederNetwork& feeder,
                                   int block);

// Port-domain channels for blocks [first_block, first_block + n_blocks),
// identical to realize_channel(...).h_port but computed on the subarray grid.
std::vector<arma::cx_mat> port_channels(const LinkState& link, const ArrayConfig& array, int first_block,
                                        int n_blocks);

// True port-domain channels (2 x P) of every (UE, sector) link for one
// coherence block.
class PortChannelSet {
public:
    PortChannelSet() = default;
    PortChannelSet(int n_ues, int n_sectors) : n_ues_(n_ues), n_sectors_(n_sectors), h_(n_ues * n_sectors) {}

    arma::cx_mat& at(int ue, int sector) { return h_[static_cast<std::size_t>(ue) * n_sectors_ + sector]; }
    const arma::cx_mat& at(int ue, int sector) const
    {
        return h_[static_cast<std::size_t>(ue) * n_sectors_ + sector];
    }
    int n_ues() const { return n_ues_; }
    int n_sectors() const { return n_sectors_; }

private:
    int n_ues_ = 0;
    int n_sectors_ = 0;
    std::vector<arma::cx_mat> h_;
};

// Deterministic expectation of |h_element|^2 summed over both UE antennas and all elements.
double expected_element_power(const LinkState& link, const ArrayConfig& array);

} // namespace mmimo

#endif
