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

#ifndef MMIMO_ARRAY_MODEL_HPP
#define MMIMO_ARRAY_MODEL_HPP

#include "mmimo/common.hpp"

#include <armadillo>

#include <array>
#include <string>
#include <string_view>
#include <vector>

namespace mmimo {

enum class ArrayType { A, E, F, K, L };

inline constexpr std::array<ArrayType, 5> kAllArrayTypes = {ArrayType::A, ArrayType::E, ArrayType::F,
                                                            ArrayType::K, ArrayType::L};

std::string to_string(ArrayType type);

// Throws ConfigError for identifiers outside {A,E,F,K,L}.
ArrayType parse_array_type(std::string_view id);

enum class Slant { kPlus45 = 0, kMinus45 = 1 };

// Parabolic-in-dB sector element, one parabola per principal plane.
struct ElementPattern {
    double hpbw_az_deg = 60.0;
    double hpbw_el_deg = 60.0;
    double max_gain_dbi = 8.0;
    double front_back_db = 30.0;
};

// Physical parameters shared by every catalog entry.
struct ArrayGeometry {
    double spacing_h_lambda = 0.5;
    double spacing_v_lambda = 0.5;
    double downtilt_deg = 12.0;
    ElementPattern pattern;
};

struct ArrayConfig {
    ArrayType type = ArrayType::A;
    int n_elements = 0;
    int n_ports = 0;
    int subarray_size = 0;

    // Subarray slots form an n_columns x n_subarray_rows grid per polarization.
    // A slot spans `slot_rows` element rows; `rows_in_slot` lists the rows that
    // carry elements, so the aperture of A, E and F is identical.
    int n_columns = 0;
    int n_subarray_rows = 0;
    int slot_rows = 4;
    std::vector<int> rows_in_slot;

    double spacing_h_lambda = 0.5;
    double spacing_v_lambda = 0.5;
    double downtilt_deg = 12.0;
    ElementPattern pattern;

    // Per element, in the panel frame (boresight +x, columns along y,
    // rows along z), wavelengths.
    std::vector<Vec3> element_positions;
    std::vector<Slant> element_polarizations;
    std::vector<int> element_port;

    int ports_per_polarization() const { return n_ports / 2; }
    int n_element_rows() const { return n_subarray_rows * slot_rows; }
    // Panel-frame coordinates of a column / element row, centered on the aperture.
    double column_y(int column) const { return (column - 0.5 * (n_columns - 1)) * spacing_h_lambda; }
    double row_z(int row) const { return (row - 0.5 * (n_element_rows() - 1)) * spacing_v_lambda; }
    int port_index(Slant pol, int subarray_row, int column) const
    {
        return static_cast<int>(pol) * ports_per_polarization() + subarray_row * n_columns + column;
    }
};

ArrayConfig build_array(ArrayType type, const ArrayGeometry& geometry = {});
ArrayConfig build_array(std::string_view type_id, const ArrayGeometry& geometry = {});

// Absolute element gain in dBi for angles in the element-local frame.
double element_gain_db(const ElementPattern& pattern, double azimuth_deg, double zenith_deg);

// Fixed analog feeder: N x P, one nonzero per row, Ms nonzeros per column.
struct FeederNetwork {
    arma::cx_mat weights;
};

FeederNetwork feeder_matrix(const ArrayConfig& array);

// Orientation of a sector panel: boresight azimuth in the global frame plus
// the mechanical downtilt of the array.
struct PanelOrientation {
    double azimuth_deg = 0.0;
    double downtilt_deg = 0.0;

    Vec3 to_local(Vec3 global) const;
    Vec3 to_global(Vec3 local) const;
    Direction local_direction(Direction global) const;
};

// Port-domain response (length P) of a panel toward a global direction.
// Positions are expressed in wavelengths, so the result is carrier independent.
// `origin_lambda` translates the whole panel and only adds a common phase.
arma::cx_vec port_array_response(const ArrayConfig& array, const FeederNetwork& feeder,
                                 const PanelOrientation& orientation, Direction direction,
                                 Vec3 origin_lambda = {});

// Element-domain steering vector (length N), element gain amplitude included.
arma::cx_vec element_array_response(const ArrayConfig& array, const PanelOrientation& orientation,
                                    Direction direction, Vec3 origin_lambda = {});

} // namespace mmimo

#endif
