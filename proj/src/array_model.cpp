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

#include "mmimo/array_model.hpp"

#include <cmath>
#include <complex>

namespace mmimo {

namespace {

struct CatalogEntry {
    ArrayType type;
    int n_columns;
    int n_subarray_rows;
    std::vector<int> rows_in_slot;
};

// Slot grid and populated rows per type. E and F keep the slot grid of A and
// switch off elements inside each subarray; K and L drop whole subarrays.
const CatalogEntry& catalog_entry(ArrayType type)
{
    static const std::array<CatalogEntry, 5> catalog = {{
        {ArrayType::A, 8, 4, {0, 1, 2, 3}},
        {ArrayType::E, 8, 4, {1, 2}},
        {ArrayType::F, 8, 4, {1}},
        {ArrayType::K, 8, 2, {0, 1, 2, 3}},
        {ArrayType::L, 4, 2, {0, 1, 2, 3}},
    }};
    return catalog[static_cast<std::size_t>(type)];
}

} // namespace

std::string to_string(ArrayType type)
{
    constexpr std::array<const char*, 5> names = {"A", "E", "F", "K", "L"};
    return names[static_cast<std::size_t>(type)];
}

ArrayType parse_array_type(std::string_view id)
{
    for (auto t : kAllArrayTypes)
        if (to_string(t) == id)
            return t;
    throw ConfigError("unknown array type '" + std::string(id) + "' (expected one of A, E, F, K, L)");
}

ArrayConfig build_array(std::string_view type_id, const ArrayGeometry& geometry)
{
    return build_array(parse_array_type(type_id), geometry);
}

ArrayConfig build_array(ArrayType type, const ArrayGeometry& geometry)
{
    const auto& entry = catalog_entry(type);

    ArrayConfig a;
    a.type = type;
    a.n_columns = entry.n_columns;
    a.n_subarray_rows = entry.n_subarray_rows;
    a.rows_in_slot = entry.rows_in_slot;
    a.subarray_size = static_cast<int>(entry.rows_in_slot.size());
    a.n_ports = 2 * entry.n_columns * entry.n_subarray_rows;
    a.n_elements = a.n_ports * a.subarray_size;
    a.spacing_h_lambda = geometry.spacing_h_lambda;
    a.spacing_v_lambda = geometry.spacing_v_lambda;
    a.downtilt_deg = geometry.downtilt_deg;
    a.pattern = geometry.pattern;

    a.element_positions.reserve(a.n_elements);
    a.element_polarizations.reserve(a.n_elements);
    a.element_port.reserve(a.n_elements);
    for (auto pol : {Slant::kPlus45, Slant::kMinus45}) {
        for (int sr = 0; sr < a.n_subarray_rows; ++sr) {
            for (int c = 0; c < a.n_columns; ++c) {
                for (int r : a.rows_in_slot) {
                    const int row = sr * a.slot_rows + r;
                    a.element_positions.push_back({0.0, a.column_y(c), a.row_z(row)});
                    a.element_polarizations.push_back(pol);
                    a.element_port.push_back(a.port_index(pol, sr, c));
                }
            }
        }
    }
    return a;
}

double element_gain_db(const ElementPattern& p, double azimuth_deg, double zenith_deg)
{
    double az = std::remainder(azimuth_deg, 360.0);
    const double a_h = std::min(12.0 * (az / p.hpbw_az_deg) * (az / p.hpbw_az_deg), p.front_back_db);
    const double el = zenith_deg - 90.0;
    const double a_v = std::min(12.0 * (el / p.hpbw_el_deg) * (el / p.hpbw_el_deg), p.front_back_db);
    return p.max_gain_dbi - std::min(a_h + a_v, p.front_back_db);
}

FeederNetwork feeder_matrix(const ArrayConfig& array)
{
    FeederNetwork f;
    f.weights.zeros(array.n_elements, array.n_ports);
    const double w = 1.0 / std::sqrt(static_cast<double>(array.subarray_size));
    for (int n = 0; n < array.n_elements; ++n)
        f.weights(n, array.element_port[n]) = {w, 0.0};
    return f;
}

Vec3 PanelOrientation::to_local(Vec3 g) const
{
    const double cp = std::cos(azimuth_deg * kDegToRad), sp = std::sin(azimuth_deg * kDegToRad);
    const double ct = std::cos(downtilt_deg * kDegToRad), st = std::sin(downtilt_deg * kDegToRad);
    const Vec3 r{cp * g.x + sp * g.y, -sp * g.x + cp * g.y, g.z};
    return {ct * r.x - st * r.z, r.y, st * r.x + ct * r.z};
}

Vec3 PanelOrientation::to_global(Vec3 l) const
{
    const double cp = std::cos(azimuth_deg * kDegToRad), sp = std::sin(azimuth_deg * kDegToRad);
    const double ct = std::cos(downtilt_deg * kDegToRad), st = std::sin(downtilt_deg * kDegToRad);
    const Vec3 r{ct * l.x + st * l.z, l.y, -st * l.x + ct * l.z};
    return {cp * r.x - sp * r.y, sp * r.x + cp * r.y, r.z};
}

Direction PanelOrientation::local_direction(Direction global) const
{
    return Direction::from_unit(to_local(global.unit()));
}

arma::cx_vec element_array_response(const ArrayConfig& array, const PanelOrientation& orientation,
                                    Direction direction, Vec3 origin_lambda)
{
    const Vec3 u_local = orientation.to_local(direction.unit());
    const Direction local = Direction::from_unit(u_local);
    const double amp = std::sqrt(db_to_linear(element_gain_db(array.pattern, local.azimuth_deg, local.zenith_deg)));
    const double common = 2.0 * kPi * origin_lambda.dot(direction.unit());

    arma::cx_vec v(array.n_elements);
    for (int n = 0; n < array.n_elements; ++n) {
        const double phase = 2.0 * kPi * array.element_positions[n].dot(u_local) + common;
        v(n) = std::polar(amp, phase);
    }
    return v;
}

arma::cx_vec port_array_response(const ArrayConfig& array, const FeederNetwork& feeder,
                                 const PanelOrientation& orientation, Direction direction, Vec3 origin_lambda)
{
    return feeder.weights.st() * element_array_response(array, orientation, direction, origin_lambda);
}

} // namespace mmimo
