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

#ifndef MMIMO_COMMON_HPP
#define MMIMO_COMMON_HPP

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace mmimo {

constexpr double kPi = std::numbers::pi;
constexpr double kDegToRad = kPi / 180.0;
constexpr double kRadToDeg = 180.0 / kPi;
constexpr double kSpeedOfLight = 299792458.0;
constexpr double kThermalNoiseDbmPerHz = -174.0;

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }
inline double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watt_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }

// Noise power in watts over `bandwidth_hz` for a receiver with the given noise figure.
inline double noise_power_w(double bandwidth_hz, double noise_figure_db)
{
    return dbm_to_watt(kThermalNoiseDbmPerHz + 10.0 * std::log10(bandwidth_hz) + noise_figure_db);
}

// Error families. Each maps to one failure class of the simulator pipeline.
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct DropError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct EstimationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SchedulingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct PrecodingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SaturationError : std::out_of_range {
    using std::out_of_range::out_of_range;
};
struct PolicyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    double norm() const { return std::hypot(x, y); }
};

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    friend Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
    friend Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
    double dot(Vec3 o) const { return x * o.x + y * o.y + z * o.z; }
    double norm() const { return std::sqrt(dot(*this)); }
};

// Propagation direction in degrees. Azimuth is measured from +x toward +y,
// zenith from +z (90 deg is the horizon).
struct Direction {
    double azimuth_deg = 0.0;
    double zenith_deg = 90.0;

    Vec3 unit() const
    {
        const double az = azimuth_deg * kDegToRad;
        const double ze = zenith_deg * kDegToRad;
        return {std::sin(ze) * std::cos(az), std::sin(ze) * std::sin(az), std::cos(ze)};
    }
    static Direction from_unit(Vec3 u)
    {
        const double z = std::clamp(u.z / u.norm(), -1.0, 1.0);
        return {std::atan2(u.y, u.x) * kRadToDeg, std::acos(z) * kRadToDeg};
    }
};

} // namespace mmimo

#endif
