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

#ifndef MMIMO_RNG_HPP
#define MMIMO_RNG_HPP

#include <cstdint>
#include <initializer_list>
#include <random>

namespace mmimo {

// Stream tags keep derived seeds of different random processes apart.
enum class Stream : std::uint64_t {
    kDrop = 1,
    kUeCandidate = 2,
    kLargeScale = 3,
    kClusters = 4,
    kRayPhases = 5,
    kPilotNoise = 6,
    kTest = 99,
};

// splitmix64 finalizer
constexpr std::uint64_t mix64(std::uint64_t z)
{
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Counter-based seed derivation: the seed of an entity depends only on the
// root seed and its index path, never on evaluation order.
constexpr std::uint64_t derive_seed(std::uint64_t root, std::initializer_list<std::uint64_t> path)
{
    std::uint64_t s = mix64(root);
    for (auto p : path)
        s = mix64(s ^ mix64(p + 0x632BE59BD9B4E019ULL));
    return s;
}

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t root, Stream stream, std::initializer_list<std::uint64_t> path)
{
    std::uint64_t s = derive_seed(root, {static_cast<std::uint64_t>(stream)});
    for (auto p : path)
        s = mix64(s ^ mix64(p + 0x632BE59BD9B4E019ULL));
    return Rng(s);
}

} // namespace mmimo

#endif
