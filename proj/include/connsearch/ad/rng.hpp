// Copyright (c) 2026 connsearch contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace connsearch::ad {

// Deterministic random stream. All draws are implemented on top of the raw
// mt19937_64 output so results are bit-reproducible across standard library
// versions. Named substreams let one root seed drive independent consumers
// (data split, Gumbel noise, weight init) without the draw order of one
// consumer shifting another.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    static std::uint64_t substream_seed(std::uint64_t root_seed, std::string_view name);

    static Rng substream(std::uint64_t root_seed, std::string_view name) {
        return Rng(substream_seed(root_seed, name));
    }

    std::uint64_t next_u64() { return gen_(); }

    // Uniform on [0, 1), 53-bit mantissa.
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    // Uniform on the open interval (0, 1); safe under log().
    double uniform_open() {
        return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Box-Muller without caching, two uniforms per draw.
    double normal() {
        const double u1 = uniform_open();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
    }

    // Unbiased integer on [0, n) via rejection.
    std::uint64_t uniform_int(std::uint64_t n);

    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(uniform_int(i));
            std::swap(v[i - 1], v[j]);
        }
    }

  private:
    std::mt19937_64 gen_;
};

}  // namespace connsearch::ad
