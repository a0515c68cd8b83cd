#pragma once

#include <cmath>
#include <cstdint>

#include "nightbench/core/rng.hpp"

namespace nightbench::detail {

inline double hash01(std::uint64_t seed, std::int64_t a, std::int64_t b, std::int64_t c = 0) {
    std::uint64_t h = mix64(seed ^ 0x51ed27f1a3c4b5d7ULL);
    h = mix64(h ^ static_cast<std::uint64_t>(a));
    h = mix64(h ^ (static_cast<std::uint64_t>(b) * 0x9e3779b97f4a7c15ULL));
    h = mix64(h ^ (static_cast<std::uint64_t>(c) * 0xc2b2ae3d27d4eb4fULL));
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

/// Bilinear value noise with smoothstep interpolation on a unit lattice.
/// A positive period makes the lattice (and so the noise) tile.
inline double value_noise(std::uint64_t seed, double u, double v, std::int64_t period = 0) {
    const double fu = std::floor(u);
    const double fv = std::floor(v);
    auto wrap = [period](std::int64_t i) { return period > 0 ? ((i % period) + period) % period : i; };
    const auto iu = static_cast<std::int64_t>(fu);
    const auto iv = static_cast<std::int64_t>(fv);
    const double su = (u - fu) * (u - fu) * (3.0 - 2.0 * (u - fu));
    const double sv = (v - fv) * (v - fv) * (3.0 - 2.0 * (v - fv));
    const double a = hash01(seed, wrap(iu), wrap(iv));
    const double b = hash01(seed, wrap(iu + 1), wrap(iv));
    const double c = hash01(seed, wrap(iu), wrap(iv + 1));
    const double d = hash01(seed, wrap(iu + 1), wrap(iv + 1));
    const double top = a + (b - a) * su;
    const double bottom = c + (d - c) * su;
    return top + (bottom - top) * sv;
}

}  // namespace nightbench::detail
