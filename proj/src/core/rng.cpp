#include "nightbench/core/rng.hpp"

#include <cmath>
#include <numbers>

#include "nightbench/core/error.hpp"

namespace nightbench {

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

std::uint64_t combine(std::uint64_t h, std::uint64_t v) { return mix64(h ^ (v + kGolden + (h << 6) + (h >> 2))); }

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::string_view purpose) {
    // FNV-1a over the purpose tag, then folded into the seed.
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : purpose) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return combine(mix64(seed), h);
}

CounterRng::CounterRng(std::uint64_t seed, Stream stream, std::uint64_t entity, std::uint64_t frame) {
    std::uint64_t h = mix64(seed + kGolden);
    h = combine(h, static_cast<std::uint64_t>(stream));
    h = combine(h, entity);
    key_ = combine(h, frame);
}

std::uint64_t CounterRng::next_u64() {
    const std::uint64_t c = counter_++;
    return mix64(key_ ^ mix64(c * kGolden + 1));
}

double CounterRng::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

std::uint64_t CounterRng::below(std::uint64_t n) {
    if (n == 0) throw ValidationError("below() needs n > 0");
    // Rejection sampling keeps the result exactly uniform.
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t v = next_u64();
    while (v >= limit) v = next_u64();
    return v % n;
}

double CounterRng::normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace nightbench
