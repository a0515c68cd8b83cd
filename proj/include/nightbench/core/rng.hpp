#pragma once

#include <cstdint>
#include <string_view>

namespace nightbench {

/// Stateless 64-bit mixing function (the SplitMix64 finalizer).
constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Derives a child seed for a named purpose, so one top-level seed can fan out
/// into independent streams ("scene", "rain", "judge", ...).
std::uint64_t derive_seed(std::uint64_t seed, std::string_view purpose);

/// Entity kinds used as part of the counter-RNG key.
enum class Stream : std::uint32_t {
    scene = 1,
    lights = 2,
    particles = 3,
    params = 4,
    curtain = 5,
    labels = 6,
    batches = 7,
    flow = 8,
    test = 99,
};

/// Counter-based generator: the n-th draw is a pure function of
/// (seed, stream, entity, frame, n). Any subset of entities can be generated
/// in any order, on any thread, with identical results.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, Stream stream, std::uint64_t entity = 0, std::uint64_t frame = 0);

    std::uint64_t next_u64();
    /// Uniform on [0, 1) with 53 bits of resolution.
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Uniform integer in [0, n). n must be > 0.
    std::uint64_t below(std::uint64_t n);
    /// Standard normal via Box-Muller; consumes two draws.
    double normal();

    std::uint64_t counter() const { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace nightbench
