#pragma once

// Deterministic random streams.
//
// Every random task (a graph, a population sample, a Monte Carlo round)
// draws from its own SplitMix64 stream whose starting state is derived from
// a master seed and a tuple of integer counters. Results therefore do not
// depend on thread count or scheduling order.

#include <cstdint>
#include <initializer_list>

namespace hclab {

// SplitMix64 finalizer; a bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept
{
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Counter-based split: derive_seed(s, {c0, c1, ...}) folds each counter into
// the state with a distinct odd multiplier and re-mixes.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> counters) noexcept
{
    std::uint64_t h = mix64(master ^ 0x6a09e667f3bcc909ULL);
    std::uint64_t k = 0x9e3779b97f4a7c15ULL;
    for (std::uint64_t c : counters) {
        h = mix64(h ^ (c * k + 0x3c6ef372fe94f82bULL));
        k += 0xd1b54a32d192ed03ULL;
    }
    return h;
}

class SplitMix64 {
public:
    using result_type = std::uint64_t;

    explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return ~result_type{0}; }

    result_type operator()() noexcept
    {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix64(state_);
    }

    // Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n) by multiply-shift (bias < n / 2^64).
    std::uint64_t below(std::uint64_t n) noexcept
    {
        __extension__ using u128 = unsigned __int128;
        return static_cast<std::uint64_t>((static_cast<u128>((*this)()) * n) >> 64);
    }

private:
    std::uint64_t state_;
};

// Poisson(mean) variate. Inversion for mean < 30, Hormann's transformed
// rejection (PTRS) above. mean == 0 returns 0.
std::uint32_t poisson(SplitMix64& rng, double mean);

}  // namespace hclab
