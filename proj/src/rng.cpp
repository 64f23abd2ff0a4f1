#include "hclab/rng.hpp"

#include <cmath>

#include "hclab/error.hpp"

namespace hclab {

namespace {

std::uint32_t poisson_inversion(SplitMix64& rng, double mean)
{
    double p = std::exp(-mean);
    double cdf = p;
    const double u = rng.uniform();
    std::uint32_t k = 0;
    // The cap only triggers on round-off in the far tail.
    while (u > cdf && k < 1000) {
        ++k;
        p *= mean / k;
        cdf += p;
    }
    return k;
}

std::uint32_t poisson_ptrs(SplitMix64& rng, double mean)
{
    const double slam = std::sqrt(mean);
    const double log_mean = std::log(mean);
    const double b = 0.931 + 2.53 * slam;
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double vr = 0.9277 - 3.6224 / (b - 2.0);

    for (;;) {
        const double u = rng.uniform() - 0.5;
        const double v = rng.uniform();
        const double us = 0.5 - std::abs(u);
        const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
        if (us >= 0.07 && v <= vr)
            return static_cast<std::uint32_t>(k);
        if (k < 0.0 || (us < 0.013 && v > us))
            continue;
        if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
            -mean + k * log_mean - std::lgamma(k + 1.0))
            return static_cast<std::uint32_t>(k);
    }
}

}  // namespace

std::uint32_t poisson(SplitMix64& rng, double mean)
{
    if (!(mean >= 0.0) || !std::isfinite(mean))
        fail("poisson: mean must be finite and non-negative");
    if (mean == 0.0)
        return 0;
    if (mean < 30.0)
        return poisson_inversion(rng, mean);
    return poisson_ptrs(rng, mean);
}

}  // namespace hclab
