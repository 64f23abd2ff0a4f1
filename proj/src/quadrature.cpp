#include "hclab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hclab/error.hpp"

namespace hclab {

// Roots of the physicists' Hermite polynomial H_n by Newton iteration from
// asymptotic starting guesses, then rescaled: z = sqrt(2) x, w -> w / sqrt(pi).
GaussHermite::GaussHermite(std::size_t nodes) : z_(nodes), w_(nodes)
{
    // The unscaled recurrence below overflows for the outer roots past ~190 nodes.
    if (nodes == 0 || nodes > 180)
        fail("Gauss-Hermite node count must lie in [1, 180]");
    const std::size_t n = nodes;
    const std::size_t m = (n + 1) / 2;
    const double pim4 = std::pow(std::numbers::pi, -0.25);
    std::vector<double> x(n), w(n);
    double z = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        if (i == 0)
            z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -0.16667);
        else if (i == 1)
            z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
        else if (i == 2)
            z = 1.86 * z - 0.86 * x[0];
        else if (i == 3)
            z = 1.91 * z - 0.91 * x[1];
        else
            z = 2.0 * z - x[i - 2];

        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            // Orthonormal recurrence for the Hermite functions.
            double p1 = pim4;
            double p2 = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = z * std::sqrt(2.0 / (j + 1.0)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1.0)) * p3;
            }
            pp = std::sqrt(2.0 * n) * p2;
            const double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) <= 1e-15 * std::max(1.0, std::abs(z)))
                break;
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = 2.0 / (pp * pp);
        w[n - 1 - i] = w[i];
    }
    const double inv_sqrt_pi = 1.0 / std::sqrt(std::numbers::pi);
    for (std::size_t i = 0; i < n; ++i) {
        z_[i] = std::numbers::sqrt2 * x[n - 1 - i];
        w_[i] = w[n - 1 - i] * inv_sqrt_pi;
    }
    if (n % 2 == 1)
        z_[n / 2] = 0.0;
}

const GaussHermite& default_rule()
{
    static const GaussHermite rule(101);
    return rule;
}

}  // namespace hclab
