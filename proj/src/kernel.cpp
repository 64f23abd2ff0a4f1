#include "hclab/kernel.hpp"

#include <numbers>
#include <string>

namespace hclab {

namespace {

void check_open_fraction(double kappa)
{
    if (!(kappa > 0.0 && kappa < 1.0))
        fail("invalid fraction: kappa must lie in (0, 1), got " + std::to_string(kappa));
}

}  // namespace

double prior_log_odds(double kappa)
{
    check_open_fraction(kappa);
    return std::log(kappa) - std::log1p(-kappa);
}

double field_h(double a, double b, double kappa)
{
    check_open_fraction(kappa);
    return -kappa * (a - b) - std::log((1.0 - kappa) / kappa);
}

double binary_entropy(double kappa)
{
    if (!(kappa >= 0.0 && kappa <= 1.0))
        fail("invalid fraction: entropy argument must lie in [0, 1], got " + std::to_string(kappa));
    if (kappa == 0.0 || kappa == 1.0)
        return 0.0;
    return -kappa * std::log(kappa) - (1.0 - kappa) * std::log1p(-kappa);
}

double x_star(double lambda)
{
    constexpr double inv_e = 1.0 / std::numbers::e;
    if (!(lambda >= 0.0))
        fail("x_star: lambda must be non-negative");
    // Allow the last ulp or so above 1/e, where the root is the double root e.
    if (lambda > inv_e * (1.0 + 1e-14))
        fail("no fixed point: x = exp(lambda x) has no solution for lambda > 1/e");
    if (lambda == 0.0)
        return 1.0;

    // g(x) = x - exp(lambda x) is increasing on [1, e] for lambda <= 1/e,
    // negative at 1 and non-negative at e.
    auto g = [lambda](double x) { return x - std::exp(lambda * x); };
    double lo = 1.0;
    double hi = std::numbers::e;
    if (g(hi) < 0.0)
        return hi;
    for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi)
            break;
        if (g(mid) < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return std::abs(g(lo)) < std::abs(g(hi)) ? lo : hi;
}

KernelParams KernelParams::from_model(double a, double b, double kappa)
{
    if (!(a > 0.0 && b > 0.0))
        fail("kernel parameters need a > 0 and b > 0");
    return KernelParams{a / b, field_h(a, b, kappa), prior_log_odds(kappa)};
}

MessageFunction::MessageFunction(double rho)
    : rho_(rho), rho_minus_one_(rho - 1.0), inv_rho_(1.0 / rho), log_rho_(std::log(rho))
{
    if (!(rho > 0.0) || !std::isfinite(rho))
        fail("message function needs a finite ratio rho > 0");
}

}  // namespace hclab
