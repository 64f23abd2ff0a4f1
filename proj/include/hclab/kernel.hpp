#pragma once

// Scalar building blocks shared by the message-passing, cavity and
// large-degree code. All logarithms are natural logs.

#include <cmath>

#include "hclab/error.hpp"

namespace hclab {

// log(kappa / (1 - kappa)); the prior log-odds of membership.
double prior_log_odds(double kappa);

// External field h = -kappa (a - b) - log((1 - kappa) / kappa).
double field_h(double a, double b, double kappa);

// Bernoulli entropy in nats. H(0) = H(1) = 0.
double binary_entropy(double kappa);

// Smallest positive root of x = exp(lambda x), for 0 <= lambda <= 1/e.
// Throws for lambda > 1/e, where no root exists.
double x_star(double lambda);

struct KernelParams {
    double rho = 1.0;    // a / b
    double h = 0.0;      // external field
    double theta = 0.0;  // max-P_succ decision threshold, log(kappa / (1 - kappa))

    static KernelParams from_model(double a, double b, double kappa);
};

// The incoming-message transform f(xi) = log((1 + rho e^xi) / (1 + e^xi)).
//
// Holds the per-rho constants so the hot loops pay one exp and one log1p
// per call. Accepts +/-infinity (mapping to log rho and 0); NaN throws.
class MessageFunction {
public:
    explicit MessageFunction(double rho);

    double rho() const noexcept { return rho_; }
    double log_rho() const noexcept { return log_rho_; }

    double operator()(double xi) const
    {
        if (std::isnan(xi))
            throw Error(ErrorKind::divergence, "invalid field: NaN passed to message function");
        if (xi <= 0.0) {
            // log((1 + rho u) / (1 + u)) with u = e^xi <= 1
            const double u = std::exp(xi);
            return std::log1p(rho_minus_one_ * u / (1.0 + u));
        }
        // log rho + log((1 + u / rho) / (1 + u)) with u = e^-xi < 1
        const double u = std::exp(-xi);
        return log_rho_ + std::log1p(u * (inv_rho_ - 1.0) / (1.0 + u));
    }

private:
    double rho_;
    double rho_minus_one_;
    double inv_rho_;
    double log_rho_;
};

inline double f_message(double xi, double rho) { return MessageFunction(rho)(xi); }

// Numerically stable logistic function 1 / (1 + e^-x).
inline double logistic(double x)
{
    if (x >= 0.0)
        return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

// log(e^x + e^y) without overflow; either argument may be -inf.
inline double log_add_exp(double x, double y)
{
    if (x == -INFINITY)
        return y;
    if (y == -INFINITY)
        return x;
    return x > y ? x + std::log1p(std::exp(y - x)) : y + std::log1p(std::exp(x - y));
}

}  // namespace hclab
