#pragma once

// Large-degree limit: cavity fields become Gaussian with variance mu and
// the recursion collapses to the scalar map mu -> lambda F(mu; kappa).

#include <cstdint>
#include <optional>
#include <vector>

#include "hclab/population.hpp"
#include "hclab/quadrature.hpp"

namespace hclab {

// F(mu; kappa) = E[(1 - kappa) / (kappa + (1 - kappa) exp(-mu/2 + sqrt(mu) Z))].
double F(double mu, double kappa, const GaussHermite& rule = default_rule());

// dF/dmu, by the same quadrature.
double F_prime(double mu, double kappa, const GaussHermite& rule = default_rule());

struct MuBranch {
    double mu = 0.0;
    bool converged = false;
    int iterations = 0;
};

// Iterates mu <- lambda F(mu) from mu0 until |step| < tol or T iterations.
MuBranch mu_iterate(double lambda, double kappa, double mu0, int T = 200000, double tol = 1e-12,
                    const GaussHermite& rule = default_rule());

// lambda (1 - kappa) / kappa: the supremum of lambda F, used as the plus start.
double plus_start(double lambda, double kappa);

struct MuFixedPoints {
    double kappa = 0.0;
    double lambda = 0.0;
    MuBranch fr;
    MuBranch pl;
    bool coincide = true;
};

// Both branches; `coincide` when |mu_pl - mu_fr| <= sep.
MuFixedPoints fixed_points(double lambda, double kappa, double sep = 1e-3,
                           const GaussHermite& rule = default_rule());

// Psi(mu) = lambda (1-kappa)/4 + kappa^2 mu^2 / (4 lambda (1-kappa))
//           - E log(1 - kappa + kappa exp(sqrt(mu) Z - mu/2 + mu X)),
// X ~ Bernoulli(kappa).
double psi_mu(double mu, double lambda, double kappa, const GaussHermite& rule = default_rule());

struct PhaseBoundaries {
    double kappa = 0.0;
    std::optional<double> lambda_sp;
    std::optional<double> lambda_s;
    std::optional<double> lambda_d;
};

struct BoundaryOptions {
    double lambda_lo = 1e-4;
    double lambda_hi = 1.0;
    int scan_points = 1000;
    double tol = 1e-4;
};

// Scans the bracket for lambdas where the free and plus branches differ by
// more than 10 tol, then bisects both ends (lambda_sp, lambda_d) and the
// sign change of Psi(mu_fr) - Psi(mu_pl) (lambda_s). All three are empty
// when the branches never separate. Throws "bracket miss" if the branches
// are already separated at either end of the bracket.
PhaseBoundaries phase_boundaries(double kappa, const BoundaryOptions& opt = {});

struct CriticalPoint {
    double kappa_star = 0.0;
    double lambda_star = 0.0;
};

// The branches can separate iff g(mu) = mu / F(mu) is non-monotone; kappa*
// is where min_mu g'(mu) reaches zero, lambda* = g at that mu.
CriticalPoint critical_point(double tol = 1e-6, const GaussHermite& rule = default_rule());

// min over mu in (0, mu_max] of d/dmu [mu / F(mu)], and its location.
struct SlopeMin {
    double slope = 0.0;
    double mu = 0.0;
};
SlopeMin min_lambda_slope(double kappa, const GaussHermite& rule = default_rule(), double mu_max = 80.0);

// 1 - 2 Phi(-sqrt(mu) / 2).
double psucc_largedeg(double mu);

struct MubarSequence {
    std::vector<double> values;           // mubar_0 = 0, mubar_1, ...
    std::optional<int> divergence_step;  // first t with mubar_t > 1e3
};

// mubar_{t+1} = lambda exp(mubar_t), stopped at T or on divergence.
MubarSequence mubar_recursion(double lambda, int T);

struct GaussianCheckRow {
    int t = 0;
    double mu = 0.0;  // from the scalar recursion
    double mean0 = 0.0, mean1 = 0.0, var0 = 0.0, var1 = 0.0;
    double target_mean0 = 0.0, target_mean1 = 0.0;
    double dev_mean0 = 0.0, dev_mean1 = 0.0, dev_var0 = 0.0, dev_var1 = 0.0;  // relative
};

// Free-init population dynamics at finite b against the limiting Gaussians
// N(theta -/+ mu_t / 2, mu_t), mu_0 = 0, mu_{t+1} = lambda F(mu_t). Rows for
// t = 0..T. Variance deviations at mu = 0 are absolute.
std::vector<GaussianCheckRow> gaussian_limit_check(double kappa, double lambda, double b, int T, std::size_t M,
                                                   std::uint64_t seed, Reweight reweight = Reweight::pooled);

}  // namespace hclab
