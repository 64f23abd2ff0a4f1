#include "hclab/large_degree.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/tools/minima.hpp>

#include "hclab/error.hpp"
#include "hclab/kernel.hpp"
#include "hclab/model.hpp"
#include "hclab/population.hpp"

namespace hclab {

namespace {

void check_mu(double mu)
{
    if (!(mu >= 0.0))
        fail("invalid variance: mu must be non-negative");
}

void check_kappa(double kappa)
{
    if (!(kappa >= 0.0 && kappa < 1.0))
        fail("invalid fraction: kappa must lie in [0, 1)");
}

}  // namespace

double F(double mu, double kappa, const GaussHermite& rule)
{
    check_mu(mu);
    check_kappa(kappa);
    const double sm = std::sqrt(mu);
    if (kappa == 0.0)
        return rule.expect([&](double z) { return std::exp(0.5 * mu - sm * z); });
    return rule.expect([&](double z) {
        const double s = -0.5 * mu + sm * z;
        return (1.0 - kappa) / (kappa + (1.0 - kappa) * std::exp(s));
    });
}

double F_prime(double mu, double kappa, const GaussHermite& rule)
{
    if (!(mu > 0.0))
        fail("invalid variance: F_prime needs mu > 0");
    check_kappa(kappa);
    const double sm = std::sqrt(mu);
    const double shift = kappa > 0.0 ? std::log1p(-kappa) - std::log(kappa) : INFINITY;
    return rule.expect([&](double z) {
        const double s = -0.5 * mu + sm * z;
        const double ds = -0.5 + 0.5 * z / sm;
        if (kappa == 0.0)
            return -std::exp(-s) * ds;
        const double base = (1.0 - kappa) / (kappa + (1.0 - kappa) * std::exp(s));
        return -base * logistic(s + shift) * ds;
    });
}

MuBranch mu_iterate(double lambda, double kappa, double mu0, int T, double tol, const GaussHermite& rule)
{
    if (!(lambda >= 0.0))
        fail("mu_iterate: lambda must be non-negative");
    check_mu(mu0);
    MuBranch br;
    br.mu = mu0;
    for (int it = 1; it <= T; ++it) {
        const double next = lambda * F(br.mu, kappa, rule);
        if (!std::isfinite(next))
            throw Error(ErrorKind::divergence, "numerical divergence in mu iteration");
        const double step = std::abs(next - br.mu);
        br.mu = next;
        br.iterations = it;
        if (step < tol) {
            br.converged = true;
            break;
        }
    }
    return br;
}

double plus_start(double lambda, double kappa)
{
    if (!(kappa > 0.0 && kappa < 1.0))
        fail("invalid fraction: plus start needs 0 < kappa < 1");
    return lambda * (1.0 - kappa) / kappa;
}

MuFixedPoints fixed_points(double lambda, double kappa, double sep, const GaussHermite& rule)
{
    MuFixedPoints fp;
    fp.kappa = kappa;
    fp.lambda = lambda;
    fp.fr = mu_iterate(lambda, kappa, 0.0, 200000, 1e-12, rule);
    fp.pl = mu_iterate(lambda, kappa, plus_start(lambda, kappa), 200000, 1e-12, rule);
    fp.coincide = std::abs(fp.pl.mu - fp.fr.mu) <= sep;
    return fp;
}

double psi_mu(double mu, double lambda, double kappa, const GaussHermite& rule)
{
    check_mu(mu);
    check_kappa(kappa);
    if (!(lambda > 0.0))
        fail("undefined ratio: psi_mu needs lambda > 0");
    const double sm = std::sqrt(mu);
    const double l1k = std::log1p(-kappa);
    const double lk = std::log(kappa);
    auto mix = [&](double x) {
        return rule.expect([&](double z) { return log_add_exp(l1k, lk + sm * z - 0.5 * mu + mu * x); });
    };
    const double e = kappa > 0.0 ? (1.0 - kappa) * mix(0.0) + kappa * mix(1.0) : 0.0;
    return 0.25 * lambda * (1.0 - kappa) + kappa * kappa * mu * mu / (4.0 * lambda * (1.0 - kappa)) - e;
}

PhaseBoundaries phase_boundaries(double kappa, const BoundaryOptions& opt)
{
    if (!(kappa > 0.0 && kappa < 1.0))
        fail("invalid fraction: kappa must lie in (0, 1)");
    if (!(opt.lambda_lo > 0.0 && opt.lambda_hi > opt.lambda_lo) || opt.scan_points < 3 || !(opt.tol > 0.0))
        fail("phase_boundaries: need 0 < lambda_lo < lambda_hi, scan_points >= 3, tol > 0");
    const double sep = 10.0 * opt.tol;
    auto separated = [&](double lambda) { return !fixed_points(lambda, kappa, sep).coincide; };

    const int N = opt.scan_points;
    const double step = (opt.lambda_hi - opt.lambda_lo) / (N - 1);
    std::vector<char> flags(N);
    for (int j = 0; j < N; ++j)
        flags[j] = separated(opt.lambda_lo + j * step);

    PhaseBoundaries pb;
    pb.kappa = kappa;
    if (flags.front() || flags.back())
        fail("bracket miss: branches already separated at the end of the lambda bracket");
    const auto first = std::find(flags.begin(), flags.end(), 1);
    if (first == flags.end())
        return pb;
    const int j1 = static_cast<int>(first - flags.begin());
    const int j2 = N - 1 - static_cast<int>(std::find(flags.rbegin(), flags.rend(), 1) - flags.rbegin());

    // Bisection keeping `in` separated and `out` not; returns the final `in`.
    auto bisect_edge = [&](double in, double out) {
        while (std::abs(in - out) > opt.tol) {
            const double mid = 0.5 * (in + out);
            (separated(mid) ? in : out) = mid;
        }
        return std::pair{0.5 * (in + out), in};
    };
    const auto [sp, sp_in] = bisect_edge(opt.lambda_lo + j1 * step, opt.lambda_lo + (j1 - 1) * step);
    const auto [d, d_in] = bisect_edge(opt.lambda_lo + j2 * step, opt.lambda_lo + (j2 + 1) * step);
    pb.lambda_sp = sp;
    pb.lambda_d = d;

    auto gap = [&](double lambda) {
        const auto fp = fixed_points(lambda, kappa, sep);
        return psi_mu(fp.fr.mu, lambda, kappa) - psi_mu(fp.pl.mu, lambda, kappa);
    };
    double lo = sp_in;
    double hi = d_in;
    if (gap(lo) < 0.0 && gap(hi) > 0.0) {
        while (hi - lo > opt.tol) {
            const double mid = 0.5 * (lo + hi);
            (gap(mid) < 0.0 ? lo : hi) = mid;
        }
        pb.lambda_s = 0.5 * (lo + hi);
    }
    return pb;
}

SlopeMin min_lambda_slope(double kappa, const GaussHermite& rule, double mu_max)
{
    auto slope = [&](double mu) {
        const double f = F(mu, kappa, rule);
        return (f - mu * F_prime(mu, kappa, rule)) / (f * f);
    };
    constexpr int N = 2000;
    const double mu_min = 1e-2;
    const double h = (mu_max - mu_min) / (N - 1);
    int best = 0;
    double best_val = slope(mu_min);
    for (int j = 1; j < N; ++j) {
        const double v = slope(mu_min + j * h);
        if (v < best_val) {
            best_val = v;
            best = j;
        }
    }
    const double lo = mu_min + std::max(0, best - 1) * h;
    const double hi = mu_min + std::min(N - 1, best + 1) * h;
    const auto r = boost::math::tools::brent_find_minima(slope, lo, hi, 40);
    return r.second < best_val ? SlopeMin{r.second, r.first} : SlopeMin{best_val, mu_min + best * h};
}

CriticalPoint critical_point(double tol, const GaussHermite& rule)
{
    double lo = 0.02;
    double hi = 0.06;
    if (!(min_lambda_slope(lo, rule).slope < 0.0) || !(min_lambda_slope(hi, rule).slope > 0.0))
        throw Error(ErrorKind::divergence, "critical point search lost its bracket");
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (min_lambda_slope(mid, rule).slope < 0.0 ? lo : hi) = mid;
    }
    const double ks = 0.5 * (lo + hi);
    const double mu = min_lambda_slope(ks, rule).mu;
    return {ks, mu / F(mu, ks, rule)};
}

double psucc_largedeg(double mu)
{
    check_mu(mu);
    return std::erf(std::sqrt(mu) / (2.0 * std::numbers::sqrt2));
}

MubarSequence mubar_recursion(double lambda, int T)
{
    if (!(lambda > 0.0))
        fail("mubar_recursion: lambda must be positive");
    if (T < 0)
        fail("mubar_recursion: T must be non-negative");
    constexpr double cutoff = 1e3;
    MubarSequence seq;
    seq.values.push_back(0.0);
    for (int t = 1; t <= T; ++t) {
        const double next = lambda * std::exp(seq.values.back());
        seq.values.push_back(next);
        if (!(next <= cutoff)) {
            seq.divergence_step = t;
            break;
        }
    }
    return seq;
}

std::vector<GaussianCheckRow> gaussian_limit_check(double kappa, double lambda, double b, int T, std::size_t M,
                                                   std::uint64_t seed, Reweight reweight)
{
    const ModelParams params = params_from_snr(kappa, b, lambda);
    const double theta = prior_log_odds(kappa);
    std::vector<double> mu{0.0};
    for (int t = 0; t < T; ++t)
        mu.push_back(lambda * F(mu.back(), kappa));

    std::vector<GaussianCheckRow> rows;
    auto observe = [&](const Population& pop) {
        GaussianCheckRow r;
        r.t = pop.t;
        r.mu = mu[static_cast<std::size_t>(pop.t)];
        auto mv = [](const std::vector<double>& v, double& mean, double& var) {
            mean = 0.0;
            for (double x : v)
                mean += x;
            mean /= static_cast<double>(v.size());
            double ss = 0.0;
            for (double x : v)
                ss += (x - mean) * (x - mean);
            var = ss / static_cast<double>(v.size() - 1);
        };
        mv(pop.xi0, r.mean0, r.var0);
        mv(pop.xi1, r.mean1, r.var1);
        r.target_mean0 = theta - 0.5 * r.mu;
        r.target_mean1 = theta + 0.5 * r.mu;
        r.dev_mean0 = std::abs(r.mean0 - r.target_mean0) / std::abs(r.target_mean0);
        r.dev_mean1 = std::abs(r.mean1 - r.target_mean1) / std::abs(r.target_mean1);
        r.dev_var0 = r.mu > 0.0 ? std::abs(r.var0 - r.mu) / r.mu : std::abs(r.var0);
        r.dev_var1 = r.mu > 0.0 ? std::abs(r.var1 - r.mu) / r.mu : std::abs(r.var1);
        rows.push_back(r);
    };
    PopulationOptions opt;
    opt.reweight = reweight;
    pd_run(params, M, T, InitMode::free, seed, opt, observe);
    return rows;
}

}  // namespace hclab
