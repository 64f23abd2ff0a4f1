#include "hclab/population.hpp"

#include <algorithm>
#include <cmath>
#include <cinttypes>
#include <cstdio>
#include <istream>
#include <iterator>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

#include <boost/math/tools/roots.hpp>

#include "hclab/error.hpp"
#include "hclab/format.hpp"
#include "hclab/kernel.hpp"
#include "hclab/rng.hpp"

namespace hclab {

namespace {

struct Means {
    double l00, l01, l10, l11;
};

Means poisson_means(const ModelParams& p)
{
    const double k = p.kappa;
    return {(1.0 - k) * p.b, k * p.b, (1.0 - k) * p.b, k * p.a};
}

void check_population(const Population& pop)
{
    if (pop.xi0.size() != pop.xi1.size() || pop.xi0.empty())
        fail("population arrays must be non-empty and of equal size");
}

double log_sum_exp(const std::vector<double>& v, double scale)
{
    double mx = -INFINITY;
    for (double x : v)
        mx = std::max(mx, scale * x);
    if (!std::isfinite(mx))
        return mx;
    double s = 0.0;
    for (double x : v)
        s += std::exp(scale * x - mx);
    return mx + std::log(s);
}

// Draws M systematic resamples from `pool` with weights e^{logw}.
std::vector<double> systematic_resample(const std::vector<double>& pool, const std::vector<double>& logw,
                                        std::size_t M, SplitMix64& rng)
{
    const double mx = *std::max_element(logw.begin(), logw.end());
    std::vector<double> cum(pool.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < pool.size(); ++i) {
        acc += std::exp(logw[i] - mx);
        cum[i] = acc;
    }
    const double u0 = rng.uniform();
    std::vector<double> out(M);
    std::size_t j = 0;
    for (std::size_t k = 0; k < M; ++k) {
        const double u = (u0 + static_cast<double>(k)) / static_cast<double>(M) * acc;
        while (j + 1 < pool.size() && cum[j] <= u)
            ++j;
        out[k] = pool[j];
    }
    return out;
}

// Root of a monotone increasing g on the real line, or nullopt when no sign
// change is found within |tau| <= 2^60.
template <class G>
std::optional<double> solve_tilt(G g)
{
    const double g0 = g(0.0);
    if (g0 == 0.0)
        return 0.0;
    double lo = -1.0;
    double hi = 1.0;
    for (int i = 0; i < 60 && g(lo) > 0.0; ++i)
        lo *= 2.0;
    for (int i = 0; i < 60 && g(hi) < 0.0; ++i)
        hi *= 2.0;
    if (g(lo) > 0.0 || g(hi) < 0.0)
        return std::nullopt;
    std::uintmax_t iters = 200;
    const auto root = boost::math::tools::toms748_solve(g, lo, hi, boost::math::tools::eps_tolerance<double>(50),
                                                        iters);
    return 0.5 * (root.first + root.second);
}

// Tilts xi0 by weights e^{tau xi} so that the weighted mean of e^xi equals
// kappa / (1 - kappa), then resamples.
void moment_tilt(std::vector<double>& xi0, double kappa, std::uint64_t stream)
{
    const double log_target = prior_log_odds(kappa);
    const auto [mn, mx] = std::minmax_element(xi0.begin(), xi0.end());
    if (!(log_target > *mn && log_target < *mx))
        return;
    const auto tau = solve_tilt(
        [&](double tau) { return log_sum_exp(xi0, tau + 1.0) - log_sum_exp(xi0, tau) - log_target; });
    if (!tau)
        return;
    std::vector<double> logw(xi0.size());
    for (std::size_t i = 0; i < xi0.size(); ++i)
        logw[i] = *tau * xi0[i];
    SplitMix64 rng(stream);
    xi0 = systematic_resample(xi0, logw, xi0.size(), rng);
}

double log_logistic(double x)
{
    return x >= 0.0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x));
}

// Pools both classes with prior weights 1 - kappa and kappa, tilts the pool
// by e^{tau xi} so that the posterior mean of membership equals kappa, and
// redraws each class from the pool weighted by its posterior probability.
// After relabelling dP1/dP0 = e^xi (1 - kappa) / kappa holds for the
// weighted pool, and the weighted mean of e^xi0 is kappa / (1 - kappa).
void pooled_reweight(std::vector<double>& xi0, std::vector<double>& xi1, double kappa, std::uint64_t stream)
{
    const std::size_t M = xi0.size();
    std::vector<double> pool(xi0);
    pool.insert(pool.end(), xi1.begin(), xi1.end());
    std::vector<double> base(2 * M), lpost1(2 * M), lpost0(2 * M);
    const double lq0 = std::log1p(-kappa);
    const double lq1 = std::log(kappa);
    for (std::size_t i = 0; i < 2 * M; ++i) {
        base[i] = i < M ? lq0 : lq1;
        lpost1[i] = log_logistic(pool[i]);
        lpost0[i] = log_logistic(-pool[i]);
    }
    auto lse = [&](double tau, const std::vector<double>& lp) {
        double mx = -INFINITY;
        for (std::size_t i = 0; i < 2 * M; ++i)
            mx = std::max(mx, base[i] + tau * pool[i] + lp[i]);
        double s = 0.0;
        for (std::size_t i = 0; i < 2 * M; ++i)
            s += std::exp(base[i] + tau * pool[i] + lp[i] - mx);
        return mx + std::log(s);
    };
    const double theta = prior_log_odds(kappa);
    const auto tau = solve_tilt([&](double tau) { return lse(tau, lpost1) - lse(tau, lpost0) - theta; });
    const double tt = tau.value_or(0.0);
    std::vector<double> lw0(2 * M), lw1(2 * M);
    for (std::size_t i = 0; i < 2 * M; ++i) {
        lw0[i] = base[i] + tt * pool[i] + lpost0[i];
        lw1[i] = base[i] + tt * pool[i] + lpost1[i];
    }
    SplitMix64 rng(stream);
    xi0 = systematic_resample(pool, lw0, M, rng);
    xi1 = systematic_resample(pool, lw1, M, rng);
}

void reweight(std::vector<double>& xi0, std::vector<double>& xi1, double kappa, Reweight scheme,
              std::uint64_t stream)
{
    switch (scheme) {
    case Reweight::none:
        return;
    case Reweight::moment:
        moment_tilt(xi0, kappa, stream);
        return;
    case Reweight::pooled:
        pooled_reweight(xi0, xi1, kappa, stream);
        return;
    }
}

std::vector<double> transform(const MessageFunction& f, const std::vector<double>& xs)
{
    std::vector<double> out(xs.size());
    const auto m = static_cast<std::ptrdiff_t>(xs.size());
    int bad = 0;
#pragma omp parallel for schedule(static) reduction(| : bad)
    for (std::ptrdiff_t i = 0; i < m; ++i) {
        if (std::isnan(xs[i])) {
            bad |= 1;
            out[i] = 0.0;
        } else {
            out[i] = f(xs[i]);
        }
    }
    if (bad)
        throw Error(ErrorKind::divergence, "numerical divergence: NaN in population");
    return out;
}

inline double draw_sum(SplitMix64& rng, double mean, const std::vector<double>& fvals)
{
    const std::uint32_t L = poisson(rng, mean);
    double s = 0.0;
    for (std::uint32_t k = 0; k < L; ++k)
        s += fvals[rng.below(fvals.size())];
    return s;
}

void check_step(const Population& pop, const ModelParams& params)
{
    check_population(pop);
    params.validate();
}

}  // namespace

Population pd_init(const ModelParams& params, std::size_t M, InitMode mode, std::uint64_t seed)
{
    params.validate();
    if (M < min_population)
        fail("population size M must be at least " + std::to_string(min_population));
    Population pop;
    pop.mode = mode;
    pop.seed = seed;
    if (mode == InitMode::free) {
        const double theta = prior_log_odds(params.kappa);
        pop.xi0.assign(M, theta);
        pop.xi1.assign(M, theta);
        pop.t = 0;
        return pop;
    }
    const double h = params.h();
    const double log_rho = std::log(params.rho());
    const Means mu = poisson_means(params);
    pop.xi0.resize(M);
    pop.xi1.resize(M);
    for (std::size_t i = 0; i < M; ++i) {
        SplitMix64 r0(derive_seed(seed, {1, 0, i}));
        pop.xi0[i] = h + poisson(r0, mu.l01) * log_rho;
        SplitMix64 r1(derive_seed(seed, {1, 1, i}));
        pop.xi1[i] = h + poisson(r1, mu.l11) * log_rho;
    }
    pop.t = 1;
    return pop;
}

void pd_step(Population& pop, const ModelParams& params, std::uint64_t seed, const PopulationOptions& opt)
{
    check_step(pop, params);
    const MessageFunction f(params.rho());
    const auto f0 = transform(f, pop.xi0);
    const auto f1 = transform(f, pop.xi1);
    const double h = params.h();
    const Means mu = poisson_means(params);
    const auto t = static_cast<std::uint64_t>(pop.t + 1);
    const auto M = static_cast<std::ptrdiff_t>(pop.size());
    std::vector<double> n0(pop.size()), n1(pop.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < M; ++i) {
        const auto idx = static_cast<std::uint64_t>(i);
        SplitMix64 r0(derive_seed(seed, {t, 0, idx}));
        double s = draw_sum(r0, mu.l00, f0);
        s += draw_sum(r0, mu.l01, f1);
        n0[i] = h + s;
        SplitMix64 r1(derive_seed(seed, {t, 1, idx}));
        s = draw_sum(r1, mu.l10, f0);
        s += draw_sum(r1, mu.l11, f1);
        n1[i] = h + s;
    }
    reweight(n0, n1, params.kappa, opt.reweight, derive_seed(seed, {t, 2}));
    pop.xi0.swap(n0);
    pop.xi1.swap(n1);
    pop.t += 1;
}

void pd_step_reference(Population& pop, const ModelParams& params, std::uint64_t seed, const PopulationOptions& opt)
{
    check_step(pop, params);
    const MessageFunction f(params.rho());
    const double h = params.h();
    const Means mu = poisson_means(params);
    const auto t = static_cast<std::uint64_t>(pop.t + 1);
    const std::size_t M = pop.size();
    auto sum_from = [&](SplitMix64& rng, double mean, const std::vector<double>& src) {
        const std::uint32_t L = poisson(rng, mean);
        double s = 0.0;
        for (std::uint32_t k = 0; k < L; ++k)
            s += f(src[rng.below(M)]);
        return s;
    };
    std::vector<double> n0(M), n1(M);
    for (std::size_t i = 0; i < M; ++i) {
        SplitMix64 r0(derive_seed(seed, {t, 0, i}));
        double s = sum_from(r0, mu.l00, pop.xi0);
        s += sum_from(r0, mu.l01, pop.xi1);
        n0[i] = h + s;
        SplitMix64 r1(derive_seed(seed, {t, 1, i}));
        s = sum_from(r1, mu.l10, pop.xi0);
        s += sum_from(r1, mu.l11, pop.xi1);
        n1[i] = h + s;
    }
    reweight(n0, n1, params.kappa, opt.reweight, derive_seed(seed, {t, 2}));
    pop.xi0.swap(n0);
    pop.xi1.swap(n1);
    pop.t += 1;
}

Reweight parse_reweight(const std::string& name)
{
    if (name == "none")
        return Reweight::none;
    if (name == "moment")
        return Reweight::moment;
    if (name == "pooled")
        return Reweight::pooled;
    fail("unknown reweight scheme '" + name + "' (expected none, moment or pooled)");
}

const char* to_string(Reweight r)
{
    switch (r) {
    case Reweight::none:
        return "none";
    case Reweight::moment:
        return "moment";
    case Reweight::pooled:
        return "pooled";
    }
    return "?";
}

Estimate pd_psucc(const Population& pop, double kappa, ThresholdRule rule)
{
    check_population(pop);
    const double thr = decision_threshold(rule, kappa);
    const double M = static_cast<double>(pop.size());
    const auto below = std::count_if(pop.xi0.begin(), pop.xi0.end(), [thr](double x) { return x < thr; });
    const auto above = std::count_if(pop.xi1.begin(), pop.xi1.end(), [thr](double x) { return x >= thr; });
    const double p0 = static_cast<double>(below) / M;
    const double p1 = static_cast<double>(above) / M;
    return {p0 + p1 - 1.0, std::sqrt(p0 * (1.0 - p0) / M + p1 * (1.0 - p1) / M)};
}

namespace {

struct Moments {
    double mean = 0.0;
    double var = 0.0;  // unbiased sample variance
};

Moments moments(const std::vector<double>& v)
{
    Moments m;
    const double n = static_cast<double>(v.size());
    for (double x : v)
        m.mean += x;
    m.mean /= n;
    double ss = 0.0;
    for (double x : v)
        ss += (x - m.mean) * (x - m.mean);
    m.var = v.size() > 1 ? ss / (n - 1.0) : 0.0;
    return m;
}

}  // namespace

Estimate bethe_free_energy(const Population& pop, const ModelParams& params, std::size_t mc_rounds,
                           std::uint64_t seed)
{
    check_population(pop);
    params.validate();
    if (mc_rounds < 2)
        fail("bethe_free_energy needs at least 2 Monte Carlo rounds");
    const double k = params.kappa;
    const double a = params.a;
    const double b = params.b;
    const double rm1 = params.rho() - 1.0;
    const MessageFunction f(params.rho());
    const auto f0 = transform(f, pop.xi0);
    const auto f1 = transform(f, pop.xi1);
    const std::size_t M = pop.size();
    const auto R = static_cast<std::ptrdiff_t>(mc_rounds);

    // Edge term, stratified over (x1, x2) in {(1,1), (0,1), (0,0)}.
    const std::vector<double>* side[3][2] = {{&pop.xi1, &pop.xi1}, {&pop.xi0, &pop.xi1}, {&pop.xi0, &pop.xi0}};
    const double edge_weight[3] = {k * k * a, 2.0 * k * (1.0 - k) * b, (1.0 - k) * (1.0 - k) * b};
    double psi_e = 0.0;
    double var_e = 0.0;
    for (int s = 0; s < 3; ++s) {
        std::vector<double> vals(mc_rounds);
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t r = 0; r < R; ++r) {
            SplitMix64 rng(derive_seed(seed, {0, static_cast<std::uint64_t>(s), static_cast<std::uint64_t>(r)}));
            const double x1 = (*side[s][0])[rng.below(M)];
            const double x2 = (*side[s][1])[rng.below(M)];
            vals[r] = std::log1p(rm1 * logistic(x1) * logistic(x2));
        }
        const Moments m = moments(vals);
        psi_e += 0.5 * edge_weight[s] * m.mean;
        var_e += 0.25 * edge_weight[s] * edge_weight[s] * m.var / static_cast<double>(mc_rounds);
    }

    // Vertex term, stratified over membership of the vertex.
    const double log_nonmember = std::log1p(-k);
    const double log_member = std::log(k) - k * (a - b);
    const double l1_mean[2] = {k * b, k * a};
    const double class_weight[2] = {1.0 - k, k};
    double psi_v = 0.0;
    double var_v = 0.0;
    for (int c = 0; c < 2; ++c) {
        std::vector<double> vals(mc_rounds);
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t r = 0; r < R; ++r) {
            SplitMix64 rng(derive_seed(seed, {1, static_cast<std::uint64_t>(c), static_cast<std::uint64_t>(r)}));
            double s = draw_sum(rng, (1.0 - k) * b, f0);
            s += draw_sum(rng, l1_mean[c], f1);
            vals[r] = log_add_exp(log_nonmember, log_member + s);
        }
        const Moments m = moments(vals);
        psi_v += class_weight[c] * m.mean;
        var_v += class_weight[c] * class_weight[c] * m.var / static_cast<double>(mc_rounds);
    }

    const double psi0 = 0.5 * k * k * (a * std::log(a / b) - 2.0 * a + 2.0 * b);
    return {psi_e - psi_v + psi0, std::sqrt(var_e + var_v)};
}

NishimoriReport nishimori_diagnostics(const Population& pop, double kappa)
{
    check_population(pop);
    const double odds_inv = (1.0 - kappa) / kappa;
    const std::size_t M = pop.size();
    const double c = *std::max_element(pop.xi0.begin(), pop.xi0.end());
    std::vector<double> y(M), y2(M);
    for (std::size_t i = 0; i < M; ++i) {
        y[i] = std::exp(pop.xi0[i] - c);
        y2[i] = y[i] * y[i];
    }
    const Moments my = moments(y);
    const Moments my2 = moments(y2);
    NishimoriReport r;
    const double ec = std::exp(c);
    r.moment0 = ec * my.mean;
    r.moment0_sd = ec * std::sqrt(my.var);
    const double scale2 = odds_inv * odds_inv * ec * ec;
    r.x_t = scale2 * my2.mean;
    r.x_t_se = scale2 * std::sqrt(my2.var / static_cast<double>(M));

    // Sup distance between the CDF of xi1 and the e^xi-weighted CDF of xi0.
    std::vector<std::size_t> order(M);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return pop.xi0[i] < pop.xi0[j]; });
    std::vector<double> s1 = pop.xi1;
    std::sort(s1.begin(), s1.end());
    const double wsum = my.mean * static_cast<double>(M);
    double cdf0 = 0.0;
    std::size_t i0 = 0;
    std::size_t i1 = 0;
    double dist = 0.0;
    while (i0 < M || i1 < M) {
        const double v0 = i0 < M ? pop.xi0[order[i0]] : INFINITY;
        const double v1 = i1 < M ? s1[i1] : INFINITY;
        const double v = std::min(v0, v1);
        while (i0 < M && pop.xi0[order[i0]] <= v)
            cdf0 += y[order[i0++]] / wsum;
        while (i1 < M && s1[i1] <= v)
            ++i1;
        dist = std::max(dist, std::abs(cdf0 - static_cast<double>(i1) / static_cast<double>(M)));
    }
    r.moment_ratio_deviation = dist;
    return r;
}

Population pd_run(const ModelParams& params, std::size_t M, int T, InitMode mode, std::uint64_t seed,
                  const PopulationOptions& opt, const PopulationObserver& observe)
{
    if (T < 0)
        fail("iteration count T must be non-negative");
    Population pop = pd_init(params, M, mode, seed);
    if (observe)
        observe(pop);
    while (pop.t < T) {
        pd_step(pop, params, seed, opt);
        if (observe)
            observe(pop);
    }
    return pop;
}

namespace {

Estimate across_seeds(const std::vector<Estimate>& runs)
{
    if (runs.size() == 1)
        return runs.front();
    std::vector<double> v;
    for (const auto& e : runs)
        v.push_back(e.value);
    const Moments m = moments(v);
    return {m.mean, std::sqrt(m.var / static_cast<double>(v.size()))};
}

}  // namespace

std::vector<CavityCurvePoint> pd_curve(const std::vector<double>& lambdas, double kappa, double b,
                                       const CurveOptions& opt, std::uint64_t seed)
{
    if (lambdas.empty())
        fail("pd_curve: lambda grid is empty");
    if (opt.seeds < 1)
        fail("pd_curve: need at least one seed");
    const std::size_t rounds = opt.mc_rounds ? opt.mc_rounds : 20 * opt.M;
    std::vector<CavityCurvePoint> out;
    for (std::size_t li = 0; li < lambdas.size(); ++li) {
        const ModelParams params = params_from_snr(kappa, b, lambdas[li]);
        CavityCurvePoint pt;
        pt.lambda = lambdas[li];
        for (int m = 0; m < 2; ++m) {
            const InitMode mode = m == 0 ? InitMode::free : InitMode::plus;
            std::vector<Estimate> ps, psi;
            for (int s = 0; s < opt.seeds; ++s) {
                const std::uint64_t run_seed = derive_seed(seed, {li, static_cast<std::uint64_t>(m),
                                                                  static_cast<std::uint64_t>(s)});
                const Population pop = pd_run(params, opt.M, opt.T, mode, run_seed, opt.pop);
                ps.push_back(pd_psucc(pop, kappa, opt.rule));
                psi.push_back(bethe_free_energy(pop, params, rounds, derive_seed(run_seed, {0xf4ee})));
            }
            (m == 0 ? pt.psucc_fr : pt.psucc_pl) = across_seeds(ps);
            (m == 0 ? pt.psi_fr : pt.psi_pl) = across_seeds(psi);
        }
        const double gap = pt.psucc_pl.value - pt.psucc_fr.value;
        const double gap_se = std::hypot(pt.psucc_pl.se, pt.psucc_fr.se);
        pt.lambda_s_flag = gap > std::max(0.05, 4.0 * gap_se) && pt.psi_pl.value < pt.psi_fr.value;
        out.push_back(pt);
    }
    return out;
}

std::optional<double> estimate_lambda_s(const std::vector<CavityCurvePoint>& curve)
{
    auto separated = [](const CavityCurvePoint& p) {
        const double gap = p.psucc_pl.value - p.psucc_fr.value;
        return gap > std::max(0.05, 4.0 * std::hypot(p.psucc_pl.se, p.psucc_fr.se));
    };
    const auto first = std::find_if(curve.begin(), curve.end(), separated);
    if (first != curve.end() && first != curve.begin() && first->psi_pl.value <= first->psi_fr.value)
        return 0.5 * (std::prev(first)->lambda + first->lambda);
    for (std::size_t i = 0; i + 1 < curve.size(); ++i) {
        const auto& p = curve[i];
        const auto& q = curve[i + 1];
        if (!separated(p) || !separated(q))
            continue;
        const double dp = p.psi_pl.value - p.psi_fr.value;
        const double dq = q.psi_pl.value - q.psi_fr.value;
        if (dp > 0.0 && dq <= 0.0)
            return p.lambda + (q.lambda - p.lambda) * dp / (dp - dq);
    }
    return std::nullopt;
}

void write_population(std::ostream& out, const Population& pop, int cls)
{
    if (cls != 0 && cls != 1)
        fail("population class must be 0 or 1");
    const auto& v = cls == 0 ? pop.xi0 : pop.xi1;
    out << "class=" << cls << " t=" << pop.t << " M=" << v.size() << " seed=" << pop.seed << '\n';
    for (double x : v)
        out << format_double(x) << '\n';
}

void read_population(std::istream& in, Population& pop, int& cls)
{
    std::string line;
    if (!std::getline(in, line))
        fail("population snapshot: missing header");
    int t = 0;
    std::size_t M = 0;
    std::uint64_t seed = 0;
    char tail = 0;
    if (std::sscanf(line.c_str(), "class=%d t=%d M=%zu seed=%" SCNu64 "%c", &cls, &t, &M, &seed, &tail) != 4 ||
        (cls != 0 && cls != 1))
        fail("population snapshot: bad header '" + line + "'");
    std::vector<double> v(M);
    for (std::size_t i = 0; i < M; ++i) {
        if (!std::getline(in, line))
            fail("population snapshot: expected " + std::to_string(M) + " samples");
        std::istringstream is(line);
        if (!(is >> v[i]))
            fail("population snapshot: bad sample on data line " + std::to_string(i + 1));
    }
    (cls == 0 ? pop.xi0 : pop.xi1) = std::move(v);
    pop.t = t;
    pop.seed = seed;
}

}  // namespace hclab
