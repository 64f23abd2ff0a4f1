#include "hclab/oracles.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <string>

#include "hclab/error.hpp"
#include "hclab/kernel.hpp"

namespace hclab {

double binomial(std::size_t n, std::size_t k)
{
    if (k > n)
        return 0.0;
    k = std::min(k, n - k);
    double r = 1.0;
    for (std::size_t i = 1; i <= k; ++i)
        r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
    return std::round(r);
}

namespace {

struct Best {
    std::size_t count = 0;
    std::uint64_t ties = 0;
    std::vector<std::uint32_t> set;
};

// Incremental internal-edge counter for a vertex set.
class EdgeCounter {
public:
    explicit EdgeCounter(const PlantedGraph& g) : g_(g), cnt_(g.n(), 0) {}

    void add(std::uint32_t v)
    {
        edges_ += cnt_[v];
        for (auto w : g_.neighbors(v))
            ++cnt_[w];
    }
    void remove(std::uint32_t v)
    {
        for (auto w : g_.neighbors(v))
            --cnt_[w];
        edges_ -= cnt_[v];
    }
    std::size_t edges() const { return edges_; }

private:
    const PlantedGraph& g_;
    std::vector<std::uint32_t> cnt_;
    std::size_t edges_ = 0;
};

void offer(Best& best, std::size_t count, const std::vector<std::uint32_t>& set)
{
    if (best.set.empty() || count > best.count) {
        best.count = count;
        best.ties = 1;
        best.set = set;
    } else if (count == best.count) {
        ++best.ties;
        if (set < best.set)
            best.set = set;
    }
}

// All size-k sets whose largest element is m: (k-1)-subsets of [0, m) plus m.
Best search_block(const PlantedGraph& g, std::size_t k, std::uint32_t m)
{
    Best best;
    const std::size_t t = k - 1;
    EdgeCounter ec(g);
    ec.add(m);
    std::vector<std::uint32_t> cur(k);  // sorted snapshot used for tie-breaks
    auto visit_sorted = [&](const std::vector<std::uint32_t>& c) {
        // c[1..t] ascending
        for (std::size_t j = 0; j < t; ++j)
            cur[j] = c[j + 1];
        cur[t] = m;
        offer(best, ec.edges(), cur);
    };
    if (t == 0) {
        cur[0] = m;
        offer(best, ec.edges(), cur);
        return best;
    }
    // c[1..t] with sentinel c[t+1] = m, in Knuth's 1-based layout.
    std::vector<std::uint32_t> c(t + 2);
    for (std::size_t j = 1; j <= t; ++j) {
        c[j] = static_cast<std::uint32_t>(j - 1);
        ec.add(c[j]);
    }
    c[t + 1] = m;
    if (t == m) {
        visit_sorted(c);
        return best;
    }
    if (t == 1) {
        for (std::uint32_t v = 0;; ++v) {
            visit_sorted(c);
            if (v + 1 >= m)
                break;
            ec.remove(v);
            ec.add(v + 1);
            c[1] = v + 1;
        }
        return best;
    }
    auto swap = [&](std::uint32_t out, std::uint32_t in) {
        ec.remove(out);
        ec.add(in);
    };
    // Revolving-door enumeration (Knuth, TAOCP 7.2.1.3, Algorithm R).
    for (;;) {
        visit_sorted(c);
        std::size_t j = 2;
        bool try_decrease;
        if (t % 2 == 1) {
            if (c[1] + 1 < c[2]) {
                swap(c[1], c[1] + 1);
                ++c[1];
                continue;
            }
            try_decrease = true;
        } else {
            if (c[1] > 0) {
                swap(c[1], c[1] - 1);
                --c[1];
                continue;
            }
            try_decrease = false;
        }
        bool moved = false;
        while (j <= t) {
            if (try_decrease) {
                if (c[j] >= j) {
                    const std::uint32_t out = c[j];
                    const auto in = static_cast<std::uint32_t>(j - 2);
                    swap(out, in);
                    c[j] = c[j - 1];
                    c[j - 1] = in;
                    moved = true;
                    break;
                }
                ++j;
                try_decrease = false;
            } else {
                if (c[j] + 1 < c[j + 1]) {
                    const std::uint32_t out = c[j - 1];
                    const std::uint32_t in = c[j] + 1;
                    swap(out, in);
                    c[j - 1] = c[j];
                    c[j] = in;
                    moved = true;
                    break;
                }
                ++j;
                try_decrease = true;
            }
        }
        if (!moved)
            break;
    }
    return best;
}

}  // namespace

ExhaustiveResult exhaustive_search(const PlantedGraph& graph, std::size_t k)
{
    const std::size_t n = graph.n();
    if (k < 1 || k > n)
        fail("exhaustive_search: need 1 <= k <= n");
    if (binomial(n, k) > exhaustive_guard)
        throw Error(ErrorKind::guard, "instance too large: C(" + std::to_string(n) + ", " + std::to_string(k) +
                                          ") exceeds 1e8 subsets");

    const auto blocks = static_cast<std::ptrdiff_t>(n - k + 1);
    std::vector<Best> results(static_cast<std::size_t>(blocks));
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t b = 0; b < blocks; ++b)
        results[b] = search_block(graph, k, static_cast<std::uint32_t>(k - 1 + b));

    Best best;
    std::uint64_t ties = 0;
    for (const auto& r : results) {
        if (best.set.empty() || r.count > best.count) {
            best = r;
            ties = r.ties;
        } else if (r.count == best.count) {
            ties += r.ties;
            if (r.set < best.set)
                best.set = r.set;
        }
    }
    ExhaustiveResult out;
    out.best_set = best.set;
    out.best_edge_count = best.count;
    out.ties = ties;
    const auto& x = graph.membership();
    for (auto v : out.best_set)
        out.overlap += x[v] ? 1 : 0;
    return out;
}

std::vector<std::uint8_t> indicator(std::size_t n, const std::vector<std::uint32_t>& set)
{
    std::vector<std::uint8_t> out(n, 0);
    for (auto v : set) {
        if (v >= n)
            fail("indicator: vertex out of range");
        out[v] = 1;
    }
    return out;
}

namespace {

BoundValue bound_from_exponent(double kappa, double exponent)
{
    const double v = 1.0 - 2.0 * std::numbers::e / std::sqrt(kappa) * std::exp(-exponent);
    return {v, v <= 0.0};
}

void check_prop1_kappa(double kappa)
{
    if (!(kappa > 0.0))
        fail("invalid fraction: kappa must be positive");
    if (!(kappa < 0.5))
        fail("outside proposition hypothesis: the bound needs kappa < 1/2");
}

}  // namespace

BoundValue prop1_bound(double lambda, double kappa, double a, double b)
{
    check_prop1_kappa(kappa);
    if (!(a > 0.0 && b > 0.0) || !(lambda >= 0.0))
        fail("prop1_bound: need a, b > 0 and lambda >= 0");
    return bound_from_exponent(kappa, lambda * (1.0 - kappa) * b / (16.0 * kappa * a));
}

BoundValue prop1_bound_dense(double lambda, double kappa)
{
    check_prop1_kappa(kappa);
    if (!(lambda >= 0.0))
        fail("prop1_bound: lambda must be non-negative");
    return bound_from_exponent(kappa, lambda * (1.0 - kappa) / (16.0 * kappa));
}

namespace {

// Enumerates all 2^n states with log-weight
//   |x| c1 + E(x) c2 + (C(|x|, 2) - E(x)) c3,
// skipping terms whose count is zero, and returns per-vertex log-odds.
std::vector<double> enumerate(const PlantedGraph& graph, double c1, double c2, double c3)
{
    const std::size_t n = graph.n();
    if (n > enumeration_guard)
        throw Error(ErrorKind::guard, "enumeration guard: n = " + std::to_string(n) + " exceeds 20");
    std::vector<std::uint32_t> adj(n, 0);
    for (const auto& [i, j] : graph.edges()) {
        adj[i] |= 1u << j;
        adj[j] |= 1u << i;
    }
    const std::uint32_t states = 1u << n;
    std::vector<double> lw(states);
    std::vector<std::uint16_t> E(states, 0);
    double mx = -INFINITY;
    for (std::uint32_t s = 0; s < states; ++s) {
        if (s) {
            const int low = std::countr_zero(s);
            const std::uint32_t rest = s & (s - 1);
            E[s] = static_cast<std::uint16_t>(E[rest] + std::popcount(adj[low] & rest));
        }
        const int size = std::popcount(s);
        const double pairs = 0.5 * size * (size - 1);
        const double nonedges = pairs - E[s];
        double w = 0.0;
        if (size)
            w += size * c1;
        if (E[s])
            w += E[s] * c2;
        if (nonedges > 0.0)
            w += nonedges * c3;
        lw[s] = w;
        mx = std::max(mx, w);
    }
    std::vector<double> on(n, 0.0), off(n, 0.0);
    for (std::uint32_t s = 0; s < states; ++s) {
        const double p = std::exp(lw[s] - mx);
        if (p == 0.0)
            continue;
        for (std::size_t i = 0; i < n; ++i)
            ((s >> i) & 1u ? on : off)[i] += p;
    }
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = std::log(on[i]) - std::log(off[i]);
    return out;
}

}  // namespace

std::vector<double> exact_local_marginals(const PlantedGraph& graph, const ModelParams& params)
{
    params.validate();
    return enumerate(graph, std::log(params.gamma()), std::log(params.rho()), 0.0);
}

std::vector<double> exact_posterior_marginals(const PlantedGraph& graph, const ModelParams& params)
{
    params.validate();
    const double N = static_cast<double>(graph.n());
    if (params.a > N)
        fail("supercritical edge probability: a/N exceeds 1");
    const double c3 = std::log1p(-params.a / N) - std::log1p(-params.b / N);
    return enumerate(graph, prior_log_odds(params.kappa), std::log(params.rho()), c3);
}

}  // namespace hclab
