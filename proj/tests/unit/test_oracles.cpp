#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hclab/kernel.hpp"
#include "hclab/oracles.hpp"
#include "hclab/rng.hpp"

using namespace hclab;

namespace {

PlantedGraph random_graph(std::size_t n, double p, SplitMix64& rng)
{
    std::vector<Edge> edges;
    for (std::uint32_t i = 0; i < n; ++i)
        for (std::uint32_t j = i + 1; j < n; ++j)
            if (rng.uniform() < p)
                edges.emplace_back(i, j);
    std::vector<std::uint8_t> x(n);
    for (auto& b : x)
        b = rng.uniform() < 0.3;
    return PlantedGraph(n, std::move(edges), std::move(x));
}

bool adjacent(const PlantedGraph& g, std::uint32_t i, std::uint32_t j)
{
    const auto nb = g.neighbors(i);
    return std::find(nb.begin(), nb.end(), j) != nb.end();
}

// Direct sum over states of the full likelihood, one pair at a time.
std::vector<double> naive_posterior(const PlantedGraph& g, const ModelParams& p, bool local)
{
    const std::size_t n = g.n();
    const double N = static_cast<double>(n);
    std::vector<double> on(n, 0.0), off(n, 0.0);
    for (std::uint32_t s = 0; s < (1u << n); ++s) {
        double w = 1.0;
        for (std::size_t i = 0; i < n; ++i)
            w *= (s >> i) & 1u ? (local ? p.gamma() : p.kappa) : (local ? 1.0 : 1.0 - p.kappa);
        for (std::uint32_t i = 0; i < n; ++i)
            for (std::uint32_t j = i + 1; j < n; ++j) {
                const bool both = ((s >> i) & 1u) && ((s >> j) & 1u);
                const bool e = adjacent(g, i, j);
                if (local) {
                    if (both && e)
                        w *= p.rho();
                } else {
                    const double q = (both ? p.a : p.b) / N;
                    w *= e ? q : 1.0 - q;
                }
            }
        for (std::size_t i = 0; i < n; ++i)
            ((s >> i) & 1u ? on : off)[i] += w;
    }
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = std::log(on[i] / off[i]);
    return out;
}

}  // namespace

TEST_CASE("binomial")
{
    CHECK(binomial(18, 6) == 18564.0);
    CHECK(binomial(5, 0) == 1.0);
    CHECK(binomial(3, 5) == 0.0);
    CHECK(binomial(60, 30) == doctest::Approx(1.1826458156486e17));
}

TEST_CASE("enumeration matches a direct sum")
{
    SplitMix64 rng(5);
    for (int rep = 0; rep < 20; ++rep) {
        const std::size_t n = 2 + rng.below(8);
        const auto g = random_graph(n, 0.4, rng);
        ModelParams p;
        p.n = n;
        p.kappa = 0.1 + 0.5 * rng.uniform();
        p.b = 0.5 + rng.uniform();
        p.a = p.b + std::min(3.0, static_cast<double>(n) - p.b) * rng.uniform();
        const auto local = exact_local_marginals(g, p);
        const auto want_local = naive_posterior(g, p, true);
        const auto post = exact_posterior_marginals(g, p);
        const auto want_post = naive_posterior(g, p, false);
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(local[i] == doctest::Approx(want_local[i]).epsilon(1e-10));
            CHECK(post[i] == doctest::Approx(want_post[i]).epsilon(1e-10));
        }
    }
}

TEST_CASE("a = b posterior is the prior")
{
    SplitMix64 rng(6);
    const auto g = random_graph(10, 0.5, rng);
    ModelParams p;
    p.n = 10;
    p.a = p.b = 2.0;
    p.kappa = 0.2;
    for (double v : exact_posterior_marginals(g, p))
        CHECK(v == doctest::Approx(prior_log_odds(0.2)).epsilon(1e-12));
}

TEST_CASE("enumeration guard")
{
    const PlantedGraph g(21, {}, std::vector<std::uint8_t>(21, 0));
    ModelParams p;
    p.n = 21;
    p.a = 2.0;
    p.b = 1.0;
    p.kappa = 0.1;
    try {
        exact_local_marginals(g, p);
        FAIL("expected a guard error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::guard);
    }
}

TEST_CASE("exhaustive search matches brute force")
{
    SplitMix64 rng(7);
    for (int rep = 0; rep < 15; ++rep) {
        const std::size_t n = 6 + rng.below(7);
        const std::size_t k = 2 + rng.below(n - 3);
        const auto g = random_graph(n, 0.35, rng);

        std::size_t best = 0;
        std::uint64_t ties = 0;
        std::vector<std::uint32_t> best_set;
        std::vector<bool> pick(n, false);
        std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(k), true);
        do {
            std::vector<std::uint32_t> s;
            for (std::uint32_t i = 0; i < n; ++i)
                if (pick[i])
                    s.push_back(i);
            const std::size_t c = count_edges_within(g, s);
            if (best_set.empty() || c > best) {
                best = c;
                ties = 1;
                best_set = s;
            } else if (c == best) {
                ++ties;
                best_set = std::min(best_set, s);
            }
        } while (std::prev_permutation(pick.begin(), pick.end()));

        const auto r = exhaustive_search(g, k);
        CHECK(r.best_edge_count == best);
        CHECK(r.ties == ties);
        CHECK(r.best_set == best_set);
        std::size_t overlap = 0;
        for (auto v : r.best_set)
            overlap += g.membership()[v];
        CHECK(r.overlap == overlap);
    }
}

TEST_CASE("exhaustive guard")
{
    const PlantedGraph g(40, {}, std::vector<std::uint8_t>(40, 0));
    try {
        exhaustive_search(g, 20);
        FAIL("expected a guard error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::guard);
    }
}

TEST_CASE("indicator")
{
    const auto v = indicator(5, {0, 3});
    CHECK(v == std::vector<std::uint8_t>{1, 0, 0, 1, 0});
    CHECK_THROWS_AS(indicator(3, {3}), Error);
}

TEST_CASE("proposition bound")
{
    const double kappa = 0.01;
    const auto dense = prop1_bound_dense(100.0, kappa);
    const double want = 1.0 - 2.0 * std::numbers::e / 0.1 * std::exp(-100.0 * 0.99 / 0.16);
    CHECK(dense.value == doctest::Approx(want));
    CHECK_FALSE(dense.vacuous);
    CHECK(prop1_bound_dense(0.5, kappa).vacuous);
    // The finite-degree form tends to the dense one as b grows with a - b fixed in snr.
    const auto p = params_from_snr(kappa, 1e8, 100.0);
    CHECK(prop1_bound(100.0, kappa, p.a, p.b).value == doctest::Approx(dense.value).epsilon(1e-6));
    CHECK_THROWS_AS(prop1_bound_dense(1.0, 0.5), Error);
    CHECK_THROWS_AS(prop1_bound(1.0, 0.1, -1.0, 1.0), Error);
}
