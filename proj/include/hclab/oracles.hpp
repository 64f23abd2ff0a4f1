#pragma once

// Brute-force references for small instances.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "hclab/model.hpp"

namespace hclab {

constexpr double exhaustive_guard = 1e8;  // max C(n, k)
constexpr std::size_t enumeration_guard = 20;  // max n for 2^n enumeration

// C(n, k) in floating point.
double binomial(std::size_t n, std::size_t k);

struct ExhaustiveResult {
    std::vector<std::uint32_t> best_set;  // sorted
    std::size_t best_edge_count = 0;
    std::uint64_t ties = 0;  // number of size-k sets achieving the maximum
    std::size_t overlap = 0;  // |best_set intersect S|
};

// Size-k set with the most internal edges; among maximisers the
// lexicographically smallest. Enumerates each block of subsets sharing the
// same largest element with a revolving-door Gray code and updates the edge
// count incrementally; blocks run in parallel.
// Throws Error(guard, "instance too large") when C(n, k) > 1e8.
ExhaustiveResult exhaustive_search(const PlantedGraph& graph, std::size_t k);

// Indicator vector of a vertex set.
std::vector<std::uint8_t> indicator(std::size_t n, const std::vector<std::uint32_t>& set);

struct BoundValue {
    double value = 0.0;
    bool vacuous = false;  // value <= 0 carries no information
};

// 1 - (2e / sqrt(kappa)) exp(-lambda (1 - kappa) b / (16 kappa a)); kappa < 1/2.
BoundValue prop1_bound(double lambda, double kappa, double a, double b);
// The b -> infinity form 1 - (2e / sqrt(kappa)) exp(-lambda (1 - kappa) / (16 kappa)).
BoundValue prop1_bound_dense(double lambda, double kappa);

// Log-odds of x_i = 1 under p(x) proportional to
// prod_{(ij) in E} rho^{x_i x_j} prod_i gamma^{x_i}, by enumerating 2^n states.
std::vector<double> exact_local_marginals(const PlantedGraph& graph, const ModelParams& params);

// Log-odds under the exact posterior of the model given the graph, with
// non-edge factors ((1 - a/N) / (1 - b/N))^{x_i x_j}, N = graph.n().
std::vector<double> exact_posterior_marginals(const PlantedGraph& graph, const ModelParams& params);

}  // namespace hclab
