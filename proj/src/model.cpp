#include "hclab/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "hclab/error.hpp"
#include "hclab/kernel.hpp"
#include "hclab/rng.hpp"

namespace hclab {

double ModelParams::snr() const
{
    const double d = a - b;
    return kappa * kappa * d * d / ((1.0 - kappa) * b);
}

double ModelParams::gamma() const { return std::exp(-kappa * (a - b)) * kappa / (1.0 - kappa); }

double ModelParams::h() const { return field_h(a, b, kappa); }

void ModelParams::validate() const
{
    if (!(kappa > 0.0 && kappa < 1.0))
        fail("invalid fraction: kappa must lie in (0, 1)");
    if (!(b > 0.0) || !std::isfinite(b))
        fail("model parameters need a finite b > 0");
    if (!(a >= b) || !std::isfinite(a))
        fail("model parameters need a finite a >= b");
}

void ModelParams::validate_for_sampling() const
{
    // Degenerate corners (kappa in {0, 1}, a = b = 0) are legal for sampling.
    if (!(kappa >= 0.0 && kappa <= 1.0))
        fail("invalid fraction: kappa must lie in [0, 1]");
    if (!(b >= 0.0 && a >= b) || !std::isfinite(a))
        fail("model parameters need a >= b >= 0");
    if (!n || *n == 0)
        fail("graph sampling needs a positive vertex count n");
    const double nn = static_cast<double>(*n);
    if (a / nn > 1.0 || b / nn > 1.0)
        fail("supercritical edge probability: a/n and b/n must not exceed 1");
}

ModelParams params_from_snr(double kappa, double b, double lambda, std::optional<std::size_t> n)
{
    if (!(lambda >= 0.0) || !std::isfinite(lambda))
        fail("params_from_snr: lambda must be finite and non-negative");
    if (!(kappa > 0.0 && kappa < 1.0))
        fail("invalid fraction: kappa must lie in (0, 1)");
    if (!(b > 0.0))
        fail("params_from_snr: b must be positive");
    ModelParams p;
    p.n = n;
    p.kappa = kappa;
    p.b = b;
    p.a = b + std::sqrt(lambda * (1.0 - kappa) * b) / kappa;
    if (n && p.a / static_cast<double>(*n) > 1.0)
        fail("supercritical edge probability: a/n = " + std::to_string(p.a / static_cast<double>(*n)) +
             " exceeds 1");
    return p;
}

PlantedGraph::PlantedGraph(std::size_t n, std::vector<Edge> edges, std::vector<std::uint8_t> membership,
                           std::uint64_t seed)
    : n_(n), seed_(seed), edges_(std::move(edges)), membership_(std::move(membership))
{
    if (membership_.size() != n_)
        fail("membership length " + std::to_string(membership_.size()) + " does not match n = " +
             std::to_string(n_));
    for (auto& x : membership_)
        x = x ? 1 : 0;
    for (auto& [i, j] : edges_) {
        if (i == j)
            fail("self-loop at vertex " + std::to_string(i));
        if (i >= n_ || j >= n_)
            fail("edge endpoint out of range");
        if (i > j)
            std::swap(i, j);
    }
    if (!std::is_sorted(edges_.begin(), edges_.end()))
        std::sort(edges_.begin(), edges_.end());
    if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end())
        fail("duplicate edge in edge list");

    offsets_.assign(n_ + 1, 0);
    for (const auto& [i, j] : edges_) {
        ++offsets_[i + 1];
        ++offsets_[j + 1];
    }
    std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
    neighbors_.resize(2 * edges_.size());
    reverse_.resize(2 * edges_.size());
    std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
    for (const auto& [i, j] : edges_) {
        const std::size_t si = fill[i]++;
        const std::size_t sj = fill[j]++;
        neighbors_[si] = j;
        neighbors_[sj] = i;
        reverse_[si] = sj;
        reverse_[sj] = si;
    }
}

std::size_t PlantedGraph::hidden_size() const
{
    return static_cast<std::size_t>(std::count(membership_.begin(), membership_.end(), std::uint8_t{1}));
}

namespace {

// Calls emit(pos) for each position in [0, total) kept independently with
// probability p, skipping geometrically between hits.
template <class Emit>
void bernoulli_positions(SplitMix64& rng, std::uint64_t total, double p, Emit&& emit)
{
    if (total == 0 || p <= 0.0)
        return;
    if (p >= 1.0) {
        for (std::uint64_t k = 0; k < total; ++k)
            emit(k);
        return;
    }
    const double log_q = std::log1p(-p);
    std::uint64_t pos = 0;
    for (;;) {
        const double u = 1.0 - rng.uniform();  // (0, 1]
        const double skip = std::floor(std::log(u) / log_q);
        if (skip >= static_cast<double>(total - pos))
            return;
        pos += static_cast<std::uint64_t>(skip);
        emit(pos);
        ++pos;
        if (pos >= total)
            return;
    }
}

void sample_within(SplitMix64& rng, const std::vector<std::uint32_t>& set, double p, std::vector<Edge>& out)
{
    const std::uint64_t m = set.size();
    if (m < 2)
        return;
    // Lower-triangle pairs (v, w), w < v, enumerated row by row.
    std::uint64_t v = 1;
    std::uint64_t row_start = 0;  // linear index of (v, 0)
    bernoulli_positions(rng, m * (m - 1) / 2, p, [&](std::uint64_t pos) {
        while (pos >= row_start + v) {
            row_start += v;
            ++v;
        }
        out.emplace_back(set[pos - row_start], set[v]);
    });
}

void sample_between(SplitMix64& rng, const std::vector<std::uint32_t>& left,
                    const std::vector<std::uint32_t>& right, double p, std::vector<Edge>& out)
{
    const std::uint64_t width = right.size();
    bernoulli_positions(rng, static_cast<std::uint64_t>(left.size()) * width, p,
                        [&](std::uint64_t pos) { out.emplace_back(left[pos / width], right[pos % width]); });
}

}  // namespace

PlantedGraph sample_graph(const ModelParams& params, std::uint64_t seed, HiddenSetMode mode)
{
    params.validate_for_sampling();
    const std::size_t n = *params.n;
    if (n > 0xffffffffULL)
        fail("vertex count exceeds 32-bit index range");
    SplitMix64 rng(derive_seed(seed, {0}));

    std::vector<std::uint8_t> membership(n, 0);
    if (mode == HiddenSetMode::bernoulli) {
        for (auto& x : membership)
            x = rng.uniform() < params.kappa ? 1 : 0;
    } else {
        const auto k = static_cast<std::size_t>(std::floor(params.kappa * static_cast<double>(n)));
        std::vector<std::uint32_t> perm(n);
        std::iota(perm.begin(), perm.end(), 0u);
        for (std::size_t i = 0; i < k; ++i) {
            const std::size_t j = i + rng.below(n - i);
            std::swap(perm[i], perm[j]);
            membership[perm[i]] = 1;
        }
    }

    std::vector<std::uint32_t> inside;
    std::vector<std::uint32_t> outside;
    for (std::uint32_t v = 0; v < n; ++v)
        (membership[v] ? inside : outside).push_back(v);

    const double nn = static_cast<double>(n);
    const double p_in = params.a / nn;
    const double p_out = params.b / nn;
    std::vector<Edge> edges;
    const double expected = p_in * 0.5 * inside.size() * inside.size() + p_out * 0.5 * nn * nn;
    edges.reserve(static_cast<std::size_t>(expected * 1.05) + 16);
    sample_within(rng, inside, p_in, edges);
    sample_between(rng, inside, outside, p_out, edges);
    sample_within(rng, outside, p_out, edges);
    for (auto& [i, j] : edges)
        if (i > j)
            std::swap(i, j);
    std::sort(edges.begin(), edges.end());
    return PlantedGraph(n, std::move(edges), std::move(membership), seed);
}

double empirical_psucc(std::span<const std::uint8_t> estimate, std::span<const std::uint8_t> truth)
{
    if (estimate.size() != truth.size())
        fail("empirical_psucc: estimate and truth lengths differ");
    std::size_t members = 0;
    std::size_t hits = 0;
    std::size_t rejects = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i]) {
            ++members;
            hits += estimate[i] ? 1 : 0;
        } else {
            rejects += estimate[i] ? 0 : 1;
        }
    }
    const std::size_t others = truth.size() - members;
    if (members == 0 || others == 0)
        fail("degenerate ground truth: need at least one member and one non-member");
    return static_cast<double>(hits) / static_cast<double>(members) +
           static_cast<double>(rejects) / static_cast<double>(others) - 1.0;
}

std::size_t count_edges_within(const PlantedGraph& graph, std::span<const std::uint32_t> subset)
{
    std::vector<std::uint8_t> in(graph.n(), 0);
    for (auto v : subset) {
        if (v >= graph.n())
            fail("invalid subset: vertex " + std::to_string(v) + " out of range");
        in[v] = 1;
    }
    std::size_t count = 0;
    for (std::uint32_t v = 0; v < graph.n(); ++v) {
        if (!in[v])
            continue;
        for (auto w : graph.neighbors(v))
            count += (w > v && in[w]) ? 1 : 0;
    }
    return count;
}

}  // namespace hclab
