#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace hclab {

// Hidden-set model parameters. Edge probabilities are a/n inside the hidden
// set and b/n elsewhere; each vertex is a member with probability kappa.
//
// `n` is empty for asymptotic (n -> infinity) uses such as the cavity
// solver, which only need a, b and kappa.
struct ModelParams {
    std::optional<std::size_t> n;
    double a = 1.0;
    double b = 1.0;
    double kappa = 0.5;

    double rho() const { return a / b; }
    // Signal-to-noise ratio kappa^2 (a-b)^2 / ((1-kappa) b).
    double snr() const;
    double gamma() const;
    double h() const;
    double deg_in() const { return kappa * a + (1.0 - kappa) * b; }
    double deg_out() const { return b; }

    // Throws unless 0 < kappa < 1 and a >= b > 0.
    void validate() const;
    // a >= b >= 0, 0 <= kappa <= 1, a/n <= 1 and b/n <= 1; requires n.
    void validate_for_sampling() const;
};

// Inverts snr(): a = b + sqrt(lambda (1-kappa) b) / kappa.
// With n given, throws "supercritical edge probability" if a/n > 1.
ModelParams params_from_snr(double kappa, double b, double lambda, std::optional<std::size_t> n = std::nullopt);

using Edge = std::pair<std::uint32_t, std::uint32_t>;

// Undirected simple graph with a ground-truth membership vector.
//
// Edges are stored as (i, j) with i < j, sorted lexicographically and
// duplicate-free. Neighbor lists are kept in CSR form; slot e of vertex i's
// range holds neighbor `neighbors()[e]`, and `reverse_slot()[e]` is the slot
// of i inside that neighbor's range. Immutable after construction.
class PlantedGraph {
public:
    PlantedGraph() = default;
    // Normalizes the edge list (orients, sorts). Throws on self-loops,
    // duplicates, out-of-range endpoints, or a membership size mismatch.
    PlantedGraph(std::size_t n, std::vector<Edge> edges, std::vector<std::uint8_t> membership,
                 std::uint64_t seed = 0);

    std::size_t n() const noexcept { return n_; }
    std::size_t num_edges() const noexcept { return edges_.size(); }
    std::uint64_t seed() const noexcept { return seed_; }
    const std::vector<Edge>& edges() const noexcept { return edges_; }
    const std::vector<std::uint8_t>& membership() const noexcept { return membership_; }

    std::size_t degree(std::size_t v) const { return offsets_[v + 1] - offsets_[v]; }
    std::span<const std::uint32_t> neighbors(std::size_t v) const
    {
        return {neighbors_.data() + offsets_[v], degree(v)};
    }
    const std::vector<std::size_t>& offsets() const noexcept { return offsets_; }
    const std::vector<std::uint32_t>& neighbors() const noexcept { return neighbors_; }
    const std::vector<std::size_t>& reverse_slot() const noexcept { return reverse_; }

    std::size_t hidden_size() const;

private:
    std::size_t n_ = 0;
    std::uint64_t seed_ = 0;
    std::vector<Edge> edges_;
    std::vector<std::uint8_t> membership_;
    std::vector<std::size_t> offsets_{0};
    std::vector<std::uint32_t> neighbors_;
    std::vector<std::size_t> reverse_;
};

enum class HiddenSetMode {
    bernoulli,   // i.i.d. Bernoulli(kappa) membership
    fixed_size,  // uniformly random set of size floor(kappa n)
};

// Samples membership, then every pair independently with probability a/n
// (both endpoints members) or b/n. Geometric skipping over the three pair
// classes keeps the cost at O(n + |E|). Deterministic in `seed`.
PlantedGraph sample_graph(const ModelParams& params, std::uint64_t seed,
                          HiddenSetMode mode = HiddenSetMode::bernoulli);

// P(T=1 | member) + P(T=0 | non-member) - 1 from within-class fractions.
double empirical_psucc(std::span<const std::uint8_t> estimate, std::span<const std::uint8_t> truth);

// Number of edges with both endpoints in `subset` (duplicates ignored).
std::size_t count_edges_within(const PlantedGraph& graph, std::span<const std::uint32_t> subset);

// Plain-text graph format:
//   n=<int> kappa=<float> a=<float> b=<float> seed=<u64>
//   <membership bits, space separated>
//   i j        (one edge per line, i < j, lexicographic order)
// Floats are written in shortest round-trip form.
struct GraphFile {
    ModelParams params;
    PlantedGraph graph;
};

void write_graph(std::ostream& out, const PlantedGraph& graph, const ModelParams& params);
GraphFile read_graph(std::istream& in);

}  // namespace hclab
