#include "hclab/bp.hpp"

#include <cmath>
#include <limits>

#include <boost/math/tools/roots.hpp>

#include "hclab/error.hpp"

namespace hclab {

double decision_threshold(ThresholdRule rule, double kappa)
{
    return rule == ThresholdRule::max_psucc ? prior_log_odds(kappa) : 0.0;
}

namespace {

[[noreturn]] void diverged() { throw Error(ErrorKind::divergence, "numerical divergence: NaN message in BP"); }

// fvals[e] = f(messages[e]); returns false on NaN.
bool transform_messages(const MessageFunction& f, const std::vector<double>& messages, std::vector<double>& fvals)
{
    const auto m = static_cast<std::ptrdiff_t>(messages.size());
    int bad = 0;
#pragma omp parallel for schedule(static) reduction(| : bad)
    for (std::ptrdiff_t e = 0; e < m; ++e) {
        const double x = messages[e];
        if (std::isnan(x)) {
            bad |= 1;
            fvals[e] = 0.0;
        } else {
            fvals[e] = f(x);
        }
    }
    return bad == 0;
}

void sync_fields(MessageState& s)
{
    const auto& g = *s.graph;
    const MessageFunction f(s.kernel.rho);
    std::vector<double> fvals(s.messages.size());
    if (!transform_messages(f, s.messages, fvals))
        diverged();
    const auto& off = g.offsets();
    const auto& rev = g.reverse_slot();
    const auto n = static_cast<std::ptrdiff_t>(g.n());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        double sum = 0.0;
        for (std::size_t e = off[i]; e < off[i + 1]; ++e)
            sum += fvals[rev[e]];
        s.fields[i] = s.kernel.h + sum;
    }
}

inline double damp(double fresh, double old, double d)
{
    if (d == 0.0 || !std::isfinite(old))
        return fresh;
    return (1.0 - d) * fresh + d * old;
}

double mean_posterior(const std::vector<double>& fields, double c)
{
    const auto n = static_cast<std::ptrdiff_t>(fields.size());
    double sum = 0.0;
#pragma omp parallel for schedule(static) reduction(+ : sum)
    for (std::ptrdiff_t i = 0; i < n; ++i)
        sum += logistic(fields[i] + c);
    return sum / static_cast<double>(n);
}

// Shifts all messages by one constant so that their mean posterior equals
// the probability that a uniformly chosen directed edge leaves a member,
// kappa (kappa a + (1 - kappa) b) / (kappa^2 a + (1 - kappa^2) b).
// Returns the shift; 0 when no shift can reach the target.
double balance_messages(std::vector<double>& messages, double target)
{
    if (messages.empty())
        return 0.0;
    auto g = [&](double c) { return mean_posterior(messages, c) - target; };
    double lo = -1.0;
    double hi = 1.0;
    for (int i = 0; i < 60 && g(lo) > 0.0; ++i)
        lo *= 2.0;
    for (int i = 0; i < 60 && g(hi) < 0.0; ++i)
        hi *= 2.0;
    if (g(lo) > 0.0 || g(hi) < 0.0)
        return 0.0;
    std::uintmax_t iters = 200;
    const auto root = boost::math::tools::toms748_solve(g, lo, hi, boost::math::tools::eps_tolerance<double>(50),
                                                        iters);
    const double c = 0.5 * (root.first + root.second);
    for (double& m : messages)
        m += c;
    return c;
}

}  // namespace

MessageState bp_init(const PlantedGraph& graph, const ModelParams& params, InitMode mode, double damping,
                     bool balanced)
{
    params.validate();
    if (!(damping >= 0.0 && damping < 1.0))
        fail("damping must lie in [0, 1)");
    MessageState s;
    s.graph = &graph;
    s.kernel = KernelParams::from_model(params.a, params.b, params.kappa);
    s.kappa = params.kappa;
    s.mode = mode;
    s.damping = damping;
    s.balanced = balanced;
    {
        const double k = params.kappa;
        s.edge_target = k * (k * params.a + (1.0 - k) * params.b) / (k * k * params.a + (1.0 - k * k) * params.b);
    }
    s.messages.assign(graph.neighbors().size(), s.kernel.theta);
    s.fields.assign(graph.n(), 0.0);
    if (mode == InitMode::plus) {
        const auto& off = graph.offsets();
        const auto& x = graph.membership();
        constexpr double inf = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < graph.n(); ++i)
            for (std::size_t e = off[i]; e < off[i + 1]; ++e)
                s.messages[e] = x[i] ? inf : -inf;
    }
    sync_fields(s);
    return s;
}

void bp_step(MessageState& s)
{
    const auto& g = *s.graph;
    const MessageFunction f(s.kernel.rho);
    std::vector<double> fvals(s.messages.size());
    if (!transform_messages(f, s.messages, fvals))
        diverged();

    std::vector<double> next(s.messages.size());
    const auto& off = g.offsets();
    const auto& rev = g.reverse_slot();
    const double h = s.kernel.h;
    const double d = s.damping;
    const auto n = static_cast<std::ptrdiff_t>(g.n());
#pragma omp parallel for schedule(dynamic, 256)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        double sum = 0.0;
        for (std::size_t e = off[i]; e < off[i + 1]; ++e)
            sum += fvals[rev[e]];
        for (std::size_t e = off[i]; e < off[i + 1]; ++e)
            next[e] = damp(h + (sum - fvals[rev[e]]), s.messages[e], d);
    }
    s.messages.swap(next);
    ++s.t;
    if (s.balanced)
        s.shift = balance_messages(s.messages, s.edge_target);
    // Fields must reflect the messages just written.
    sync_fields(s);
}

void bp_step_reference(MessageState& s)
{
    const auto& g = *s.graph;
    const MessageFunction f(s.kernel.rho);
    const auto& off = g.offsets();
    const auto& rev = g.reverse_slot();
    const double h = s.kernel.h;
    std::vector<double> next(s.messages.size());
    for (std::size_t i = 0; i < g.n(); ++i) {
        for (std::size_t e = off[i]; e < off[i + 1]; ++e) {
            double sum = h;
            for (std::size_t k = off[i]; k < off[i + 1]; ++k) {
                if (k == e)
                    continue;
                const double in = s.messages[rev[k]];
                if (std::isnan(in))
                    diverged();
                sum += f(in);
            }
            next[e] = damp(sum, s.messages[e], s.damping);
        }
    }
    s.messages.swap(next);
    ++s.t;
    if (s.balanced)
        s.shift = balance_messages(s.messages, s.edge_target);
    for (std::size_t i = 0; i < g.n(); ++i) {
        double sum = h;
        for (std::size_t e = off[i]; e < off[i + 1]; ++e)
            sum += f(s.messages[rev[e]]);
        s.fields[i] = sum;
    }
}

MessageState bp_run(const PlantedGraph& graph, const ModelParams& params, InitMode mode, int steps, double damping,
                    bool balanced)
{
    if (steps < 0)
        fail("BP step count must be non-negative");
    MessageState s = bp_init(graph, params, mode, damping, balanced);
    for (int k = 0; k < steps; ++k)
        bp_step(s);
    return s;
}

std::vector<std::uint8_t> classify(const MessageState& state, ThresholdRule rule)
{
    const double thr = decision_threshold(rule, state.kappa);
    std::vector<std::uint8_t> out(state.fields.size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = state.fields[i] >= thr ? 1 : 0;
    return out;
}

}  // namespace hclab
