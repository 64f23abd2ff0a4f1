#pragma once

// Belief propagation for the hidden-set model on a fixed graph.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "hclab/kernel.hpp"
#include "hclab/model.hpp"

namespace hclab {

enum class InitMode { free, plus };

enum class ThresholdRule {
    max_psucc,   // xi >= log(kappa / (1 - kappa))
    min_errors,  // xi >= 0
};

// Decision threshold for a rule.
double decision_threshold(ThresholdRule rule, double kappa);

// Directed-edge messages laid out along the graph's CSR slots: messages[e]
// for slot e of vertex i is the message from i to neighbors()[e]. The
// message from neighbors()[e] into i therefore sits at reverse_slot()[e].
//
// fields[i] = h + sum over k in N(i) of f(message k -> i), always in sync
// with `messages`. After s steps from free init, fields are the radius
// s + 1 statistic.
struct MessageState {
    const PlantedGraph* graph = nullptr;
    KernelParams kernel;
    double kappa = 0.5;
    InitMode mode = InitMode::free;
    int t = 0;
    double damping = 0.0;
    bool balanced = false;
    double edge_target = 0.0;  // mean message posterior kept by balancing
    double shift = 0.0;        // balancing shift applied in the last step
    std::vector<double> messages;
    std::vector<double> fields;
};

// Free: every message is log(kappa / (1 - kappa)). Plus: messages out of
// members are +inf, out of non-members -inf (uses the ground truth; this is
// a proxy for plus boundary conditions, meant for upper-bound runs only).
// `damping` in [0, 1) mixes that fraction of the old message into each update.
//
// `balanced` adds, after every step, one common shift to all messages so
// that their mean posterior equals the probability that a directed edge
// leaves a member. With the plain field h a deviation dm of the mean
// posterior grows by about kappa (a - b) per step, so on a finite graph BP
// leaves the tree recursion after a few steps (n = 1e5, kappa = 0.005,
// b = 100: by step 5 at lambda = 0.3 and 0.5). Balancing breaks strict
// locality; trees and small graphs do not need it.
MessageState bp_init(const PlantedGraph& graph, const ModelParams& params, InitMode mode, double damping = 0.0,
                     bool balanced = false);

// One synchronous update, parallel over vertices. Throws Error(divergence)
// if a NaN appears.
void bp_step(MessageState& state);

// Serial reference update that recomputes every exclusion sum from scratch.
// Used to check bp_step; agrees with it up to summation round-off.
void bp_step_reference(MessageState& state);

// bp_init followed by `steps` calls to bp_step.
MessageState bp_run(const PlantedGraph& graph, const ModelParams& params, InitMode mode, int steps,
                    double damping = 0.0, bool balanced = false);

std::vector<std::uint8_t> classify(const MessageState& state, ThresholdRule rule = ThresholdRule::max_psucc);

}  // namespace hclab
