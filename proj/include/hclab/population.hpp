#pragma once

// Population dynamics for the cavity recursion of the hidden-set model.
//
// xi0 holds samples of the cavity field of a non-member, xi1 of a member.
// One step draws, for each new sample, Poisson neighbour counts per class
// and sums f over uniformly chosen entries of the previous population.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hclab/bp.hpp"
#include "hclab/model.hpp"

namespace hclab {

struct Population {
    std::vector<double> xi0;
    std::vector<double> xi1;
    int t = 0;
    InitMode mode = InitMode::free;
    std::uint64_t seed = 0;

    std::size_t size() const noexcept { return xi0.size(); }
};

// Resampling applied after each step to hold E[x] = kappa.
//   none:   plain population dynamics.
//   moment: exponential tilt of xi0 alone so that mean(e^xi0) = kappa / (1 - kappa).
//           Unstable at M ~ 1e4 once the fields become informative: the
//           moment is carried by a tail the population cannot resolve.
//   pooled: both classes are pooled, tilted so that the posterior mean of
//           membership is kappa, and relabelled by posterior probability.
enum class Reweight { none, moment, pooled };

struct PopulationOptions {
    Reweight reweight = Reweight::pooled;
};

Reweight parse_reweight(const std::string& name);
const char* to_string(Reweight r);

constexpr std::size_t min_population = 1000;

// Free: both populations are the atom log(kappa / (1 - kappa)), t = 0.
// Plus: the first step is taken analytically (f(-inf) = 0, f(+inf) = log rho),
// xi_c = h + L * log rho with L ~ Poisson(kappa b) for c = 0 and
// Poisson(kappa a) for c = 1; t = 1.
Population pd_init(const ModelParams& params, std::size_t M, InitMode mode, std::uint64_t seed);

// One step, parallel over samples. Sample i of class c at step t draws from
// its own stream derive_seed(seed, {t, c, i}), so results are independent of
// the thread count.
void pd_step(Population& pop, const ModelParams& params, std::uint64_t seed, const PopulationOptions& opt = {});

// Serial reference for pd_step; bitwise identical output.
void pd_step_reference(Population& pop, const ModelParams& params, std::uint64_t seed,
                       const PopulationOptions& opt = {});

struct Estimate {
    double value = 0.0;
    double se = 0.0;
};

// P0(xi < thr) + P1(xi >= thr) - 1.
Estimate pd_psucc(const Population& pop, double kappa, ThresholdRule rule = ThresholdRule::max_psucc);

// Bethe free energy from the current populations. mc_rounds draws per stratum.
Estimate bethe_free_energy(const Population& pop, const ModelParams& params, std::size_t mc_rounds,
                           std::uint64_t seed);

struct NishimoriReport {
    double moment0 = 0.0;     // mean e^xi0, target kappa / (1 - kappa)
    double moment0_sd = 0.0;  // sample SD of e^xi0
    // Kolmogorov distance between xi1 and xi0 reweighted by e^xi0.
    double moment_ratio_deviation = 0.0;
    double x_t = 0.0;     // ((1 - kappa) / kappa)^2 mean e^{2 xi0}
    double x_t_se = 0.0;  // Monte Carlo SE of x_t
};

NishimoriReport nishimori_diagnostics(const Population& pop, double kappa);

// Runs pd_init then steps until t == T, calling `observe` after init and
// after every step.
using PopulationObserver = std::function<void(const Population&)>;
Population pd_run(const ModelParams& params, std::size_t M, int T, InitMode mode, std::uint64_t seed,
                  const PopulationOptions& opt = {}, const PopulationObserver& observe = {});

struct CavityCurvePoint {
    double lambda = 0.0;
    Estimate psucc_fr, psucc_pl;
    Estimate psi_fr, psi_pl;
    bool lambda_s_flag = false;  // psi_pl < psi_fr on a separated point
};

struct CurveOptions {
    std::size_t M = 10000;
    int T = 300;
    int seeds = 10;
    std::size_t mc_rounds = 0;  // 0 means 20 M
    ThresholdRule rule = ThresholdRule::max_psucc;
    PopulationOptions pop;
};

// Both initialisations at every lambda, averaged over seeds. SEs are
// across-seed standard errors (within-run SE when seeds == 1).
std::vector<CavityCurvePoint> pd_curve(const std::vector<double>& lambdas, double kappa, double b,
                                       const CurveOptions& opt, std::uint64_t seed);

// First lambda where psi_pl - psi_fr changes sign from positive to negative,
// by linear interpolation, using only points where the two branches are
// separated in psucc (gap > max(0.05, 4 SE)). If the plus branch is already
// the lower one at the first separated point, the crossing lies between
// that point and the grid point before it, and the midpoint is returned.
std::optional<double> estimate_lambda_s(const std::vector<CavityCurvePoint>& curve);

void write_population(std::ostream& out, const Population& pop, int cls);
// Reads one class block written by write_population into pop.
void read_population(std::istream& in, Population& pop, int& cls);

}  // namespace hclab
