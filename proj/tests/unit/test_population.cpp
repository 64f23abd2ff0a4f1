#include <doctest.h>

#include <cmath>
#include <sstream>

#include <omp.h>

#include "hclab/error.hpp"
#include "hclab/kernel.hpp"
#include "hclab/population.hpp"

using namespace hclab;

namespace {

ModelParams cavity_params(double kappa, double b, double lambda) { return params_from_snr(kappa, b, lambda); }

CavityCurvePoint point(double lambda, double fr, double pl, double psi_fr, double psi_pl)
{
    CavityCurvePoint p;
    p.lambda = lambda;
    p.psucc_fr = {fr, 0.001};
    p.psucc_pl = {pl, 0.001};
    p.psi_fr = {psi_fr, 1e-4};
    p.psi_pl = {psi_pl, 1e-4};
    return p;
}

}  // namespace

TEST_CASE("free init is the prior atom")
{
    const auto p = cavity_params(0.005, 100.0, 0.3);
    const auto pop = pd_init(p, 2000, InitMode::free, 1);
    CHECK(pop.t == 0);
    for (std::size_t i = 0; i < pop.size(); ++i) {
        CHECK(pop.xi0[i] == prior_log_odds(0.005));
        CHECK(pop.xi1[i] == prior_log_odds(0.005));
    }
    const auto ps = pd_psucc(pop, 0.005);
    CHECK(ps.value == 0.0);
    const auto nr = nishimori_diagnostics(pop, 0.005);
    CHECK(nr.moment0 == doctest::Approx(0.005 / 0.995).epsilon(1e-12));
    CHECK(nr.moment_ratio_deviation == doctest::Approx(0.0));
    CHECK(nr.x_t == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("plus init takes the first step analytically")
{
    const auto p = cavity_params(0.05, 50.0, 0.5);
    const auto pop = pd_init(p, 20000, InitMode::plus, 3);
    CHECK(pop.t == 1);
    const double lr = std::log(p.rho());
    double m0 = 0.0, m1 = 0.0;
    for (std::size_t i = 0; i < pop.size(); ++i) {
        const double l0 = (pop.xi0[i] - p.h()) / lr;
        CHECK(std::abs(l0 - std::round(l0)) < 1e-9);
        m0 += l0;
        m1 += (pop.xi1[i] - p.h()) / lr;
    }
    m0 /= 20000.0;
    m1 /= 20000.0;
    CHECK(m0 == doctest::Approx(0.05 * p.b).epsilon(0.03));
    CHECK(m1 == doctest::Approx(0.05 * p.a).epsilon(0.03));
}

TEST_CASE("parallel step matches the reference bit for bit")
{
    const auto p = cavity_params(0.005, 100.0, 0.5);
    for (Reweight rw : {Reweight::none, Reweight::moment, Reweight::pooled})
        for (InitMode mode : {InitMode::free, InitMode::plus}) {
            auto a = pd_init(p, 3000, mode, 9);
            auto b = a;
            PopulationOptions opt;
            opt.reweight = rw;
            for (int k = 0; k < 4; ++k) {
                pd_step(a, p, 9, opt);
                pd_step_reference(b, p, 9, opt);
            }
            CHECK(a.t == b.t);
            CHECK(a.xi0 == b.xi0);
            CHECK(a.xi1 == b.xi1);
        }
}

TEST_CASE("results do not depend on the thread count")
{
    const auto p = cavity_params(0.005, 100.0, 0.4);
    const int saved = omp_get_max_threads();
    omp_set_num_threads(1);
    const auto one = pd_run(p, 4000, 5, InitMode::free, 77);
    omp_set_num_threads(4);
    const auto four = pd_run(p, 4000, 5, InitMode::free, 77);
    omp_set_num_threads(saved);
    CHECK(one.xi0 == four.xi0);
    CHECK(one.xi1 == four.xi1);
}

TEST_CASE("lambda = 0 stays at the prior")
{
    const auto p = cavity_params(0.01, 100.0, 0.0);
    for (Reweight rw : {Reweight::none, Reweight::pooled}) {
        PopulationOptions opt;
        opt.reweight = rw;
        const auto pop = pd_run(p, 2000, 5, InitMode::free, 4, opt);
        for (std::size_t i = 0; i < pop.size(); ++i) {
            CHECK(pop.xi0[i] == doctest::Approx(prior_log_odds(0.01)).epsilon(1e-12));
            CHECK(pop.xi1[i] == doctest::Approx(prior_log_odds(0.01)).epsilon(1e-12));
        }
        const auto psi = bethe_free_energy(pop, p, 20000, 5);
        CHECK(std::abs(psi.value) < 1e-9);
    }
}

TEST_CASE("free energy stays between 0 and the entropy")
{
    const auto p = cavity_params(0.005, 100.0, 1.0);
    const auto pop = pd_run(p, 10000, 60, InitMode::free, 12);
    const auto psi = bethe_free_energy(pop, p, 100000, 13);
    CHECK(psi.value > 0.0);
    CHECK(psi.value < binary_entropy(0.005) + 4.0 * psi.se);
    CHECK(pd_psucc(pop, 0.005).value > 0.9);
}

TEST_CASE("pooled reweighting keeps the prior mean")
{
    const auto p = cavity_params(0.005, 100.0, 0.2);
    auto pop = pd_init(p, 20000, InitMode::free, 21);
    for (int k = 0; k < 10; ++k) {
        pd_step(pop, p, 21);
        const auto nr = nishimori_diagnostics(pop, 0.005);
        CHECK(std::abs(nr.moment0 - 0.005 / 0.995) <= 4.0 * nr.moment0_sd / std::sqrt(20000.0));
    }
}

TEST_CASE("psucc counts")
{
    Population pop;
    pop.xi0 = std::vector<double>(1000, -10.0);
    pop.xi1 = std::vector<double>(1000, -10.0);
    for (std::size_t i = 0; i < 250; ++i)
        pop.xi1[i] = 5.0;
    const auto e = pd_psucc(pop, 0.1);
    CHECK(e.value == doctest::Approx(0.25));
    CHECK(e.se > 0.0);
}

TEST_CASE("reweight names")
{
    for (Reweight rw : {Reweight::none, Reweight::moment, Reweight::pooled})
        CHECK(parse_reweight(to_string(rw)) == rw);
    CHECK_THROWS_AS(parse_reweight("tilt"), Error);
}

TEST_CASE("population guards")
{
    const auto p = cavity_params(0.1, 10.0, 0.5);
    CHECK_THROWS_AS(pd_init(p, 999, InitMode::free, 0), Error);
    CHECK_THROWS_AS(pd_run(p, 1000, -1, InitMode::free, 0), Error);
}

TEST_CASE("population snapshot round trip")
{
    const auto p = cavity_params(0.05, 20.0, 0.7);
    const auto pop = pd_run(p, 1000, 3, InitMode::plus, 8);
    std::stringstream ss;
    write_population(ss, pop, 0);
    write_population(ss, pop, 1);
    Population back;
    int cls = -1;
    read_population(ss, back, cls);
    CHECK(cls == 0);
    read_population(ss, back, cls);
    CHECK(cls == 1);
    CHECK(back.xi0 == pop.xi0);
    CHECK(back.xi1 == pop.xi1);
    CHECK(back.t == pop.t);
    CHECK(back.seed == pop.seed);

    std::stringstream bad("class=2 t=0 M=1 seed=0\n0\n");
    CHECK_THROWS_AS(read_population(bad, back, cls), Error);
}

TEST_CASE("lambda_s from a curve")
{
    // Crossing between two separated points, by interpolation.
    std::vector<CavityCurvePoint> c{point(0.2, 0.0, 0.0, 0.020, 0.020), point(0.3, 0.1, 0.8, 0.023, 0.024),
                                    point(0.4, 0.1, 0.9, 0.026, 0.024)};
    auto ls = estimate_lambda_s(c);
    REQUIRE(ls);
    CHECK(*ls == doctest::Approx(0.3 + 0.1 / 3.0));

    // Plus already lower at the first separated point: midpoint.
    c[1].psi_pl.value = 0.022;
    ls = estimate_lambda_s(c);
    REQUIRE(ls);
    CHECK(*ls == doctest::Approx(0.25));

    // Never separated.
    for (auto& q : c)
        q.psucc_pl = q.psucc_fr;
    CHECK_FALSE(estimate_lambda_s(c));
}
