#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "hclab/kernel.hpp"

using namespace hclab;
using big = boost::multiprecision::cpp_bin_float_50;

namespace {

double f_big(double xi, double rho)
{
    const big e = exp(big(xi));
    return static_cast<double>(log((1 + big(rho) * e) / (1 + e)));
}

}  // namespace

TEST_CASE("message function limits")
{
    const MessageFunction f(5.0);
    CHECK(f(0.0) == doctest::Approx(std::log(3.0)).epsilon(1e-15));
    CHECK(f(-std::numeric_limits<double>::infinity()) == 0.0);
    CHECK(f(std::numeric_limits<double>::infinity()) == doctest::Approx(std::log(5.0)).epsilon(1e-15));
    CHECK(f(-800.0) >= 0.0);
    CHECK(f(800.0) == doctest::Approx(std::log(5.0)).epsilon(1e-15));
    CHECK_THROWS_AS(f(std::nan("")), Error);
    CHECK_THROWS_AS(MessageFunction(0.0), Error);
    CHECK_THROWS_AS(MessageFunction(-1.0), Error);
}

TEST_CASE("rho = 1 gives zero")
{
    const MessageFunction f(1.0);
    for (double xi : {-50.0, -1.0, 0.0, 3.0, 700.0})
        CHECK(f(xi) == 0.0);
}

TEST_CASE("message function against 50-digit arithmetic")
{
    for (double rho : {1.0001, 1.5, 2.0, 10.0, 1e3}) {
        const MessageFunction f(rho);
        for (double xi = -60.0; xi <= 60.0; xi += 0.37) {
            const double want = f_big(xi, rho);
            const double got = f(xi);
            CHECK(std::abs(got - want) <= 1e-14 * std::max(1.0, std::abs(want)) + 1e-300);
        }
    }
}

TEST_CASE("message function is increasing")
{
    const MessageFunction f(3.0);
    double prev = f(-40.0);
    for (double xi = -39.5; xi <= 40.0; xi += 0.5) {
        const double cur = f(xi);
        CHECK(cur >= prev);
        prev = cur;
    }
}

TEST_CASE("prior log-odds and field")
{
    CHECK(prior_log_odds(0.5) == 0.0);
    CHECK(prior_log_odds(0.005) == doctest::Approx(std::log(0.005 / 0.995)));
    CHECK(field_h(3.0, 1.0, 0.25) == doctest::Approx(-0.5 + std::log(1.0 / 3.0)));
    CHECK_THROWS_AS(prior_log_odds(0.0), Error);
    CHECK_THROWS_AS(prior_log_odds(1.0), Error);

    const auto k = KernelParams::from_model(6.0, 2.0, 0.1);
    CHECK(k.rho == 3.0);
    CHECK(k.h == doctest::Approx(field_h(6.0, 2.0, 0.1)));
    CHECK(k.theta == doctest::Approx(prior_log_odds(0.1)));
}

TEST_CASE("binary entropy")
{
    CHECK(binary_entropy(0.0) == 0.0);
    CHECK(binary_entropy(1.0) == 0.0);
    CHECK(binary_entropy(0.5) == doctest::Approx(std::numbers::ln2));
    CHECK(binary_entropy(0.005) == doctest::Approx(0.0314813).epsilon(1e-5));
    CHECK_THROWS_AS(binary_entropy(1.5), Error);
}

TEST_CASE("x_star")
{
    CHECK(x_star(0.0) == 1.0);
    CHECK(x_star(1.0 / std::numbers::e) == doctest::Approx(std::numbers::e).epsilon(1e-7));
    for (double lambda : {0.05, 0.1, 0.2, 0.3, 0.36}) {
        const double x = x_star(lambda);
        CHECK(x == doctest::Approx(std::exp(lambda * x)).epsilon(1e-13));
        CHECK(x >= 1.0);
        CHECK(x <= std::numbers::e);
    }
    CHECK(x_star(0.1) < x_star(0.2));
    CHECK_THROWS_AS(x_star(0.4), Error);
    CHECK_THROWS_AS(x_star(-0.1), Error);
}

TEST_CASE("logistic and log_add_exp")
{
    CHECK(logistic(0.0) == 0.5);
    CHECK(logistic(-800.0) >= 0.0);
    CHECK(logistic(800.0) == 1.0);
    CHECK(logistic(2.0) + logistic(-2.0) == doctest::Approx(1.0));
    CHECK(log_add_exp(-INFINITY, 1.5) == 1.5);
    CHECK(log_add_exp(1000.0, 1000.0) == doctest::Approx(1000.0 + std::numbers::ln2));
}
