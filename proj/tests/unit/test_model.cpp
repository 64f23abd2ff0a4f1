#include <doctest.h>

#include <cmath>
#include <sstream>

#include "hclab/error.hpp"
#include "hclab/model.hpp"

using namespace hclab;

TEST_CASE("snr round trip")
{
    for (double kappa : {0.005, 0.05, 0.3})
        for (double lambda : {0.0, 0.1, 0.5, 2.0}) {
            const auto p = params_from_snr(kappa, 100.0, lambda);
            CHECK(p.snr() == doctest::Approx(lambda).epsilon(1e-12));
            CHECK(p.a >= p.b);
        }
    CHECK_THROWS_AS(params_from_snr(0.005, 100.0, 1.0, std::size_t{100}), Error);
    CHECK_THROWS_AS(params_from_snr(0.0, 100.0, 1.0), Error);
    CHECK_THROWS_AS(params_from_snr(0.1, -1.0, 1.0), Error);
}

TEST_CASE("gamma and h agree")
{
    ModelParams p;
    p.a = 7.0;
    p.b = 2.0;
    p.kappa = 0.2;
    CHECK(std::log(p.gamma()) == doctest::Approx(p.h()));
    CHECK(p.deg_in() == doctest::Approx(0.2 * 7.0 + 0.8 * 2.0));
}

TEST_CASE("validation")
{
    ModelParams p;
    p.a = 1.0;
    p.b = 2.0;
    CHECK_THROWS_AS(p.validate(), Error);
    p.a = 2.0;
    p.kappa = 1.0;
    CHECK_THROWS_AS(p.validate(), Error);
    p.kappa = 0.5;
    CHECK_NOTHROW(p.validate());
    CHECK_THROWS_AS(p.validate_for_sampling(), Error);
    p.n = 1;
    CHECK_THROWS_AS(p.validate_for_sampling(), Error);
    p.n = 10;
    CHECK_NOTHROW(p.validate_for_sampling());
}

TEST_CASE("graph construction normalizes and rejects bad input")
{
    const PlantedGraph g(4, {{2, 1}, {0, 3}, {0, 1}}, {1, 0, 2, 0});
    CHECK(g.num_edges() == 3);
    CHECK(g.edges()[0] == Edge{0, 1});
    CHECK(g.edges()[1] == Edge{0, 3});
    CHECK(g.edges()[2] == Edge{1, 2});
    CHECK(g.membership()[2] == 1);
    CHECK(g.hidden_size() == 2);
    CHECK(g.degree(0) == 2);
    CHECK(g.degree(1) == 2);
    for (std::size_t i = 0; i < g.n(); ++i)
        for (std::size_t e = g.offsets()[i]; e < g.offsets()[i + 1]; ++e) {
            const std::size_t r = g.reverse_slot()[e];
            CHECK(g.neighbors()[r] == i);
            CHECK(g.reverse_slot()[r] == e);
        }

    CHECK_THROWS_AS(PlantedGraph(3, {{1, 1}}, {0, 0, 0}), Error);
    CHECK_THROWS_AS(PlantedGraph(3, {{0, 1}, {1, 0}}, {0, 0, 0}), Error);
    CHECK_THROWS_AS(PlantedGraph(3, {{0, 3}}, {0, 0, 0}), Error);
    CHECK_THROWS_AS(PlantedGraph(3, {}, {0, 0}), Error);
}

TEST_CASE("sampling is deterministic")
{
    ModelParams p;
    p.n = 2000;
    p.a = 20.0;
    p.b = 4.0;
    p.kappa = 0.1;
    const auto g1 = sample_graph(p, 42);
    const auto g2 = sample_graph(p, 42);
    const auto g3 = sample_graph(p, 43);
    CHECK(g1.edges() == g2.edges());
    CHECK(g1.membership() == g2.membership());
    CHECK(g1.edges() != g3.edges());
}

TEST_CASE("sampled degrees match the model")
{
    ModelParams p;
    p.n = 200000;
    p.a = 40.0;
    p.b = 5.0;
    p.kappa = 0.05;
    const auto g = sample_graph(p, 7);
    const auto& x = g.membership();
    double in_sum = 0.0, out_sum = 0.0;
    std::size_t in_n = 0, out_n = 0;
    for (std::size_t i = 0; i < g.n(); ++i) {
        if (x[i]) {
            in_sum += static_cast<double>(g.degree(i));
            ++in_n;
        } else {
            out_sum += static_cast<double>(g.degree(i));
            ++out_n;
        }
    }
    const double in_mean = in_sum / static_cast<double>(in_n);
    const double out_mean = out_sum / static_cast<double>(out_n);
    // Sampling SDs: sqrt(deg / count), about 0.04 and 0.005 here.
    CHECK(std::abs(in_mean - p.deg_in()) < 0.25);
    CHECK(std::abs(out_mean - p.deg_out()) < 0.05);
    CHECK(static_cast<double>(in_n) == doctest::Approx(0.05 * 200000).epsilon(0.05));
}

TEST_CASE("fixed-size membership")
{
    ModelParams p;
    p.n = 18;
    p.a = 9.0;
    p.b = 1.8;
    p.kappa = 1.0 / 3.0;
    for (std::uint64_t s = 0; s < 20; ++s)
        CHECK(sample_graph(p, s, HiddenSetMode::fixed_size).hidden_size() == 6);
}

TEST_CASE("empirical psucc")
{
    const std::vector<std::uint8_t> truth{1, 1, 0, 0, 0, 0};
    CHECK(empirical_psucc(truth, truth) == 1.0);
    CHECK(empirical_psucc(std::vector<std::uint8_t>(6, 0), truth) == 0.0);
    CHECK(empirical_psucc(std::vector<std::uint8_t>{1, 0, 1, 0, 0, 0}, truth) == doctest::Approx(0.25));
}

TEST_CASE("count edges within")
{
    const PlantedGraph g(5, {{0, 1}, {1, 2}, {0, 2}, {3, 4}}, {0, 0, 0, 0, 0});
    const std::vector<std::uint32_t> s{0, 1, 2};
    CHECK(count_edges_within(g, s) == 3);
    const std::vector<std::uint32_t> t{0, 3, 4};
    CHECK(count_edges_within(g, t) == 1);
}

TEST_CASE("graph file round trip")
{
    ModelParams p;
    p.n = 500;
    p.a = 12.3456789;
    p.b = 1.0 / 3.0;
    p.kappa = 0.1;
    const auto g = sample_graph(p, 99);
    std::stringstream ss;
    ss << "# comment line\n";
    write_graph(ss, g, p);
    const auto back = read_graph(ss);
    CHECK(back.graph.edges() == g.edges());
    CHECK(back.graph.membership() == g.membership());
    CHECK(back.graph.seed() == 99);
    CHECK(back.params.a == p.a);
    CHECK(back.params.b == p.b);
    CHECK(back.params.kappa == p.kappa);
    CHECK(*back.params.n == 500);

    std::stringstream bad("n=3 kappa=0.1 a=2 b=1 seed=0\n0 1 0\n0 5\n");
    CHECK_THROWS_AS(read_graph(bad), Error);
    std::stringstream bad_header("n=3 kappa=0.1 a=2\n");
    CHECK_THROWS_AS(read_graph(bad_header), Error);
}
