#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hclab/config.hpp"
#include "hclab/error.hpp"
#include "hclab/experiments.hpp"

using namespace hclab;
namespace fs = std::filesystem;

namespace {

Config parse(const std::string& text)
{
    std::istringstream in(text);
    return Config::parse(in, "test.cfg");
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

struct TempDir {
    fs::path path;
    TempDir()
    {
        path = fs::temp_directory_path() / ("hclab_test_" + std::to_string(std::rand()) + "_" +
                                            std::to_string(reinterpret_cast<std::uintptr_t>(this)));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

const char* generate_cfg = R"(experiment = generate
[model]
n = 3000
kappa = 0.05
b = 10
lambda = 0.8
[run]
seed = 17
)";

}  // namespace

TEST_CASE("sections, comments and typed getters")
{
    const auto cfg = parse("# top\n[model]\nkappa = 0.005  # trailing\nn = 1e5\n[run]\nlambdas = 0.1, 0.2,0.3\n"
                           "grid = 0.05:0.6:0.05\nflag = on\nseed = 18446744073709551615\n");
    CHECK(cfg.get_double("model.kappa") == 0.005);
    CHECK(cfg.get_int("model.n") == 100000);
    CHECK(cfg.get_grid("run.lambdas") == std::vector<double>{0.1, 0.2, 0.3});
    const auto g = cfg.get_grid("run.grid");
    CHECK(g.size() == 12);
    CHECK(g.back() == doctest::Approx(0.6));
    CHECK(cfg.get_bool("run.flag"));
    CHECK(cfg.get_u64("run.seed") == 18446744073709551615ULL);
    CHECK(cfg.get_double("run.absent", 2.5) == 2.5);
    CHECK_NOTHROW(cfg.reject_unused());
}

TEST_CASE("config errors")
{
    CHECK_THROWS_AS(parse("[bogus]\n"), Error);
    CHECK_THROWS_AS(parse("[model]\nkappa\n"), Error);
    CHECK_THROWS_AS(parse("[model]\nkappa = 1\nkappa = 2\n"), Error);
    CHECK_THROWS_AS(parse("[model]\nkappa =\n"), Error);

    const auto cfg = parse("[model]\nkappa = abc\nn = 1.5\n[run]\ngrid = 1:0:0.1\nextra = 3\n");
    CHECK_THROWS_AS(cfg.get_double("model.kappa"), Error);
    CHECK_THROWS_AS(cfg.get_int("model.n"), Error);
    CHECK_THROWS_AS(cfg.get_grid("run.grid"), Error);
    CHECK_THROWS_AS(cfg.get_double("model.missing"), Error);
    try {
        cfg.reject_unused();
        FAIL("expected unknown-key error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("run.extra") != std::string::npos);
    }
}

TEST_CASE("canonical form is sorted")
{
    const auto cfg = parse("[run]\nz = 1\n[model]\na = 2\n");
    CHECK(cfg.canonical() == std::vector<std::string>{"model.a=2", "run.z=1"});
    CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("reruns are byte-identical and the cache restores them")
{
    TempDir dir;
    const auto cfg = parse(generate_cfg);
    std::ostringstream log;
    RunOptions opt;
    opt.out_dir = (dir.path / "a").string();
    opt.use_cache = false;
    const auto r1 = run_experiment("generate", cfg, opt, log);
    REQUIRE(r1.files.size() == 1);
    const std::string first = slurp(r1.files[0]);
    opt.out_dir = (dir.path / "b").string();
    const auto r2 = run_experiment("generate", parse(generate_cfg), opt, log);
    CHECK(slurp(r2.files[0]) == first);
    CHECK(first.rfind("# experiment=generate\n", 0) == 0);
    CHECK(first.find("# run.seed=17\n") != std::string::npos);

    opt.out_dir = (dir.path / "c").string();
    opt.use_cache = true;
    const auto r3 = run_experiment("generate", parse(generate_cfg), opt, log);
    CHECK_FALSE(r3.from_cache);
    fs::remove(r3.files[0]);
    const auto r4 = run_experiment("generate", parse(generate_cfg), opt, log);
    CHECK(r4.from_cache);
    CHECK(slurp(r4.files[0]) == first);
    opt.force = true;
    CHECK_FALSE(run_experiment("generate", parse(generate_cfg), opt, log).from_cache);
}

TEST_CASE("experiment checks")
{
    TempDir dir;
    std::ostringstream log;
    RunOptions opt;
    opt.out_dir = dir.path.string();
    opt.use_cache = false;
    CHECK_THROWS_AS(run_experiment("bp-run", parse(generate_cfg), opt, log), Error);
    CHECK_THROWS_AS(run_experiment("nope", parse(""), opt, log), Error);
    CHECK_THROWS_AS(run_experiment("generate", parse("[model]\nn = 10\nkappa = 0.1\nb = 1\nlambda = 0.5\nfoo = 1\n"),
                                   opt, log),
                    Error);

    try {
        run_experiment("exhaustive", parse("[model]\nn = 40\nkappa = 0.5\nb = 2\na = 8\n"), opt, log);
        FAIL("expected a guard error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::guard);
    }
    CHECK(fs::is_empty(dir.path));
}

TEST_CASE("small experiments produce their files")
{
    TempDir dir;
    std::ostringstream log;
    RunOptions opt;
    opt.out_dir = dir.path.string();
    opt.use_cache = false;

    auto r = run_experiment(
        "phase-diagram", parse("[run]\nkappas = 0.01, 0.02\nscan_points = 200\n[output]\nmanifest = true\n"), opt,
        log);
    CHECK(r.files.size() == 2);
    const std::string csv = slurp(r.files[0]);
    CHECK(csv.find("kappa,lambda_sp,lambda_s,lambda_d\n") != std::string::npos);
    CHECK(slurp(r.files[1]).find("column 4 lambda_d") != std::string::npos);

    r = run_experiment("mu-profile", parse("[model]\nkappa = 0.01\n[run]\nlambdas = 0.16, 0.19\nmu_points = 11\n"),
                       opt, log);
    CHECK(r.files.size() == 2);

    r = run_experiment("exhaustive",
                       parse("[model]\nn = 12\nkappa = 0.25\nb = 1.2\na = 6\n[run]\nseeds = 3\nbp_steps = 3\n"), opt,
                       log);
    REQUIRE(r.files.size() == 1);
    std::istringstream rows(slurp(r.files[0]));
    int data = 0;
    for (std::string line; std::getline(rows, line);)
        if (!line.empty() && line[0] != '#' && line.rfind("seed,", 0) != 0)
            ++data;
    CHECK(data == 3);
}
