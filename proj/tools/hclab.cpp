// hclab <experiment> --config <path> [--force] [--threads N] [--out DIR]
//
// Exit codes: 0 ok, 1 unexpected error, 2 config error, 3 guard violation,
// 4 numerical divergence.

#include <iostream>
#include <string>

#include <omp.h>

#include "CLI11.hpp"
#include "hclab/config.hpp"
#include "hclab/error.hpp"
#include "hclab/experiments.hpp"

namespace {

int exit_code(hclab::ErrorKind kind)
{
    switch (kind) {
    case hclab::ErrorKind::invalid_argument:
        return 2;
    case hclab::ErrorKind::guard:
        return 3;
    case hclab::ErrorKind::divergence:
        return 4;
    }
    return 1;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Hidden-community detection experiments"};
    std::string experiment;
    std::string config_path;
    std::string out_dir = ".";
    bool force = false;
    int threads = 0;
    app.add_option("experiment", experiment, "Experiment to run")
        ->required()
        ->check(CLI::IsMember(hclab::experiment_names()));
    app.add_option("--config", config_path, "Experiment config file")->required();
    app.add_flag("--force", force, "Recompute even if a cached result exists");
    app.add_option("--threads", threads, "OpenMP thread count (0 = runtime default)")->check(CLI::NonNegativeNumber);
    app.add_option("--out", out_dir, "Output directory");
    app.set_version_flag("--version", HCLAB_VERSION);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    if (threads > 0)
        omp_set_num_threads(threads);

    try {
        const hclab::Config cfg = hclab::Config::load(config_path);
        hclab::RunOptions opt;
        opt.out_dir = out_dir;
        opt.force = force;
        const auto result = hclab::run_experiment(experiment, cfg, opt, std::cout);
        for (const auto& f : result.files)
            std::cout << "wrote " << f << "\n";
        return 0;
    } catch (const hclab::Error& e) {
        std::cerr << "hclab: " << e.what() << "\n";
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "hclab: " << e.what() << "\n";
        return 1;
    }
}
