#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "hclab/config.hpp"

namespace hclab {

const std::vector<std::string>& experiment_names();

struct RunOptions {
    std::string out_dir = ".";
    bool force = false;  // ignore the cache
    bool use_cache = true;
};

struct RunResult {
    std::vector<std::string> files;  // paths written under out_dir
    bool from_cache = false;
};

// Validates the whole config, then runs the experiment and writes its
// output files. Each file starts with "# key=value" metadata lines (the
// config, the library version). Results are cached under HCLAB_CACHE_DIR
// (default <out_dir>/.hclab-cache) keyed by a hash of the canonical config.
RunResult run_experiment(const std::string& experiment, const Config& cfg, const RunOptions& opt,
                         std::ostream& log);

}  // namespace hclab
