#ifndef CAUSALBENCH_CORE_CONFIG_HPP
#define CAUSALBENCH_CORE_CONFIG_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "core/cohort.hpp"
#include "core/matching.hpp"

namespace causalbench {

// Full description of one simulation run.  JSON configs mirror these field
// names exactly; unknown keys are rejected so typos fail loudly.
struct RunConfig {
    CohortSpec cohort_spec;
    MatchSpec match_spec;
    std::vector<double> effect_grid;   // block magnitudes r; t = -r
    int reps_per_block = 200;
    std::uint64_t base_seed = 20240605ULL;
    int parallelism = 0;               // 0 = auto (hardware concurrency)
    std::string output_dir = "out";

    static RunConfig defaults();
    void validate() const;             // throws ConfigError
};

// Default grid: 0.1 .. 5.0 step 0.1, 50 blocks, each value exactly i/10.
std::vector<double> default_effect_grid();

RunConfig parse_config_json(const std::string& text);   // throws ConfigError
RunConfig load_config_file(const std::string& path);    // throws ConfigError/IoError
std::string config_to_json(const RunConfig& config);    // full schema, pretty

}  // namespace causalbench

#endif
