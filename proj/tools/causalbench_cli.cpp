// Command-line front end. Talks to the engine exclusively through the
// public C interface.
#include <unistd.h>

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "causalbench.h"

namespace {

struct ConfigGuard {
    cb_config* handle = nullptr;
    ~ConfigGuard() { cb_config_destroy(handle); }
};

struct ResultGuard {
    cb_result* handle = nullptr;
    ~ResultGuard() { cb_result_destroy(handle); }
};

int die(cb_status status, const char* while_doing) {
    std::fprintf(stderr, "causalbench: %s: %s (%s)\n", while_doing, cb_last_error(),
                 cb_status_message(status));
    return 1;
}

// --workers beats CAUSAL_BENCH_WORKERS beats the config file.
bool resolve_workers(int cli_workers, bool cli_set, int* out) {
    if (cli_set) {
        *out = cli_workers;
        return true;
    }
    if (const char* env = std::getenv("CAUSAL_BENCH_WORKERS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end && *end == '\0' && v >= 0 && v <= 4096) {
            *out = static_cast<int>(v);
            return true;
        }
        std::fprintf(stderr, "causalbench: ignoring bad CAUSAL_BENCH_WORKERS='%s'\n", env);
    }
    return false;
}

int run_simulate(const std::string& config_path, const std::string& out_dir,
                 bool seed_set, std::uint64_t seed, bool workers_set, int workers,
                 const std::vector<int>& blocks, bool reps_set, int reps) {
    ConfigGuard config;
    cb_status st = cb_config_load_json(config_path.c_str(), &config.handle);
    if (st != CB_OK) return die(st, "loading config");

    if ((st = cb_config_set_output_dir(config.handle, out_dir.c_str())) != CB_OK) {
        return die(st, "setting output directory");
    }
    if (seed_set && (st = cb_config_set_base_seed(config.handle, seed)) != CB_OK) {
        return die(st, "setting seed");
    }
    int effective_workers = 0;
    if (resolve_workers(workers, workers_set, &effective_workers) &&
        (st = cb_config_set_workers(config.handle, effective_workers)) != CB_OK) {
        return die(st, "setting workers");
    }
    if (reps_set && (st = cb_config_set_reps_per_block(config.handle, reps)) != CB_OK) {
        return die(st, "setting reps");
    }
    if (!blocks.empty() &&
        (st = cb_config_select_blocks(config.handle, blocks.data(), blocks.size())) != CB_OK) {
        return die(st, "selecting blocks");
    }

    ResultGuard result;
    if ((st = cb_run_grid(config.handle, &result.handle)) != CB_OK) {
        return die(st, "running grid");
    }
    if ((st = cb_result_write_outputs(result.handle, nullptr)) != CB_OK) {
        return die(st, "writing outputs");
    }

    size_t n_records = 0, n_blocks = 0;
    cb_result_record_count(result.handle, &n_records);
    cb_result_block_count(result.handle, &n_blocks);
    std::printf("wrote %zu records across %zu blocks to %s\n", n_records, n_blocks,
                out_dir.c_str());
    return 0;
}

int run_summarize(const std::string& records_path, const std::string& out_dir) {
    const cb_status st = cb_summarize_records(records_path.c_str(), out_dir.c_str());
    if (st != CB_OK) return die(st, "summarizing records");
    std::printf("wrote aggregate tables to %s\n", out_dir.c_str());
    return 0;
}

int run_smoke() {
    namespace fs = std::filesystem;
    const fs::path dir =
        fs::temp_directory_path() / ("causalbench-smoke-" + std::to_string(::getpid()));

    ConfigGuard config;
    cb_status st = cb_config_create_default(&config.handle);
    if (st != CB_OK) return die(st, "creating config");
    const int block_one = 1;
    if ((st = cb_config_select_blocks(config.handle, &block_one, 1)) != CB_OK) {
        return die(st, "selecting block");
    }
    if ((st = cb_config_set_reps_per_block(config.handle, 2)) != CB_OK) {
        return die(st, "setting reps");
    }
    if ((st = cb_config_set_output_dir(config.handle, dir.string().c_str())) != CB_OK) {
        return die(st, "setting output directory");
    }

    ResultGuard result;
    if ((st = cb_run_grid(config.handle, &result.handle)) != CB_OK) {
        return die(st, "running grid");
    }
    if ((st = cb_result_write_outputs(result.handle, nullptr)) != CB_OK) {
        return die(st, "writing outputs");
    }

    size_t n_records = 0, n_blocks = 0;
    cb_result_record_count(result.handle, &n_records);
    cb_result_block_count(result.handle, &n_blocks);
    const bool files_ok = fs::exists(dir / "records.csv") && fs::exists(dir / "table1.csv") &&
                          fs::exists(dir / "table2.csv");
    std::error_code ec;
    fs::remove_all(dir, ec);

    if (n_records != 2 || n_blocks != 1 || !files_ok) {
        std::fprintf(stderr, "causalbench: smoke check failed (%zu records, %zu blocks)\n",
                     n_records, n_blocks);
        return 1;
    }
    std::printf("smoke ok: 2 records, 1 block, outputs written (engine %s)\n", cb_version());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Monte Carlo benchmark of treatment-effect estimators"};
    app.require_subcommand(1);

    std::string config_path, out_dir, records_path;
    std::uint64_t seed = 0;
    int workers = 0, reps = 0;
    std::vector<int> blocks;

    CLI::App* simulate = app.add_subcommand("simulate", "run the experiment grid");
    simulate->add_option("--config", config_path, "JSON run configuration")->required();
    simulate->add_option("--out", out_dir, "output directory")->required();
    CLI::Option* seed_opt = simulate->add_option("--seed", seed, "base seed override");
    CLI::Option* workers_opt =
        simulate->add_option("--workers", workers, "worker threads (0 = auto)");
    simulate->add_option("--blocks", blocks,
                         "1-based grid positions to run (default: all)")
        ->delimiter(',');
    CLI::Option* reps_opt = simulate->add_option("--reps", reps, "replicates per block");

    CLI::App* summarize = app.add_subcommand("summarize", "recompute aggregates from records");
    summarize->add_option("--records", records_path, "records.csv from a previous run")
        ->required();
    summarize->add_option("--out", out_dir, "output directory")->required();

    app.add_subcommand("smoke", "1-block, 2-replicate sanity run");

    CLI11_PARSE(app, argc, argv);

    if (simulate->parsed()) {
        return run_simulate(config_path, out_dir, seed_opt->count() > 0, seed,
                            workers_opt->count() > 0, workers, blocks,
                            reps_opt->count() > 0, reps);
    }
    if (summarize->parsed()) {
        return run_summarize(records_path, out_dir);
    }
    return run_smoke();
}
