#include "causalbench.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <string>
#include <vector>

#include "core/config.hpp"
#include "core/errors.hpp"
#include "core/harness.hpp"

using namespace causalbench;

struct cb_config {
    RunConfig config;
    std::vector<int> selection;  // empty = full grid
};

struct cb_result {
    GridResult grid;
    std::string output_dir;
};

namespace {

thread_local std::string g_last_error;

cb_status fail(cb_status status, const std::string& message) {
    g_last_error = message;
    return status;
}

cb_status ok() {
    g_last_error.clear();
    return CB_OK;
}

// Translate an in-flight exception. ConfigError maps to `config_status` so
// parse entry points can report CB_ERROR_PARSE while setters report
// CB_ERROR_INVALID_ARGUMENT.
cb_status translate(cb_status config_status = CB_ERROR_INVALID_ARGUMENT) {
    try {
        throw;
    } catch (const ConfigError& e) {
        return fail(config_status, e.what());
    } catch (const IoError& e) {
        return fail(CB_ERROR_IO, e.what());
    } catch (const GlmError& e) {
        return fail(CB_ERROR_NUMERIC, e.what());
    } catch (const StatsError& e) {
        return fail(CB_ERROR_NUMERIC, e.what());
    } catch (const SimError& e) {
        return fail(CB_ERROR_NUMERIC, e.what());
    } catch (const MatchError& e) {
        return fail(CB_ERROR_NUMERIC, e.what());
    } catch (const std::bad_alloc&) {
        return fail(CB_ERROR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(CB_ERROR_INTERNAL, e.what());
    } catch (...) {
        return fail(CB_ERROR_INTERNAL, "unknown error");
    }
}

}  // namespace

extern "C" {

const char* cb_version(void) { return "1.0.0"; }

const char* cb_status_message(cb_status status) {
    switch (status) {
        case CB_OK: return "ok";
        case CB_ERROR_INVALID_ARGUMENT: return "invalid argument";
        case CB_ERROR_PARSE: return "parse error";
        case CB_ERROR_NUMERIC: return "numeric failure";
        case CB_ERROR_IO: return "i/o failure";
        case CB_ERROR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

const char* cb_last_error(void) { return g_last_error.c_str(); }

cb_status cb_config_create_default(cb_config** out_config) {
    if (!out_config) return fail(CB_ERROR_INVALID_ARGUMENT, "out_config is NULL");
    try {
        *out_config = new cb_config{RunConfig::defaults(), {}};
        return ok();
    } catch (...) {
        return translate();
    }
}

cb_status cb_config_parse_json(const char* json_text, cb_config** out_config) {
    if (!json_text) return fail(CB_ERROR_INVALID_ARGUMENT, "json_text is NULL");
    if (!out_config) return fail(CB_ERROR_INVALID_ARGUMENT, "out_config is NULL");
    try {
        *out_config = new cb_config{parse_config_json(json_text), {}};
        return ok();
    } catch (...) {
        return translate(CB_ERROR_PARSE);
    }
}

cb_status cb_config_load_json(const char* path, cb_config** out_config) {
    if (!path) return fail(CB_ERROR_INVALID_ARGUMENT, "path is NULL");
    if (!out_config) return fail(CB_ERROR_INVALID_ARGUMENT, "out_config is NULL");
    try {
        *out_config = new cb_config{load_config_file(path), {}};
        return ok();
    } catch (...) {
        return translate(CB_ERROR_PARSE);
    }
}

void cb_config_destroy(cb_config* config) { delete config; }

cb_status cb_config_set_base_seed(cb_config* config, uint64_t seed) {
    if (!config) return fail(CB_ERROR_INVALID_ARGUMENT, "config is NULL");
    config->config.base_seed = seed;
    return ok();
}

cb_status cb_config_set_reps_per_block(cb_config* config, int reps) {
    if (!config) return fail(CB_ERROR_INVALID_ARGUMENT, "config is NULL");
    if (reps < 1) return fail(CB_ERROR_INVALID_ARGUMENT, "reps must be >= 1");
    config->config.reps_per_block = reps;
    return ok();
}

cb_status cb_config_set_workers(cb_config* config, int workers) {
    if (!config) return fail(CB_ERROR_INVALID_ARGUMENT, "config is NULL");
    if (workers < 0) return fail(CB_ERROR_INVALID_ARGUMENT, "workers must be >= 0");
    config->config.parallelism = workers;
    return ok();
}

cb_status cb_config_set_output_dir(cb_config* config, const char* dir) {
    if (!config) return fail(CB_ERROR_INVALID_ARGUMENT, "config is NULL");
    if (!dir || !*dir) return fail(CB_ERROR_INVALID_ARGUMENT, "dir is NULL or empty");
    config->config.output_dir = dir;
    return ok();
}

cb_status cb_config_select_blocks(cb_config* config, const int* blocks, size_t count) {
    if (!config) return fail(CB_ERROR_INVALID_ARGUMENT, "config is NULL");
    if (count > 0 && !blocks) return fail(CB_ERROR_INVALID_ARGUMENT, "blocks is NULL");
    const int n_blocks = static_cast<int>(config->config.effect_grid.size());
    for (size_t i = 0; i < count; ++i) {
        if (blocks[i] < 1 || blocks[i] > n_blocks) {
            return fail(CB_ERROR_INVALID_ARGUMENT,
                        "block " + std::to_string(blocks[i]) + " outside grid 1.." +
                            std::to_string(n_blocks));
        }
    }
    config->selection.assign(blocks, blocks + count);
    return ok();
}

cb_status cb_config_to_json(const cb_config* config, char** out_text) {
    if (!config) return fail(CB_ERROR_INVALID_ARGUMENT, "config is NULL");
    if (!out_text) return fail(CB_ERROR_INVALID_ARGUMENT, "out_text is NULL");
    try {
        const std::string text = config_to_json(config->config);
        char* buf = static_cast<char*>(std::malloc(text.size() + 1));
        if (!buf) return fail(CB_ERROR_INTERNAL, "out of memory");
        std::memcpy(buf, text.c_str(), text.size() + 1);
        *out_text = buf;
        return ok();
    } catch (...) {
        return translate();
    }
}

void cb_string_free(char* text) { std::free(text); }

cb_status cb_run_grid(const cb_config* config, cb_result** out_result) {
    if (!config) return fail(CB_ERROR_INVALID_ARGUMENT, "config is NULL");
    if (!out_result) return fail(CB_ERROR_INVALID_ARGUMENT, "out_result is NULL");
    try {
        GridResult grid = compute_grid(config->config, config->selection);
        *out_result = new cb_result{std::move(grid), config->config.output_dir};
        return ok();
    } catch (...) {
        return translate();
    }
}

cb_status cb_result_write_outputs(const cb_result* result, const char* out_dir) {
    if (!result) return fail(CB_ERROR_INVALID_ARGUMENT, "result is NULL");
    try {
        const std::string dir = out_dir && *out_dir ? out_dir : result->output_dir;
        emit_outputs(result->grid.records, result->grid.summaries, dir);
        return ok();
    } catch (...) {
        return translate();
    }
}

cb_status cb_result_record_count(const cb_result* result, size_t* out_count) {
    if (!result) return fail(CB_ERROR_INVALID_ARGUMENT, "result is NULL");
    if (!out_count) return fail(CB_ERROR_INVALID_ARGUMENT, "out_count is NULL");
    *out_count = result->grid.records.size();
    return ok();
}

cb_status cb_result_block_count(const cb_result* result, size_t* out_count) {
    if (!result) return fail(CB_ERROR_INVALID_ARGUMENT, "result is NULL");
    if (!out_count) return fail(CB_ERROR_INVALID_ARGUMENT, "out_count is NULL");
    *out_count = result->grid.summaries.size();
    return ok();
}

void cb_result_destroy(cb_result* result) { delete result; }

cb_status cb_summarize_records(const char* records_csv_path, const char* out_dir) {
    if (!records_csv_path) return fail(CB_ERROR_INVALID_ARGUMENT, "records path is NULL");
    if (!out_dir) return fail(CB_ERROR_INVALID_ARGUMENT, "out_dir is NULL");
    try {
        const std::vector<ExperimentRecord> records = read_records_csv(records_csv_path);
        const std::vector<BlockSummary> summaries = summarize_records(records);
        emit_aggregates(records, summaries, out_dir);
        return ok();
    } catch (...) {
        return translate();
    }
}

}  // extern "C"
