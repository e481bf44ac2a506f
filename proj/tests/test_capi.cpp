#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <unistd.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include "causalbench.h"

namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / (tag + "-" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

const char* small_json = R"({
  "effect_grid": [1.0, 2.0],
  "reps_per_block": 3,
  "cohort_spec": {"n_patients": 100},
  "parallelism": 2
})";

}  // namespace

TEST_CASE("version and status strings") {
    CHECK(std::string(cb_version()) == "1.0.0");
    CHECK(std::string(cb_status_message(CB_OK)) == "ok");
    CHECK(std::strlen(cb_status_message(CB_ERROR_PARSE)) > 0);
    CHECK(std::strlen(cb_status_message(CB_ERROR_NUMERIC)) > 0);
    CHECK(std::strlen(cb_status_message(static_cast<cb_status>(99))) > 0);
}

TEST_CASE("null arguments are invalid, never fatal") {
    CHECK(cb_config_create_default(nullptr) == CB_ERROR_INVALID_ARGUMENT);
    CHECK(cb_config_parse_json(nullptr, nullptr) == CB_ERROR_INVALID_ARGUMENT);
    CHECK(cb_config_set_base_seed(nullptr, 1) == CB_ERROR_INVALID_ARGUMENT);
    CHECK(cb_config_to_json(nullptr, nullptr) == CB_ERROR_INVALID_ARGUMENT);
    CHECK(cb_run_grid(nullptr, nullptr) == CB_ERROR_INVALID_ARGUMENT);
    CHECK(cb_result_write_outputs(nullptr, "x") == CB_ERROR_INVALID_ARGUMENT);
    CHECK(cb_result_record_count(nullptr, nullptr) == CB_ERROR_INVALID_ARGUMENT);
    CHECK(cb_summarize_records(nullptr, "x") == CB_ERROR_INVALID_ARGUMENT);
    cb_config_destroy(nullptr);  // no-ops
    cb_result_destroy(nullptr);
    cb_string_free(nullptr);
}

TEST_CASE("config lifecycle") {
    cb_config* config = nullptr;
    REQUIRE(cb_config_create_default(&config) == CB_OK);
    REQUIRE(config != nullptr);

    SUBCASE("defaults serialize with the documented shape") {
        char* text = nullptr;
        REQUIRE(cb_config_to_json(config, &text) == CB_OK);
        REQUIRE(text != nullptr);
        std::string json(text);
        cb_string_free(text);
        CHECK(json.find("\"effect_grid\"") != std::string::npos);
        CHECK(json.find("\"cohort_spec\"") != std::string::npos);
        CHECK(json.find("\"caliper_multiplier\"") != std::string::npos);

        // the serialized form parses back
        cb_config* back = nullptr;
        REQUIRE(cb_config_parse_json(json.c_str(), &back) == CB_OK);
        cb_config_destroy(back);
    }

    SUBCASE("setters validate") {
        CHECK(cb_config_set_base_seed(config, 42) == CB_OK);
        CHECK(cb_config_set_reps_per_block(config, 10) == CB_OK);
        CHECK(cb_config_set_reps_per_block(config, 0) == CB_ERROR_INVALID_ARGUMENT);
        CHECK(std::strlen(cb_last_error()) > 0);
        CHECK(cb_config_set_workers(config, 0) == CB_OK);
        CHECK(cb_config_set_workers(config, -1) == CB_ERROR_INVALID_ARGUMENT);
        CHECK(cb_config_set_output_dir(config, "somewhere") == CB_OK);
        CHECK(cb_config_set_output_dir(config, "") == CB_ERROR_INVALID_ARGUMENT);
    }

    SUBCASE("block selection bounds") {
        const int good[] = {1, 3};
        CHECK(cb_config_select_blocks(config, good, 2) == CB_OK);
        const int bad[] = {0};
        CHECK(cb_config_select_blocks(config, bad, 1) == CB_ERROR_INVALID_ARGUMENT);
        const int high[] = {51};
        CHECK(cb_config_select_blocks(config, high, 1) == CB_ERROR_INVALID_ARGUMENT);
        CHECK(cb_config_select_blocks(config, nullptr, 1) == CB_ERROR_INVALID_ARGUMENT);
        // count = 0 restores the full grid
        CHECK(cb_config_select_blocks(config, nullptr, 0) == CB_OK);
    }

    cb_config_destroy(config);
}

TEST_CASE("parse failures set CB_ERROR_PARSE and a message") {
    cb_config* config = nullptr;
    CHECK(cb_config_parse_json("{nope", &config) == CB_ERROR_PARSE);
    CHECK(config == nullptr);
    CHECK(std::strlen(cb_last_error()) > 0);
    CHECK(cb_config_parse_json(R"({"mystery_key": 1})", &config) == CB_ERROR_PARSE);
    CHECK(std::string(cb_last_error()).find("mystery_key") != std::string::npos);

    CHECK(cb_config_load_json("/no/such/config.json", &config) == CB_ERROR_IO);
}

TEST_CASE("full run through the shared library") {
    TempDir tmp("causalbench-capi");
    cb_config* config = nullptr;
    REQUIRE(cb_config_parse_json(small_json, &config) == CB_OK);
    REQUIRE(cb_config_set_output_dir(config, (tmp.path / "out").c_str()) == CB_OK);

    cb_result* result = nullptr;
    REQUIRE(cb_run_grid(config, &result) == CB_OK);
    REQUIRE(result != nullptr);

    size_t records = 0, blocks = 0;
    CHECK(cb_result_record_count(result, &records) == CB_OK);
    CHECK(cb_result_block_count(result, &blocks) == CB_OK);
    CHECK(records == 6);
    CHECK(blocks == 2);

    // nothing was written yet (pure compute)
    CHECK(!fs::exists(tmp.path / "out"));

    SUBCASE("write to the configured directory") {
        REQUIRE(cb_result_write_outputs(result, nullptr) == CB_OK);
        for (const char* name : {"records.csv", "table1.csv", "table2.csv",
                                 "fig1.csv", "fig2.csv", "fig3.csv", "pooled.csv"}) {
            CHECK(fs::exists(tmp.path / "out" / name));
        }
    }

    SUBCASE("write elsewhere, then re-aggregate records.csv") {
        auto dir_a = tmp.path / "a";
        auto dir_b = tmp.path / "b";
        REQUIRE(cb_result_write_outputs(result, dir_a.c_str()) == CB_OK);
        REQUIRE(cb_summarize_records((dir_a / "records.csv").c_str(),
                                     dir_b.c_str()) == CB_OK);
        for (const char* name : {"table1.csv", "table2.csv", "fig1.csv",
                                 "fig2.csv", "fig3.csv", "pooled.csv"}) {
            std::ifstream fa(dir_a / name, std::ios::binary);
            std::ifstream fb(dir_b / name, std::ios::binary);
            std::string a((std::istreambuf_iterator<char>(fa)),
                          std::istreambuf_iterator<char>());
            std::string b((std::istreambuf_iterator<char>(fb)),
                          std::istreambuf_iterator<char>());
            CHECK(a == b);
            CHECK(!a.empty());
        }
        CHECK(cb_summarize_records((dir_a / "missing.csv").c_str(),
                                   dir_b.c_str()) == CB_ERROR_IO);
    }

    SUBCASE("selection keeps block identity") {
        const int pick[] = {2};
        REQUIRE(cb_config_select_blocks(config, pick, 1) == CB_OK);
        cb_result* part = nullptr;
        REQUIRE(cb_run_grid(config, &part) == CB_OK);
        size_t n = 0;
        CHECK(cb_result_record_count(part, &n) == CB_OK);
        CHECK(n == 3);

        auto dir_full = tmp.path / "full";
        auto dir_part = tmp.path / "part";
        REQUIRE(cb_result_write_outputs(result, dir_full.c_str()) == CB_OK);
        REQUIRE(cb_result_write_outputs(part, dir_part.c_str()) == CB_OK);
        cb_result_destroy(part);

        // the selected block's rows appear verbatim inside the full run
        std::ifstream ff(dir_full / "records.csv");
        std::ifstream fp(dir_part / "records.csv");
        std::string line;
        std::vector<std::string> full_rows, part_rows;
        while (std::getline(ff, line)) full_rows.push_back(line);
        while (std::getline(fp, line)) part_rows.push_back(line);
        REQUIRE(part_rows.size() == 4);  // header + 3
        CHECK(part_rows[0] == full_rows[0]);
        for (int i = 0; i < 3; ++i) {
            CHECK(part_rows[1 + i] == full_rows[4 + i]);  // block 2 slice
        }
    }

    cb_result_destroy(result);
    cb_config_destroy(config);
}

TEST_CASE("run failure surfaces as a status, not an exception") {
    cb_config* config = nullptr;
    // a valid parse that fails validation later: degenerate patient count
    REQUIRE(cb_config_parse_json(R"({"cohort_spec": {"n_patients": 0}})",
                                 &config) == CB_ERROR_PARSE);
    CHECK(config == nullptr);
    CHECK(std::strlen(cb_last_error()) > 0);
}
