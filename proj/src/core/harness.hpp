#ifndef CAUSALBENCH_CORE_HARNESS_HPP
#define CAUSALBENCH_CORE_HARNESS_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "core/config.hpp"
#include "core/stats.hpp"

namespace causalbench {

// One simulated experiment: three fitted effects plus balance diagnostics.
// Failed fits leave the estimate missing and record a short reason token;
// a failure never aborts the surrounding run.
struct ExperimentRecord {
    int block_index = 0;        // 1-based position in the configured grid
    double block_effect = 0.0;  // magnitude r; the true coefficient is -r
    int rep_index = 0;          // 1-based
    std::uint64_t seed = 0;     // mix64(base_seed, block_index, rep_index)

    std::optional<double> t_ua;
    std::optional<double> t_multi;
    std::optional<double> t_match;
    std::string fail_ua;      // empty when the fit succeeded
    std::string fail_multi;
    std::string fail_match;

    std::optional<double> chi2_full;  // homogeneity statistic, full cohort
    bool chi2_full_warn = false;
    bool match_ran = false;   // propensity model fitted and matching executed
    std::optional<double> chi2_matched;
    bool chi2_matched_warn = false;

    int n_matched = 0;        // 2 x pair count (0 when match_ran is false)
    int n_total = 0;
};

// Aggregates for one block (one real-effect level). Every interval is a
// Student-t 95% CI across the block's replicates; fields are missing when
// fewer than two contributing records exist. Relative-error fields are
// missing for a literal zero effect.
struct BlockSummary {
    int block_index = 0;
    double block_effect = 0.0;
    int reps = 0;  // records in the block (success + failure)

    std::optional<MeanCI> est_ua, est_multi, est_match;    // coefficients
    std::optional<MeanCI> err_ua, err_multi, err_match;    // relative errors
    std::optional<MeanCI> red_multi, red_match;            // err_ua - err_method
    std::optional<MeanCI> chi2_full, chi2_matched;
    std::optional<MeanCI> bias_red;                        // 1 - matched/full
    std::optional<MeanCI> pct_matched, pct_excluded;

    std::optional<TestResult> anova_err;  // one-way ANOVA over per-method errors
    std::optional<TestResult> t_red;      // paired t, matched vs multivariate reduction
    std::optional<TestResult> t_chi2;     // paired t, full vs matched chi-squared

    int n_ok_ua = 0, n_ok_multi = 0, n_ok_match = 0;
    int n_fail_ua = 0, n_fail_multi = 0, n_fail_match = 0;
};

// The same three hypothesis tests pooled over every record of the run
// (errors are dimensionless, so pooling across effect levels is defined).
struct PooledTests {
    std::optional<TestResult> anova_err;
    std::optional<TestResult> t_red;
    std::optional<TestResult> t_chi2;
    int n_records = 0;
};

struct GridResult {
    std::vector<ExperimentRecord> records;    // sorted by (block, rep)
    std::vector<BlockSummary> summaries;      // one per block, grid order
};

// One experiment, fully deterministic in (base_seed, block_index,
// rep_index): the per-experiment generator consumes covariates, treatment,
// noise, events, then (only under the random order policy) the match
// shuffle.
ExperimentRecord run_experiment(const RunConfig& config, int block_index,
                                double block_effect, int rep_index);

// All blocks x reps. block_selection restricts to the given 1-based grid
// positions WITHOUT renumbering them, so selected blocks produce the same
// records they would inside a full run; empty means every block. Purely
// computational (no I/O).
GridResult compute_grid(const RunConfig& config,
                        std::span<const int> block_selection = {});

// compute_grid + emit_outputs into config.output_dir.
GridResult run_grid(const RunConfig& config,
                    std::span<const int> block_selection = {});

BlockSummary summarize_block(int block_index, double block_effect,
                             std::span<const ExperimentRecord> records);

PooledTests pooled_tests(const std::vector<ExperimentRecord>& records);

// Group records by block (they are re-sorted first) and summarize each.
std::vector<BlockSummary> summarize_records(std::vector<ExperimentRecord> records);

// records.csv: one row per experiment, lossless numeric round-trip.
void write_records_csv(const std::vector<ExperimentRecord>& records,
                       const std::string& path);
std::vector<ExperimentRecord> read_records_csv(const std::string& path);

// table1.csv, table2.csv, fig1..fig3.csv, pooled.csv. Empty inputs
// produce headers-only files.
void emit_aggregates(const std::vector<ExperimentRecord>& records,
                     const std::vector<BlockSummary>& summaries,
                     const std::string& output_dir);

// records.csv first (partial-results preservation), then the aggregates.
void emit_outputs(const std::vector<ExperimentRecord>& records,
                  const std::vector<BlockSummary>& summaries,
                  const std::string& output_dir);

}  // namespace causalbench

#endif
