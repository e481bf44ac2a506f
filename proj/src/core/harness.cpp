#include "core/harness.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <filesystem>
#include <thread>

#include "core/cohort.hpp"
#include "core/csv.hpp"
#include "core/errors.hpp"
#include "core/estimators.hpp"
#include "core/matching.hpp"
#include "core/rng.hpp"

namespace causalbench {

namespace {

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir + ": " + ec.message());
}

const char* glm_kind_token(GlmError::Kind kind) {
    switch (kind) {
        case GlmError::Kind::degenerate_outcome: return "degenerate_outcome";
        case GlmError::Kind::singular_design: return "singular_design";
        case GlmError::Kind::separation: return "separation";
        case GlmError::Kind::dimension: return "dimension";
    }
    return "glm_error";
}

std::optional<MeanCI> maybe_ci(const std::vector<double>& xs) {
    if (xs.size() < 2) return std::nullopt;
    return mean_ci(xs);
}

std::optional<TestResult> maybe_paired_t(const std::vector<double>& a,
                                         const std::vector<double>& b) {
    if (a.size() < 2) return std::nullopt;
    return paired_t_test(a, b);
}

}  // namespace

ExperimentRecord run_experiment(const RunConfig& config, int block_index,
                                double block_effect, int rep_index) {
    ExperimentRecord rec;
    rec.block_index = block_index;
    rec.block_effect = block_effect;
    rec.rep_index = rep_index;
    rec.seed = mix64(config.base_seed, static_cast<std::uint64_t>(block_index),
                     static_cast<std::uint64_t>(rep_index));

    Rng rng(rec.seed);
    const Cohort cohort = generate_cohort(config.cohort_spec, -block_effect, rng);
    rec.n_total = cohort.n_patients;

    const BinaryMatrixView cov{cohort.covariates.data(), cohort.n_patients,
                               cohort.n_covariates()};
    try {
        const TestResult full = chi2_homogeneity(cov, cohort.treatment);
        rec.chi2_full = full.statistic;
        rec.chi2_full_warn = full.flagged;
    } catch (const StatsError&) {
        rec.chi2_full_warn = true;  // single-arm cohort: statistic undefined
    }

    try {
        rec.t_ua = estimate_unadjusted(cohort).coefficient;
    } catch (const GlmError& e) {
        rec.fail_ua = glm_kind_token(e.kind());
    }
    try {
        rec.t_multi = estimate_multivariate(cohort).coefficient;
    } catch (const GlmError& e) {
        rec.fail_multi = glm_kind_token(e.kind());
    }

    try {
        const std::vector<double> logit_ps = estimate_propensity(cohort);
        const MatchResult mr = match(logit_ps, cohort.treatment, config.match_spec, rng);
        rec.match_ran = true;
        rec.n_matched = 2 * static_cast<int>(mr.pairs.size());
        if (mr.pairs.empty()) {
            rec.fail_match = "empty_matched_sample";
        } else {
            const Cohort sub = matched_cohort(cohort, mr);
            const BinaryMatrixView subcov{sub.covariates.data(), sub.n_patients,
                                          sub.n_covariates()};
            const TestResult matched = chi2_homogeneity(subcov, sub.treatment);
            rec.chi2_matched = matched.statistic;
            rec.chi2_matched_warn = matched.flagged;
            try {
                rec.t_match = estimate_matched(cohort, mr).coefficient;
            } catch (const GlmError& e) {
                rec.fail_match = glm_kind_token(e.kind());
            }
        }
    } catch (const GlmError& e) {
        rec.fail_match = std::string("propensity_") + glm_kind_token(e.kind());
    }

    return rec;
}

GridResult compute_grid(const RunConfig& config, std::span<const int> block_selection) {
    config.validate();

    std::vector<int> blocks;
    if (block_selection.empty()) {
        blocks.resize(config.effect_grid.size());
        for (std::size_t i = 0; i < blocks.size(); ++i) blocks[i] = static_cast<int>(i) + 1;
    } else {
        for (int b : block_selection) {
            if (b < 1 || b > static_cast<int>(config.effect_grid.size())) {
                throw ConfigError("block selection " + std::to_string(b) +
                                  " outside grid 1.." +
                                  std::to_string(config.effect_grid.size()));
            }
            blocks.push_back(b);
        }
        std::sort(blocks.begin(), blocks.end());
        blocks.erase(std::unique(blocks.begin(), blocks.end()), blocks.end());
    }

    struct Task {
        int block_index;
        double effect;
        int rep_index;
    };
    std::vector<Task> tasks;
    tasks.reserve(blocks.size() * static_cast<std::size_t>(config.reps_per_block));
    for (int b : blocks) {
        for (int rep = 1; rep <= config.reps_per_block; ++rep) {
            tasks.push_back({b, config.effect_grid[static_cast<std::size_t>(b) - 1], rep});
        }
    }

    GridResult result;
    result.records.resize(tasks.size());

    unsigned workers = config.parallelism > 0
                           ? static_cast<unsigned>(config.parallelism)
                           : std::max(1u, std::thread::hardware_concurrency());
    if (workers > tasks.size()) workers = static_cast<unsigned>(std::max<std::size_t>(tasks.size(), 1));

    // Each task writes only its own preassigned slot, so the record layout
    // (and every seed) is independent of scheduling.
    if (workers <= 1) {
        for (std::size_t i = 0; i < tasks.size(); ++i) {
            const Task& t = tasks[i];
            result.records[i] = run_experiment(config, t.block_index, t.effect, t.rep_index);
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> failures(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t i = next.fetch_add(1); i < tasks.size();
                         i = next.fetch_add(1)) {
                        const Task& t = tasks[i];
                        result.records[i] =
                            run_experiment(config, t.block_index, t.effect, t.rep_index);
                    }
                } catch (...) {
                    failures[w] = std::current_exception();
                }
            });
        }
        for (auto& th : pool) th.join();
        for (const auto& f : failures) {
            if (f) std::rethrow_exception(f);
        }
    }

    result.summaries = summarize_records(result.records);
    return result;
}

GridResult run_grid(const RunConfig& config, std::span<const int> block_selection) {
    GridResult result = compute_grid(config, block_selection);
    emit_outputs(result.records, result.summaries, config.output_dir);
    return result;
}

BlockSummary summarize_block(int block_index, double block_effect,
                             std::span<const ExperimentRecord> records) {
    BlockSummary s;
    s.block_index = block_index;
    s.block_effect = block_effect;
    s.reps = static_cast<int>(records.size());

    const double true_t = -block_effect;
    const bool errors_defined = block_effect > 0.0;

    std::vector<double> est_ua, est_multi, est_match;
    std::vector<double> err_ua, err_multi, err_match;
    std::vector<double> red_multi, red_match;           // paired with err_ua
    std::vector<double> chi_full_all, chi_matched_all;
    std::vector<double> chi_full_paired, chi_matched_paired;
    std::vector<double> bias_red;
    std::vector<double> pct_matched, pct_excluded;
    std::vector<double> red_match_paired, red_multi_paired;  // all three present

    for (const ExperimentRecord& r : records) {
        if (r.t_ua) est_ua.push_back(*r.t_ua);
        if (r.t_multi) est_multi.push_back(*r.t_multi);
        if (r.t_match) est_match.push_back(*r.t_match);
        s.n_ok_ua += r.t_ua.has_value();
        s.n_ok_multi += r.t_multi.has_value();
        s.n_ok_match += r.t_match.has_value();

        if (errors_defined) {
            if (r.t_ua) err_ua.push_back(relative_rte_error(*r.t_ua, true_t));
            if (r.t_multi) err_multi.push_back(relative_rte_error(*r.t_multi, true_t));
            if (r.t_match) err_match.push_back(relative_rte_error(*r.t_match, true_t));
            if (r.t_ua && r.t_multi) {
                red_multi.push_back(relative_rte_error(*r.t_ua, true_t) -
                                    relative_rte_error(*r.t_multi, true_t));
            }
            if (r.t_ua && r.t_match) {
                red_match.push_back(relative_rte_error(*r.t_ua, true_t) -
                                    relative_rte_error(*r.t_match, true_t));
            }
            if (r.t_ua && r.t_multi && r.t_match) {
                const double e_ua = relative_rte_error(*r.t_ua, true_t);
                red_multi_paired.push_back(e_ua - relative_rte_error(*r.t_multi, true_t));
                red_match_paired.push_back(e_ua - relative_rte_error(*r.t_match, true_t));
            }
        }

        if (r.chi2_full) chi_full_all.push_back(*r.chi2_full);
        if (r.chi2_matched) chi_matched_all.push_back(*r.chi2_matched);
        if (r.chi2_full && r.chi2_matched) {
            chi_full_paired.push_back(*r.chi2_full);
            chi_matched_paired.push_back(*r.chi2_matched);
            if (*r.chi2_full > 0.0) {
                bias_red.push_back(bias_reduction(*r.chi2_full, *r.chi2_matched));
            }
        }
        if (r.match_ran && r.n_total > 0) {
            const double pct = 100.0 * r.n_matched / r.n_total;
            pct_matched.push_back(pct);
            pct_excluded.push_back(100.0 - pct);
        }
    }
    s.n_fail_ua = s.reps - s.n_ok_ua;
    s.n_fail_multi = s.reps - s.n_ok_multi;
    s.n_fail_match = s.reps - s.n_ok_match;

    s.est_ua = maybe_ci(est_ua);
    s.est_multi = maybe_ci(est_multi);
    s.est_match = maybe_ci(est_match);
    s.err_ua = maybe_ci(err_ua);
    s.err_multi = maybe_ci(err_multi);
    s.err_match = maybe_ci(err_match);
    s.red_multi = maybe_ci(red_multi);
    s.red_match = maybe_ci(red_match);
    s.chi2_full = maybe_ci(chi_full_all);
    s.chi2_matched = maybe_ci(chi_matched_all);
    s.bias_red = maybe_ci(bias_red);
    s.pct_matched = maybe_ci(pct_matched);
    s.pct_excluded = maybe_ci(pct_excluded);

    if (err_ua.size() >= 2 && err_multi.size() >= 2 && err_match.size() >= 2) {
        s.anova_err = anova_oneway({err_ua, err_multi, err_match});
    }
    s.t_red = maybe_paired_t(red_match_paired, red_multi_paired);
    s.t_chi2 = maybe_paired_t(chi_full_paired, chi_matched_paired);
    return s;
}

PooledTests pooled_tests(const std::vector<ExperimentRecord>& records) {
    PooledTests pooled;
    pooled.n_records = static_cast<int>(records.size());

    std::vector<double> err_ua, err_multi, err_match;
    std::vector<double> red_match_paired, red_multi_paired;
    std::vector<double> chi_full_paired, chi_matched_paired;
    for (const ExperimentRecord& r : records) {
        if (r.block_effect <= 0.0) continue;
        const double true_t = -r.block_effect;
        if (r.t_ua) err_ua.push_back(relative_rte_error(*r.t_ua, true_t));
        if (r.t_multi) err_multi.push_back(relative_rte_error(*r.t_multi, true_t));
        if (r.t_match) err_match.push_back(relative_rte_error(*r.t_match, true_t));
        if (r.t_ua && r.t_multi && r.t_match) {
            const double e_ua = relative_rte_error(*r.t_ua, true_t);
            red_multi_paired.push_back(e_ua - relative_rte_error(*r.t_multi, true_t));
            red_match_paired.push_back(e_ua - relative_rte_error(*r.t_match, true_t));
        }
    }
    for (const ExperimentRecord& r : records) {
        if (r.chi2_full && r.chi2_matched) {
            chi_full_paired.push_back(*r.chi2_full);
            chi_matched_paired.push_back(*r.chi2_matched);
        }
    }

    if (err_ua.size() >= 2 && err_multi.size() >= 2 && err_match.size() >= 2) {
        pooled.anova_err = anova_oneway({err_ua, err_multi, err_match});
    }
    pooled.t_red = maybe_paired_t(red_match_paired, red_multi_paired);
    pooled.t_chi2 = maybe_paired_t(chi_full_paired, chi_matched_paired);
    return pooled;
}

std::vector<BlockSummary> summarize_records(std::vector<ExperimentRecord> records) {
    std::sort(records.begin(), records.end(),
              [](const ExperimentRecord& a, const ExperimentRecord& b) {
                  if (a.block_index != b.block_index) return a.block_index < b.block_index;
                  return a.rep_index < b.rep_index;
              });
    std::vector<BlockSummary> summaries;
    std::size_t i = 0;
    while (i < records.size()) {
        std::size_t j = i;
        while (j < records.size() && records[j].block_index == records[i].block_index) ++j;
        summaries.push_back(summarize_block(
            records[i].block_index, records[i].block_effect,
            std::span<const ExperimentRecord>(records.data() + i, j - i)));
        i = j;
    }
    return summaries;
}

namespace {

const std::vector<std::string> kRecordHeader = {
    "block_index", "block_effect", "rep_index", "seed",
    "t_ua", "t_multi", "t_match", "fail_ua", "fail_multi", "fail_match",
    "chi2_full", "chi2_full_warn", "match_ran",
    "chi2_matched", "chi2_matched_warn", "n_matched", "n_total"};

void push_ci3(std::vector<std::string>& row, const std::optional<MeanCI>& ci) {
    if (ci) {
        row.push_back(format_double(ci->mean));
        row.push_back(format_double(ci->lower));
        row.push_back(format_double(ci->upper));
    } else {
        row.insert(row.end(), {"NA", "NA", "NA"});
    }
}

std::string test_p(const std::optional<TestResult>& t) {
    return t ? format_double(t->p_value) : std::string("NA");
}

void append_fig_row(std::string& out, double effect, const char* series,
                    const std::optional<MeanCI>& ci) {
    out += join_row({format_double(effect), series,
                     ci ? format_double(ci->mean) : "NA",
                     ci ? format_double(ci->lower) : "NA",
                     ci ? format_double(ci->upper) : "NA"});
}

}  // namespace

void write_records_csv(const std::vector<ExperimentRecord>& records,
                       const std::string& path) {
    std::string out = join_row(kRecordHeader);
    for (const ExperimentRecord& r : records) {
        out += join_row({
            format_int(r.block_index),
            format_double(r.block_effect),
            format_int(r.rep_index),
            format_uint(r.seed),
            format_optional(r.t_ua),
            format_optional(r.t_multi),
            format_optional(r.t_match),
            r.fail_ua,
            r.fail_multi,
            r.fail_match,
            format_optional(r.chi2_full),
            r.chi2_full_warn ? "1" : "0",
            r.match_ran ? "1" : "0",
            format_optional(r.chi2_matched),
            r.chi2_matched_warn ? "1" : "0",
            format_int(r.n_matched),
            format_int(r.n_total),
        });
    }
    write_text_file(path, out);
}

std::vector<ExperimentRecord> read_records_csv(const std::string& path) {
    const CsvTable table = read_csv(path);
    if (table.header != kRecordHeader) {
        throw IoError("unexpected records header in " + path);
    }
    std::vector<ExperimentRecord> records;
    records.reserve(table.rows.size());
    for (const auto& row : table.rows) {
        ExperimentRecord r;
        r.block_index = static_cast<int>(parse_int(row[0]));
        r.block_effect = parse_double(row[1]);
        r.rep_index = static_cast<int>(parse_int(row[2]));
        r.seed = parse_uint(row[3]);
        r.t_ua = parse_optional_double(row[4]);
        r.t_multi = parse_optional_double(row[5]);
        r.t_match = parse_optional_double(row[6]);
        r.fail_ua = row[7];
        r.fail_multi = row[8];
        r.fail_match = row[9];
        r.chi2_full = parse_optional_double(row[10]);
        r.chi2_full_warn = parse_int(row[11]) != 0;
        r.match_ran = parse_int(row[12]) != 0;
        r.chi2_matched = parse_optional_double(row[13]);
        r.chi2_matched_warn = parse_int(row[14]) != 0;
        r.n_matched = static_cast<int>(parse_int(row[15]));
        r.n_total = static_cast<int>(parse_int(row[16]));
        records.push_back(std::move(r));
    }
    return records;
}

void emit_aggregates(const std::vector<ExperimentRecord>& records,
                     const std::vector<BlockSummary>& summaries,
                     const std::string& output_dir) {
    namespace fs = std::filesystem;
    ensure_dir(output_dir);
    const fs::path dir(output_dir);

    // table1: balance diagnostics per block.
    std::string t1 = join_row({
        "effect",
        "chi2_unadjusted_mean", "chi2_unadjusted_lo", "chi2_unadjusted_hi",
        "chi2_matched_mean", "chi2_matched_lo", "chi2_matched_hi",
        "p_value",
        "bias_reduction_mean", "bias_reduction_lo", "bias_reduction_hi",
        "pct_matched_mean", "pct_matched_lo", "pct_matched_hi",
        "pct_excluded_mean", "pct_excluded_lo", "pct_excluded_hi"});
    for (const BlockSummary& s : summaries) {
        std::vector<std::string> row{format_double(s.block_effect)};
        push_ci3(row, s.chi2_full);
        push_ci3(row, s.chi2_matched);
        row.push_back(test_p(s.t_chi2));
        push_ci3(row, s.bias_red);
        push_ci3(row, s.pct_matched);
        push_ci3(row, s.pct_excluded);
        t1 += join_row(row);
    }
    write_text_file((dir / "table1.csv").string(), t1);

    // table2: estimates, relative errors, and error reductions per block.
    std::string t2 = join_row({
        "effect",
        "est_unadjusted_mean", "est_unadjusted_lo", "est_unadjusted_hi",
        "est_multivariate_mean", "est_multivariate_lo", "est_multivariate_hi",
        "est_matched_mean", "est_matched_lo", "est_matched_hi",
        "err_unadjusted_mean", "err_unadjusted_lo", "err_unadjusted_hi",
        "err_multivariate_mean", "err_multivariate_lo", "err_multivariate_hi",
        "err_matched_mean", "err_matched_lo", "err_matched_hi",
        "err_of_mean_unadjusted", "err_of_mean_multivariate", "err_of_mean_matched",
        "red_multivariate_mean", "red_multivariate_lo", "red_multivariate_hi",
        "red_matched_mean", "red_matched_lo", "red_matched_hi",
        "anova_p", "reduction_p",
        "n_ok_unadjusted", "n_ok_multivariate", "n_ok_matched",
        "n_fail_unadjusted", "n_fail_multivariate", "n_fail_matched"});
    for (const BlockSummary& s : summaries) {
        std::vector<std::string> row{format_double(s.block_effect)};
        push_ci3(row, s.est_ua);
        push_ci3(row, s.est_multi);
        push_ci3(row, s.est_match);
        push_ci3(row, s.err_ua);
        push_ci3(row, s.err_multi);
        push_ci3(row, s.err_match);
        const double true_t = -s.block_effect;
        const bool defined = s.block_effect > 0.0;
        auto err_of_mean = [&](const std::optional<MeanCI>& est) {
            return (defined && est)
                       ? format_double(relative_rte_error(est->mean, true_t))
                       : std::string("NA");
        };
        row.push_back(err_of_mean(s.est_ua));
        row.push_back(err_of_mean(s.est_multi));
        row.push_back(err_of_mean(s.est_match));
        push_ci3(row, s.red_multi);
        push_ci3(row, s.red_match);
        row.push_back(test_p(s.anova_err));
        row.push_back(test_p(s.t_red));
        row.push_back(format_int(s.n_ok_ua));
        row.push_back(format_int(s.n_ok_multi));
        row.push_back(format_int(s.n_ok_match));
        row.push_back(format_int(s.n_fail_ua));
        row.push_back(format_int(s.n_fail_multi));
        row.push_back(format_int(s.n_fail_match));
        t2 += join_row(row);
    }
    write_text_file((dir / "table2.csv").string(), t2);

    // Plot data, long format.
    const std::vector<std::string> fig_header = {"effect", "series", "value",
                                                 "lower", "upper"};
    std::string f1 = join_row(fig_header);
    std::string f2 = join_row(fig_header);
    std::string f3 = join_row(fig_header);
    for (const BlockSummary& s : summaries) {
        append_fig_row(f1, s.block_effect, "bias_reduction", s.bias_red);
        append_fig_row(f1, s.block_effect, "pct_matched", s.pct_matched);
        append_fig_row(f1, s.block_effect, "red_multivariate", s.red_multi);
        append_fig_row(f1, s.block_effect, "red_matched", s.red_match);

        f2 += join_row({format_double(s.block_effect), "real_effect",
                        format_double(-s.block_effect), "NA", "NA"});
        append_fig_row(f2, s.block_effect, "est_unadjusted", s.est_ua);
        append_fig_row(f2, s.block_effect, "est_multivariate", s.est_multi);
        append_fig_row(f2, s.block_effect, "est_matched", s.est_match);

        append_fig_row(f3, s.block_effect, "err_unadjusted", s.err_ua);
        append_fig_row(f3, s.block_effect, "err_multivariate", s.err_multi);
        append_fig_row(f3, s.block_effect, "err_matched", s.err_match);
    }
    write_text_file((dir / "fig1.csv").string(), f1);
    write_text_file((dir / "fig2.csv").string(), f2);
    write_text_file((dir / "fig3.csv").string(), f3);

    // Pooled hypothesis tests over every record (labeled, per-block ones
    // live in table1/table2).
    std::string pooled =
        join_row({"test", "statistic", "dof1", "dof2", "p_value", "flagged", "n"});
    const PooledTests p = pooled_tests(records);
    auto pooled_row = [&](const char* name, const std::optional<TestResult>& t) {
        if (!t) return;
        pooled += join_row({name, format_double(t->statistic), format_double(t->dof1),
                            format_double(t->dof2), format_double(t->p_value),
                            t->flagged ? "1" : "0", format_int(p.n_records)});
    };
    pooled_row("anova_error_across_methods", p.anova_err);
    pooled_row("paired_reduction_matched_vs_multivariate", p.t_red);
    pooled_row("paired_chi2_full_vs_matched", p.t_chi2);
    write_text_file((dir / "pooled.csv").string(), pooled);
}

void emit_outputs(const std::vector<ExperimentRecord>& records,
                  const std::vector<BlockSummary>& summaries,
                  const std::string& output_dir) {
    namespace fs = std::filesystem;
    ensure_dir(output_dir);
    write_records_csv(records, (fs::path(output_dir) / "records.csv").string());
    emit_aggregates(records, summaries, output_dir);
}

}  // namespace causalbench
