// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Each check is self-contained and uses the independent oracles in
// oracles.hpp, never the library's own implementation, as the reference.
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "core/cohort.hpp"
#include "core/config.hpp"
#include "core/errors.hpp"
#include "core/estimators.hpp"
#include "core/glm.hpp"
#include "core/harness.hpp"
#include "core/matching.hpp"
#include "core/rng.hpp"
#include "core/stats.hpp"
#include "oracles.hpp"

using namespace causalbench;
namespace fs = std::filesystem;

namespace {

int failures = 0;
std::string detail;

void report(const char* name, bool ok) {
    if (ok) {
        std::printf("PASS: %s\n", name);
    } else {
        ++failures;
        if (detail.empty()) {
            std::printf("FAIL: %s\n", name);
        } else {
            std::printf("FAIL: %s (%s)\n", name, detail.c_str());
        }
    }
    detail.clear();
    std::fflush(stdout);
}

bool expect(bool cond, const std::string& why) {
    if (!cond && detail.empty()) detail = why;
    return cond;
}

double logistic(double z) {
    return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

// ---------------------------------------------------------------- criteria

bool metric_reconstruction() {
    bool ok = true;
    ok &= expect(std::abs(relative_rte_error(-2.225, -5.0) - 0.555) <= 0.001,
                 "relative error (-2.225, -5)");
    ok &= expect(std::abs(relative_rte_error(-4.521, -5.0) - 0.0958) <= 0.001,
                 "relative error (-4.521, -5)");
    ok &= expect(std::abs(relative_rte_error(-1.63, -4.0) - 0.5925) <= 0.001,
                 "relative error (-1.63, -4)");
    ok &= expect(std::abs(relative_rte_error(0.743, -0.1) - 8.43) <= 0.01,
                 "relative error (0.743, -0.1)");
    ok &= expect(std::abs(bias_reduction(220.7, 3.631) - 0.9836) <= 0.0005,
                 "bias reduction (220.7, 3.631)");
    const double reduction = relative_rte_error(-2.225, -5.0) -
                             relative_rte_error(-4.521, -5.0);
    ok &= expect(std::abs(reduction - 0.459) <= 0.001, "error reduction 0.459");
    return ok;
}

bool glm_oracle_suite() {
    bool ok = true;
    Rng rng(20240605);

    // 1000 nondegenerate 2x2 tables vs the closed form
    int tables = 0;
    while (tables < 1000 && ok) {
        const int n1 = 2 + static_cast<int>(rng.uniform01() * 38);
        const int n0 = 2 + static_cast<int>(rng.uniform01() * 38);
        const int e1 = 1 + static_cast<int>(rng.uniform01() * (n1 - 1));
        const int e0 = 1 + static_cast<int>(rng.uniform01() * (n0 - 1));
        if (e1 >= n1 || e0 >= n0) continue;

        DesignMatrix d;
        d.n_rows = n1 + n0;
        d.n_cols = 2;
        d.column_labels = {"(intercept)", "treatment"};
        std::vector<std::uint8_t> y;
        for (int i = 0; i < n1; ++i) {
            d.values.insert(d.values.end(), {1.0, 1.0});
            y.push_back(i < e1 ? 1 : 0);
        }
        for (int i = 0; i < n0; ++i) {
            d.values.insert(d.values.end(), {1.0, 0.0});
            y.push_back(i < e0 ? 1 : 0);
        }
        auto fit = fit_logistic(d, y);
        const double want = std::log((static_cast<double>(e1) * (n0 - e0)) /
                                     (static_cast<double>(n1 - e1) * e0));
        ok &= expect(std::abs(fit.coefficients[1] - want) <= 1e-8,
                     "2x2 slope off the closed form");

        double score = 0.0;
        for (int j = 0; j < 2 && ok; ++j) {
            double s = 0.0;
            for (int i = 0; i < d.n_rows; ++i) {
                const double eta =
                    fit.coefficients[0] + fit.coefficients[1] * d.at(i, 1);
                s += d.at(i, j) * (static_cast<double>(y[i]) - logistic(eta));
            }
            score = std::max(score, std::abs(s));
        }
        ok &= expect(score <= 1e-6, "score at optimum above 1e-6");
        ++tables;
    }

    // 100 random small datasets vs derivative-free coordinate ascent
    int datasets = 0;
    while (datasets < 100 && ok) {
        const int n = 40, p = 3;
        std::vector<double> values;
        std::vector<std::uint8_t> y(n);
        const double b0 = rng.normal(0.0, 0.4);
        const double b1 = rng.normal(0.0, 0.8);
        const double b2 = rng.normal(0.0, 0.8);
        int ones = 0;
        for (int i = 0; i < n; ++i) {
            const double x1 = 2.0 * rng.uniform01() - 1.0;
            const double x2 = rng.bernoulli(0.5) ? 1.0 : 0.0;
            values.insert(values.end(), {1.0, x1, x2});
            y[i] = rng.bernoulli(logistic(b0 + b1 * x1 + b2 * x2)) ? 1 : 0;
            ones += y[i];
        }
        if (ones == 0 || ones == n) continue;
        DesignMatrix d;
        d.n_rows = n;
        d.n_cols = p;
        d.values = values;
        d.column_labels = {"(intercept)", "x0", "x1"};
        LogisticFit fit;
        try {
            fit = fit_logistic(d, y);
        } catch (const GlmError&) {
            continue;  // separated draw
        }
        double worst = 0.0;
        for (double b : fit.coefficients) worst = std::max(worst, std::abs(b));
        if (worst > 8.0) continue;  // flat likelihood; not a fair comparison

        auto ref = oracles::logistic_fit(d.values, n, p, y);
        for (int j = 0; j < p; ++j) {
            ok &= expect(std::abs(fit.coefficients[j] - ref[j]) <= 1e-5,
                         "IRLS disagrees with the coordinate-ascent oracle");
        }
        double score = 0.0;
        for (int j = 0; j < p; ++j) {
            double s = 0.0;
            for (int i = 0; i < n; ++i) {
                double eta = 0.0;
                for (int k = 0; k < p; ++k) eta += d.at(i, k) * fit.coefficients[k];
                s += d.at(i, j) * (static_cast<double>(y[i]) - logistic(eta));
            }
            score = std::max(score, std::abs(s));
        }
        ok &= expect(score <= 1e-6, "score at optimum above 1e-6");
        ++datasets;
    }
    return ok;
}

bool matching_property_suite() {
    bool ok = true;
    Rng meta(77007);
    for (int trial = 0; trial < 1000 && ok; ++trial) {
        const int n = 10 + static_cast<int>(meta.uniform01() * 190);
        std::vector<double> ps(n);
        std::vector<std::uint8_t> tr(n);
        int treated = 0;
        for (int i = 0; i < n; ++i) {
            ps[i] = meta.normal(0.0, 1.0 + meta.uniform01());
            tr[i] = meta.bernoulli(0.4) ? 1 : 0;
            treated += tr[i];
        }
        if (treated == 0) tr[0] = 1;
        if (treated == n) tr[0] = 0;

        MatchSpec spec;
        spec.caliper_multiplier = 1.5 * meta.uniform01();
        const double pick = meta.uniform01();
        spec.order_policy = pick < 0.45  ? OrderPolicy::descending_ps
                            : pick < 0.9 ? OrderPolicy::data_order
                                         : OrderPolicy::random;
        Rng rng(meta.next_u64());
        auto res = match(ps, tr, spec, rng);

        std::set<int> used_t, used_c;
        for (const auto& p : res.pairs) {
            ok &= expect(tr[p.treated_index] == 1 && tr[p.control_index] == 0,
                         "pair crosses arms the wrong way");
            ok &= expect(used_t.insert(p.treated_index).second &&
                             used_c.insert(p.control_index).second,
                         "an index was reused");
            ok &= expect(std::abs(p.distance -
                                  std::abs(ps[p.treated_index] - ps[p.control_index])) <=
                             1e-12,
                         "recorded distance wrong");
            ok &= expect(p.distance <= res.caliper_width * (1.0 + 1e-12),
                         "pair outside the caliper");
        }
        const auto n_treated = static_cast<std::size_t>(
            std::count(tr.begin(), tr.end(), std::uint8_t{1}));
        ok &= expect(res.pairs.size() + res.unmatched_treated.size() == n_treated,
                     "treated accounting broken");
        ok &= expect(std::abs(res.percent_matched -
                              100.0 * 2.0 * static_cast<double>(res.pairs.size()) / n) <=
                         1e-12,
                     "percent_matched arithmetic");
        ok &= expect(std::abs(res.percent_matched + res.percent_excluded - 100.0) <=
                         1e-9,
                     "percent bookkeeping");

        if (spec.order_policy != OrderPolicy::random && ok) {
            // replay the greedy pass: nearest available control each step
            std::vector<int> order;
            for (int i = 0; i < n; ++i) {
                if (tr[i]) order.push_back(i);
            }
            if (spec.order_policy == OrderPolicy::descending_ps) {
                std::stable_sort(order.begin(), order.end(),
                                 [&](int a, int b) { return ps[a] > ps[b]; });
            }
            std::vector<char> taken(n, 0);
            std::vector<MatchPair> want;
            for (int t : order) {
                int best = -1;
                double best_d = 0.0;
                for (int c = 0; c < n; ++c) {
                    if (tr[c] || taken[c]) continue;
                    const double d = std::abs(ps[t] - ps[c]);
                    if (best < 0 || d < best_d) {
                        best = c;
                        best_d = d;
                    }
                }
                if (best >= 0 && best_d <= res.caliper_width) {
                    taken[best] = 1;
                    want.push_back({t, best, best_d});
                }
            }
            ok &= expect(res.pairs.size() == want.size(),
                         "greedy replay pair count differs");
            for (std::size_t k = 0; ok && k < want.size(); ++k) {
                ok &= expect(res.pairs[k].treated_index == want[k].treated_index &&
                                 res.pairs[k].control_index == want[k].control_index,
                             "nearest-available property violated");
            }
        }
    }
    return ok;
}

RunConfig desk_scale_config() {
    auto config = RunConfig::defaults();
    config.effect_grid = {1.0, 2.0, 3.0, 4.0, 5.0};
    config.reps_per_block = 50;
    return config;
}

bool regime_reproduction() {
    bool ok = true;
    auto grid = compute_grid(desk_scale_config());
    if (!expect(grid.summaries.size() == 5, "expected 5 block summaries")) {
        return false;
    }
    for (const auto& s : grid.summaries) {
        const std::string tag = "block " + std::to_string(s.block_index);
        if (!expect(s.err_ua && s.err_multi && s.err_match && s.bias_red &&
                        s.chi2_full && s.chi2_matched && s.t_red,
                    tag + ": summary fields missing")) {
            return false;
        }
        ok &= expect(s.err_multi->mean < s.err_match->mean &&
                         s.err_match->mean < s.err_ua->mean,
                     tag + ": error ordering violated");
        ok &= expect(s.bias_red->mean >= 0.90, tag + ": bias reduction below 0.90");
        ok &= expect(s.chi2_matched->mean < 0.10 * s.chi2_full->mean,
                     tag + ": matched imbalance above 10% of unadjusted");
        ok &= expect(s.t_red->p_value < 0.01, tag + ": reduction t-test p >= 0.01");
    }
    return ok;
}

bool tail_accuracy() {
    bool ok = true;
    ok &= expect(std::abs(chi2_tail(3.841459, 1) - 0.0500) <= 1e-4,
                 "chi2_tail(3.841459, 1)");

    // 50-point grid per family against adaptive-quadrature oracles
    const double mults[] = {0.1, 0.5, 1.0, 1.8, 3.2};
    const double ks[] = {1, 2, 3, 5, 10, 30, 100, 250, 600, 1000};
    for (double k : ks) {
        for (double m : mults) {
            const double x = m * k;
            ok &= expect(std::abs(chi2_tail(x, k) - oracles::chi2_tail(x, k)) <= 1e-8,
                         "chi2_tail off the quadrature oracle");
        }
    }
    const double txs[] = {-6.0, -2.5, -0.7, 0.0, 0.3, 1.0, 2.0, 3.5, 6.0, 12.7062};
    const double tvs[] = {1, 2, 5, 30, 1000};
    for (double v : tvs) {
        for (double x : txs) {
            ok &= expect(std::abs(t_tail(x, v) - oracles::t_tail(x, v)) <= 1e-8,
                         "t_tail off the quadrature oracle");
        }
    }
    const double fxs[] = {0.2, 0.5, 1.0, 1.7, 3.0, 5.0, 9.0, 15.0, 30.0, 80.0};
    const double fd[][2] = {{1, 3}, {2, 6}, {4, 20}, {9, 9}, {40, 199}};
    for (const auto& d : fd) {
        for (double x : fxs) {
            ok &= expect(std::abs(f_tail(x, d[0], d[1]) -
                                  oracles::f_tail(x, d[0], d[1])) <= 1e-8,
                         "f_tail off the quadrature oracle");
        }
    }
    return ok;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

bool determinism() {
    bool ok = true;
    const fs::path root =
        fs::temp_directory_path() / ("causalbench-accept-" + std::to_string(::getpid()));
    fs::remove_all(root);

    auto run_to = [&](const RunConfig& config, const char* leaf) {
        auto grid = compute_grid(config);
        const auto dir = root / leaf;
        emit_outputs(grid.records, grid.summaries, dir.string());
        return read_file(dir / "records.csv");
    };

    auto config = desk_scale_config();
    const std::string a = run_to(config, "a");
    const std::string b = run_to(config, "b");
    ok &= expect(!a.empty() && a == b, "repeat runs differ");

    auto serial = config;
    serial.parallelism = 1;
    auto wide = config;
    wide.parallelism = 8;
    const std::string s1 = run_to(serial, "serial");
    const std::string s8 = run_to(wide, "parallel");
    ok &= expect(!s1.empty() && s1 == s8, "serial vs 8-worker runs differ");
    ok &= expect(s1 == a, "worker count changed the records");

    fs::remove_all(root);
    return ok;
}

bool null_regime() {
    auto config = RunConfig::defaults();
    auto& spec = config.cohort_spec;
    std::fill(spec.q_weights.begin(), spec.q_weights.end(), 0.0);
    std::fill(spec.s_weights.begin(), spec.s_weights.end(), 0.0);
    std::fill(spec.treat_a_weights.begin(), spec.treat_a_weights.end(), 0.0);
    std::fill(spec.treat_c_weights.begin(), spec.treat_c_weights.end(), 0.0);
    spec.treat_intercept = 0.0;
    spec.noise_sd = 0.0;
    config.effect_grid = {1.0};
    config.reps_per_block = 200;

    auto grid = compute_grid(config);
    const auto& s = grid.summaries.at(0);
    if (!expect(s.est_ua && s.est_multi && s.est_match,
                "estimates missing in the null regime")) {
        return false;
    }
    bool ok = true;
    ok &= expect(std::abs(s.est_ua->mean - -1.0) <= 0.15,
                 "unadjusted mean off -1: " + std::to_string(s.est_ua->mean));
    ok &= expect(std::abs(s.est_multi->mean - -1.0) <= 0.15,
                 "multivariate mean off -1: " + std::to_string(s.est_multi->mean));
    ok &= expect(std::abs(s.est_match->mean - -1.0) <= 0.15,
                 "matched mean off -1: " + std::to_string(s.est_match->mean));
    return ok;
}

}  // namespace

int main() {
    report("metric reconstruction", metric_reconstruction());
    report("glm oracle suite", glm_oracle_suite());
    report("matching property suite", matching_property_suite());
    report("regime reproduction at desk scale", regime_reproduction());
    report("tail-function accuracy", tail_accuracy());
    report("determinism", determinism());
    report("null-regime sanity", null_regime());
    return failures == 0 ? 0 : 1;
}
