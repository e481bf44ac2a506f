#include "core/matching.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "core/errors.hpp"
#include "core/glm.hpp"

namespace causalbench {

void MatchSpec::validate() const {
    if (!(caliper_multiplier >= 0.0) || !std::isfinite(caliper_multiplier)) {
        throw ConfigError("caliper_multiplier must be a nonnegative real");
    }
}

std::vector<double> estimate_propensity(const Cohort& cohort) {
    const int n = cohort.n_patients;
    const int p = cohort.n_covariates();
    DesignMatrix design;
    design.n_rows = n;
    design.n_cols = p + 1;
    design.values.resize(static_cast<std::size_t>(n) * (p + 1));
    design.column_labels.reserve(p + 1);
    design.column_labels.push_back("(intercept)");
    for (int j = 0; j < p; ++j) {
        design.column_labels.push_back("x" + std::to_string(j));
    }
    for (int i = 0; i < n; ++i) {
        design.at(i, 0) = 1.0;
        for (int j = 0; j < p; ++j) {
            design.at(i, j + 1) =
                static_cast<double>(cohort.covariates[static_cast<std::size_t>(i) * p + j]);
        }
    }
    const LogisticFit fit = fit_logistic(design, cohort.treatment);
    return predict_logit(fit, design);
}

MatchResult match(std::span<const double> logit_ps,
                  std::span<const std::uint8_t> treatment,
                  const MatchSpec& spec,
                  Rng& rng) {
    spec.validate();
    const std::size_t n = logit_ps.size();
    if (treatment.size() != n) {
        throw MatchError("match: propensity and treatment lengths differ");
    }
    std::vector<int> treated, controls;
    for (std::size_t i = 0; i < n; ++i) {
        (treatment[i] ? treated : controls).push_back(static_cast<int>(i));
    }
    if (treated.empty() || controls.empty()) {
        throw MatchError("match: need at least one treated and one control patient");
    }

    // Full-cohort sample SD of the logit propensity score.
    double mean = 0.0;
    for (double v : logit_ps) mean += v;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double v : logit_ps) {
        const double d = v - mean;
        ss += d * d;
    }
    const double sd = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;

    MatchResult result;
    result.caliper_width = spec.caliper_multiplier * sd;

    switch (spec.order_policy) {
        case OrderPolicy::descending_ps:
            std::sort(treated.begin(), treated.end(), [&](int a, int b) {
                if (logit_ps[a] != logit_ps[b]) return logit_ps[a] > logit_ps[b];
                return a < b;
            });
            break;
        case OrderPolicy::data_order:
            break;
        case OrderPolicy::random:
            // Fisher-Yates on the treated visit order.
            for (std::size_t i = treated.size(); i > 1; --i) {
                const std::size_t j =
                    static_cast<std::size_t>(rng.uniform01() * static_cast<double>(i));
                std::swap(treated[i - 1], treated[j < i ? j : i - 1]);
            }
            break;
    }

    std::vector<bool> control_used(n, false);
    for (int t : treated) {
        int best = -1;
        double best_dist = std::numeric_limits<double>::infinity();
        for (int c : controls) {
            if (control_used[c]) continue;
            const double dist = std::abs(logit_ps[t] - logit_ps[c]);
            if (dist < best_dist) {
                best_dist = dist;
                best = c;  // ties keep the earlier (lower) control index
            }
        }
        if (best >= 0 && best_dist <= result.caliper_width) {
            control_used[best] = true;
            result.pairs.push_back({t, best, best_dist});
        } else {
            result.unmatched_treated.push_back(t);
        }
    }
    for (int c : controls) {
        if (!control_used[c]) result.unmatched_controls.push_back(c);
    }

    result.percent_matched =
        100.0 * static_cast<double>(2 * result.pairs.size()) / static_cast<double>(n);
    result.percent_excluded = 100.0 - result.percent_matched;
    return result;
}

Cohort matched_cohort(const Cohort& cohort, const MatchResult& result) {
    if (result.pairs.empty()) {
        throw MatchError("empty matched sample");
    }
    const int p = cohort.n_covariates();
    std::vector<int> rows;
    rows.reserve(2 * result.pairs.size());
    for (const MatchPair& pair : result.pairs) {
        if (pair.treated_index < 0 || pair.treated_index >= cohort.n_patients ||
            pair.control_index < 0 || pair.control_index >= cohort.n_patients) {
            throw MatchError("matched_cohort: pair index out of range");
        }
        rows.push_back(pair.treated_index);
        rows.push_back(pair.control_index);
    }

    Cohort sub;
    sub.n_patients = static_cast<int>(rows.size());
    sub.n_a = cohort.n_a;
    sub.n_b = cohort.n_b;
    sub.n_c = cohort.n_c;
    sub.n_d = cohort.n_d;
    sub.covariates.resize(static_cast<std::size_t>(sub.n_patients) * p);
    sub.treatment.resize(rows.size());
    sub.noise.resize(rows.size());
    sub.linear_predictor.resize(rows.size());
    sub.event_prob.resize(rows.size());
    sub.events.resize(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const int r = rows[i];
        std::copy_n(cohort.covariates.begin() + static_cast<std::size_t>(r) * p, p,
                    sub.covariates.begin() + static_cast<std::size_t>(i) * p);
        sub.treatment[i] = cohort.treatment[r];
        sub.noise[i] = cohort.noise[r];
        sub.linear_predictor[i] = cohort.linear_predictor[r];
        sub.event_prob[i] = cohort.event_prob[r];
        sub.events[i] = cohort.events[r];
    }
    return sub;
}

}  // namespace causalbench
