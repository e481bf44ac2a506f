#include "core/estimators.hpp"

#include <cstddef>

#include "core/errors.hpp"
#include "core/glm.hpp"

namespace causalbench {

namespace {

void require_both_arms(const Cohort& cohort) {
    bool any_treated = false, any_control = false;
    for (std::uint8_t t : cohort.treatment) {
        (t ? any_treated : any_control) = true;
    }
    if (!any_treated || !any_control) {
        throw GlmError(GlmError::Kind::degenerate_outcome,
                       "degenerate treatment: single arm");
    }
}

// intercept + treatment, optionally followed by every covariate column.
DesignMatrix build_design(const Cohort& cohort, bool with_covariates) {
    const int n = cohort.n_patients;
    const int p = with_covariates ? cohort.n_covariates() : 0;
    DesignMatrix design;
    design.n_rows = n;
    design.n_cols = 2 + p;
    design.values.resize(static_cast<std::size_t>(n) * design.n_cols);
    design.column_labels.push_back("(intercept)");
    design.column_labels.push_back("treatment");
    for (int j = 0; j < p; ++j) {
        design.column_labels.push_back("x" + std::to_string(j));
    }
    for (int i = 0; i < n; ++i) {
        design.at(i, 0) = 1.0;
        design.at(i, 1) = static_cast<double>(cohort.treatment[i]);
        for (int j = 0; j < p; ++j) {
            design.at(i, 2 + j) = static_cast<double>(
                cohort.covariates[static_cast<std::size_t>(i) * p + j]);
        }
    }
    return design;
}

EffectEstimate fit_effect(const Cohort& cohort, Method method, bool with_covariates) {
    require_both_arms(cohort);
    const DesignMatrix design = build_design(cohort, with_covariates);
    const LogisticFit fit = fit_logistic(design, cohort.events);
    if (!fit.converged) {
        throw GlmError(GlmError::Kind::separation, "no convergence");
    }
    EffectEstimate estimate;
    estimate.method = method;
    estimate.coefficient = fit.coefficients[1];  // treatment column
    estimate.odds_ratio = odds_ratio(estimate.coefficient);
    estimate.n_used = cohort.n_patients;
    return estimate;
}

}  // namespace

const char* method_name(Method method) {
    switch (method) {
        case Method::unadjusted: return "unadjusted";
        case Method::multivariate: return "multivariate";
        case Method::matched: return "matched";
    }
    return "unknown";
}

EffectEstimate estimate_unadjusted(const Cohort& cohort) {
    return fit_effect(cohort, Method::unadjusted, false);
}

EffectEstimate estimate_multivariate(const Cohort& cohort) {
    return fit_effect(cohort, Method::multivariate, true);
}

EffectEstimate estimate_matched(const Cohort& cohort, const MatchResult& match_result) {
    const Cohort sub = matched_cohort(cohort, match_result);
    return fit_effect(sub, Method::matched, false);
}

}  // namespace causalbench
