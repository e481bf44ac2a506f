#ifndef CAUSALBENCH_CORE_ESTIMATORS_HPP
#define CAUSALBENCH_CORE_ESTIMATORS_HPP

#include "core/cohort.hpp"
#include "core/matching.hpp"

namespace causalbench {

enum class Method { unadjusted, multivariate, matched };

const char* method_name(Method method);

// One method's treatment-effect estimate on one experiment.
struct EffectEstimate {
    Method method;
    double coefficient = 0.0;  // estimated t on the log-odds scale
    double odds_ratio = 1.0;   // e^coefficient
    int n_used = 0;            // patients entering the regression
};

// Logistic fit of events on intercept + treatment over the full cohort.
EffectEstimate estimate_unadjusted(const Cohort& cohort);

// Logistic fit of events on intercept + treatment + every covariate
// column (A, B, C, D).
EffectEstimate estimate_multivariate(const Cohort& cohort);

// Logistic fit of events on intercept + treatment over the matched
// sub-cohort only. The pairing itself is ignored by the regression.
EffectEstimate estimate_matched(const Cohort& cohort, const MatchResult& match_result);

}  // namespace causalbench

#endif
