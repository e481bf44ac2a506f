#ifndef CAUSALBENCH_CORE_MATCHING_HPP
#define CAUSALBENCH_CORE_MATCHING_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "core/cohort.hpp"
#include "core/rng.hpp"

namespace causalbench {

enum class DistanceScale {
    // Caliper width = caliper_multiplier x SD of the logit propensity
    // score over the full cohort (the dominant caliper convention).
    logit_ps_sd,
};

enum class OrderPolicy {
    descending_ps,  // hardest-to-match treated units first (default)
    data_order,
    random,
};

// 1:1 nearest-neighbor matching without replacement.
struct MatchSpec {
    double caliper_multiplier = 0.2;
    DistanceScale distance_scale = DistanceScale::logit_ps_sd;
    OrderPolicy order_policy = OrderPolicy::descending_ps;

    void validate() const;  // caliper_multiplier >= 0
};

struct MatchPair {
    int treated_index = 0;
    int control_index = 0;
    double distance = 0.0;
};

struct MatchResult {
    std::vector<MatchPair> pairs;
    std::vector<int> unmatched_treated;
    std::vector<int> unmatched_controls;
    double caliper_width = 0.0;
    double percent_matched = 0.0;   // 100 * 2 * pairs / n_patients
    double percent_excluded = 0.0;  // 100 - percent_matched
};

// Fits treatment ~ intercept + all observed covariates (A, B, C, D) and
// returns the per-patient linear predictor on the logit scale. GLM errors
// (separation, singular design) propagate.
std::vector<double> estimate_propensity(const Cohort& cohort);

// Greedy nearest-neighbor 1:1 matching without replacement. Treated units
// are visited in order_policy order; each takes the unused control with
// the smallest |logit-PS difference| (ties to the lower control index) and
// the pair is kept only when the distance is within the caliper. The rng
// is consulted only for OrderPolicy::random. A zero-SD propensity vector
// yields caliper width 0, so only exact-distance-0 pairs form.
MatchResult match(std::span<const double> logit_ps,
                  std::span<const std::uint8_t> treatment,
                  const MatchSpec& spec,
                  Rng& rng);

// The sub-cohort containing exactly the paired patients, rows ordered
// (treated, control) per pair in pair order. All per-patient columns are
// preserved. Throws MatchError on an empty pair list.
Cohort matched_cohort(const Cohort& cohort, const MatchResult& result);

}  // namespace causalbench

#endif
