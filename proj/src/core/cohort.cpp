#include "core/cohort.hpp"

#include <cmath>
#include <string>

#include "core/errors.hpp"
#include "core/logistic.hpp"

namespace causalbench {

void CohortSpec::validate() const {
    if (n_patients <= 0) {
        throw ConfigError("n_patients must be positive");
    }
    if (n_a < 0 || n_b < 0 || n_c < 0 || n_d < 0) {
        throw ConfigError("covariate counts must be nonnegative");
    }
    const auto expect_len = [](const std::vector<double>& v, int n, const char* name) {
        if (static_cast<int>(v.size()) != n) {
            throw ConfigError(std::string(name) + " must have length " + std::to_string(n) +
                              ", got " + std::to_string(v.size()));
        }
        for (double x : v) {
            if (!std::isfinite(x)) {
                throw ConfigError(std::string(name) + " contains a non-finite entry");
            }
        }
    };
    expect_len(covariate_prevalence, n_covariates(), "covariate_prevalence");
    expect_len(q_weights, n_a, "q_weights");
    expect_len(s_weights, n_b, "s_weights");
    expect_len(treat_a_weights, n_a, "treat_a_weights");
    expect_len(treat_c_weights, n_c, "treat_c_weights");
    for (double p : covariate_prevalence) {
        if (!(p > 0.0 && p < 1.0)) {
            throw ConfigError("covariate_prevalence entries must lie strictly in (0,1)");
        }
    }
    if (!std::isfinite(outcome_intercept) || !std::isfinite(treat_intercept)) {
        throw ConfigError("intercepts must be finite");
    }
    if (!(noise_sd >= 0.0) || !std::isfinite(noise_sd)) {
        throw ConfigError("noise_sd must be a nonnegative real");
    }
}

CohortSpec CohortSpec::defaults() {
    CohortSpec spec;
    spec.n_patients = 500;
    spec.n_a = 2;
    spec.n_b = 2;
    spec.n_c = 2;
    spec.n_d = 2;
    spec.covariate_prevalence.assign(spec.n_covariates(), 0.5);
    // Weights come in +/- pairs so the linear predictors stay centered
    // (no saturation of the outcome probabilities) while the omitted-
    // covariate variance stays large. The A pair confounds coherently:
    // A1 raises treatment odds and events, A2 lowers both, so both
    // covariates bias the unadjusted estimate in the same direction.
    spec.q_weights = {2.0, -2.0};
    spec.s_weights = {2.0, -2.0};
    spec.outcome_intercept = 0.0;
    // Calibrated so the treated fraction sits near 0.35 under the default
    // treatment weights (exact expectation over the 16 covariate cells).
    spec.treat_intercept = -0.544;
    spec.treat_a_weights = {1.0, -1.2};
    spec.treat_c_weights = {0.7, -0.9};
    spec.noise_sd = 1.0;
    return spec;
}

std::vector<std::uint8_t> generate_covariates(const CohortSpec& spec, Rng& rng) {
    const int n = spec.n_patients;
    const int p = spec.n_covariates();
    std::vector<std::uint8_t> covariates(static_cast<std::size_t>(n) * p);
    for (int z = 0; z < n; ++z) {
        for (int j = 0; j < p; ++j) {
            covariates[static_cast<std::size_t>(z) * p + j] =
                rng.bernoulli(spec.covariate_prevalence[j]) ? 1 : 0;
        }
    }
    return covariates;
}

std::vector<std::uint8_t> assign_treatment(const CohortSpec& spec,
                                           std::span<const std::uint8_t> covariates,
                                           Rng& rng) {
    const int n = spec.n_patients;
    const int p = spec.n_covariates();
    if (covariates.size() != static_cast<std::size_t>(n) * p) {
        throw SimError("assign_treatment: covariate matrix size mismatch");
    }
    std::vector<std::uint8_t> treatment(n);
    for (int z = 0; z < n; ++z) {
        const std::uint8_t* row = covariates.data() + static_cast<std::size_t>(z) * p;
        double logit = spec.treat_intercept;
        for (int j = 0; j < spec.n_a; ++j) {
            if (row[j]) logit += spec.treat_a_weights[j];
        }
        const int c_offset = spec.n_a + spec.n_b;
        for (int l = 0; l < spec.n_c; ++l) {
            if (row[c_offset + l]) logit += spec.treat_c_weights[l];
        }
        treatment[z] = rng.bernoulli(logistic(logit)) ? 1 : 0;
    }
    return treatment;
}

std::vector<double> linear_predictor(const CohortSpec& spec,
                                     std::span<const std::uint8_t> covariates,
                                     std::span<const std::uint8_t> treatment,
                                     std::span<const double> noise,
                                     double effect_t) {
    const int n = spec.n_patients;
    const int p = spec.n_covariates();
    if (covariates.size() != static_cast<std::size_t>(n) * p) {
        throw SimError("linear_predictor: covariate matrix size mismatch");
    }
    if (treatment.size() != static_cast<std::size_t>(n) ||
        noise.size() != static_cast<std::size_t>(n)) {
        throw SimError("linear_predictor: vector length mismatch");
    }
    std::vector<double> y(n);
    for (int z = 0; z < n; ++z) {
        const std::uint8_t* row = covariates.data() + static_cast<std::size_t>(z) * p;
        double acc = spec.outcome_intercept + noise[z];
        if (treatment[z]) acc += effect_t;
        for (int j = 0; j < spec.n_a; ++j) {
            if (row[j]) acc += spec.q_weights[j];
        }
        for (int k = 0; k < spec.n_b; ++k) {
            if (row[spec.n_a + k]) acc += spec.s_weights[k];
        }
        y[z] = acc;
    }
    return y;
}

std::vector<double> event_probability(std::span<const double> linear_pred) {
    std::vector<double> prob(linear_pred.size());
    for (std::size_t z = 0; z < linear_pred.size(); ++z) {
        if (!std::isfinite(linear_pred[z])) {
            throw SimError("event_probability: non-finite linear predictor at index " +
                           std::to_string(z));
        }
        prob[z] = logistic_open(linear_pred[z]);
    }
    return prob;
}

std::vector<std::uint8_t> draw_events(std::span<const double> event_prob, Rng& rng) {
    std::vector<std::uint8_t> events(event_prob.size());
    for (std::size_t z = 0; z < event_prob.size(); ++z) {
        events[z] = rng.bernoulli(event_prob[z]) ? 1 : 0;
    }
    return events;
}

Cohort generate_cohort(const CohortSpec& spec, double effect_t, Rng& rng) {
    spec.validate();
    Cohort cohort;
    cohort.n_patients = spec.n_patients;
    cohort.n_a = spec.n_a;
    cohort.n_b = spec.n_b;
    cohort.n_c = spec.n_c;
    cohort.n_d = spec.n_d;
    cohort.covariates = generate_covariates(spec, rng);
    cohort.treatment = assign_treatment(spec, cohort.covariates, rng);
    cohort.noise.resize(spec.n_patients);
    for (double& e : cohort.noise) {
        e = rng.normal(0.0, spec.noise_sd);
    }
    cohort.linear_predictor =
        linear_predictor(spec, cohort.covariates, cohort.treatment, cohort.noise, effect_t);
    cohort.event_prob = event_probability(cohort.linear_predictor);
    cohort.events = draw_events(cohort.event_prob, rng);
    return cohort;
}

}  // namespace causalbench
