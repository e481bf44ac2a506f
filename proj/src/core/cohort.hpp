#ifndef CAUSALBENCH_CORE_COHORT_HPP
#define CAUSALBENCH_CORE_COHORT_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "core/rng.hpp"

namespace causalbench {

// Generative model for one simulated population. Covariates are binary and
// fall into four blocks, stored in column order A, B, C, D:
//   A  confounders      (enter both the outcome and the treatment model)
//   B  outcome-only
//   C  treatment-only
//   D  pure noise
// The outcome logit is
//   Y_z = outcome_intercept + X_z*t + A_z.q + B_z.s + eps_z,
// with eps_z ~ N(0, noise_sd^2), and treatment is assigned by
//   P(X_z = 1) = logistic(treat_intercept + A_z.treat_a + C_z.treat_c).
struct CohortSpec {
    int n_patients = 500;
    int n_a = 2;
    int n_b = 2;
    int n_c = 2;
    int n_d = 2;

    // Per-covariate Bernoulli prevalence, length n_covariates(), each
    // strictly inside (0, 1).
    std::vector<double> covariate_prevalence;

    std::vector<double> q_weights;        // outcome weights of A, length n_a
    std::vector<double> s_weights;        // outcome weights of B, length n_b
    double outcome_intercept = 0.0;

    double treat_intercept = 0.0;
    std::vector<double> treat_a_weights;  // length n_a
    std::vector<double> treat_c_weights;  // length n_c

    double noise_sd = 1.0;

    int n_covariates() const { return n_a + n_b + n_c + n_d; }

    // Throws ConfigError on any malformed field (counts, lengths,
    // boundary prevalences, negative noise_sd).
    void validate() const;

    // The calibrated default configuration used throughout: 2 covariates
    // per block, prevalence 0.5, treated prevalence near 0.35.
    static CohortSpec defaults();
};

// One simulated population. All vectors have length n_patients; covariates
// is row-major n_patients x n_covariates with entries in {0, 1}.
struct Cohort {
    int n_patients = 0;
    int n_a = 0, n_b = 0, n_c = 0, n_d = 0;
    std::vector<std::uint8_t> covariates;
    std::vector<std::uint8_t> treatment;
    std::vector<double> noise;
    std::vector<double> linear_predictor;
    std::vector<double> event_prob;
    std::vector<std::uint8_t> events;

    int n_covariates() const { return n_a + n_b + n_c + n_d; }
};

// Independent Bernoulli(prevalence) draws, row-major patient x covariate.
std::vector<std::uint8_t> generate_covariates(const CohortSpec& spec, Rng& rng);

// P(X_z = 1) = logistic(treat_intercept + A_z.treat_a + C_z.treat_c);
// one Bernoulli draw per patient. B and D columns never enter.
std::vector<std::uint8_t> assign_treatment(const CohortSpec& spec,
                                           std::span<const std::uint8_t> covariates,
                                           Rng& rng);

// Y_z = outcome_intercept + X_z*effect_t + A_z.q + B_z.s + noise_z.
// effect_t is the signed treatment coefficient (a protective effect of
// magnitude r is effect_t = -r). C and D columns contribute zero.
std::vector<double> linear_predictor(const CohortSpec& spec,
                                     std::span<const std::uint8_t> covariates,
                                     std::span<const std::uint8_t> treatment,
                                     std::span<const double> noise,
                                     double effect_t);

// rho_z = logistic(Y_z), clamped to the open interval (0, 1).
// Throws SimError on non-finite input.
std::vector<double> event_probability(std::span<const double> linear_pred);

// E_z ~ Bernoulli(rho_z), one draw per patient.
std::vector<std::uint8_t> draw_events(std::span<const double> event_prob, Rng& rng);

// Full generation pipeline for one experiment. Consumes the stream in a
// fixed order: covariates, treatment, noise, events.
Cohort generate_cohort(const CohortSpec& spec, double effect_t, Rng& rng);

}  // namespace causalbench

#endif
