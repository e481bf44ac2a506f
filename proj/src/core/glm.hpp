#ifndef CAUSALBENCH_CORE_GLM_HPP
#define CAUSALBENCH_CORE_GLM_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace causalbench {

// Dense row-major design matrix; the first column is the all-ones
// intercept by convention of every builder in this project.
struct DesignMatrix {
    int n_rows = 0;
    int n_cols = 0;
    std::vector<double> values;  // row-major, n_rows * n_cols
    std::vector<std::string> column_labels;

    double at(int i, int j) const {
        return values[static_cast<std::size_t>(i) * n_cols + j];
    }
    double& at(int i, int j) {
        return values[static_cast<std::size_t>(i) * n_cols + j];
    }

    // Throws GlmError(dimension) unless n_rows >= n_cols >= 1, the buffer
    // has the right size, and every entry is finite.
    void validate() const;
};

struct LogisticFit {
    std::vector<double> coefficients;
    bool converged = false;
    int iterations = 0;
    double log_likelihood = 0.0;
    bool singular = false;  // ridge fallback stabilized a solve
};

struct GlmOptions {
    double tolerance = 1e-8;        // on max |delta beta| and max |score|
    int max_iterations = 50;
    double separation_bound = 30.0; // |beta_j| beyond this means separation
};

// Maximum-likelihood logistic regression via iteratively reweighted least
// squares. The Newton step solves (X'WX) d = X'(y - p) with a Cholesky
// factorization; a near-singular normal matrix is retried once with a
// small ridge (flagged via LogisticFit::singular), and an exactly singular
// one throws GlmError(singular_design). Divergence past the separation
// bound throws GlmError(separation); a single-class outcome vector throws
// GlmError(degenerate_outcome).
LogisticFit fit_logistic(const DesignMatrix& design,
                         std::span<const std::uint8_t> outcomes,
                         const GlmOptions& options = {});

// Row-wise inner product design . coefficients (the logit scale linear
// predictor). Throws GlmError(dimension) on column-count mismatch.
std::vector<double> predict_logit(const LogisticFit& fit, const DesignMatrix& design);

// e^coefficient.
double odds_ratio(double coefficient);

}  // namespace causalbench

#endif
