#include "core/glm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "core/errors.hpp"
#include "core/logistic.hpp"

namespace causalbench {

namespace {

// In-place Cholesky factorization of a symmetric positive definite matrix
// stored row-major. Returns false if any pivot falls at or below
// pivot_floor (relative rank check done by the caller).
bool cholesky(std::vector<double>& a, int p, double pivot_floor) {
    for (int j = 0; j < p; ++j) {
        double d = a[static_cast<std::size_t>(j) * p + j];
        for (int k = 0; k < j; ++k) {
            const double l = a[static_cast<std::size_t>(j) * p + k];
            d -= l * l;
        }
        if (!(d > pivot_floor)) {
            return false;
        }
        const double lj = std::sqrt(d);
        a[static_cast<std::size_t>(j) * p + j] = lj;
        for (int i = j + 1; i < p; ++i) {
            double s = a[static_cast<std::size_t>(i) * p + j];
            for (int k = 0; k < j; ++k) {
                s -= a[static_cast<std::size_t>(i) * p + k] *
                     a[static_cast<std::size_t>(j) * p + k];
            }
            a[static_cast<std::size_t>(i) * p + j] = s / lj;
        }
    }
    return true;
}

// Solves L L' x = b given the factor from cholesky(); overwrites b.
void cholesky_solve(const std::vector<double>& l, int p, std::vector<double>& b) {
    for (int i = 0; i < p; ++i) {
        double s = b[i];
        for (int k = 0; k < i; ++k) {
            s -= l[static_cast<std::size_t>(i) * p + k] * b[k];
        }
        b[i] = s / l[static_cast<std::size_t>(i) * p + i];
    }
    for (int i = p - 1; i >= 0; --i) {
        double s = b[i];
        for (int k = i + 1; k < p; ++k) {
            s -= l[static_cast<std::size_t>(k) * p + i] * b[k];
        }
        b[i] = s / l[static_cast<std::size_t>(i) * p + i];
    }
}

}  // namespace

void DesignMatrix::validate() const {
    if (n_cols < 1 || n_rows < n_cols) {
        throw GlmError(GlmError::Kind::dimension,
                       "design matrix needs n_rows >= n_cols >= 1");
    }
    if (values.size() != static_cast<std::size_t>(n_rows) * n_cols) {
        throw GlmError(GlmError::Kind::dimension, "design matrix buffer size mismatch");
    }
    for (double v : values) {
        if (!std::isfinite(v)) {
            throw GlmError(GlmError::Kind::dimension, "design matrix has non-finite entry");
        }
    }
}

LogisticFit fit_logistic(const DesignMatrix& design,
                         std::span<const std::uint8_t> outcomes,
                         const GlmOptions& options) {
    design.validate();
    const int n = design.n_rows;
    const int p = design.n_cols;
    if (outcomes.size() != static_cast<std::size_t>(n)) {
        throw GlmError(GlmError::Kind::dimension, "outcome vector length mismatch");
    }
    bool any0 = false, any1 = false;
    for (std::uint8_t y : outcomes) {
        (y ? any1 : any0) = true;
    }
    if (!any0 || !any1) {
        throw GlmError(GlmError::Kind::degenerate_outcome, "degenerate outcome");
    }

    LogisticFit fit;
    fit.coefficients.assign(p, 0.0);
    std::vector<double> eta(n), prob(n), score(p), delta(p);
    std::vector<double> normal(static_cast<std::size_t>(p) * p);
    std::vector<double> factor;

    for (int iter = 1; iter <= options.max_iterations; ++iter) {
        fit.iterations = iter;
        for (int i = 0; i < n; ++i) {
            double acc = 0.0;
            const double* row = design.values.data() + static_cast<std::size_t>(i) * p;
            for (int j = 0; j < p; ++j) {
                acc += row[j] * fit.coefficients[j];
            }
            eta[i] = acc;
            prob[i] = logistic(acc);
        }

        std::fill(score.begin(), score.end(), 0.0);
        std::fill(normal.begin(), normal.end(), 0.0);
        for (int i = 0; i < n; ++i) {
            const double* row = design.values.data() + static_cast<std::size_t>(i) * p;
            const double resid = static_cast<double>(outcomes[i]) - prob[i];
            const double w = prob[i] * (1.0 - prob[i]);
            for (int j = 0; j < p; ++j) {
                score[j] += row[j] * resid;
                const double wxj = w * row[j];
                for (int k = 0; k <= j; ++k) {
                    normal[static_cast<std::size_t>(j) * p + k] += wxj * row[k];
                }
            }
        }
        for (int j = 0; j < p; ++j) {
            for (int k = j + 1; k < p; ++k) {
                normal[static_cast<std::size_t>(j) * p + k] =
                    normal[static_cast<std::size_t>(k) * p + j];
            }
        }

        double max_score = 0.0;
        for (int j = 0; j < p; ++j) {
            max_score = std::max(max_score, std::abs(score[j]));
        }
        if (max_score <= options.tolerance) {
            fit.converged = true;
            break;
        }

        double max_diag = 0.0;
        for (int j = 0; j < p; ++j) {
            max_diag = std::max(max_diag, normal[static_cast<std::size_t>(j) * p + j]);
        }
        const double pivot_floor = 1e-10 * std::max(max_diag, 1e-300);

        factor = normal;
        delta = score;
        if (cholesky(factor, p, pivot_floor)) {
            cholesky_solve(factor, p, delta);
        } else {
            // Ridge retry: lift the diagonal just enough to factor. Keeps
            // the solve defined along rank-deficient directions without
            // biasing identified coefficients; the fit is flagged.
            const double ridge = 1e-8 * std::max(max_diag, 1.0);
            factor = normal;
            for (int j = 0; j < p; ++j) {
                factor[static_cast<std::size_t>(j) * p + j] += ridge;
            }
            delta = score;
            if (!cholesky(factor, p, 0.0)) {
                throw GlmError(GlmError::Kind::singular_design, "singular design");
            }
            cholesky_solve(factor, p, delta);
            fit.singular = true;
        }

        double max_delta = 0.0;
        for (int j = 0; j < p; ++j) {
            fit.coefficients[j] += delta[j];
            max_delta = std::max(max_delta, std::abs(delta[j]));
        }
        for (int j = 0; j < p; ++j) {
            if (std::abs(fit.coefficients[j]) > options.separation_bound) {
                throw GlmError(GlmError::Kind::separation, "separation detected");
            }
        }
        if (max_delta <= options.tolerance) {
            fit.converged = true;
            break;
        }
    }

    double ll = 0.0;
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        const double* row = design.values.data() + static_cast<std::size_t>(i) * p;
        for (int j = 0; j < p; ++j) {
            acc += row[j] * fit.coefficients[j];
        }
        // y*eta - log(1 + e^eta), the Bernoulli log-likelihood term.
        ll += static_cast<double>(outcomes[i]) * acc - softplus(acc);
    }
    fit.log_likelihood = ll;
    return fit;
}

std::vector<double> predict_logit(const LogisticFit& fit, const DesignMatrix& design) {
    design.validate();
    const int p = design.n_cols;
    if (fit.coefficients.size() != static_cast<std::size_t>(p)) {
        throw GlmError(GlmError::Kind::dimension,
                       "coefficient count does not match design columns");
    }
    std::vector<double> out(design.n_rows);
    for (int i = 0; i < design.n_rows; ++i) {
        double acc = 0.0;
        const double* row = design.values.data() + static_cast<std::size_t>(i) * p;
        for (int j = 0; j < p; ++j) {
            acc += row[j] * fit.coefficients[j];
        }
        out[i] = acc;
    }
    return out;
}

double odds_ratio(double coefficient) {
    return std::exp(coefficient);
}

}  // namespace causalbench
