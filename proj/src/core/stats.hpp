#ifndef CAUSALBENCH_CORE_STATS_HPP
#define CAUSALBENCH_CORE_STATS_HPP

#include <cstdint>
#include <span>
#include <vector>

namespace causalbench {

// Mean with a symmetric Student-t 95% confidence interval.
struct MeanCI {
    double mean = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    double level = 0.95;
    int n = 0;
};

enum class TestKind { paired_t, anova_f, chi2_homogeneity };

struct TestResult {
    TestKind kind;
    double statistic = 0.0;
    double dof1 = 0.0;
    double dof2 = 0.0;  // unused except for the F test
    double p_value = 1.0;
    // Degenerate input was encountered (zero marginal column, zero-variance
    // differences, zero within-group variance).
    bool flagged = false;
};

// Row-major view over a binary covariate matrix.
struct BinaryMatrixView {
    const std::uint8_t* data = nullptr;
    int n_rows = 0;
    int n_cols = 0;

    std::uint8_t at(int i, int j) const {
        return data[static_cast<std::size_t>(i) * n_cols + j];
    }
};

// |estimated_t - true_t| / |true_t|. Throws StatsError when true_t == 0.
double relative_rte_error(double estimated_t, double true_t);

// Pooled Pearson homogeneity statistic: one 2x2 treatment-by-covariate
// table per column, summed, with dof = number of columns. A table with a
// zero marginal contributes 0 and sets the flag.
TestResult chi2_homogeneity(BinaryMatrixView covariates,
                            std::span<const std::uint8_t> treatment);

// 1 - chi2_matched / chi2_unadjusted. Requires chi2_unadjusted > 0.
double bias_reduction(double chi2_unadjusted, double chi2_matched);

// mean +/- t_{0.975, n-1} * sd / sqrt(n). Requires n >= 2 and finite
// values; zero variance gives a degenerate (zero width) interval.
MeanCI mean_ci(std::span<const double> samples);

// Two-sided paired t test on differences a - b. Zero-variance differences
// with nonzero mean report p = 0 with the flag set; all-zero differences
// report statistic 0, p = 1.
TestResult paired_t_test(std::span<const double> a, std::span<const double> b);

// Classical one-way ANOVA F test across k groups. Zero within-group
// variance everywhere is flagged degenerate.
TestResult anova_oneway(const std::vector<std::vector<double>>& groups);

// Upper-tail probabilities. chi2 via the regularized incomplete gamma
// function, t and F via the regularized incomplete beta function.
double chi2_tail(double x, double dof);
double t_tail(double x, double dof);  // P(T > x), signed x
double f_tail(double x, double dof1, double dof2);

// Student-t quantile for probability p in (0, 1); bisection on the tail.
double t_quantile(double p, double dof);

// Q(a, x): upper regularized incomplete gamma.
double regularized_gamma_upper(double a, double x);
// I_x(a, b): regularized incomplete beta.
double regularized_beta(double x, double a, double b);

}  // namespace causalbench

#endif
