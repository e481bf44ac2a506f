#include "core/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "core/errors.hpp"

namespace causalbench {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
const double kFpMin = std::numeric_limits<double>::min() / kEps;

// Series representation of the lower regularized incomplete gamma P(a, x),
// valid for x < a + 1.
double gamma_p_series(double a, double x) {
    double ap = a;
    double del = 1.0 / a;
    double sum = del;
    for (int i = 0; i < 10000; ++i) {
        ++ap;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * kEps) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Continued fraction for the upper regularized incomplete gamma Q(a, x),
// valid for x >= a + 1 (modified Lentz).
double gamma_q_cf(double a, double x) {
    double b = x + 1.0 - a;
    double c = 1.0 / kFpMin;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 10000; ++i) {
        const double an = -static_cast<double>(i) * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < kFpMin) d = kFpMin;
        c = b + an / c;
        if (std::abs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) <= kEps) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

// Continued fraction for the incomplete beta function (modified Lentz).
double beta_cf(double a, double b, double x) {
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kFpMin) d = kFpMin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 10000; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::abs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::abs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) <= kEps) break;
    }
    return h;
}

double sample_mean(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double sample_variance(std::span<const double> v, double mean) {
    double s = 0.0;
    for (double x : v) {
        const double d = x - mean;
        s += d * d;
    }
    return s / static_cast<double>(v.size() - 1);
}

}  // namespace

double regularized_gamma_upper(double a, double x) {
    if (!(a > 0.0) || x < 0.0 || !std::isfinite(x)) {
        throw StatsError("regularized_gamma_upper: invalid arguments");
    }
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_cf(a, x);
}

double regularized_beta(double x, double a, double b) {
    if (!(a > 0.0) || !(b > 0.0) || !(x >= 0.0 && x <= 1.0)) {
        throw StatsError("regularized_beta: invalid arguments");
    }
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double front =
        std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                 a * std::log(x) + b * std::log1p(-x));
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * beta_cf(a, b, x) / a;
    }
    return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double chi2_tail(double x, double dof) {
    if (!(dof > 0.0)) {
        throw StatsError("chi2_tail: dof must be positive");
    }
    if (x < 0.0) return 1.0;
    return regularized_gamma_upper(dof / 2.0, x / 2.0);
}

double t_tail(double x, double dof) {
    if (!(dof > 0.0)) {
        throw StatsError("t_tail: dof must be positive");
    }
    if (std::isinf(x)) return x > 0.0 ? 0.0 : 1.0;
    const double half = 0.5 * regularized_beta(dof / (dof + x * x), dof / 2.0, 0.5);
    return x >= 0.0 ? half : 1.0 - half;
}

double f_tail(double x, double dof1, double dof2) {
    if (!(dof1 > 0.0) || !(dof2 > 0.0)) {
        throw StatsError("f_tail: degrees of freedom must be positive");
    }
    if (x <= 0.0) return 1.0;
    if (std::isinf(x)) return 0.0;
    return regularized_beta(dof2 / (dof2 + dof1 * x), dof2 / 2.0, dof1 / 2.0);
}

double t_quantile(double p, double dof) {
    if (!(p > 0.0 && p < 1.0)) {
        throw StatsError("t_quantile: p must lie in (0,1)");
    }
    if (!(dof > 0.0)) {
        throw StatsError("t_quantile: dof must be positive");
    }
    if (p == 0.5) return 0.0;
    // Solve t_tail(x) = 1 - p for x; the tail is strictly decreasing.
    const double target = 1.0 - p;
    const bool upper = p > 0.5;
    const double want = upper ? target : p;  // exploit symmetry, solve in x > 0
    double lo = 0.0, hi = 1.0;
    while (t_tail(hi, dof) > want) {
        hi *= 2.0;
        if (hi > 1e308) break;
    }
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (t_tail(mid, dof) > want) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    const double x = 0.5 * (lo + hi);
    return upper ? x : -x;
}

double relative_rte_error(double estimated_t, double true_t) {
    if (true_t == 0.0) {
        throw StatsError("undefined relative error: true effect is zero");
    }
    return std::abs(estimated_t - true_t) / std::abs(true_t);
}

TestResult chi2_homogeneity(BinaryMatrixView covariates,
                            std::span<const std::uint8_t> treatment) {
    if (covariates.n_rows <= 0 || covariates.n_cols <= 0 ||
        treatment.size() != static_cast<std::size_t>(covariates.n_rows)) {
        throw StatsError("chi2_homogeneity: shape mismatch");
    }
    bool any_treated = false, any_control = false;
    for (std::uint8_t t : treatment) {
        (t ? any_treated : any_control) = true;
    }
    if (!any_treated || !any_control) {
        throw StatsError("chi2_homogeneity: both arms must be non-empty");
    }

    TestResult result;
    result.kind = TestKind::chi2_homogeneity;
    const double n = static_cast<double>(covariates.n_rows);
    double statistic = 0.0;
    for (int j = 0; j < covariates.n_cols; ++j) {
        // 2x2 cell counts: a = treated & v=1, b = treated & v=0,
        //                  c = control & v=1, d = control & v=0.
        double a = 0, b = 0, c = 0, d = 0;
        for (int i = 0; i < covariates.n_rows; ++i) {
            const bool v = covariates.at(i, j) != 0;
            if (treatment[i]) {
                (v ? a : b) += 1.0;
            } else {
                (v ? c : d) += 1.0;
            }
        }
        const double r1 = a + b, r2 = c + d, c1 = a + c, c2 = b + d;
        if (r1 == 0.0 || r2 == 0.0 || c1 == 0.0 || c2 == 0.0) {
            result.flagged = true;
            continue;
        }
        const double det = a * d - b * c;
        statistic += n * det * det / (r1 * r2 * c1 * c2);
    }
    result.statistic = statistic;
    result.dof1 = static_cast<double>(covariates.n_cols);
    result.p_value = chi2_tail(statistic, result.dof1);
    return result;
}

double bias_reduction(double chi2_unadjusted, double chi2_matched) {
    if (!(chi2_unadjusted > 0.0)) {
        throw StatsError("bias_reduction: unadjusted chi-squared must be positive");
    }
    if (chi2_matched < 0.0) {
        throw StatsError("bias_reduction: matched chi-squared must be nonnegative");
    }
    return 1.0 - chi2_matched / chi2_unadjusted;
}

MeanCI mean_ci(std::span<const double> samples) {
    if (samples.size() < 2) {
        throw StatsError("mean_ci: need at least two samples");
    }
    for (double x : samples) {
        if (!std::isfinite(x)) {
            throw StatsError("mean_ci: non-finite sample");
        }
    }
    MeanCI ci;
    ci.n = static_cast<int>(samples.size());
    ci.mean = sample_mean(samples);
    const double var = sample_variance(samples, ci.mean);
    if (var <= 0.0) {
        ci.lower = ci.upper = ci.mean;
        return ci;
    }
    const double half =
        t_quantile(0.975, static_cast<double>(ci.n - 1)) *
        std::sqrt(var / static_cast<double>(ci.n));
    ci.lower = ci.mean - half;
    ci.upper = ci.mean + half;
    return ci;
}

TestResult paired_t_test(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw StatsError("paired_t_test: length mismatch");
    }
    if (a.size() < 2) {
        throw StatsError("paired_t_test: need at least two pairs");
    }
    const std::size_t n = a.size();
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) {
        d[i] = a[i] - b[i];
    }
    const double mean = sample_mean(d);
    const double var = sample_variance(d, mean);

    TestResult result;
    result.kind = TestKind::paired_t;
    result.dof1 = static_cast<double>(n - 1);
    if (var <= 0.0) {
        if (mean == 0.0) {
            result.statistic = 0.0;
            result.p_value = 1.0;
        } else {
            result.statistic = mean > 0.0
                                   ? std::numeric_limits<double>::infinity()
                                   : -std::numeric_limits<double>::infinity();
            result.p_value = 0.0;
            result.flagged = true;
        }
        return result;
    }
    result.statistic = mean / std::sqrt(var / static_cast<double>(n));
    result.p_value = 2.0 * t_tail(std::abs(result.statistic), result.dof1);
    return result;
}

TestResult anova_oneway(const std::vector<std::vector<double>>& groups) {
    if (groups.size() < 2) {
        throw StatsError("anova_oneway: need at least two groups");
    }
    std::size_t total = 0;
    for (const auto& g : groups) {
        if (g.size() < 2) {
            throw StatsError("anova_oneway: each group needs at least two values");
        }
        total += g.size();
    }
    const double k = static_cast<double>(groups.size());
    const double n = static_cast<double>(total);

    double grand_sum = 0.0;
    for (const auto& g : groups) {
        for (double x : g) grand_sum += x;
    }
    const double grand_mean = grand_sum / n;

    double ss_between = 0.0, ss_within = 0.0;
    for (const auto& g : groups) {
        const double gm = sample_mean(g);
        const double dg = gm - grand_mean;
        ss_between += static_cast<double>(g.size()) * dg * dg;
        for (double x : g) {
            const double d = x - gm;
            ss_within += d * d;
        }
    }

    TestResult result;
    result.kind = TestKind::anova_f;
    result.dof1 = k - 1.0;
    result.dof2 = n - k;
    if (ss_within <= 0.0) {
        result.flagged = true;
        if (ss_between <= 0.0) {
            result.statistic = 0.0;
            result.p_value = 1.0;
        } else {
            result.statistic = std::numeric_limits<double>::infinity();
            result.p_value = 0.0;
        }
        return result;
    }
    result.statistic = (ss_between / result.dof1) / (ss_within / result.dof2);
    result.p_value = f_tail(result.statistic, result.dof1, result.dof2);
    return result;
}

}  // namespace causalbench
