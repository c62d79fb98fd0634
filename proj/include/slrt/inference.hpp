#pragma once

#include "slrt/dataset.hpp"
#include "slrt/em.hpp"
#include "slrt/null_fit.hpp"

namespace slrt {

// 0.5 * P(chi2_1 > max(t, 0)); any t <= 0 maps to 0.5.
double half_chisq_pvalue(double t);

// Critical value c with P(0.5 chi2_0 + 0.5 chi2_1 > c) = level, i.e. the
// chi2_1 upper quantile at 2 * level. Throws std::domain_error unless 0 < level < 0.5.
double half_chisq_critical(double level);

enum class LogBase { Natural, Log10 };

// Empirical tuning rule p = 6.3383 + 0.0086 n^{7/8} sqrt(log d).
// Throws std::domain_error for n < 2 or d < 2.
double tuning_pen(long n, long d, LogBase base = LogBase::Natural);

struct TestOutcome {
    double slrt = 0.0;
    double p_value = 0.5;
    double pen_used = 0.0;
    double level = 0.05;
    bool reject = false;
    FitResult alt_fit;
    NullFit null_fit;
};

// SLRT = 2 (l_n at the penalized EM optimum - l_n at the null MLE). A negative
// value is reported as computed; the p-value clamps it to 0.5.
TestOutcome compute_slrt(const Dataset& ds, double pen, const EmConfig& cfg = {},
                         double level = 0.05);

// Benchmark statistic 2 (l_n(gamma = 0 fit) - l_n(null)).
double benchmark_lrt(const Dataset& ds, const EmConfig& cfg, const NullFit& null_fit);

}  // namespace slrt
