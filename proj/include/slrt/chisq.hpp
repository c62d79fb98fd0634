#pragma once

namespace slrt {

// Regularized lower/upper incomplete gamma functions P(a, x), Q(a, x);
// series expansion for x < a + 1, Lentz continued fraction otherwise.
double regularized_gamma_p(double a, double x);
double regularized_gamma_q(double a, double x);

double chisq_cdf(double x, double df);
double chisq_survival(double x, double df);

// x such that chisq_survival(x, df) == upper_tail, 0 < upper_tail < 1.
double chisq_upper_quantile(double upper_tail, double df);

}  // namespace slrt
