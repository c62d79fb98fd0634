#include "slrt/inference.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "slrt/chisq.hpp"

namespace slrt {

double half_chisq_pvalue(double t) {
    return 0.5 * chisq_survival(std::max(t, 0.0), 1.0);
}

double half_chisq_critical(double level) {
    if (!(level > 0.0 && level < 0.5)) {
        throw std::domain_error("half_chisq_critical: level must lie in (0, 0.5)");
    }
    return chisq_upper_quantile(2.0 * level, 1.0);
}

double tuning_pen(long n, long d, LogBase base) {
    if (n < 2) throw std::domain_error("tuning_pen: n must be >= 2");
    if (d < 2) throw std::domain_error("tuning_pen: d must be >= 2");
    const double logd = base == LogBase::Natural ? std::log(static_cast<double>(d))
                                                 : std::log10(static_cast<double>(d));
    return 6.3383 + 0.0086 * std::pow(static_cast<double>(n), 7.0 / 8.0) * std::sqrt(logd);
}

TestOutcome compute_slrt(const Dataset& ds, double pen, const EmConfig& cfg, double level) {
    TestOutcome out;
    out.level = level;
    out.pen_used = pen;
    out.null_fit = fit_null(ds, cfg.sigma2_floor);
    out.alt_fit = fit_penalized(ds, pen, cfg, out.null_fit);
    out.slrt = 2.0 * (out.alt_fit.loglik - out.null_fit.loglik);
    out.p_value = half_chisq_pvalue(out.slrt);
    out.reject = out.p_value < level;
    return out;
}

double benchmark_lrt(const Dataset& ds, const EmConfig& cfg, const NullFit& null_fit) {
    const FitResult fit = fit_gamma_zero(ds, cfg, null_fit);
    return 2.0 * (fit.loglik - null_fit.loglik);
}

}  // namespace slrt
