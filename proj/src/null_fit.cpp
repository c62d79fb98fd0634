#include "slrt/null_fit.hpp"

#include <algorithm>

#include "slrt/errors.hpp"
#include "slrt/numeric.hpp"

namespace slrt {

NullFit fit_null(const Dataset& ds, double sigma2_floor) {
    const Index n = ds.n();
    const Index q = ds.q();
    MatrixXd u(n, q + 1);
    u.leftCols(q) = ds.x();
    u.col(q) = ds.d();

    Eigen::ColPivHouseholderQR<MatrixXd> qr(u);
    qr.setThreshold(1e-10);
    if (qr.rank() < q + 1) {
        throw DegenerateDesignError("design [X, D] is rank deficient");
    }
    const VectorXd coef = qr.solve(ds.y());

    NullFit fit;
    fit.params.alpha = coef.head(q);
    fit.params.beta = coef(q);
    const VectorXd resid = ds.y() - u * coef;
    CompensatedSum rss;
    for (Index i = 0; i < n; ++i) rss += resid(i) * resid(i);
    fit.params.sigma2 = std::max(rss.value() / static_cast<double>(n), sigma2_floor);
    fit.loglik = null_loglik(ds, fit.params);
    return fit;
}

}  // namespace slrt
