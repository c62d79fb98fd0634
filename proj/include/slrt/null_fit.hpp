#pragma once

#include "slrt/dataset.hpp"
#include "slrt/model.hpp"

namespace slrt {

struct NullFit {
    NullParams params;
    double loglik = 0.0;
};

// Gaussian MLE of y on [X, D]: least squares for (alpha, beta), sigma2 = RSS / n
// floored at sigma2_floor, loglik = -n/2 log(2 pi sigma2) - RSS / (2 sigma2).
// Rank is checked with column-pivoted QR at relative threshold 1e-10; a
// rank-deficient design throws DegenerateDesignError.
NullFit fit_null(const Dataset& ds, double sigma2_floor = kDefaultSigma2Floor);

}  // namespace slrt
