#include "slrt/dataset.hpp"

#include <cmath>
#include <string>

#include "slrt/errors.hpp"

namespace slrt {

namespace {

void require_finite(const Eigen::Ref<const MatrixXd>& m, const char* name) {
    if (!m.allFinite()) {
        throw DataError(std::string("non-finite entry in ") + name);
    }
}

void require_intercept(const MatrixXd& m, const char* name) {
    if (m.cols() < 1) {
        throw DataError(std::string(name) + " must have an intercept column");
    }
    if ((m.col(0).array() != 1.0).any()) {
        throw DataError(std::string(name) + " column 0 must be the all-ones intercept");
    }
}

MatrixXd prepend_ones(const MatrixXd& raw, Index n) {
    if (raw.cols() > 0 && raw.rows() != n) {
        throw DataError("covariate matrix row count does not match y");
    }
    MatrixXd out(n, raw.cols() + 1);
    out.col(0).setOnes();
    if (raw.cols() > 0) out.rightCols(raw.cols()) = raw;
    return out;
}

}  // namespace

Dataset::Dataset(VectorXd y, MatrixXd x, VectorXd d, MatrixXd z)
    : y_(std::move(y)), x_(std::move(x)), d_(std::move(d)), z_(std::move(z)) {
    const Index n = y_.size();
    if (n < 2) throw DataError("dataset needs at least 2 rows");
    if (x_.rows() != n || d_.size() != n || z_.rows() != n) {
        throw DataError("y, x, d, z must have the same number of rows");
    }
    require_finite(y_, "y");
    require_finite(x_, "x");
    require_finite(d_, "d");
    require_finite(z_, "z");
    require_intercept(x_, "x");
    require_intercept(z_, "z");
    if ((d_.array() == d_(0)).all()) {
        throw DataError("treatment d must take at least two distinct values");
    }
}

Dataset Dataset::with_intercepts(VectorXd y, const MatrixXd& x_raw, VectorXd d,
                                 const MatrixXd& z_raw) {
    const Index n = y.size();
    return Dataset(std::move(y), prepend_ones(x_raw, n), std::move(d), prepend_ones(z_raw, n));
}

double Dataset::y_sd() const {
    const double mean = y_.mean();
    return std::sqrt((y_.array() - mean).square().sum() / static_cast<double>(n() - 1));
}

}  // namespace slrt
