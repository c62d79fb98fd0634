#pragma once

#include <Eigen/Dense>

namespace slrt {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

// Observation table (Y, X, D, Z) for the logistic-normal mixture model.
//
// X and Z carry an explicit all-ones intercept in column 0. The constructor
// enforces the table invariants and throws DataError on violation:
//   - y, x, d, z share n >= 2 rows
//   - x(:,0) == 1 and z(:,0) == 1
//   - d takes at least two distinct values
//   - every entry is finite
class Dataset {
public:
    Dataset(VectorXd y, MatrixXd x, VectorXd d, MatrixXd z);

    // Builds a dataset from covariates without intercepts; a column of ones
    // is prepended to both x_raw and z_raw (either may have zero columns).
    static Dataset with_intercepts(VectorXd y, const MatrixXd& x_raw, VectorXd d,
                                   const MatrixXd& z_raw);

    const VectorXd& y() const { return y_; }
    const MatrixXd& x() const { return x_; }
    const VectorXd& d() const { return d_; }
    const MatrixXd& z() const { return z_; }

    Index n() const { return y_.size(); }
    Index q() const { return x_.cols(); }
    Index dz() const { return z_.cols(); }

    // Sample standard deviation of y (divisor n - 1).
    double y_sd() const;

private:
    VectorXd y_;
    MatrixXd x_;
    VectorXd d_;
    MatrixXd z_;
};

}  // namespace slrt
