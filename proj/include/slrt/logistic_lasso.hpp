#pragma once

#include <Eigen/Dense>

namespace slrt {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct LogisticOptions {
    int max_newton = 100;
    int cd_max_iter = 200;    // coordinate-descent passes per Newton step
    double cd_tol = 1e-9;     // max_j H_jj |step_j| at which a CD solve stops
    double kkt_tol = 1e-8;    // outer stopping target on the subgradient residual
    double obj_tol = 0.0;     // also stop once a step gains less than this
    double weight_floor = 1e-5;
    double response_clip = 1e3;
};

struct LogisticFit {
    VectorXd gamma;
    double objective = 0.0;
    int iterations = 0;
    bool converged = false;
};

// sum_i [w_i log pi(z_i'g) + (1 - w_i) log(1 - pi(z_i'g))] - pen * ||g||_1
double weighted_logistic_objective(const MatrixXd& z, const VectorXd& w, double pen,
                                   const VectorXd& gamma);

// Gradient of the unpenalized part: Z'(w - pi(Z g)).
VectorXd weighted_logistic_gradient(const MatrixXd& z, const VectorXd& w, const VectorXd& gamma);

// Largest violation of the L1 subgradient conditions:
//   gamma_j == 0:  |g_j| <= pen
//   gamma_j != 0:  g_j == pen * sign(gamma_j)
double logistic_kkt_violation(const MatrixXd& z, const VectorXd& w, double pen,
                              const VectorXd& gamma);

// Maximizes weighted_logistic_objective over gamma. Each outer step minimizes
// the IRLS quadratic (working weights floored, working response clipped) by
// cyclic coordinate descent with soft-thresholding, followed by a backtracking
// line search on the true objective; if that fails, a step on the 1/4-curvature
// majorizer is taken, which always ascends. The result never has a lower
// objective than `start`. Not reaching kkt_tol leaves converged = false with
// the best iterate returned.
LogisticFit m_step_logistic(const MatrixXd& z, const VectorXd& w, double pen,
                            const LogisticOptions& opt, const VectorXd& start);

LogisticFit m_step_logistic(const MatrixXd& z, const VectorXd& w, double pen,
                            const LogisticOptions& opt = {});

}  // namespace slrt
