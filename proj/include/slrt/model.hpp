#pragma once

#include <Eigen/Dense>

#include "slrt/dataset.hpp"

namespace slrt {

// Parameters of the two-component model
//   y = x'alpha + d * (beta + delta * lambda) + eps,  eps ~ N(0, sigma2),
//   P(delta = 1 | z) = logistic(z'gamma).
struct MixtureParams {
    VectorXd alpha;
    double beta = 0.0;
    double lambda = 0.0;
    double sigma2 = 1.0;
    VectorXd gamma;
};

// Parameters of the one-component (lambda = 0) model.
struct NullParams {
    VectorXd alpha;
    double beta = 0.0;
    double sigma2 = 1.0;
};

// Box for the compact parameter space: lambda in [0, u_lambda], sigma2 >= sigma2_floor.
struct ParamBounds {
    double sigma2_floor = 1e-8;
    double u_lambda = 0.0;
};

inline constexpr double kDefaultSigma2Floor = 1e-8;
inline constexpr double kDefaultULambdaScale = 10.0;

// u_lambda = scale * sd(y); sigma2_floor as given.
ParamBounds default_bounds(const Dataset& ds, double u_lambda_scale = kDefaultULambdaScale,
                           double sigma2_floor = kDefaultSigma2Floor);

// exp(t) / (1 + exp(t)); never overflows.
double logistic(double t);

// Log conditional density of y under the mixture, via log-sum-exp of the two
// weighted Gaussian log-kernels.
double mixture_logdensity(double y, const Eigen::Ref<const VectorXd>& x, double d,
                          const Eigen::Ref<const VectorXd>& z, const MixtureParams& p);

// Same density given the precomputed linear predictors x'alpha and z'gamma.
double mixture_logdensity_lp(double y, double x_alpha, double d, double z_gamma, double beta,
                             double lambda, double sigma2);

// Sum of mixture log-densities over rows (compensated summation).
// Throws std::invalid_argument on dimension mismatch.
double loglik(const Dataset& ds, const MixtureParams& p);

// loglik - pen * ||gamma||_1; every gamma coordinate, intercept included, is penalized.
double penalized_loglik(const Dataset& ds, const MixtureParams& p, double pen);

// Gaussian regression log-likelihood of the lambda = 0 model.
double null_loglik(const Dataset& ds, const NullParams& p);

// Embeds null parameters as a mixture point with lambda = 0 and gamma = 0.
MixtureParams as_mixture(const NullParams& p, Index dz);

}  // namespace slrt
