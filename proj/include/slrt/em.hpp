#pragma once

#include <cstdint>
#include <vector>

#include "slrt/dataset.hpp"
#include "slrt/logistic_lasso.hpp"
#include "slrt/model.hpp"
#include "slrt/null_fit.hpp"

namespace slrt {

struct EmConfig {
    int max_iter = 500;
    double tol = 1e-9;  // stop when the penalized log-likelihood gains < tol * n
    int n_starts = 5;
    int cd_max_iter = 200;
    double cd_tol = 1e-9;
    std::uint64_t seed = 0x51C0FFEEull;
    double sigma2_floor = kDefaultSigma2Floor;
    double u_lambda_scale = kDefaultULambdaScale;
    // Also evaluate the lambda = 0, gamma = 0 boundary point (the null MLE).
    bool boundary_candidate = true;

    void validate() const;
    LogisticOptions logistic_options() const;
};

struct FitResult {
    MixtureParams params;
    double pen = 0.0;
    double loglik = 0.0;            // unpenalized l_n at params
    double penalized_loglik = 0.0;  // loglik - pen * ||gamma||_1
    int iterations = 0;
    bool converged = false;
    std::vector<double> trace;  // penalized log-likelihood, starting point first
    int start_index = 0;        // n_starts denotes the boundary candidate
};

// Posterior probability that each row belongs to the lambda-shifted component.
VectorXd e_step(const Dataset& ds, const MixtureParams& p);

struct RegressionStep {
    VectorXd alpha;
    double beta = 0.0;
    double lambda = 0.0;
    double sigma2 = 1.0;
};

// Minimizes sum_i [w_i (y_i - x_i'a - d_i(b + l))^2 + (1 - w_i)(y_i - x_i'a - d_i b)^2]
// over lambda in [0, u_lambda]: the unconstrained normal equations in
// (alpha, beta, lambda) are solved first and the solution is refit on the
// violated bound (or at lambda = 0 when lambda is not identified).
// sigma2 = weighted RSS / n, floored. Throws DegenerateDesignError if [X, D]
// is rank deficient.
RegressionStep m_step_regression(const Dataset& ds, const VectorXd& w, double u_lambda,
                                 double sigma2_floor);

// EM starting points, in start-index order: null MLE with lambda = 0.5 sd(y)
// and gamma = 0, then n_starts - 1 seeded perturbations of (beta, lambda, gamma),
// then (if enabled) the boundary point lambda = 0, gamma = 0.
std::vector<MixtureParams> initial_points(const Dataset& ds, const NullFit& null_fit,
                                          const EmConfig& cfg, const ParamBounds& bounds,
                                          bool gamma_fixed_zero);

// A single EM run from `start`. With gamma_fixed_zero the logistic M-step is
// skipped and gamma stays 0 (mixing weight 1/2).
FitResult run_em(const Dataset& ds, double pen, const MixtureParams& start,
                 const EmConfig& cfg, const ParamBounds& bounds, bool gamma_fixed_zero);

// Penalized MLE over all starts; the highest penalized log-likelihood wins,
// ties going to the smaller start index. Throws FitError if every start fails.
FitResult fit_penalized(const Dataset& ds, double pen, const EmConfig& cfg,
                        const NullFit& null_fit);
FitResult fit_penalized(const Dataset& ds, double pen, const EmConfig& cfg = {});

// Benchmark mixture fit with gamma pinned at 0.
FitResult fit_gamma_zero(const Dataset& ds, const EmConfig& cfg, const NullFit& null_fit);
FitResult fit_gamma_zero(const Dataset& ds, const EmConfig& cfg = {});

}  // namespace slrt
