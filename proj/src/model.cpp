#include "slrt/model.hpp"

#include <cmath>
#include <stdexcept>

#include "slrt/numeric.hpp"

namespace slrt {

namespace {

void check_dims(const Dataset& ds, const MixtureParams& p) {
    if (p.alpha.size() != ds.q() || p.gamma.size() != ds.dz()) {
        throw std::invalid_argument("parameter dimensions do not match the dataset");
    }
}

}  // namespace

ParamBounds default_bounds(const Dataset& ds, double u_lambda_scale, double sigma2_floor) {
    return ParamBounds{sigma2_floor, u_lambda_scale * ds.y_sd()};
}

double logistic(double t) {
    if (t >= 0) return 1.0 / (1.0 + std::exp(-t));
    const double e = std::exp(t);
    return e / (1.0 + e);
}

double mixture_logdensity_lp(double y, double x_alpha, double d, double z_gamma, double beta,
                             double lambda, double sigma2) {
    const double r0 = y - x_alpha - d * beta;
    const double r1 = r0 - d * lambda;
    if (r1 == r0) return log_normal_kernel(r0, sigma2);
    return log_sum_exp(log_logistic(z_gamma) + log_normal_kernel(r1, sigma2),
                       log_one_minus_logistic(z_gamma) + log_normal_kernel(r0, sigma2));
}

double mixture_logdensity(double y, const Eigen::Ref<const VectorXd>& x, double d,
                          const Eigen::Ref<const VectorXd>& z, const MixtureParams& p) {
    if (x.size() != p.alpha.size() || z.size() != p.gamma.size()) {
        throw std::invalid_argument("covariate dimensions do not match parameters");
    }
    return mixture_logdensity_lp(y, x.dot(p.alpha), d, z.dot(p.gamma), p.beta, p.lambda,
                                 p.sigma2);
}

double loglik(const Dataset& ds, const MixtureParams& p) {
    check_dims(ds, p);
    const VectorXd xa = ds.x() * p.alpha;
    const VectorXd zg = ds.z() * p.gamma;
    CompensatedSum sum;
    for (Index i = 0; i < ds.n(); ++i) {
        sum += mixture_logdensity_lp(ds.y()(i), xa(i), ds.d()(i), zg(i), p.beta, p.lambda,
                                     p.sigma2);
    }
    return sum.value();
}

double penalized_loglik(const Dataset& ds, const MixtureParams& p, double pen) {
    return loglik(ds, p) - pen * p.gamma.lpNorm<1>();
}

double null_loglik(const Dataset& ds, const NullParams& p) {
    if (p.alpha.size() != ds.q()) {
        throw std::invalid_argument("parameter dimensions do not match the dataset");
    }
    const VectorXd r = ds.y() - ds.x() * p.alpha - ds.d() * p.beta;
    CompensatedSum sum;
    for (Index i = 0; i < ds.n(); ++i) sum += log_normal_kernel(r(i), p.sigma2);
    return sum.value();
}

MixtureParams as_mixture(const NullParams& p, Index dz) {
    return MixtureParams{p.alpha, p.beta, 0.0, p.sigma2, VectorXd::Zero(dz)};
}

}  // namespace slrt
