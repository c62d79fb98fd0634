#include "slrt/logistic_lasso.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "slrt/model.hpp"
#include "slrt/numeric.hpp"

namespace slrt {

namespace {

double soft_threshold(double v, double t) {
    if (v > t) return v - t;
    if (v < -t) return v + t;
    return 0.0;
}

double objective_from_eta(const VectorXd& eta, const VectorXd& w, double pen,
                          const VectorXd& gamma) {
    CompensatedSum sum;
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
        sum += w(i) * log_logistic(eta(i)) + (1.0 - w(i)) * log_one_minus_logistic(eta(i));
    }
    return sum.value() - pen * gamma.lpNorm<1>();
}

double kkt_from_gradient(const VectorXd& grad, const VectorXd& gamma, double pen) {
    double worst = 0.0;
    for (Eigen::Index j = 0; j < grad.size(); ++j) {
        double v;
        if (gamma(j) == 0.0) {
            v = std::max(0.0, std::abs(grad(j)) - pen);
        } else {
            v = std::abs(grad(j) - (gamma(j) > 0 ? pen : -pen));
        }
        worst = std::max(worst, v);
    }
    return worst;
}

// Minimizes 0.5 * sum_i v_i (target_i - z_i'g)^2 + pen ||g||_1 in place, where
// `resid` = target - Z g at the starting g. Works on the Gram matrix Z'VZ, so a
// coordinate update costs O(p) rather than O(n).
void coordinate_descent(const MatrixXd& z, const VectorXd& v, double pen,
                        const LogisticOptions& opt, VectorXd& g, const VectorXd& resid) {
    const Eigen::Index p = z.cols();
    const MatrixXd vz = v.asDiagonal() * z;
    const MatrixXd h = z.transpose() * vz;
    const VectorXd c = vz.transpose() * resid + h * g;  // Z'V target
    VectorXd hg = h * g;

    std::vector<Eigen::Index> active;
    bool full = true;
    for (int pass = 0; pass < opt.cd_max_iter; ++pass) {
        double max_change = 0.0;
        auto update = [&](Eigen::Index j) {
            const double hjj = h(j, j);
            if (hjj <= 0.0) {
                if (g(j) != 0.0) {
                    hg -= h.col(j) * g(j);
                    g(j) = 0.0;
                }
                return;
            }
            const double num = c(j) - hg(j) + hjj * g(j);
            const double next = soft_threshold(num, pen) / hjj;
            const double diff = next - g(j);
            if (diff != 0.0) {
                hg += h.col(j) * diff;
                g(j) = next;
                max_change = std::max(max_change, hjj * std::abs(diff));
            }
        };
        if (full) {
            for (Eigen::Index j = 0; j < p; ++j) update(j);
            active.clear();
            for (Eigen::Index j = 0; j < p; ++j) {
                if (g(j) != 0.0) active.push_back(j);
            }
            if (max_change < opt.cd_tol) return;
            full = active.empty();
        } else {
            for (Eigen::Index j : active) update(j);
            if (max_change < opt.cd_tol) full = true;
        }
    }
}

}  // namespace

double weighted_logistic_objective(const MatrixXd& z, const VectorXd& w, double pen,
                                   const VectorXd& gamma) {
    return objective_from_eta(z * gamma, w, pen, gamma);
}

VectorXd weighted_logistic_gradient(const MatrixXd& z, const VectorXd& w,
                                    const VectorXd& gamma) {
    const VectorXd eta = z * gamma;
    VectorXd r(eta.size());
    for (Eigen::Index i = 0; i < eta.size(); ++i) r(i) = w(i) - logistic(eta(i));
    return z.transpose() * r;
}

double logistic_kkt_violation(const MatrixXd& z, const VectorXd& w, double pen,
                              const VectorXd& gamma) {
    return kkt_from_gradient(weighted_logistic_gradient(z, w, gamma), gamma, pen);
}

LogisticFit m_step_logistic(const MatrixXd& z, const VectorXd& w, double pen,
                            const LogisticOptions& opt) {
    return m_step_logistic(z, w, pen, opt, VectorXd::Zero(z.cols()));
}

LogisticFit m_step_logistic(const MatrixXd& z, const VectorXd& w, double pen,
                            const LogisticOptions& opt, const VectorXd& start) {
    const Eigen::Index n = z.rows();
    const Eigen::Index p = z.cols();
    if (w.size() != n || start.size() != p) {
        throw std::invalid_argument("m_step_logistic: dimension mismatch");
    }
    if (pen < 0) throw std::invalid_argument("m_step_logistic: pen must be >= 0");

    LogisticFit fit;

    // Convex objective: if the origin satisfies KKT it is the maximizer.
    const VectorXd grad0 = z.transpose() * (w.array() - 0.5).matrix();
    if (grad0.lpNorm<Eigen::Infinity>() <= pen) {
        fit.gamma = VectorXd::Zero(p);
        fit.objective = objective_from_eta(VectorXd::Zero(n), w, pen, fit.gamma);
        fit.converged = true;
        return fit;
    }

    VectorXd gamma = start;
    VectorXd eta = z * gamma;
    double obj = objective_from_eta(eta, w, pen, gamma);
    VectorXd pi(n), v(n), resid(n);
    double kkt = 0.0;

    int it = 0;
    for (; it < opt.max_newton; ++it) {
        for (Eigen::Index i = 0; i < n; ++i) pi(i) = logistic(eta(i));
        const VectorXd grad = z.transpose() * (w - pi);
        kkt = kkt_from_gradient(grad, gamma, pen);
        if (kkt <= opt.kkt_tol) break;

        // Proximal Newton step on the IRLS quadratic.
        for (Eigen::Index i = 0; i < n; ++i) {
            v(i) = std::max(pi(i) * (1.0 - pi(i)), opt.weight_floor);
            resid(i) = std::clamp((w(i) - pi(i)) / v(i), -opt.response_clip, opt.response_clip);
        }
        VectorXd cand = gamma;
        coordinate_descent(z, v, pen, opt, cand, resid);
        const VectorXd dir = cand - gamma;
        const double l1_now = gamma.lpNorm<1>();
        const double predicted = grad.dot(dir) - pen * (cand.lpNorm<1>() - l1_now);

        bool accepted = false;
        double gain = 0.0;
        double t = 1.0;
        const double slack = 1e-13 * (1.0 + std::abs(obj));
        for (int k = 0; k < 40 && !accepted; ++k, t *= 0.5) {
            const VectorXd trial = gamma + t * dir;
            const VectorXd trial_eta = z * trial;
            const double trial_obj = objective_from_eta(trial_eta, w, pen, trial);
            const bool armijo = trial_obj >= obj + 1e-4 * t * predicted;
            const bool flat = predicted <= slack && trial_obj >= obj - slack;
            if (armijo || flat) {
                accepted = true;
                gain = trial_obj - obj;
                gamma = trial;
                eta = trial_eta;
                obj = trial_obj;
            }
        }
        if (accepted) {
            if (gain < opt.obj_tol) {
                ++it;
                break;
            }
            continue;
        }

        // Majorization step: curvature 1/4 bounds the logistic Hessian.
        v.setConstant(0.25);
        resid = 4.0 * (w - pi);
        VectorXd mm = gamma;
        coordinate_descent(z, v, pen, opt, mm, resid);
        const VectorXd mm_eta = z * mm;
        const double mm_obj = objective_from_eta(mm_eta, w, pen, mm);
        if (!(mm_obj > obj)) break;
        gain = mm_obj - obj;
        gamma = mm;
        eta = mm_eta;
        obj = mm_obj;
        if (gain < opt.obj_tol) {
            ++it;
            break;
        }
    }
    if (it > 0 && kkt > opt.kkt_tol) {
        kkt = kkt_from_gradient(weighted_logistic_gradient(z, w, gamma), gamma, pen);
    }

    fit.gamma = gamma;
    fit.objective = obj;
    fit.iterations = it;
    fit.converged = kkt <= opt.kkt_tol;
    return fit;
}

}  // namespace slrt
