#include "slrt/em.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

#include "slrt/errors.hpp"
#include "slrt/numeric.hpp"
#include "slrt/rng.hpp"

namespace slrt {

namespace {

// Log-likelihood at p; fills posterior weights for the same parameters.
double loglik_and_weights(const Dataset& ds, const MixtureParams& p, VectorXd& w) {
    const Index n = ds.n();
    const VectorXd xa = ds.x() * p.alpha;
    const VectorXd zg = ds.z() * p.gamma;
    w.resize(n);
    CompensatedSum sum;
    for (Index i = 0; i < n; ++i) {
        const double r0 = ds.y()(i) - xa(i) - ds.d()(i) * p.beta;
        const double r1 = r0 - ds.d()(i) * p.lambda;
        if (r1 == r0) {
            w(i) = logistic(zg(i));
            sum += log_normal_kernel(r0, p.sigma2);
            continue;
        }
        const double a = log_logistic(zg(i)) + log_normal_kernel(r1, p.sigma2);
        const double b = log_one_minus_logistic(zg(i)) + log_normal_kernel(r0, p.sigma2);
        w(i) = logistic(a - b);
        sum += log_sum_exp(a, b);
    }
    return sum.value();
}

void check_weights(const Dataset& ds, const VectorXd& w) {
    if (w.size() != ds.n()) throw std::invalid_argument("weights length must equal n");
    if ((w.array() < 0.0).any() || (w.array() > 1.0).any()) {
        throw std::invalid_argument("weights must lie in [0, 1]");
    }
}

struct Solved {
    VectorXd coef;
    bool full_rank = false;
};

Solved solve_checked(const MatrixXd& a, const VectorXd& b) {
    Eigen::ColPivHouseholderQR<MatrixXd> qr(a);
    qr.setThreshold(1e-10);
    Solved s;
    s.full_rank = qr.rank() == a.cols();
    if (s.full_rank) s.coef = qr.solve(b);
    return s;
}

}  // namespace

void EmConfig::validate() const {
    if (max_iter < 1) throw std::invalid_argument("EmConfig.max_iter must be >= 1");
    if (!(tol > 0)) throw std::invalid_argument("EmConfig.tol must be > 0");
    if (n_starts < 1) throw std::invalid_argument("EmConfig.n_starts must be >= 1");
    if (!(sigma2_floor > 0)) throw std::invalid_argument("EmConfig.sigma2_floor must be > 0");
    if (!(u_lambda_scale > 0)) throw std::invalid_argument("EmConfig.u_lambda_scale must be > 0");
}

LogisticOptions EmConfig::logistic_options() const {
    LogisticOptions opt;
    opt.cd_max_iter = cd_max_iter;
    opt.cd_tol = cd_tol;
    return opt;
}

VectorXd e_step(const Dataset& ds, const MixtureParams& p) {
    if (p.alpha.size() != ds.q() || p.gamma.size() != ds.dz()) {
        throw std::invalid_argument("parameter dimensions do not match the dataset");
    }
    VectorXd w;
    loglik_and_weights(ds, p, w);
    return w;
}

RegressionStep m_step_regression(const Dataset& ds, const VectorXd& w, double u_lambda,
                                 double sigma2_floor) {
    check_weights(ds, w);
    const Index n = ds.n();
    const Index q = ds.q();
    const Index k = q + 1;  // (alpha, beta)

    MatrixXd u(n, k);
    u.leftCols(q) = ds.x();
    u.col(q) = ds.d();
    const VectorXd wd = w.cwiseProduct(ds.d());

    // Two-block quadratic: the lambda column of the design is w .* d.
    MatrixXd a(k + 1, k + 1);
    a.topLeftCorner(k, k) = u.transpose() * u;
    const VectorXd cross = u.transpose() * wd;
    a.block(0, k, k, 1) = cross;
    a.block(k, 0, 1, k) = cross.transpose();
    a(k, k) = wd.dot(ds.d());
    VectorXd b(k + 1);
    b.head(k) = u.transpose() * ds.y();
    b(k) = wd.dot(ds.y());

    VectorXd theta;
    double lambda = 0.0;
    const Solved full = solve_checked(a, b);
    bool refit = true;
    if (full.full_rank) {
        theta = full.coef.head(k);
        lambda = full.coef(k);
        if (lambda < 0.0) {
            lambda = 0.0;
        } else if (lambda > u_lambda) {
            lambda = u_lambda;
        } else {
            refit = false;
        }
    }
    if (refit) {
        const Solved reduced = solve_checked(a.topLeftCorner(k, k), b.head(k) - lambda * cross);
        if (!reduced.full_rank) throw DegenerateDesignError("design [X, D] is rank deficient");
        theta = reduced.coef;
    }

    const VectorXd r0 = ds.y() - u * theta;
    CompensatedSum rss;
    for (Index i = 0; i < n; ++i) {
        const double r1 = r0(i) - ds.d()(i) * lambda;
        rss += w(i) * r1 * r1 + (1.0 - w(i)) * r0(i) * r0(i);
    }

    RegressionStep step;
    step.alpha = theta.head(q);
    step.beta = theta(q);
    step.lambda = lambda;
    step.sigma2 = std::max(rss.value() / static_cast<double>(n), sigma2_floor);
    return step;
}

std::vector<MixtureParams> initial_points(const Dataset& ds, const NullFit& null_fit,
                                          const EmConfig& cfg, const ParamBounds& bounds,
                                          bool gamma_fixed_zero) {
    const double sd = ds.y_sd();
    const Index dz = ds.dz();
    std::vector<MixtureParams> starts;

    MixtureParams first = as_mixture(null_fit.params, dz);
    first.lambda = std::min(0.5 * sd, bounds.u_lambda);
    first.sigma2 = std::max(first.sigma2, bounds.sigma2_floor);
    starts.push_back(first);

    for (int s = 1; s < cfg.n_starts; ++s) {
        Philox rng(derive_seed(cfg.seed, {static_cast<std::uint64_t>(s)}));
        std::uniform_real_distribution<double> unit(-1.0, 1.0);
        MixtureParams p = first;
        p.beta += 0.5 * sd * unit(rng);
        p.lambda = std::clamp(first.lambda + sd * (0.3 + 0.7 * unit(rng)), 0.0, bounds.u_lambda);
        if (!gamma_fixed_zero) {
            for (Index j = 0; j < dz; ++j) p.gamma(j) = 0.1 * unit(rng);
        }
        starts.push_back(p);
    }

    if (cfg.boundary_candidate) {
        MixtureParams boundary = first;
        boundary.lambda = 0.0;
        starts.push_back(boundary);
    }
    return starts;
}

namespace {

VectorXd pack(const MixtureParams& p) {
    const Index q = p.alpha.size();
    VectorXd v(q + 3 + p.gamma.size());
    v << p.alpha, p.beta, p.lambda, p.sigma2, p.gamma;
    return v;
}

MixtureParams unpack(const VectorXd& v, Index q, Index dz, const ParamBounds& bounds) {
    MixtureParams p;
    p.alpha = v.head(q);
    p.beta = v(q);
    p.lambda = std::clamp(v(q + 1), 0.0, bounds.u_lambda);
    p.sigma2 = std::max(v(q + 2), bounds.sigma2_floor);
    p.gamma = v.tail(dz);
    return p;
}

struct EmState {
    MixtureParams params;
    VectorXd w;
    double ll = 0.0;
    double pll = 0.0;
};

EmState evaluate(const Dataset& ds, MixtureParams p, double pen) {
    EmState s;
    s.ll = loglik_and_weights(ds, p, s.w);
    s.pll = s.ll - pen * p.gamma.lpNorm<1>();
    s.params = std::move(p);
    return s;
}

}  // namespace

FitResult run_em(const Dataset& ds, double pen, const MixtureParams& start,
                 const EmConfig& cfg, const ParamBounds& bounds, bool gamma_fixed_zero) {
    if (pen < 0) throw std::invalid_argument("pen must be >= 0");
    const double stop = cfg.tol * static_cast<double>(ds.n());
    // The M-step only has to ascend; gains far below the EM tolerance are not worth chasing.
    LogisticOptions lopt = cfg.logistic_options();
    lopt.obj_tol = 1e-2 * stop;

    MixtureParams init = start;
    init.lambda = std::clamp(init.lambda, 0.0, bounds.u_lambda);
    init.sigma2 = std::max(init.sigma2, bounds.sigma2_floor);
    if (gamma_fixed_zero) init.gamma.setZero();

    FitResult res;
    res.pen = pen;
    EmState cur = evaluate(ds, std::move(init), pen);
    if (!std::isfinite(cur.pll)) throw FitError("non-finite log-likelihood at the starting point");
    res.trace.push_back(cur.pll);

    int evals = 0;
    auto em_step = [&](const EmState& from) {
        ++evals;
        const RegressionStep reg =
            m_step_regression(ds, from.w, bounds.u_lambda, bounds.sigma2_floor);
        MixtureParams next{reg.alpha, reg.beta, reg.lambda, reg.sigma2, from.params.gamma};
        if (!gamma_fixed_zero) {
            next.gamma = m_step_logistic(ds.z(), from.w, pen, lopt, from.params.gamma).gamma;
        }
        EmState out = evaluate(ds, std::move(next), pen);
        if (!std::isfinite(out.pll)) throw FitError("non-finite log-likelihood during EM");
        return out;
    };
    auto accept = [&](EmState&& s) {
        res.trace.push_back(s.pll);
        cur = std::move(s);
    };

    // EM steps, accelerated by squared extrapolation (SQUAREM): two EM steps
    // give the direction, the extrapolated point is followed by one EM step and
    // kept only if it beats the second plain step, so every accepted iterate
    // ascends.
    while (evals < cfg.max_iter) {
        EmState s1 = em_step(cur);
        const double gain = s1.pll - cur.pll;
        const VectorXd t0 = pack(cur.params);
        accept(std::move(s1));
        if (gain < stop) {
            res.converged = true;
            break;
        }
        if (evals >= cfg.max_iter) break;
        EmState s2 = em_step(cur);
        const VectorXd t1 = pack(cur.params);
        const VectorXd t2 = pack(s2.params);
        const VectorXd r = t1 - t0;
        const VectorXd v = t2 - t1 - r;
        const double rn = r.norm(), vn = v.norm();
        if (evals < cfg.max_iter && vn > 0.0 && rn / vn > 1.0) {
            const double alpha = -rn / vn;
            const VectorXd t = t0 - 2.0 * alpha * r + alpha * alpha * v;
            const MixtureParams jump = unpack(t, ds.q(), ds.dz(), bounds);
            if (jump.alpha.allFinite() && jump.gamma.allFinite() && std::isfinite(jump.beta)) {
                EmState sj = evaluate(ds, jump, pen);
                if (std::isfinite(sj.pll)) {
                    EmState s3 = em_step(sj);
                    if (s3.pll > s2.pll) {
                        accept(std::move(s3));
                        continue;
                    }
                }
            }
        }
        accept(std::move(s2));
    }

    res.iterations = evals;
    res.params = std::move(cur.params);
    res.loglik = cur.ll;
    res.penalized_loglik = cur.pll;
    return res;
}

namespace {

FitResult best_of_starts(const Dataset& ds, double pen, const EmConfig& cfg,
                         const NullFit& null_fit, bool gamma_fixed_zero) {
    cfg.validate();
    if (pen < 0) throw std::invalid_argument("pen must be >= 0");
    const ParamBounds bounds = default_bounds(ds, cfg.u_lambda_scale, cfg.sigma2_floor);
    const std::vector<MixtureParams> starts =
        initial_points(ds, null_fit, cfg, bounds, gamma_fixed_zero);

    FitResult best;
    bool have = false;
    std::ostringstream failures;
    for (std::size_t s = 0; s < starts.size(); ++s) {
        try {
            FitResult r = run_em(ds, pen, starts[s], cfg, bounds, gamma_fixed_zero);
            r.start_index = static_cast<int>(s);
            if (!have || r.penalized_loglik > best.penalized_loglik) {
                best = std::move(r);
                have = true;
            }
        } catch (const DegenerateDesignError& e) {
            failures << " start " << s << ": " << e.what() << ";";
        } catch (const FitError& e) {
            failures << " start " << s << ": " << e.what() << ";";
        }
    }
    if (!have) throw FitError("all EM starts failed:" + failures.str());
    return best;
}

}  // namespace

FitResult fit_penalized(const Dataset& ds, double pen, const EmConfig& cfg,
                        const NullFit& null_fit) {
    return best_of_starts(ds, pen, cfg, null_fit, false);
}

FitResult fit_penalized(const Dataset& ds, double pen, const EmConfig& cfg) {
    return fit_penalized(ds, pen, cfg, fit_null(ds, cfg.sigma2_floor));
}

FitResult fit_gamma_zero(const Dataset& ds, const EmConfig& cfg, const NullFit& null_fit) {
    return best_of_starts(ds, 0.0, cfg, null_fit, true);
}

FitResult fit_gamma_zero(const Dataset& ds, const EmConfig& cfg) {
    return fit_gamma_zero(ds, cfg, fit_null(ds, cfg.sigma2_floor));
}

}  // namespace slrt
