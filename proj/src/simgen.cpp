#include "slrt/simgen.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "slrt/model.hpp"

namespace slrt {

std::string to_string(Setting s) {
    switch (s) {
        case Setting::I: return "I";
        case Setting::II: return "II";
        case Setting::III: return "III";
        case Setting::IV: return "IV";
    }
    return "?";
}

Setting parse_setting(std::string_view s) {
    if (s == "I" || s == "1") return Setting::I;
    if (s == "II" || s == "2") return Setting::II;
    if (s == "III" || s == "3") return Setting::III;
    if (s == "IV" || s == "4") return Setting::IV;
    throw std::invalid_argument("unknown setting '" + std::string(s) + "' (expected I, II, III or IV)");
}

void DgpSpec::validate() const {
    if (n < 2) throw std::invalid_argument("DgpSpec.n must be >= 2");
    if (d < 2) throw std::invalid_argument("DgpSpec.d must be >= 2");
    if (!(lambda_true >= 0)) throw std::invalid_argument("DgpSpec.lambda_true must be >= 0");
    if (gamma_true.size() != 0 && gamma_true.size() != d) {
        throw std::invalid_argument("DgpSpec.gamma_true must have length d");
    }
}

double sample_skewnormal_std(RandomStream& rng) {
    static const double delta = 4.0 / std::sqrt(17.0);
    static const double mean = delta * std::sqrt(2.0 / std::numbers::pi);
    static const double sd = std::sqrt(1.0 - 2.0 * delta * delta / std::numbers::pi);
    const double z0 = rng.normal();
    const double z1 = rng.normal();
    const double x = delta * std::abs(z0) + std::sqrt(1.0 - delta * delta) * z1;
    return (x - mean) / sd;
}

MatrixXd gen_sigma_cholesky(long d, std::uint64_t seed) {
    if (d < 3) throw std::domain_error("gen_sigma_cholesky: d must be >= 3");
    const long m = d - 1;
    RandomStream rng(derive_seed(seed, {0x516A}));
    MatrixXd l = MatrixXd::Zero(m, m);
    for (long i = 0; i < m; ++i) {
        for (long j = 0; j < i; ++j) l(i, j) = 2.0 * rng.uniform() - 1.0;
        l(i, i) = 0.5 + rng.uniform();
    }
    MatrixXd sigma = l * l.transpose();
    const VectorXd inv_sd = sigma.diagonal().cwiseSqrt().cwiseInverse();
    sigma = inv_sd.asDiagonal() * sigma * inv_sd.asDiagonal();
    sigma = (0.5 * (sigma + sigma.transpose())).eval();
    sigma.diagonal().setOnes();
    return sigma;
}

Dataset gen_dataset(const DgpSpec& spec) {
    spec.validate();
    const long n = spec.n;
    const long d = spec.d;
    RandomStream core(derive_seed(spec.seed, {1}));
    RandomStream zs(derive_seed(spec.seed, {2}));

    MatrixXd z(n, d);
    z.col(0).setOnes();
    MatrixXd chol;
    if (spec.setting == Setting::II && d >= 3) {
        const MatrixXd sigma = gen_sigma_cholesky(d, spec.sigma_seed.value_or(spec.seed));
        chol = Eigen::LLT<MatrixXd>(sigma).matrixL();
    }
    VectorXd e(d - 1);
    for (long i = 0; i < n; ++i) {
        switch (spec.setting) {
            case Setting::I:
                for (long j = 1; j < d; ++j) z(i, j) = zs.normal();
                break;
            case Setting::II:
                for (long j = 0; j < d - 1; ++j) e(j) = zs.normal();
                if (chol.size() > 0) {
                    z.row(i).tail(d - 1) = (chol * e).transpose();
                } else {
                    z.row(i).tail(d - 1) = e.transpose();
                }
                break;
            case Setting::III:
                for (long j = 1; j < d; ++j) z(i, j) = zs.bernoulli(0.5) ? 1.0 : -1.0;
                break;
            case Setting::IV:
                for (long j = 1; j < d; ++j) z(i, j) = sample_skewnormal_std(zs);
                break;
        }
    }

    const VectorXd gamma = spec.gamma_true.size() == d ? spec.gamma_true : VectorXd::Ones(d);
    VectorXd y(n), dv(n);
    MatrixXd x(n, 2);
    x.col(0).setOnes();
    for (long i = 0; i < n; ++i) {
        const double xi = core.normal();
        const double di = core.bernoulli(0.5) ? 1.0 : 0.0;
        const double eps = core.normal();
        const double u = core.uniform();
        double effect = 1.0;
        if (spec.alternative && u < logistic(z.row(i).dot(gamma))) effect += spec.lambda_true;
        x(i, 1) = xi;
        dv(i) = di;
        y(i) = 1.0 + 2.0 * xi + effect * di + eps;
    }
    return Dataset(std::move(y), std::move(x), std::move(dv), std::move(z));
}

}  // namespace slrt
