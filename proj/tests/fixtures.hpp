#pragma once

#include <random>

#include "slrt/dataset.hpp"
#include "slrt/model.hpp"

namespace slrt::testing {

// Random design with intercepts: x = [1, N(0,1)...], d ~ Bernoulli(1/2),
// z = [1, N(0,1)...], y from a null or split-effect model.
inline Dataset random_dataset(std::mt19937_64& rng, Index n, Index q, Index dz,
                              double lambda = 0.0) {
    std::normal_distribution<double> nd;
    std::bernoulli_distribution coin(0.5);
    MatrixXd x(n, q), z(n, dz);
    VectorXd y(n), d(n);
    for (Index i = 0; i < n; ++i) {
        x(i, 0) = 1.0;
        for (Index j = 1; j < q; ++j) x(i, j) = nd(rng);
        z(i, 0) = 1.0;
        for (Index j = 1; j < dz; ++j) z(i, j) = nd(rng);
        d(i) = i < 2 ? static_cast<double>(i) : (coin(rng) ? 1.0 : 0.0);
        const double shift = (lambda > 0 && z.row(i).sum() > 1.0) ? lambda : 0.0;
        y(i) = 1.0 + x.row(i).tail(q - 1).sum() + d(i) * (1.0 + shift) + nd(rng);
    }
    return Dataset(y, x, d, z);
}

inline MixtureParams random_params(std::mt19937_64& rng, Index q, Index dz) {
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    MixtureParams p;
    p.alpha = VectorXd::NullaryExpr(q, [&] { return u(rng); });
    p.beta = u(rng);
    p.lambda = 1.0 + u(rng);
    p.sigma2 = 0.1 + std::abs(u(rng));
    p.gamma = VectorXd::NullaryExpr(dz, [&] { return u(rng); });
    return p;
}

}  // namespace slrt::testing
