#include <doctest.h>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <numbers>
#include <random>

#include "fixtures.hpp"
#include "slrt/errors.hpp"
#include "slrt/model.hpp"

using namespace slrt;

namespace {

MixtureParams scalar_params(double alpha0, double beta, double lambda, double sigma2,
                            double gamma0) {
    MixtureParams p;
    p.alpha = VectorXd::Constant(1, alpha0);
    p.beta = beta;
    p.lambda = lambda;
    p.sigma2 = sigma2;
    p.gamma = VectorXd::Constant(1, gamma0);
    return p;
}

// Direct evaluation of the mixture density in 50-digit floating point,
// exponentiating the raw Gaussian kernels.
double mixture_logdensity_mp(double y, double xa, double d, double zg, double beta,
                             double lambda, double sigma2) {
    using mp = boost::multiprecision::cpp_bin_float_50;
    const mp pi = boost::math::constants::pi<mp>();
    const mp w = 1 / (1 + exp(-mp(zg)));
    const mp r1 = mp(y) - xa - d * (mp(beta) + lambda);
    const mp r0 = mp(y) - xa - d * mp(beta);
    const mp norm = 1 / sqrt(2 * pi * sigma2);
    const mp f = w * norm * exp(-r1 * r1 / (2 * mp(sigma2))) +
                 (1 - w) * norm * exp(-r0 * r0 / (2 * mp(sigma2)));
    return static_cast<double>(log(f));
}

}  // namespace

TEST_CASE("logistic: symmetry, saturation and ln 3") {
    CHECK(logistic(0.0) == 0.5);
    CHECK(logistic(800.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::isfinite(logistic(-800.0)));
    CHECK(logistic(-800.0) >= 0.0);
    CHECK(logistic(std::log(3.0)) == doctest::Approx(0.75).epsilon(1e-15));
    for (double t : {-700.0, -30.0, -1.0, 2.5, 700.0}) {
        CHECK(logistic(t) + logistic(-t) == doctest::Approx(1.0).epsilon(1e-15));
    }
}

TEST_CASE("mixture_logdensity: lambda = 0 collapses to the Gaussian kernel") {
    VectorXd x(2);
    x << 1.0, 0.0;
    VectorXd z(3);
    z << 1.0, 0.3, -2.0;
    MixtureParams p;
    p.alpha = VectorXd::Zero(2);
    p.beta = 0.0;
    p.lambda = 0.0;
    p.sigma2 = 1.0;
    p.gamma = VectorXd::Constant(3, 0.7);
    CHECK(mixture_logdensity(0.0, x, 0.0, z, p) ==
          doctest::Approx(-0.5 * std::log(2.0 * std::numbers::pi)).epsilon(1e-14));
    CHECK(mixture_logdensity(0.0, x, 0.0, z, p) == doctest::Approx(-0.918939).epsilon(1e-6));
}

TEST_CASE("mixture_logdensity: symmetric components give log phi(1)") {
    VectorXd x = VectorXd::Ones(1);
    VectorXd z = VectorXd::Ones(1);
    const MixtureParams p = scalar_params(0.0, 0.0, 2.0, 1.0, 0.0);
    CHECK(mixture_logdensity(1.0, x, 1.0, z, p) ==
          doctest::Approx(-1.4189385332046727).epsilon(1e-14));
}

TEST_CASE("mixture_logdensity: gamma = 0 gives an even mixing weight") {
    // With weight 1/2 the density is the average of the two kernels.
    VectorXd x = VectorXd::Ones(1);
    VectorXd z(2);
    z << 1.0, 5.0;
    MixtureParams p = scalar_params(0.3, 0.5, 1.5, 0.8, 0.0);
    p.gamma = VectorXd::Zero(2);
    const double y = 1.7, d = 1.0;
    const double r1 = y - 0.3 - (0.5 + 1.5);
    const double r0 = y - 0.3 - 0.5;
    const double k = 1.0 / std::sqrt(2.0 * std::numbers::pi * 0.8);
    const double expected =
        std::log(0.5 * k * std::exp(-r1 * r1 / 1.6) + 0.5 * k * std::exp(-r0 * r0 / 1.6));
    CHECK(mixture_logdensity(y, x, d, z, p) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("mixture_logdensity: gamma is irrelevant when lambda = 0") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (int rep = 0; rep < 200; ++rep) {
        MixtureParams p = testing::random_params(rng, 2, 4);
        p.lambda = 0.0;
        VectorXd x(2), z(4);
        x << 1.0, u(rng);
        z << 1.0, u(rng), u(rng), u(rng);
        const double y = u(rng), d = u(rng);
        const double base = mixture_logdensity(y, x, d, z, p);
        MixtureParams q = p;
        q.gamma = VectorXd::NullaryExpr(4, [&] { return 20.0 * u(rng); });
        CHECK(std::abs(mixture_logdensity(y, x, d, z, q) - base) <= 1e-12);
    }
}

TEST_CASE("mixture_logdensity: extreme residuals match a 50-digit oracle") {
    const double cases[][7] = {
        // y, xa, d, zg, beta, lambda, sigma2
        {100.0, 0.0, 1.0, 0.0, 0.0, 0.5, 0.01},
        {-100.0, 0.0, 1.0, 3.0, 0.0, 200.0, 0.01},
        {0.0, 100.0, 0.5, -40.0, 1.0, 10.0, 0.01},
        {250.0, -3.0, 1.0, 35.0, 2.0, 150.0, 0.05},
    };
    for (const auto& c : cases) {
        const double got = mixture_logdensity_lp(c[0], c[1], c[2], c[3], c[4], c[5], c[6]);
        const double want = mixture_logdensity_mp(c[0], c[1], c[2], c[3], c[4], c[5], c[6]);
        REQUIRE(std::isfinite(got));
        CHECK(std::abs(got - want) <= 1e-8 * std::abs(want));
    }
}

TEST_CASE("loglik: additivity and collapse to the null likelihood") {
    std::mt19937_64 rng(11);
    const Dataset ds = testing::random_dataset(rng, 30, 2, 3);
    const MixtureParams p = testing::random_params(rng, 2, 3);

    double by_row = 0.0;
    for (Index i = 0; i < ds.n(); ++i) {
        by_row += mixture_logdensity(ds.y()(i), ds.x().row(i).transpose(), ds.d()(i),
                                     ds.z().row(i).transpose(), p);
    }
    CHECK(loglik(ds, p) == doctest::Approx(by_row).epsilon(1e-13));

    MixtureParams p0 = p;
    p0.lambda = 0.0;
    const NullParams np{p.alpha, p.beta, p.sigma2};
    CHECK(loglik(ds, p0) == doctest::Approx(null_loglik(ds, np)).epsilon(1e-13));
}

TEST_CASE("loglik: a duplicated row contributes exactly twice") {
    // Smallest valid table holding one distinct row twice needs a second d value,
    // so compare {a, b} against {a, a, b}.
    MatrixXd x(2, 1), z(2, 2);
    x << 1, 1;
    z << 1, 0.4, 1, -1.2;
    VectorXd y(2), d(2);
    y << 0.7, 2.1;
    d << 0.0, 1.0;
    MatrixXd x3(3, 1), z3(3, 2);
    x3 << 1, 1, 1;
    z3 << 1, 0.4, 1, 0.4, 1, -1.2;
    VectorXd y3(3), d3(3);
    y3 << 0.7, 0.7, 2.1;
    d3 << 0.0, 0.0, 1.0;
    const Dataset two(y, x, d, z);
    const Dataset three(y3, x3, d3, z3);
    MixtureParams p = scalar_params(0.2, 0.9, 1.3, 0.6, 0.5);
    p.gamma = VectorXd(2);
    p.gamma << 0.5, -0.8;
    const double row_a =
        mixture_logdensity(0.7, x.row(0).transpose(), 0.0, z.row(0).transpose(), p);
    CHECK(loglik(three, p) - loglik(two, p) == doctest::Approx(row_a).epsilon(1e-13));
}

TEST_CASE("loglik: finite over a randomized parameter sweep") {
    std::mt19937_64 rng(5);
    const Dataset ds = testing::random_dataset(rng, 50, 2, 5);
    for (int rep = 0; rep < 500; ++rep) {
        MixtureParams p = testing::random_params(rng, 2, 5);
        p.sigma2 = std::pow(10.0, -8.0 + 10.0 * std::uniform_real_distribution<double>()(rng));
        p.lambda = 20.0 * std::uniform_real_distribution<double>()(rng);
        CHECK(std::isfinite(loglik(ds, p)));
    }
}

TEST_CASE("loglik: dimension mismatch is a contract violation") {
    std::mt19937_64 rng(1);
    const Dataset ds = testing::random_dataset(rng, 10, 2, 3);
    MixtureParams p = testing::random_params(rng, 2, 2);
    CHECK_THROWS_AS(loglik(ds, p), std::invalid_argument);
}

TEST_CASE("penalized_loglik: L1 norm over every gamma coordinate") {
    std::mt19937_64 rng(3);
    const Dataset ds = testing::random_dataset(rng, 20, 1, 2);
    MixtureParams p = scalar_params(0.1, 1.0, 0.5, 1.0, 0.0);
    p.gamma = VectorXd::Zero(2);
    CHECK(penalized_loglik(ds, p, 123.0) == loglik(ds, p));
    p.gamma << 1.0, -2.0;
    CHECK(penalized_loglik(ds, p, 0.0) == loglik(ds, p));
    CHECK(penalized_loglik(ds, p, 3.0) == doctest::Approx(loglik(ds, p) - 9.0).epsilon(1e-14));
    for (double pen1 : {0.0, 0.5, 2.0}) {
        for (double pen2 : {pen1, pen1 + 0.1, pen1 + 10.0}) {
            CHECK(penalized_loglik(ds, p, pen1) >= penalized_loglik(ds, p, pen2));
        }
    }
}

TEST_CASE("Dataset invariants") {
    MatrixXd x = MatrixXd::Ones(3, 1);
    MatrixXd z = MatrixXd::Ones(3, 1);
    VectorXd y(3), d(3);
    y << 1, 2, 3;
    d << 0, 1, 0;
    CHECK_NOTHROW(Dataset(y, x, d, z));
    CHECK_THROWS_AS(Dataset(y, x, VectorXd::Ones(3), z), DataError);
    MatrixXd bad = x;
    bad(1, 0) = 2.0;
    CHECK_THROWS_AS(Dataset(y, bad, d, z), DataError);
    VectorXd ynan = y;
    ynan(2) = std::nan("");
    CHECK_THROWS_AS(Dataset(ynan, x, d, z), DataError);
    CHECK_THROWS_AS(Dataset(y.head(1), x.topRows(1), d.head(1), z.topRows(1)), DataError);
    CHECK_THROWS_AS(Dataset(y, x.topRows(2), d, z), DataError);

    const Dataset w = Dataset::with_intercepts(y, MatrixXd(3, 0), d, MatrixXd::Constant(3, 2, 4.0));
    CHECK(w.q() == 1);
    CHECK(w.dz() == 3);
    CHECK((w.z().col(0).array() == 1.0).all());
    CHECK(w.y_sd() == doctest::Approx(1.0));
}
