#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>

#include "slrt/dataset.hpp"
#include "slrt/rng.hpp"

namespace slrt {

// Null designs for the non-intercept columns of Z:
//   I   iid N(0, 1)            II  N(0, Sigma), Sigma a random correlation matrix
//   III iid Rademacher         IV  iid skew-normal (shape 4), standardized
enum class Setting { I, II, III, IV };

std::string to_string(Setting s);
Setting parse_setting(std::string_view s);  // "I".."IV"; throws std::invalid_argument

// One seeded substream with the draws the generators need.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : rng_(seed) {}
    double normal() { return normal_(rng_); }
    double uniform() { return uniform01(rng_); }
    bool bernoulli(double p) { return uniform() < p; }

private:
    Philox rng_;
    std::normal_distribution<double> normal_;
};

struct DgpSpec {
    Setting setting = Setting::I;
    long n = 100;
    long d = 10;  // columns of Z including the intercept
    bool alternative = false;
    double lambda_true = 1.0;
    VectorXd gamma_true;  // empty: all ones (alternative only)
    std::uint64_t seed = 0;
    // Seed for Setting II's Sigma; defaults to `seed`. Monte Carlo cells share one Sigma.
    std::optional<std::uint64_t> sigma_seed;

    void validate() const;
};

// x ~ N(0, 1), D ~ Bernoulli(1/2), Z(1) = 1, the rest per setting;
// null:        y = 1 + 2x + D + eps
// alternative: y = 1 + 2x + (1 + delta * lambda_true) D + eps,
//              delta ~ Bernoulli(logistic(z'gamma_true)).
// (y, x, D) and Z come from separate substreams of `seed`, so under the null
// (y, x, D) does not depend on d or the setting.
Dataset gen_dataset(const DgpSpec& spec);

// (d-1)x(d-1) correlation matrix L L' rescaled to unit diagonal, with L lower
// triangular, diagonal ~ U(0.5, 1.5) and sub-diagonal ~ U(-1, 1). Requires d >= 3.
MatrixXd gen_sigma_cholesky(long d, std::uint64_t seed);

// Skew-normal draw with shape 4, standardized to mean 0 and variance 1.
double sample_skewnormal_std(RandomStream& rng);

}  // namespace slrt
