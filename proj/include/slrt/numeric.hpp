#pragma once

#include <charconv>
#include <cmath>
#include <numbers>
#include <string>

namespace slrt {

// Neumaier-compensated running sum.
class CompensatedSum {
public:
    void add(double v) {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v)) {
            comp_ += (sum_ - t) + v;
        } else {
            comp_ += (v - t) + sum_;
        }
        sum_ = t;
    }
    CompensatedSum& operator+=(double v) {
        add(v);
        return *this;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

inline double log_sum_exp(double a, double b) {
    const double m = a > b ? a : b;
    if (std::isinf(m) && m < 0) return m;
    return m + std::log1p(std::exp(-std::abs(a - b)));
}

// log N(r; 0, sigma2)
inline double log_normal_kernel(double r, double sigma2) {
    return -0.5 * std::log(2.0 * std::numbers::pi * sigma2) - 0.5 * r * r / sigma2;
}

// log pi(t) and log(1 - pi(t)) for the logistic function, without overflow.
inline double log_logistic(double t) {
    return t >= 0 ? -std::log1p(std::exp(-t)) : t - std::log1p(std::exp(t));
}
inline double log_one_minus_logistic(double t) { return log_logistic(-t); }

// Shortest decimal that reads back to the same double.
inline std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

}  // namespace slrt
