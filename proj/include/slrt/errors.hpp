#pragma once

#include <stdexcept>
#include <string>

namespace slrt {

// Bad input data: malformed CSV, missing columns, violated Dataset invariants.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Normal equations or least-squares design without full column rank.
class DegenerateDesignError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Every EM start failed, or too many Monte Carlo replications failed.
class FitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace slrt
