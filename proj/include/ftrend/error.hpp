#pragma once

#include <stdexcept>
#include <string>

namespace ftrend {

/// Malformed, missing or inconsistent input data (CLI exit code 2).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A year is absent from a series that must be contiguous.
class GapError : public DataError {
public:
    explicit GapError(int missing_year)
        : DataError("gap in years: missing year " + std::to_string(missing_year)),
          missing_year_(missing_year) {}

    [[nodiscard]] int missing_year() const noexcept { return missing_year_; }

private:
    int missing_year_;
};

/// Numerical failure: degenerate designs, non-stationary models, failed optimizations
/// (CLI exit code 3).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parameters outside the domain of a noise model.
class ModelError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace ftrend
