// errors.hpp - exception types shared across sbren modules

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sbren {

/// Outcome of a linear solve. The residual is ||Ax - b|| / ||b|| (0 when b = 0).
struct SolveReport {
    std::string method;
    std::size_t dimension{0};
    std::size_t iterations{0};
    double residual{0.0};
    bool success{false};
};

/// A solve or factorization that could not be certified. Usually means z sits
/// on (or numerically next to) the spectrum of the shifted operator.
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, SolveReport report = {})
        : std::runtime_error(what), report_(std::move(report)) {}

    const SolveReport& report() const noexcept { return report_; }

private:
    SolveReport report_;
};

/// A requested truncation exceeds a configured size cap.
class SizingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace sbren
