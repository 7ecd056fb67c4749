#pragma once

#include <stdexcept>
#include <string>

namespace epicost {

inline constexpr const char* kVersion = "epicost 1.0.0";

// System matrix spectral radius reached or crossed 1: the epidemic does not
// die out and every cost expression diverges.
class instability_error : public std::runtime_error {
public:
    instability_error(const std::string& what, double lambda_max)
        : std::runtime_error(what), lambda_max_(lambda_max) {}
    double lambda_max() const noexcept { return lambda_max_; }

private:
    double lambda_max_;
};

// An iterative scheme (power iteration, CG, fixed point) ran out of budget.
// Carries the best estimate reached and the residual at that point.
class convergence_error : public std::runtime_error {
public:
    convergence_error(const std::string& what, double best_estimate, double residual)
        : std::runtime_error(what), best_(best_estimate), residual_(residual) {}
    double best_estimate() const noexcept { return best_; }
    double residual() const noexcept { return residual_; }

private:
    double best_;
    double residual_;
};

// Parameters are outside the admissible region of an asymptotic formula.
class inapplicable_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input file; message carries the offending line number.
class parse_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class quadrature_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace epicost
