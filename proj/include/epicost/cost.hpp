#pragma once

#include <limits>
#include <string>

#include "epicost/degree_dist.hpp"
#include "epicost/epidemic.hpp"
#include "epicost/graph.hpp"

namespace epicost {

enum class CostMethod { linear_solve, asymptotic, spectral_bound, monte_carlo, er_closed_form };

std::string to_string(CostMethod m);

struct CostReport {
    double value = 0.0;
    CostMethod method = CostMethod::linear_solve;
    double lambda_max = std::numeric_limits<double>::quiet_NaN();  // of the system matrix
    bool stable = false;
    double diagnostic = 0.0;  // solver residual, fixed-point residual, or standard error
};

// Instability is declared when lambda_max(M) >= 1 - kStabilityMargin so that
// near-singular systems are rejected rather than solved.
inline constexpr double kStabilityMargin = 1e-9;

// Per-node cost alpha c_d (1^T (delta I - beta A)^{-1} 1) / n by conjugate
// gradients on the positive definite system; relative residual <= tol.
CostReport linear_cost(const Graph& g, const EpidemicParams& params, double tol = 1e-10);

// alpha c_d / (1 - lambda_max(M)) with lambda_max(M) = 1 - delta + beta lambda_max(A).
CostReport spectral_bound(const Graph& g, const EpidemicParams& params);

struct FixedPointResult {
    double value = 0.0;  // solved fixed point
    double kappa = 0.0;
    int iterations = 0;
    double residual = 0.0;
    double v_bar = 0.0;
    double second_moment = 0.0;
};

// Solves F = integral of p(v) / (v^{-1} - kappa^2 F) dv by damped iteration
// from F = v_bar, keeping kappa^2 F < 1/v_max; kappa = 0 returns v_bar
// analytically.
FixedPointResult solve_fixed_point(const ScaledDistribution& dist, double kappa,
                                     double tol = 1e-10);

// Large-graph per-node cost for the scaling regime selected by kappa:
//   kappa = 0:  (alpha c_d / delta) (1 - v_bar^2 / (E v^2 - delta v_bar))
//   kappa > 0:  (alpha c_d / delta) (1 + k^2 F^2 - k^2 F^2 / (1 - v_bar/F - delta k^2 v_bar))
// Requires a finite second moment of the base law and a negative formula
// denominator (the stable regime); anything else raises inapplicable_error.
CostReport asymptotic_cost(const ScaledDistribution& dist, double delta, double alpha,
                           double c_d, double kappa, double tol = 1e-10);

// Homogeneous-network closed forms; they coincide when v_bar = beta n p.
double er_exact_cost(double v_bar, double delta, double alpha, double c_d);
double er_whp_bound(double n, double p, double beta, double delta, double alpha, double c_d);

// kappa for a study holding (beta, dist) fixed: sqrt(beta) / (delta sqrt(v_bar))
double kappa_for(double beta, double delta, double v_bar);

}  // namespace epicost
