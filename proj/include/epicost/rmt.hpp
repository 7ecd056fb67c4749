#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "epicost/degree_dist.hpp"
#include "epicost/graph.hpp"

namespace epicost {

// Dense routines are capped well below the sparse path; every factorization
// here is O(n^3).
inline constexpr Eigen::Index kDenseCap = 4000;

// One dense draw of the weighted random-graph ensemble.
struct RmtSample {
    Eigen::MatrixXd A;   // symmetric 0/1 adjacency
    Eigen::VectorXd w;   // sampled weights
    Eigen::VectorXd v;   // beta * w
    double beta = 0.0;
    double rho = 0.0;    // 1 / sum(w)
    double mu = 0.0;     // 1 / sum(v), 0 when beta = 0

    static RmtSample draw(const DistributionSpec& dist, Eigen::Index n, double beta,
                          std::uint64_t seed);
};

// C = (1/sqrt(n rho)) W^{-1/2} (A - rho w w^T) W^{-1/2}; off-diagonal entries
// have mean zero and variance 1/n.
Eigen::MatrixXd wigner_matrix(const RmtSample& sample);

// X = delta I - beta A + mu v v^T (the resolvent core with the rank-one
// infection mode removed).
Eigen::MatrixXd resolvent_core(const RmtSample& sample, double delta);

struct ResolventTerms {
    double t11;  // (1/n) 1^T X^{-1} 1
    double t1v;  // (1/n) 1^T X^{-1} v
    double tvv;  // (1/n) v^T X^{-1} v
};

ResolventTerms resolvent_terms(const RmtSample& sample, double delta);

// |1^T Y^(k) 1 - estimated E tr Y^(k)| for a fresh draw, with the trace
// expectation averaged over `samples` independent draws.
//   Y^(1) = (1/n) (V^{-1} - kappa_n C)^{-1}
//   Y^(2) = (1/n) (I - kappa_n V^{1/2} C V^{1/2})^{-1}
//   Y^(3) = (1/n) V^{1/2} (V^{-1} - kappa_n C)^{-1} V^{1/2}
// with kappa_n = sqrt(beta / (delta^2 v_bar)) and v_bar from analytic moments.
double offdiag_trace_gap(const DistributionSpec& dist, double beta, double delta,
                       Eigen::Index n, int k, int samples, std::uint64_t seed);

// Batched study sharing one factorization per draw across k = 1, 2, 3.
// gaps[k-1][i] = |1^T Y^(k)_i 1 - mean_{j != i} tr Y^(k)_j| (leave-one-out).
struct GapStudy {
    std::array<std::vector<double>, 3> gaps;
    std::array<double, 3> median_gap;
};

GapStudy offdiag_trace_gap_study(const DistributionSpec& dist, double beta, double delta,
                               Eigen::Index n, int samples, std::uint64_t seed);

}  // namespace epicost
