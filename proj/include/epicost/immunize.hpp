#pragma once

#include <cstdint>
#include <functional>
#include <variant>

#include "epicost/cost.hpp"
#include "epicost/degree_dist.hpp"
#include "epicost/epidemic.hpp"

namespace epicost {

struct RandomImmunization {
    double pi;  // fraction immunized, [0, 1]
};
struct DegreeTruncation {
    double w_cut;  // keep only weights <= w_cut
};

struct ImmunizationPlan {
    std::variant<RandomImmunization, DegreeTruncation> scheme;
    double cost_per_node;  // c_v

    void validate() const;
};

struct ImmunizedProblem {
    Eigen::Index n_remaining;
    DistributionSpec dist;
    double pi = 0.0;  // fraction actually removed
};

// One-shot immunization before graph generation: random removal keeps
// n - floor(pi n) nodes (weights are sampled only for survivors), degree
// truncation conditions the weight law on w <= w_cut.
ImmunizedProblem apply_immunization(const DistributionSpec& dist, Eigen::Index n,
                                    const ImmunizationPlan& plan, std::uint64_t seed);

// Fixed-graph variant for real networks, where regeneration is impossible:
// removes floor(pi n) uniformly random nodes and returns the induced subgraph.
Graph delete_random_nodes(const Graph& g, double pi, std::uint64_t seed);

// S(pi) = pi c_v + (1 - pi) * disease cost on the reduced population.
// disease_cost_on is not invoked at pi = 1.
double social_cost(double pi, Eigen::Index n, double c_v,
                   const std::function<double(Eigen::Index)>& disease_cost_on);

// Homogeneous-network social cost pi c_v + (1-pi) alpha c_d / (delta - beta n (1-pi) p).
double er_social_cost(double pi, double n, double p, const EpidemicParams& params, double c_v);

enum class ImmunizationRegime { full, interior, none };

std::string to_string(ImmunizationRegime r);

struct OptimalPi {
    double pi;
    ImmunizationRegime regime;
    double a, b, c;  // a = alpha/delta, b = alpha delta/(delta - beta n p)^2, c = c_v/c_d
};

// Closed-form minimizer of the homogeneous social cost over pi:
//   pi = 1                                      if c <= a < b
//   pi = 1 - (delta - sqrt(delta alpha / c)) / (beta n p)   if a < c < b
//   pi = 0                                      if a < b <= c
// Other orderings raise a domain error carrying (a, b, c).
OptimalPi er_optimal_pi(double n, double p, const EpidemicParams& params, double c_v);

}  // namespace epicost
