#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "epicost/graph.hpp"

namespace epicost {

struct EpidemicParams {
    double delta;          // recovery probability per step, (0, 1]
    double beta;           // per-neighbor infection probability per step, [0, 1)
    double alpha;          // initially infected fraction, (0, 1)
    double cost_per_step;  // cost of one node being infected for one step

    void validate() const;
};

struct SamplePath {
    std::vector<std::int64_t> infected_count;  // per step, starting at t = 0
    std::int64_t duration = 0;                 // steps until extinction, or the cap
    double realized_cost_per_node = 0.0;
    bool truncated = false;
};

// Exact stochastic SIS process. Infections and recoveries both read the
// step-t state: an infected node transmits during the step it recovers, and a
// node recovering at t cannot be reinfected before t+1.
SamplePath simulate_sis(const Graph& g, const EpidemicParams& params, std::uint64_t seed,
                        std::int64_t max_steps = 100000);

struct MonteCarloCost {
    double mean = 0.0;
    double standard_error = 0.0;  // NaN when runs == 1
    std::int64_t truncated_runs = 0;
    std::int64_t runs = 0;
};

// Mean realized cost per node over independent sample paths; run r uses
// child_seed(seed, r), so results do not depend on execution order.
MonteCarloCost monte_carlo_cost(const Graph& g, const EpidemicParams& params,
                                std::int64_t runs, std::uint64_t seed,
                                std::int64_t max_steps = 100000);

// Linear infection-probability dynamics P(t+1) = [(1-delta) I + beta A] P(t)
// from P(0) = alpha * 1. No clamping; this is the analytical object.
std::vector<Eigen::VectorXd> iterate_linear(const Graph& g, const EpidemicParams& params,
                                            std::int64_t steps);

struct NonlinearTrajectory {
    std::vector<Eigen::VectorXd> probabilities;
    std::int64_t clamping_events = 0;
};

// Mean-field recursion P_i(t+1) = (1-delta) P_i + beta (1-P_i) sum_{j~i} P_j,
// entries clamped to [0, 1] with clamping events counted.
NonlinearTrajectory iterate_nonlinear(const Graph& g, const EpidemicParams& params,
                                      std::int64_t steps);

}  // namespace epicost
