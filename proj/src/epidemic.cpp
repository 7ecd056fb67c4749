#include "epicost/epidemic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "epicost/prng.hpp"

namespace epicost {

void EpidemicParams::validate() const {
    if (!(delta > 0.0 && delta <= 1.0))
        throw std::invalid_argument("params: delta must be in (0, 1]");
    if (!(beta >= 0.0 && beta < 1.0))
        throw std::invalid_argument("params: beta must be in [0, 1)");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("params: alpha must be in (0, 1)");
    if (!(cost_per_step > 0.0))
        throw std::invalid_argument("params: cost_per_step must be > 0");
}

SamplePath simulate_sis(const Graph& g, const EpidemicParams& params, std::uint64_t seed,
                        std::int64_t max_steps) {
    params.validate();
    if (max_steps < 1) throw std::invalid_argument("simulate_sis: max_steps must be >= 1");
    const Eigen::Index n = g.size();
    Rng rng(seed);

    // initial infected set: round(alpha n) distinct nodes, uniform without
    // replacement (partial Fisher-Yates)
    const auto initial = static_cast<Eigen::Index>(std::llround(params.alpha * static_cast<double>(n)));
    std::vector<int> pool(n);
    for (Eigen::Index i = 0; i < n; ++i) pool[i] = static_cast<int>(i);
    std::vector<char> infected(n, 0);
    std::vector<int> active;
    active.reserve(initial);
    for (Eigen::Index k = 0; k < initial; ++k) {
        const auto pick = k + static_cast<Eigen::Index>(rng.uniform_index(n - k));
        std::swap(pool[k], pool[pick]);
        infected[pool[k]] = 1;
        active.push_back(pool[k]);
    }
    std::sort(active.begin(), active.end());

    SamplePath path;
    path.infected_count.push_back(static_cast<std::int64_t>(active.size()));
    std::int64_t cumulative = static_cast<std::int64_t>(active.size());

    std::vector<int> newly;
    std::int64_t t = 0;
    while (!active.empty() && t < max_steps) {
        newly.clear();
        for (int i : active) {
            for (int j : g.neighbors(i)) {
                if (infected[j]) continue;  // includes nodes newly marked this step
                if (rng.uniform() < params.beta) {
                    infected[j] = 1;
                    newly.push_back(j);
                }
            }
        }
        // recoveries from the step-t infected set
        std::vector<int> survivors;
        survivors.reserve(active.size());
        for (int i : active) {
            if (rng.uniform() < params.delta)
                infected[i] = 0;
            else
                survivors.push_back(i);
        }
        std::sort(newly.begin(), newly.end());
        std::vector<int> next;
        next.reserve(survivors.size() + newly.size());
        std::merge(survivors.begin(), survivors.end(), newly.begin(), newly.end(),
                   std::back_inserter(next));
        active = std::move(next);
        ++t;
        path.infected_count.push_back(static_cast<std::int64_t>(active.size()));
        cumulative += static_cast<std::int64_t>(active.size());
    }

    path.duration = t;
    path.truncated = !active.empty();
    path.realized_cost_per_node =
        params.cost_per_step * static_cast<double>(cumulative) / static_cast<double>(n);
    return path;
}

MonteCarloCost monte_carlo_cost(const Graph& g, const EpidemicParams& params,
                                std::int64_t runs, std::uint64_t seed,
                                std::int64_t max_steps) {
    if (runs < 1) throw std::invalid_argument("monte_carlo_cost: runs must be >= 1");
    MonteCarloCost out;
    out.runs = runs;
    std::vector<double> costs(runs);
    for (std::int64_t r = 0; r < runs; ++r) {
        const SamplePath p = simulate_sis(g, params, child_seed(seed, static_cast<std::uint64_t>(r)),
                                          max_steps);
        costs[r] = p.realized_cost_per_node;
        if (p.truncated) ++out.truncated_runs;
    }
    double mean = 0.0;
    for (double c : costs) mean += c;
    mean /= static_cast<double>(runs);
    out.mean = mean;
    if (runs == 1) {
        out.standard_error = std::numeric_limits<double>::quiet_NaN();
    } else {
        double ss = 0.0;
        for (double c : costs) ss += (c - mean) * (c - mean);
        out.standard_error = std::sqrt(ss / (static_cast<double>(runs) * (runs - 1.0)));
    }
    return out;
}

std::vector<Eigen::VectorXd> iterate_linear(const Graph& g, const EpidemicParams& params,
                                            std::int64_t steps) {
    params.validate();
    if (steps < 0) throw std::invalid_argument("iterate_linear: steps must be >= 0");
    std::vector<Eigen::VectorXd> traj;
    traj.reserve(steps + 1);
    traj.push_back(Eigen::VectorXd::Constant(g.size(), params.alpha));
    for (std::int64_t t = 0; t < steps; ++t) {
        const Eigen::VectorXd& p = traj.back();
        traj.push_back((1.0 - params.delta) * p + params.beta * (g.adjacency() * p));
    }
    return traj;
}

NonlinearTrajectory iterate_nonlinear(const Graph& g, const EpidemicParams& params,
                                      std::int64_t steps) {
    params.validate();
    if (steps < 0) throw std::invalid_argument("iterate_nonlinear: steps must be >= 0");
    NonlinearTrajectory out;
    out.probabilities.reserve(steps + 1);
    out.probabilities.push_back(Eigen::VectorXd::Constant(g.size(), params.alpha));
    for (std::int64_t t = 0; t < steps; ++t) {
        const Eigen::VectorXd& p = out.probabilities.back();
        const Eigen::VectorXd pressure = g.adjacency() * p;
        Eigen::VectorXd next = ((1.0 - params.delta) * p.array() +
                                params.beta * (1.0 - p.array()) * pressure.array())
                                   .matrix();
        for (Eigen::Index i = 0; i < next.size(); ++i) {
            if (next[i] < 0.0) {
                next[i] = 0.0;
                ++out.clamping_events;
            } else if (next[i] > 1.0) {
                next[i] = 1.0;
                ++out.clamping_events;
            }
        }
        out.probabilities.push_back(std::move(next));
    }
    return out;
}

}  // namespace epicost
