#include "epicost/immunize.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "epicost/prng.hpp"

namespace epicost {

void ImmunizationPlan::validate() const {
    if (const auto* r = std::get_if<RandomImmunization>(&scheme)) {
        if (!(r->pi >= 0.0 && r->pi <= 1.0))
            throw std::invalid_argument("immunization: pi must be in [0, 1]");
    } else {
        const auto& t = std::get<DegreeTruncation>(scheme);
        if (!(t.w_cut > 0.0)) throw std::invalid_argument("immunization: w_cut must be > 0");
    }
    if (!(cost_per_node > 0.0))
        throw std::invalid_argument("immunization: cost_per_node must be > 0");
}

ImmunizedProblem apply_immunization(const DistributionSpec& dist, Eigen::Index n,
                                    const ImmunizationPlan& plan, std::uint64_t /*seed*/) {
    plan.validate();
    if (n < 1) throw std::invalid_argument("apply_immunization: n must be >= 1");
    if (const auto* r = std::get_if<RandomImmunization>(&plan.scheme)) {
        const auto removed = static_cast<Eigen::Index>(std::floor(r->pi * static_cast<double>(n)));
        return {n - removed, dist, r->pi};
    }
    const auto& t = std::get<DegreeTruncation>(plan.scheme);
    return {n, dist.truncate_above(t.w_cut), 0.0};
}

Graph delete_random_nodes(const Graph& g, double pi, std::uint64_t seed) {
    if (!(pi >= 0.0 && pi <= 1.0))
        throw std::invalid_argument("delete_random_nodes: pi must be in [0, 1]");
    const Eigen::Index n = g.size();
    const auto removed = static_cast<Eigen::Index>(std::floor(pi * static_cast<double>(n)));
    std::vector<int> pool(n);
    std::iota(pool.begin(), pool.end(), 0);
    Rng rng(seed);
    for (Eigen::Index k = 0; k < removed; ++k) {
        const auto pick = k + static_cast<Eigen::Index>(rng.uniform_index(n - k));
        std::swap(pool[k], pool[pick]);
    }
    std::vector<char> keep(n, 1);
    for (Eigen::Index k = 0; k < removed; ++k) keep[pool[k]] = 0;
    std::vector<std::int64_t> relabel(n, -1);
    Eigen::Index next = 0;
    for (Eigen::Index i = 0; i < n; ++i)
        if (keep[i]) relabel[i] = next++;

    std::vector<std::pair<std::int64_t, std::int64_t>> edges;
    for (Eigen::Index j = 0; j < n; ++j) {
        if (!keep[j]) continue;
        for (Graph::Sparse::InnerIterator it(g.adjacency(), j); it; ++it)
            if (j < it.row() && keep[it.row()])
                edges.emplace_back(relabel[j], relabel[it.row()]);
    }
    return Graph::from_edges(next, std::move(edges));
}

double social_cost(double pi, Eigen::Index n, double c_v,
                   const std::function<double(Eigen::Index)>& disease_cost_on) {
    if (!(pi >= 0.0 && pi <= 1.0)) throw std::invalid_argument("social_cost: pi must be in [0, 1]");
    if (!(c_v > 0.0)) throw std::invalid_argument("social_cost: c_v must be > 0");
    if (pi == 1.0) return c_v;
    const auto removed = static_cast<Eigen::Index>(std::floor(pi * static_cast<double>(n)));
    try {
        return pi * c_v + (1.0 - pi) * disease_cost_on(n - removed);
    } catch (const instability_error& e) {
        std::ostringstream os;
        os << "social_cost: reduced problem unstable at pi = " << pi << " (" << e.what() << ")";
        throw instability_error(os.str(), e.lambda_max());
    }
}

double er_social_cost(double pi, double n, double p, const EpidemicParams& params, double c_v) {
    if (pi == 1.0) return c_v;
    const double v_bar = params.beta * n * (1.0 - pi) * p;
    if (!(params.delta > v_bar)) {
        std::ostringstream os;
        os << "er_social_cost: unstable reduced system at pi = " << pi;
        throw instability_error(os.str(), 1.0 - params.delta + v_bar);
    }
    return pi * c_v + (1.0 - pi) * params.alpha * params.cost_per_step / (params.delta - v_bar);
}

std::string to_string(ImmunizationRegime r) {
    switch (r) {
        case ImmunizationRegime::full: return "full";
        case ImmunizationRegime::interior: return "interior";
        case ImmunizationRegime::none: return "none";
    }
    return "unknown";
}

OptimalPi er_optimal_pi(double n, double p, const EpidemicParams& params, double c_v) {
    params.validate();
    const double bnp = params.beta * n * p;
    const double a = params.alpha / params.delta;
    const double slack = params.delta - bnp;
    const double b = params.alpha * params.delta / (slack * slack);
    const double c = c_v / params.cost_per_step;

    if (!(a < b)) {
        std::ostringstream os;
        os << "er_optimal_pi: degenerate regime, a = " << a << ", b = " << b << ", c = " << c;
        throw std::domain_error(os.str());
    }
    if (c <= a) return {1.0, ImmunizationRegime::full, a, b, c};
    if (c < b) {
        const double pi =
            1.0 - (params.delta - std::sqrt(params.delta * params.alpha / c)) / bnp;
        return {pi, ImmunizationRegime::interior, a, b, c};
    }
    return {0.0, ImmunizationRegime::none, a, b, c};
}

}  // namespace epicost
