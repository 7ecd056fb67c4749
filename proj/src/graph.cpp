#include "epicost/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "epicost/prng.hpp"

namespace epicost {

namespace {

using EdgeList = std::vector<std::pair<std::int64_t, std::int64_t>>;

Eigen::SparseMatrix<double> build_adjacency(Eigen::Index n, EdgeList& edges) {
    for (auto& e : edges)
        if (e.first > e.second) std::swap(e.first, e.second);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(2 * edges.size());
    for (const auto& [i, j] : edges) {
        trips.emplace_back(static_cast<int>(i), static_cast<int>(j), 1.0);
        trips.emplace_back(static_cast<int>(j), static_cast<int>(i), 1.0);
    }
    Eigen::SparseMatrix<double> a(n, n);
    a.setFromTriplets(trips.begin(), trips.end());
    a.makeCompressed();
    return a;
}

}  // namespace

Graph Graph::from_edges(Eigen::Index n, EdgeList edges) {
    Graph g;
    std::int64_t loops = 0;
    EdgeList kept;
    kept.reserve(edges.size());
    for (const auto& e : edges) {
        if (e.first == e.second) {
            ++loops;
            continue;
        }
        if (e.first < 0 || e.first >= n || e.second < 0 || e.second >= n)
            throw std::out_of_range("from_edges: node id out of range");
        kept.push_back(e);
    }
    g.adjacency_ = build_adjacency(n, kept);
    g.dropped_self_loops_ = loops;
    return g;
}

Graph Graph::generate(const Eigen::VectorXd& weights, std::uint64_t seed) {
    const Eigen::Index n = weights.size();
    if (n < 1) throw std::invalid_argument("generate: weights must be non-empty");
    for (Eigen::Index i = 0; i < n; ++i)
        if (!(weights[i] > 0.0)) throw std::invalid_argument("generate: weights must be > 0");

    const double rho = 1.0 / weights.sum();

    // weight-sorted pass with geometric skipping; an upper-bound probability
    // per row position is thinned down to the exact pair probability
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return weights[a] > weights[b] || (weights[a] == weights[b] && a < b); });
    std::vector<double> ws(n);
    for (Eigen::Index i = 0; i < n; ++i) ws[i] = weights[order[i]];

    Rng rng(seed);
    EdgeList edges;
    std::int64_t clamped = 0;
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
        Eigen::Index j = i + 1;
        double p = std::min(1.0, ws[i] * ws[j] * rho);
        while (j < n && p > 0.0) {
            if (p < 1.0) {
                const double r = rng.uniform();
                j += static_cast<Eigen::Index>(std::floor(std::log1p(-r) / std::log1p(-p)));
            }
            if (j >= n) break;
            const double raw = ws[i] * ws[j] * rho;
            if (raw > 1.0) ++clamped;
            const double q = std::min(1.0, raw);
            if (q >= p || rng.uniform() < q / p)
                edges.emplace_back(order[i], order[j]);
            p = q;
            ++j;
        }
    }

    Graph g;
    g.adjacency_ = build_adjacency(n, edges);
    g.weights_ = weights;
    g.clamped_pairs_ = clamped;
    return g;
}

Graph Graph::load_edge_list(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("edge list: cannot open " + path);
    EdgeList raw;
    std::string line;
    std::size_t lineno = 0;
    std::int64_t loops = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t start = line.find_first_not_of(" \t\r");
        if (start == std::string::npos || line[start] == '#') continue;
        char* end = nullptr;
        const long long u = std::strtoll(line.c_str() + start, &end, 10);
        char* end2 = nullptr;
        const long long v = std::strtoll(end, &end2, 10);
        bool trailing = false;
        for (const char* c = end2; *c; ++c)
            if (*c != ' ' && *c != '\t' && *c != '\r') trailing = true;
        if (end == line.c_str() + start || end2 == end || trailing || u < 0 || v < 0)
            throw parse_error(path + ":" + std::to_string(lineno) +
                              ": expected two non-negative integer ids");
        if (u == v) {
            ++loops;
            continue;
        }
        raw.emplace_back(u, v);
    }

    std::vector<std::int64_t> ids;
    ids.reserve(2 * raw.size());
    for (const auto& [u, v] : raw) {
        ids.push_back(u);
        ids.push_back(v);
    }
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    std::unordered_map<std::int64_t, std::int64_t> compact;
    compact.reserve(ids.size());
    for (std::size_t k = 0; k < ids.size(); ++k) compact[ids[k]] = static_cast<std::int64_t>(k);
    for (auto& [u, v] : raw) {
        u = compact[u];
        v = compact[v];
    }

    Graph g;
    g.adjacency_ = build_adjacency(static_cast<Eigen::Index>(ids.size()), raw);
    g.dropped_self_loops_ = loops;
    g.original_ids_ = std::move(ids);
    return g;
}

Eigen::VectorXd Graph::degrees() const {
    return adjacency_ * Eigen::VectorXd::Ones(size());
}

std::span<const int> Graph::neighbors(Eigen::Index i) const {
    const auto* outer = adjacency_.outerIndexPtr();
    const auto* inner = adjacency_.innerIndexPtr();
    return {inner + outer[i], inner + outer[i + 1]};
}

void Graph::save_edge_list(const std::string& path) const {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw parse_error("edge list: cannot write " + path);
    const Eigen::Index n = size();
    for (Eigen::Index j = 0; j < n; ++j)
        for (Sparse::InnerIterator it(adjacency_, j); it; ++it)
            if (j < it.row()) out << j << ' ' << it.row() << '\n';
    if (!out) throw parse_error("edge list: write failed for " + path);
}

Eigen::VectorXd spmv(const Graph& g, const Eigen::Ref<const Eigen::VectorXd>& x) {
    if (x.size() != g.size()) throw std::invalid_argument("spmv: dimension mismatch");
    return g.adjacency() * x;
}

double spectral_radius(const Graph& g, double tol, int max_iterations) {
    const Eigen::Index n = g.size();
    if (n < 1) throw std::invalid_argument("spectral_radius: empty graph");
    if (g.edge_count() == 0) return 0.0;

    // all-ones start with a tiny deterministic perturbation; iterate on
    // A + I so the Perron eigenvalue strictly dominates in modulus
    Eigen::VectorXd x(n);
    for (Eigen::Index i = 0; i < n; ++i)
        x[i] = 1.0 +
               1e-8 * static_cast<double>(splitmix64(static_cast<std::uint64_t>(i)) >> 40) *
                   0x1.0p-24;
    x.normalize();

    double rq_prev = std::numeric_limits<double>::quiet_NaN();
    double rq = 0.0;
    for (int it = 0; it < max_iterations; ++it) {
        Eigen::VectorXd ax = g.adjacency() * x;
        rq = x.dot(ax);
        if (it > 0 && std::abs(rq - rq_prev) < tol) return rq;
        rq_prev = rq;
        ax += x;  // shift
        x = ax / ax.norm();
    }
    throw convergence_error("spectral_radius: power iteration did not converge", rq,
                            std::abs(rq - rq_prev));
}

}  // namespace epicost
