#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "epicost/common.hpp"

namespace epicost {

// Immutable undirected simple graph with sparse 0/1 adjacency.
class Graph {
public:
    using Sparse = Eigen::SparseMatrix<double>;  // column-major, sorted inner indices

    // Expected-degree random graph: pair {i,j} is an edge with probability
    // min(1, w_i w_j / sum(w)), independently. Deterministic given seed.
    // Pairs whose raw probability exceeds 1 are clamped and counted.
    static Graph generate(const Eigen::VectorXd& weights, std::uint64_t seed);

    // Plain-text edge list: two whitespace-separated non-negative integer ids
    // per line, '#' lines ignored. Duplicate/reversed edges collapse,
    // self-loops are dropped and counted, ids are compacted to 0..n-1.
    static Graph load_edge_list(const std::string& path);

    static Graph from_edges(Eigen::Index n,
                            std::vector<std::pair<std::int64_t, std::int64_t>> edges);

    Eigen::Index size() const { return adjacency_.rows(); }
    std::int64_t edge_count() const { return adjacency_.nonZeros() / 2; }
    const Sparse& adjacency() const { return adjacency_; }

    Eigen::VectorXd degrees() const;
    std::span<const int> neighbors(Eigen::Index i) const;

    bool has_weights() const { return weights_.size() > 0; }
    const Eigen::VectorXd& weights() const { return weights_; }

    std::int64_t clamped_pairs() const { return clamped_pairs_; }
    std::int64_t dropped_self_loops() const { return dropped_self_loops_; }

    // original ids of compacted nodes, when loaded from an edge list
    const std::vector<std::int64_t>& original_ids() const { return original_ids_; }

    // Edges written once, smaller id first, sorted.
    void save_edge_list(const std::string& path) const;

private:
    Graph() = default;
    Sparse adjacency_;
    Eigen::VectorXd weights_;
    std::int64_t clamped_pairs_ = 0;
    std::int64_t dropped_self_loops_ = 0;
    std::vector<std::int64_t> original_ids_;
};

// A * x
Eigen::VectorXd spmv(const Graph& g, const Eigen::Ref<const Eigen::VectorXd>& x);

// Largest eigenvalue of the adjacency matrix (the Perron root, since A is
// nonnegative) by shifted power iteration; stops when successive Rayleigh
// quotients differ by less than tol.
double spectral_radius(const Graph& g, double tol = 1e-9, int max_iterations = 100000);

}  // namespace epicost
