#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <fstream>

#include <Eigen/Eigenvalues>

#include "epicost/graph.hpp"
#include "epicost/prng.hpp"

using namespace epicost;

namespace {

Graph triangle() { return Graph::from_edges(3, {{0, 1}, {1, 2}, {0, 2}}); }

Graph star5() { return Graph::from_edges(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}}); }

}  // namespace

TEST_CASE("uniform weights reproduce the homogeneous edge probability") {
    // all weights equal to n*p makes every pair an edge with probability p
    const Eigen::Index n = 1000;
    const double p = 0.0169;
    const Eigen::VectorXd w = Eigen::VectorXd::Constant(n, n * p);
    const Graph g = Graph::generate(w, 17);
    const double pairs = 0.5 * n * (n - 1.0);
    const double mean = pairs * p;
    const double sd = std::sqrt(pairs * p * (1.0 - p));
    CHECK(std::abs(g.edge_count() - mean) < 3.0 * sd);
    CHECK(g.clamped_pairs() == 0);
}

TEST_CASE("expected degree of node i approaches w_i") {
    const Eigen::Index n = 60;
    Eigen::VectorXd w(n);
    Rng rng(404);
    for (Eigen::Index i = 0; i < n; ++i) w[i] = 1.0 + 9.0 * rng.uniform();
    const int generations = 200;
    Eigen::VectorXd mean_deg = Eigen::VectorXd::Zero(n);
    for (int r = 0; r < generations; ++r)
        mean_deg += Graph::generate(w, child_seed(2024, r)).degrees();
    mean_deg /= generations;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double se = std::sqrt(w[i] / generations);
        CHECK(std::abs(mean_deg[i] - w[i]) < 4.0 * se);
    }
}

TEST_CASE("single node gives empty graph") {
    const Graph g = Graph::generate(Eigen::VectorXd::Constant(1, 3.0), 1);
    CHECK(g.size() == 1);
    CHECK(g.edge_count() == 0);
}

TEST_CASE("generation is deterministic in the seed") {
    Eigen::VectorXd w(50);
    Rng rng(9);
    for (Eigen::Index i = 0; i < 50; ++i) w[i] = 0.5 + 4.0 * rng.uniform();
    const Graph a = Graph::generate(w, 77);
    const Graph b = Graph::generate(w, 77);
    CHECK((Eigen::MatrixXd(a.adjacency()) - Eigen::MatrixXd(b.adjacency())).cwiseAbs().maxCoeff() ==
          0.0);
}

TEST_CASE("pair frequency matches w_i w_j rho") {
    Eigen::VectorXd w(6);
    w << 1.0, 2.0, 3.0, 4.0, 5.0, 6.0;
    const double rho = 1.0 / w.sum();
    const int generations = 4000;
    Eigen::MatrixXd freq = Eigen::MatrixXd::Zero(6, 6);
    for (int r = 0; r < generations; ++r)
        freq += Eigen::MatrixXd(Graph::generate(w, child_seed(5150, r)).adjacency());
    freq /= generations;
    for (int i = 0; i < 6; ++i)
        for (int j = i + 1; j < 6; ++j) {
            const double p = std::min(1.0, w[i] * w[j] * rho);
            const double se = std::sqrt(p * (1.0 - p) / generations);
            CHECK(std::abs(freq(i, j) - p) < 4.0 * se + 1e-12);
        }
}

TEST_CASE("heavy weights clamp at probability one and are counted") {
    Eigen::VectorXd w(4);
    w << 100.0, 100.0, 0.1, 0.1;
    const Graph g = Graph::generate(w, 3);
    CHECK(g.clamped_pairs() == 1);  // only the pair of hubs exceeds 1
    CHECK(Eigen::MatrixXd(g.adjacency())(0, 1) == 1.0);
}

TEST_CASE("edge list load collapses duplicates and drops self loops") {
    const std::string path = "edge_list_test.txt";
    {
        std::ofstream out(path);
        out << "# comment line\n0 1\n1 0\n3 3\n7 2\n2 7\n";
    }
    const Graph g = Graph::load_edge_list(path);
    CHECK(g.size() == 4);  // ids 0 1 2 7 compacted
    CHECK(g.edge_count() == 2);
    CHECK(g.dropped_self_loops() == 1);
    CHECK(g.original_ids() == std::vector<std::int64_t>{0, 1, 2, 7});
    std::remove(path.c_str());
}

TEST_CASE("malformed edge list reports the line") {
    const std::string path = "edge_list_bad.txt";
    {
        std::ofstream out(path);
        out << "0 1\nnot an edge\n";
    }
    CHECK_THROWS_WITH_AS(Graph::load_edge_list(path), doctest::Contains(":2:"), parse_error);
    std::remove(path.c_str());
}

TEST_CASE("save and reload round trips") {
    Eigen::VectorXd w = Eigen::VectorXd::Constant(40, 5.0);
    const Graph g = Graph::generate(w, 123);
    const std::string path = "edge_list_roundtrip.txt";
    g.save_edge_list(path);
    const Graph h = Graph::load_edge_list(path);
    // isolated nodes drop out on reload; compare via degrees of surviving ids
    CHECK(h.edge_count() == g.edge_count());
    std::remove(path.c_str());
}

TEST_CASE("spmv matches hand values") {
    const Graph tri = triangle();
    Eigen::VectorXd ones = Eigen::VectorXd::Ones(3);
    CHECK((spmv(tri, ones) - Eigen::VectorXd::Constant(3, 2.0)).norm() == 0.0);

    const Graph empty = Graph::from_edges(3, {});
    CHECK(spmv(empty, ones).norm() == 0.0);

    const Graph s = star5();
    Eigen::VectorXd e0 = Eigen::VectorXd::Zero(5);
    e0[0] = 1.0;
    Eigen::VectorXd expect(5);
    expect << 0, 1, 1, 1, 1;
    CHECK((spmv(s, e0) - expect).norm() == 0.0);

    CHECK_THROWS_AS(spmv(s, ones), std::invalid_argument);
}

TEST_CASE("spmv is self adjoint") {
    const Graph g = Graph::generate(Eigen::VectorXd::Constant(200, 8.0), 31);
    Rng rng(6);
    Eigen::VectorXd x(200), y(200);
    for (int i = 0; i < 200; ++i) {
        x[i] = rng.uniform(-1, 1);
        y[i] = rng.uniform(-1, 1);
    }
    const double a = spmv(g, x).dot(y);
    const double b = spmv(g, y).dot(x);
    CHECK(std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b)));
}

TEST_CASE("spectral radius on small exact cases") {
    CHECK(spectral_radius(triangle(), 1e-12) == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(spectral_radius(star5(), 1e-12) == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(spectral_radius(Graph::from_edges(4, {}), 1e-12) == 0.0);
}

TEST_CASE("spectral radius near n p for a homogeneous graph") {
    const Eigen::Index n = 2000;
    const Graph g = Graph::generate(Eigen::VectorXd::Constant(n, n * 0.01), 55);
    const double lam = spectral_radius(g);
    CHECK(std::abs(lam - 20.0) / 20.0 < 0.10);
}

TEST_CASE("spectral radius sits between average and maximum degree") {
    for (std::uint64_t s = 0; s < 5; ++s) {
        const Graph g = Graph::generate(Eigen::VectorXd::Constant(300, 6.0), child_seed(808, s));
        const double lam = spectral_radius(g);
        const Eigen::VectorXd deg = g.degrees();
        CHECK(lam <= deg.maxCoeff() + 1e-9);
        CHECK(lam >= deg.mean() - 1e-9);
    }
}

TEST_CASE("spectral radius agrees with a dense eigensolver") {
    Eigen::VectorXd w(80);
    Rng rng(2);
    for (int i = 0; i < 80; ++i) w[i] = 1.0 + 7.0 * rng.uniform();
    const Graph g = Graph::generate(w, 99);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(g.adjacency()),
                                                      Eigen::EigenvaluesOnly);
    CHECK(spectral_radius(g, 1e-11) ==
          doctest::Approx(es.eigenvalues().maxCoeff()).epsilon(1e-7));
}
