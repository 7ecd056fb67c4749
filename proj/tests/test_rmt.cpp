#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "epicost/cost.hpp"
#include "epicost/prng.hpp"
#include "epicost/rmt.hpp"

using namespace epicost;

namespace {

double median_of(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    return xs.size() % 2 ? xs[xs.size() / 2]
                         : 0.5 * (xs[xs.size() / 2 - 1] + xs[xs.size() / 2]);
}

struct OffDiagStats {
    double mean, var;
};

OffDiagStats offdiag_stats(const Eigen::MatrixXd& c) {
    const Eigen::Index n = c.rows();
    const double cnt = static_cast<double>(n) * (n - 1);
    double mean = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            if (i != j) mean += c(i, j);
    mean /= cnt;
    double var = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            if (i != j) var += (c(i, j) - mean) * (c(i, j) - mean);
    return {mean, var / cnt};
}

}  // namespace

TEST_CASE("X minus the rank-one term is the system resolvent core") {
    const RmtSample s = RmtSample::draw(DistributionSpec(PointMass{6.0}), 300, 0.05, 1);
    const Eigen::MatrixXd x = resolvent_core(s, 0.7);
    const Eigen::MatrixXd lhs = x - s.mu * (s.v * s.v.transpose());
    const Eigen::MatrixXd rhs =
        0.7 * Eigen::MatrixXd::Identity(300, 300) - 0.05 * s.A;
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("beta zero gives X = delta I") {
    const RmtSample s = RmtSample::draw(DistributionSpec(Exponential{0.2}), 200, 0.0, 2);
    const Eigen::MatrixXd x = resolvent_core(s, 0.6);
    CHECK((x - 0.6 * Eigen::MatrixXd::Identity(200, 200)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("stability transfers to the eigenvalues of X") {
    const Eigen::Index n = 500;
    const double beta = 0.03, delta = 0.6;
    const RmtSample s = RmtSample::draw(DistributionSpec(PointMass{n * 0.01}), n, beta, 3);
    const Graph g = Graph::generate(s.w, child_seed(3, 1));  // same draw as RmtSample
    const double lam_m = 1.0 - delta + beta * spectral_radius(g);
    REQUIRE(lam_m < 1.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(resolvent_core(s, delta), Eigen::EigenvaluesOnly);
    const double v_min = s.v.minCoeff();
    CHECK(es.eigenvalues().minCoeff() >=
          (1.0 - lam_m) * v_min / delta * (1.0 - 1e-6));
}

TEST_CASE("wigner statistics of the centered scaled adjacency") {
    const Eigen::Index n = 1000;
    const RmtSample s = RmtSample::draw(DistributionSpec(PointMass{10.0}), n, 0.03, 4);
    const Eigen::MatrixXd c = wigner_matrix(s);
    const auto stats = offdiag_stats(c);
    CHECK(std::abs(stats.mean) <= 4.0 / n);
    CHECK(stats.var >= 0.8 / n);
    CHECK(stats.var <= 1.2 / n);
}

TEST_CASE("wigner statistics hold for heterogeneous weight laws") {
    const Eigen::Index n = 1000;
    std::uint64_t seed = 5;
    const auto q = 1.0 - ScaledDistribution::kTruncationQuantile;
    const DistributionSpec pareto(Pareto{2.5, 2.0});
    for (const auto& dist :
         {DistributionSpec(Exponential{1.0 / 12.0}).truncate_above(80.0),
          pareto.truncate_above(pareto.quantile(q))}) {
        const RmtSample s = RmtSample::draw(dist, n, 0.01, seed++);
        const auto stats = offdiag_stats(wigner_matrix(s));
        CHECK(std::abs(stats.mean) <= 4.0 / n);
        CHECK(stats.var >= 0.8 / n);
        CHECK(stats.var <= 1.2 / n);
    }
}

TEST_CASE("wigner spectrum stays near the semicircle support") {
    const Eigen::Index n = 800;
    const RmtSample s = RmtSample::draw(DistributionSpec(PointMass{8.0}), n, 0.05, 6);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(wigner_matrix(s), Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues().minCoeff() > -2.2);
    CHECK(es.eigenvalues().maxCoeff() < 2.2);
}

TEST_CASE("beta zero collapses the resolvent terms") {
    const RmtSample s = RmtSample::draw(DistributionSpec(Exponential{0.25}), 150, 0.0, 7);
    const ResolventTerms t = resolvent_terms(s, 0.6);
    CHECK(t.t11 == doctest::Approx(1.0 / 0.6).epsilon(1e-12));
    CHECK(t.t1v == 0.0);
    CHECK(t.tvv == 0.0);
}

TEST_CASE("resolvent terms track the fixed-point theory at finite n") {
    const Eigen::Index n = 800;
    const double p = 0.0125, beta = 0.03, delta = 0.6;  // v_bar = 0.3
    const DistributionSpec dist(PointMass{static_cast<double>(n) * p});
    const ScaledDistribution scaled(dist, beta);
    const double v_bar = scaled.moments().mean;
    const double kap = std::sqrt(beta / (delta * delta * v_bar));
    const FixedPointResult fp = solve_fixed_point(scaled, kap, 1e-12);
    const double th_t11 = (1.0 + kap * kap * fp.value * fp.value) / delta;
    const double th_t1v = fp.value / delta;
    const double th_tvv = (1.0 - v_bar / fp.value) / (delta * kap * kap);

    std::vector<double> e11, e1v, evv;
    for (std::uint64_t s = 0; s < 9; ++s) {
        const RmtSample smp = RmtSample::draw(dist, n, beta, child_seed(42, s));
        const ResolventTerms t = resolvent_terms(smp, delta);
        e11.push_back(std::abs(t.t11 - th_t11) / th_t11);
        e1v.push_back(std::abs(t.t1v - th_t1v) / th_t1v);
        evv.push_back(std::abs(t.tvv - th_tvv) / th_tvv);
    }
    CHECK(median_of(e11) < 0.08);
    CHECK(median_of(e1v) < 0.08);
    CHECK(median_of(evv) < 0.08);
}

TEST_CASE("resolvent terms reach the limits for truncated-exponential weights") {
    // mean weight 40 keeps the scaling constant small, so the finite-n values
    // sit close to the (1/delta, v_bar/delta, E v^2/delta) limits
    const Eigen::Index n = 2000;
    const double mean_w = 40.0, v_bar = 0.15, delta = 0.6;
    const double beta = v_bar / mean_w;
    const DistributionSpec dist = DistributionSpec(Exponential{1.0 / mean_w});
    const Moments m = ScaledDistribution(dist, beta).moments();
    const double th_t11 = 1.0 / delta;
    const double th_t1v = m.mean / delta;
    const double th_tvv = m.second_moment / delta;
    std::vector<double> t11s, t1vs, tvvs;
    for (std::uint64_t s = 0; s < 20; ++s) {
        const RmtSample smp = RmtSample::draw(dist, n, beta, child_seed(7017, s));
        const ResolventTerms t = resolvent_terms(smp, delta);
        t11s.push_back(t.t11);
        t1vs.push_back(t.t1v);
        tvvs.push_back(t.tvv);
    }
    CHECK(std::abs(median_of(t11s) - th_t11) / th_t11 < 0.05);
    CHECK(std::abs(median_of(t1vs) - th_t1v) / th_t1v < 0.05);
    CHECK(std::abs(median_of(tvvs) - th_tvv) / th_tvv < 0.05);
}

TEST_CASE("solved fixed point satisfies the companion integral identities") {
    const ScaledDistribution dist(DistributionSpec(Exponential{4.0}), 1.0);
    const double kappa = 0.3, k2 = kappa * kappa;
    const FixedPointResult fp = solve_fixed_point(dist, kappa, 1e-11);
    const double s1 = integrate(
        dist, [&](double v) { return (1.0 / v) / (1.0 / v - k2 * fp.value); }, 1e-12);
    const double s2 = integrate(
        dist, [&](double v) { return v / (1.0 / v - k2 * fp.value); }, 1e-12);
    CHECK(std::abs(s1 - (1.0 + k2 * fp.value * fp.value)) < 1e-8);
    CHECK(std::abs(fp.value - k2 * s2 * fp.value - fp.v_bar) < 1e-8);
}

TEST_CASE("assumption gap vanishes identically at beta zero") {
    CHECK(offdiag_trace_gap(DistributionSpec(PointMass{5.0}), 0.0, 0.6, 100, 1, 3, 1) == 0.0);
}

TEST_CASE("assumption gap rejects unstable parameters") {
    // beta n p far above delta
    const Eigen::Index n = 300;
    const DistributionSpec dist(PointMass{n * 0.02});
    CHECK_THROWS_AS(offdiag_trace_gap(dist, 0.4, 0.6, n, 2, 2, 5), instability_error);
}

TEST_CASE("assumption gap shrinks with n for all three resolvents") {
    const double delta = 0.6, bnp = 0.3, p = 0.02;
    std::array<std::vector<double>, 3> medians;
    for (const Eigen::Index n : {200, 400, 800}) {
        const double beta = bnp / (static_cast<double>(n) * p);
        const GapStudy gs = offdiag_trace_gap_study(
            DistributionSpec(PointMass{static_cast<double>(n) * p}), beta, delta, n, 10,
            child_seed(99, static_cast<std::uint64_t>(n)));
        for (int k = 0; k < 3; ++k) medians[k].push_back(gs.median_gap[k]);
    }
    for (int k = 0; k < 3; ++k) {
        CHECK(medians[k][2] < medians[k][0]);
    }
}

TEST_CASE("single-gap wrapper agrees with the study machinery") {
    const Eigen::Index n = 200;
    const DistributionSpec dist(PointMass{n * 0.02});
    const double gap = offdiag_trace_gap(dist, 0.05, 0.6, n, 1, 4, 31);
    CHECK(gap >= 0.0);
    CHECK(gap < 1.0);
}

TEST_CASE("dense cap is enforced") {
    CHECK_THROWS_AS(RmtSample::draw(DistributionSpec(PointMass{5.0}), 5000, 0.01, 1),
                    std::invalid_argument);
}
