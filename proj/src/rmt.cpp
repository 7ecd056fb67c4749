#include "epicost/rmt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Cholesky>

#include "epicost/prng.hpp"

namespace epicost {

namespace {

void check_dense_cap(Eigen::Index n) {
    if (n > kDenseCap)
        throw std::invalid_argument("dense routine: n exceeds the dense cap of " +
                                    std::to_string(kDenseCap));
}

double analytic_v_bar(const DistributionSpec& dist, double beta) {
    const ScaledDistribution scaled(dist, beta);
    return scaled.moments().mean;
}

}  // namespace

RmtSample RmtSample::draw(const DistributionSpec& dist, Eigen::Index n, double beta,
                          std::uint64_t seed) {
    check_dense_cap(n);
    if (!(beta >= 0.0)) throw std::invalid_argument("RmtSample: beta must be >= 0");
    RmtSample s;
    s.w = sample_weights(dist, n, child_seed(seed, 0));
    const Graph g = Graph::generate(s.w, child_seed(seed, 1));
    s.A = Eigen::MatrixXd(g.adjacency());
    s.beta = beta;
    s.v = beta * s.w;
    s.rho = 1.0 / s.w.sum();
    const double vsum = s.v.sum();
    s.mu = vsum > 0.0 ? 1.0 / vsum : 0.0;
    return s;
}

Eigen::MatrixXd wigner_matrix(const RmtSample& sample) {
    const Eigen::Index n = sample.A.rows();
    check_dense_cap(n);
    const Eigen::VectorXd inv_sqrt_w = sample.w.array().rsqrt();
    Eigen::MatrixXd centered = sample.A - sample.rho * (sample.w * sample.w.transpose());
    centered = inv_sqrt_w.asDiagonal() * centered * inv_sqrt_w.asDiagonal();
    return centered / std::sqrt(static_cast<double>(n) * sample.rho);
}

Eigen::MatrixXd resolvent_core(const RmtSample& sample, double delta) {
    const Eigen::Index n = sample.A.rows();
    check_dense_cap(n);
    Eigen::MatrixXd x = -sample.beta * sample.A;
    x.diagonal().array() += delta;
    if (sample.mu > 0.0) x += sample.mu * (sample.v * sample.v.transpose());
    return x;
}

ResolventTerms resolvent_terms(const RmtSample& sample, double delta) {
    const Eigen::Index n = sample.A.rows();
    const Eigen::MatrixXd x = resolvent_core(sample, delta);
    Eigen::LLT<Eigen::MatrixXd> llt(x);
    if (llt.info() != Eigen::Success)
        throw instability_error("resolvent_terms: X is not positive definite (unstable sample)",
                                std::numeric_limits<double>::quiet_NaN());
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
    const Eigen::VectorXd xi1 = llt.solve(ones);
    const Eigen::VectorXd xiv = llt.solve(sample.v);
    const double dn = static_cast<double>(n);
    return {ones.dot(xi1) / dn, sample.v.dot(xi1) / dn, sample.v.dot(xiv) / dn};
}

namespace {

// per-draw trace and all-ones quadratic form of Y^(1..3), sharing one
// factorization of B = V^{-1} - kappa_n C
struct YDrawStats {
    std::array<double, 3> quad;   // 1^T Y^(k) 1
    std::array<double, 3> trace;  // tr Y^(k)
};

YDrawStats y_draw_stats(const DistributionSpec& dist, double beta, double delta,
                        Eigen::Index n, std::uint64_t seed) {
    const RmtSample s = RmtSample::draw(dist, n, beta, seed);
    const double dn = static_cast<double>(n);
    YDrawStats out{};
    if (beta == 0.0) {
        // v = 0: every Y is the zero matrix
        out.quad = {0.0, 0.0, 0.0};
        out.trace = {0.0, 0.0, 0.0};
        return out;
    }
    const double v_bar = analytic_v_bar(dist, beta);
    const double kappa_n = std::sqrt(beta / (delta * delta * v_bar));

    const Eigen::MatrixXd c = wigner_matrix(s);
    Eigen::MatrixXd b = -kappa_n * c;
    b.diagonal() += s.v.cwiseInverse();

    Eigen::LLT<Eigen::MatrixXd> llt(b);
    if (llt.info() != Eigen::Success)
        throw instability_error("resolvent core V^{-1} - kappa_n C is not positive definite (unstable sample)",
                                std::numeric_limits<double>::quiet_NaN());
    const Eigen::MatrixXd r = llt.solve(Eigen::MatrixXd::Identity(n, n));

    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
    const Eigen::VectorXd sqrt_v = s.v.array().sqrt();
    const Eigen::VectorXd inv_sqrt_v = s.v.array().rsqrt();

    out.quad[0] = ones.dot(r * ones) / dn;
    out.quad[1] = inv_sqrt_v.dot(r * inv_sqrt_v) / dn;
    out.quad[2] = sqrt_v.dot(r * sqrt_v) / dn;
    out.trace[0] = r.trace() / dn;
    out.trace[1] = r.diagonal().dot(s.v.cwiseInverse()) / dn;
    out.trace[2] = r.diagonal().dot(s.v) / dn;
    return out;
}

double median_of(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    const std::size_t m = xs.size();
    return m % 2 == 1 ? xs[m / 2] : 0.5 * (xs[m / 2 - 1] + xs[m / 2]);
}

}  // namespace

double offdiag_trace_gap(const DistributionSpec& dist, double beta, double delta,
                       Eigen::Index n, int k, int samples, std::uint64_t seed) {
    if (k < 1 || k > 3) throw std::invalid_argument("offdiag_trace_gap: k must be 1, 2 or 3");
    if (samples < 1) throw std::invalid_argument("offdiag_trace_gap: samples must be >= 1");
    double trace_sum = 0.0;
    for (int i = 0; i < samples; ++i)
        trace_sum += y_draw_stats(dist, beta, delta, n, child_seed(seed, i)).trace[k - 1];
    const double expected_trace = trace_sum / samples;
    const YDrawStats fresh =
        y_draw_stats(dist, beta, delta, n, child_seed(seed, static_cast<std::uint64_t>(samples)));
    return std::abs(fresh.quad[k - 1] - expected_trace);
}

GapStudy offdiag_trace_gap_study(const DistributionSpec& dist, double beta, double delta,
                               Eigen::Index n, int samples, std::uint64_t seed) {
    if (samples < 2) throw std::invalid_argument("offdiag_trace_gap_study: samples must be >= 2");
    std::vector<YDrawStats> draws;
    draws.reserve(samples);
    for (int i = 0; i < samples; ++i)
        draws.push_back(y_draw_stats(dist, beta, delta, n, child_seed(seed, i)));

    GapStudy study;
    for (int k = 0; k < 3; ++k) {
        double total = 0.0;
        for (const auto& d : draws) total += d.trace[k];
        auto& gaps = study.gaps[k];
        gaps.reserve(samples);
        for (const auto& d : draws) {
            const double loo_mean = (total - d.trace[k]) / (samples - 1.0);
            gaps.push_back(std::abs(d.quad[k] - loo_mean));
        }
        study.median_gap[k] = median_of(gaps);
    }
    return study;
}

}  // namespace epicost
