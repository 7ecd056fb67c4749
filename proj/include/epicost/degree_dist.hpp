#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "epicost/common.hpp"

namespace epicost {

struct Moments {
    double mean;
    double second_moment;
    bool mean_finite() const { return std::isfinite(mean); }
    bool second_finite() const { return std::isfinite(second_moment); }
};

struct PointMass {
    double w0;
};
struct Exponential {
    double rate;  // mean 1/rate
};
struct Pareto {
    double shape;        // tail index theta
    double scale = 1.0;  // minimum value
};
struct Empirical {
    std::vector<double> weights;
};

// Expected-degree distribution. An optional upper cut represents the
// conditional law given w <= cut (degree-based immunization); all queries
// honor it.
class DistributionSpec {
public:
    using Kind = std::variant<PointMass, Exponential, Pareto, Empirical>;

    explicit DistributionSpec(Kind kind);

    // Text forms: pointmass:5.61, exponential:0.1667, pareto:1.5[:scale],
    // empirical:<path> (one positive real per line, # comments allowed).
    static DistributionSpec parse(const std::string& text);

    const Kind& kind() const { return kind_; }
    bool has_upper_cut() const { return upper_cut_.has_value(); }
    double upper_cut() const { return *upper_cut_; }

    // Conditional distribution of w given w <= cut.
    DistributionSpec truncate_above(double cut) const;

    // Analytic moments of the (possibly cut) law. Infinite moments are
    // reported as +inf: Pareto mean for shape <= 1, second moment for
    // shape <= 2, unless an upper cut makes them finite.
    Moments moments() const;

    double quantile(double q) const;  // q in [0, 1)
    double cdf(double w) const;

    // Smallest and largest attainable values of the (cut) law; +inf for an
    // unbounded upper tail.
    double support_min() const;
    double support_max() const;

    std::string text() const;

private:
    Kind kind_;
    std::optional<double> upper_cut_;

    double base_quantile(double q) const;
    double base_cdf(double w) const;
};

// n i.i.d. samples by inverse CDF; deterministic given seed.
Eigen::VectorXd sample_weights(const DistributionSpec& dist, Eigen::Index n,
                               std::uint64_t seed);

// Distribution of v = scale * w restricted to a bounded positive support.
// Unbounded bases are cut at the 1e-6 / 1-1e-6 quantiles and renormalized;
// the discarded probability is reported. Moments and integrals refer to the
// truncated, renormalized law.
class ScaledDistribution {
public:
    static constexpr double kTruncationQuantile = 1e-6;

    ScaledDistribution(DistributionSpec base, double scale);

    const DistributionSpec& base() const { return base_; }
    double scale() const { return scale_; }
    double v_min() const { return v_min_; }
    double v_max() const { return v_max_; }
    double truncation_mass() const { return truncation_mass_; }

    bool is_point_mass() const;
    bool is_empirical() const;

    // density of the truncated renormalized law at v (continuous kinds only)
    double pdf(double v) const;

    Moments moments() const;

    // atoms in v-space for Empirical (within the support)
    const std::vector<double>& atoms() const { return atoms_; }

private:
    DistributionSpec base_;
    double scale_;
    double v_min_, v_max_;
    double truncation_mass_;
    double retained_;  // base-law probability of [v_min/scale, v_max/scale]
    std::vector<double> atoms_;
};

// integral of f(v) p(v) dv over the support, absolute error <= tol.
// Point masses and empirical atoms are evaluated exactly; continuous laws use
// composite Gauss-Legendre with panel doubling until successive estimates
// agree within tol.
double integrate(const ScaledDistribution& dist,
                 const std::function<double(double)>& f, double tol = 1e-10);

}  // namespace epicost
