#include "epicost/cost.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/IterativeLinearSolvers>

namespace epicost {

std::string to_string(CostMethod m) {
    switch (m) {
        case CostMethod::linear_solve: return "linear_solve";
        case CostMethod::asymptotic: return "asymptotic";
        case CostMethod::spectral_bound: return "spectral_bound";
        case CostMethod::monte_carlo: return "monte_carlo";
        case CostMethod::er_closed_form: return "er_closed_form";
    }
    return "unknown";
}

namespace {

double system_lambda_max(const Graph& g, const EpidemicParams& params) {
    return 1.0 - params.delta + params.beta * spectral_radius(g);
}

void require_stable(double lambda_max) {
    if (lambda_max >= 1.0 - kStabilityMargin) {
        std::ostringstream os;
        os << "unstable system: lambda_max(M) = " << lambda_max;
        throw instability_error(os.str(), lambda_max);
    }
}

}  // namespace

CostReport linear_cost(const Graph& g, const EpidemicParams& params, double tol) {
    params.validate();
    const double lm = system_lambda_max(g, params);
    require_stable(lm);

    const Eigen::Index n = g.size();
    Graph::Sparse system = (-params.beta) * g.adjacency();
    // adjacency has an empty diagonal, so insert delta explicitly
    Graph::Sparse diag(n, n);
    diag.setIdentity();
    system += params.delta * diag;

    Eigen::ConjugateGradient<Graph::Sparse, Eigen::Lower | Eigen::Upper> cg;
    cg.setTolerance(tol);
    cg.compute(system);
    const Eigen::VectorXd x = cg.solve(Eigen::VectorXd::Ones(n));
    if (cg.info() != Eigen::Success)
        throw convergence_error("linear_cost: conjugate gradient did not converge",
                                params.alpha * params.cost_per_step * x.sum() / static_cast<double>(n),
                                cg.error());

    CostReport report;
    report.method = CostMethod::linear_solve;
    report.value = params.alpha * params.cost_per_step * x.sum() / static_cast<double>(n);
    report.lambda_max = lm;
    report.stable = true;
    report.diagnostic = cg.error();
    return report;
}

CostReport spectral_bound(const Graph& g, const EpidemicParams& params) {
    params.validate();
    const double lm = system_lambda_max(g, params);
    require_stable(lm);
    CostReport report;
    report.method = CostMethod::spectral_bound;
    report.value = params.alpha * params.cost_per_step / (1.0 - lm);
    report.lambda_max = lm;
    report.stable = true;
    report.diagnostic = 0.0;
    return report;
}

FixedPointResult solve_fixed_point(const ScaledDistribution& dist, double kappa, double tol) {
    if (!(kappa >= 0.0)) throw std::invalid_argument("solve_fixed_point: kappa must be >= 0");
    const Moments m = dist.moments();
    FixedPointResult result;
    result.kappa = kappa;
    result.v_bar = m.mean;
    result.second_moment = m.second_moment;

    if (kappa == 0.0) {
        result.value = m.mean;
        result.residual = 0.0;
        result.iterations = 0;
        return result;
    }

    const double k2 = kappa * kappa;
    const double f_ceiling = 1.0 / (k2 * dist.v_max());
    const double quad_tol = std::min(tol * 1e-2, 1e-12);
    auto apply = [&](double f) {
        return integrate(
            dist, [&](double v) { return 1.0 / (1.0 / v - k2 * f); }, quad_tol);
    };

    double f = m.mean;
    if (f >= f_ceiling)
        throw convergence_error("solve_fixed_point: v_bar already outside the admissible region",
                                f, std::numeric_limits<double>::infinity());
    double eta = 1.0;
    const int max_iterations = 10000;
    for (int it = 1; it <= max_iterations; ++it) {
        const double g = apply(f);
        const double residual = std::abs(g - f);
        if (residual <= tol) {
            result.value = f;
            result.residual = residual;
            result.iterations = it;
            return result;
        }
        double candidate = (1.0 - eta) * f + eta * g;
        while (candidate >= f_ceiling * (1.0 - 1e-12)) {
            eta *= 0.5;
            if (eta < 1e-14)
                throw convergence_error(
                    "solve_fixed_point: iteration pinned at the admissibility boundary", f,
                    residual);
            candidate = (1.0 - eta) * f + eta * g;
        }
        f = candidate;
    }
    throw convergence_error("solve_fixed_point: no convergence within iteration budget", f,
                            std::abs(apply(f) - f));
}

CostReport asymptotic_cost(const ScaledDistribution& dist, double delta, double alpha,
                           double c_d, double kappa, double tol) {
    if (!(delta > 0.0 && delta <= 1.0))
        throw std::invalid_argument("asymptotic_cost: delta must be in (0, 1]");
    // the finite-variance requirement concerns the modeled law, so the check
    // runs on the base distribution (an explicit degree cut counts, the
    // numerical quantile truncation does not)
    if (!dist.base().moments().second_finite())
        throw inapplicable_error("asymptotic_cost: base distribution has infinite variance");

    CostReport report;
    report.method = CostMethod::asymptotic;
    report.stable = true;

    const Moments m = dist.moments();
    const double v_bar = m.mean;
    const double prefactor = alpha * c_d / delta;

    if (kappa == 0.0) {
        if (v_bar == 0.0) {
            report.value = prefactor;
            return report;
        }
        const double denom = m.second_moment - delta * v_bar;
        if (!(denom < 0.0)) {
            std::ostringstream os;
            os << "asymptotic_cost: kappa=0 denominator E v^2 - delta v_bar = " << denom
               << " is not negative; outside the stable regime";
            throw inapplicable_error(os.str());
        }
        report.value = prefactor * (1.0 - v_bar * v_bar / denom);
        report.diagnostic = 0.0;
        return report;
    }

    const FixedPointResult fp = solve_fixed_point(dist, kappa, tol);
    const double k2 = kappa * kappa;
    const double k2f2 = k2 * fp.value * fp.value;
    const double denom = 1.0 - v_bar / fp.value - delta * k2 * v_bar;
    if (!(denom < 0.0)) {
        std::ostringstream os;
        os << "asymptotic_cost: denominator 1 - v_bar/F - delta kappa^2 v_bar = " << denom
           << " is not negative; outside the stable regime";
        throw inapplicable_error(os.str());
    }
    const double value = prefactor * (1.0 + k2f2 - k2f2 / denom);
    if (!std::isfinite(value) || value < 0.0)
        throw inapplicable_error("asymptotic_cost: formula produced a non-finite or negative cost");
    report.value = value;
    report.diagnostic = fp.residual;
    return report;
}

double er_exact_cost(double v_bar, double delta, double alpha, double c_d) {
    if (!(v_bar >= 0.0)) throw std::invalid_argument("er_exact_cost: v_bar must be >= 0");
    if (!(delta > v_bar))
        throw instability_error("er_exact_cost: requires delta > v_bar", 1.0 - delta + v_bar);
    return alpha * c_d / (delta - v_bar);
}

double er_whp_bound(double n, double p, double beta, double delta, double alpha, double c_d) {
    const double v_bar = beta * n * p;
    if (!(delta > v_bar))
        throw instability_error("er_whp_bound: requires delta > beta n p", 1.0 - delta + v_bar);
    return alpha * c_d / (delta - v_bar);
}

double kappa_for(double beta, double delta, double v_bar) {
    if (!(beta >= 0.0) || !(delta > 0.0) || !(v_bar > 0.0))
        throw std::invalid_argument("kappa_for: requires beta >= 0, delta > 0, v_bar > 0");
    return std::sqrt(beta) / (delta * std::sqrt(v_bar));
}

}  // namespace epicost
