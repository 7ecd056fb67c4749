#include "epicost/degree_dist.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "epicost/prng.hpp"

namespace epicost {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// ---- Gauss-Legendre nodes -------------------------------------------------

struct GaussRule {
    std::array<double, 16> x;  // nodes on (-1, 1)
    std::array<double, 16> w;
};

GaussRule make_rule16() {
    GaussRule r{};
    const int n = 16;
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            // Legendre P_n(x) by recurrence, Newton step on its root
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        r.x[i] = -x;
        r.x[n - 1 - i] = x;
        r.w[i] = 2.0 / ((1.0 - x * x) * pp * pp);
        r.w[n - 1 - i] = r.w[i];
    }
    return r;
}

const GaussRule& rule16() {
    static const GaussRule r = make_rule16();
    return r;
}

// ---- truncated moments ----------------------------------------------------

// E[w] and E[w^2] of the named density restricted to [a, b] and renormalized.
Moments exponential_truncated_moments(double rate, double a, double b) {
    const double ea = std::exp(-rate * a);
    const double eb = std::isfinite(b) ? std::exp(-rate * b) : 0.0;
    const double z = ea - eb;
    const double inv = 1.0 / rate;
    double m1 = (a + inv) * ea;
    double m2 = (a * a + 2.0 * a * inv + 2.0 * inv * inv) * ea;
    if (std::isfinite(b)) {
        m1 -= (b + inv) * eb;
        m2 -= (b * b + 2.0 * b * inv + 2.0 * inv * inv) * eb;
    }
    return {m1 / z, m2 / z};
}

Moments pareto_truncated_moments(double shape, double scale, double a, double b) {
    // density shape*scale^shape * w^(-shape-1) on [a, b], a >= scale
    const double za = std::pow(scale / a, shape);
    const double zb = std::isfinite(b) ? std::pow(scale / b, shape) : 0.0;
    const double z = za - zb;
    auto power_int = [&](double k) -> double {
        // integral of w^k * shape*scale^shape*w^(-shape-1) over [a, b]
        const double e = k - shape;
        if (std::abs(e) < 1e-12) {
            if (!std::isfinite(b)) return kInf;
            return shape * std::pow(scale, shape) * std::log(b / a);
        }
        const double ta = std::pow(a, e);
        const double tb = std::isfinite(b) ? std::pow(b, e) : (e < 0.0 ? 0.0 : kInf);
        if (!std::isfinite(tb)) return kInf;
        return shape * std::pow(scale, shape) * (tb - ta) / e;
    };
    return {power_int(1.0) / z, power_int(2.0) / z};
}

Moments empirical_moments(const std::vector<double>& xs) {
    double m1 = 0.0, m2 = 0.0;
    for (double x : xs) {
        m1 += x;
        m2 += x * x;
    }
    const double n = static_cast<double>(xs.size());
    return {m1 / n, m2 / n};
}

std::vector<double> load_empirical(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("empirical weights: cannot open " + path);
    std::vector<double> xs;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t start = line.find_first_not_of(" \t\r");
        if (start == std::string::npos || line[start] == '#') continue;
        char* end = nullptr;
        const double v = std::strtod(line.c_str() + start, &end);
        bool trailing = false;
        for (const char* c = end; *c; ++c)
            if (*c != ' ' && *c != '\t' && *c != '\r') trailing = true;
        if (end == line.c_str() + start || trailing || !(v > 0.0))
            throw parse_error(path + ":" + std::to_string(lineno) +
                              ": expected one positive real per line");
        xs.push_back(v);
    }
    if (xs.empty()) throw parse_error(path + ": no weights found");
    return xs;
}

}  // namespace

// ---- DistributionSpec -----------------------------------------------------

DistributionSpec::DistributionSpec(Kind kind) : kind_(std::move(kind)) {
    std::visit(
        [](const auto& k) {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, PointMass>) {
                if (!(k.w0 > 0.0)) throw std::invalid_argument("pointmass: w0 must be > 0");
            } else if constexpr (std::is_same_v<T, Exponential>) {
                if (!(k.rate > 0.0)) throw std::invalid_argument("exponential: rate must be > 0");
            } else if constexpr (std::is_same_v<T, Pareto>) {
                if (!(k.shape > 0.0)) throw std::invalid_argument("pareto: shape must be > 0");
                if (!(k.scale > 0.0)) throw std::invalid_argument("pareto: scale must be > 0");
            } else {
                if (k.weights.empty()) throw std::invalid_argument("empirical: no weights");
                for (double w : k.weights)
                    if (!(w > 0.0)) throw std::invalid_argument("empirical: weights must be > 0");
            }
        },
        kind_);
}

DistributionSpec DistributionSpec::parse(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos)
        throw parse_error("distribution: expected kind:params, got '" + text + "'");
    const std::string name = text.substr(0, colon);
    const std::string rest = text.substr(colon + 1);
    auto to_double = [&](const std::string& s) {
        char* end = nullptr;
        double v = std::strtod(s.c_str(), &end);
        if (end != s.c_str() + s.size())
            throw parse_error("distribution: bad number '" + s + "' in '" + text + "'");
        return v;
    };
    if (name == "pointmass") return DistributionSpec(PointMass{to_double(rest)});
    if (name == "exponential") return DistributionSpec(Exponential{to_double(rest)});
    if (name == "pareto") {
        const auto c2 = rest.find(':');
        if (c2 == std::string::npos) return DistributionSpec(Pareto{to_double(rest)});
        return DistributionSpec(
            Pareto{to_double(rest.substr(0, c2)), to_double(rest.substr(c2 + 1))});
    }
    if (name == "empirical") return DistributionSpec(Empirical{load_empirical(rest)});
    throw parse_error("distribution: unknown kind '" + name + "'");
}

DistributionSpec DistributionSpec::truncate_above(double cut) const {
    if (!(cut > 0.0)) throw std::invalid_argument("truncate_above: cut must be > 0");
    return std::visit(
        [&](const auto& k) -> DistributionSpec {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, PointMass>) {
                if (cut < k.w0)
                    throw std::domain_error("truncate_above: cut below point mass");
                return *this;
            } else if constexpr (std::is_same_v<T, Empirical>) {
                std::vector<double> kept;
                for (double w : k.weights)
                    if (w <= cut) kept.push_back(w);
                if (kept.empty())
                    throw std::domain_error("truncate_above: cut removes all weights");
                return DistributionSpec(Empirical{std::move(kept)});
            } else {
                if (base_cdf(cut) <= 0.0)
                    throw std::domain_error("truncate_above: cut below support");
                DistributionSpec d(kind_);
                d.upper_cut_ = has_upper_cut() ? std::min(cut, *upper_cut_) : cut;
                return d;
            }
        },
        kind_);
}

double DistributionSpec::base_cdf(double w) const {
    return std::visit(
        [&](const auto& k) -> double {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, PointMass>) {
                return w >= k.w0 ? 1.0 : 0.0;
            } else if constexpr (std::is_same_v<T, Exponential>) {
                return w <= 0.0 ? 0.0 : -std::expm1(-k.rate * w);
            } else if constexpr (std::is_same_v<T, Pareto>) {
                return w <= k.scale ? 0.0 : 1.0 - std::pow(k.scale / w, k.shape);
            } else {
                std::size_t c = 0;
                for (double x : k.weights)
                    if (x <= w) ++c;
                return static_cast<double>(c) / static_cast<double>(k.weights.size());
            }
        },
        kind_);
}

double DistributionSpec::base_quantile(double q) const {
    return std::visit(
        [&](const auto& k) -> double {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, PointMass>) {
                return k.w0;
            } else if constexpr (std::is_same_v<T, Exponential>) {
                return -std::log1p(-q) / k.rate;
            } else if constexpr (std::is_same_v<T, Pareto>) {
                return k.scale * std::pow(1.0 - q, -1.0 / k.shape);
            } else {
                std::vector<double> sorted = k.weights;
                std::sort(sorted.begin(), sorted.end());
                auto idx = static_cast<std::size_t>(q * static_cast<double>(sorted.size()));
                return sorted[std::min(idx, sorted.size() - 1)];
            }
        },
        kind_);
}

double DistributionSpec::cdf(double w) const {
    if (!has_upper_cut()) return base_cdf(w);
    return std::min(1.0, base_cdf(std::min(w, *upper_cut_)) / base_cdf(*upper_cut_));
}

double DistributionSpec::quantile(double q) const {
    if (!(q >= 0.0 && q < 1.0)) throw std::invalid_argument("quantile: q must be in [0,1)");
    if (!has_upper_cut()) return base_quantile(q);
    return base_quantile(q * base_cdf(*upper_cut_));
}

double DistributionSpec::support_min() const {
    return std::visit(
        [](const auto& k) -> double {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, PointMass>) return k.w0;
            else if constexpr (std::is_same_v<T, Exponential>) return 0.0;
            else if constexpr (std::is_same_v<T, Pareto>) return k.scale;
            else return *std::min_element(k.weights.begin(), k.weights.end());
        },
        kind_);
}

double DistributionSpec::support_max() const {
    if (has_upper_cut()) return *upper_cut_;
    return std::visit(
        [](const auto& k) -> double {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, PointMass>) return k.w0;
            else if constexpr (std::is_same_v<T, Empirical>)
                return *std::max_element(k.weights.begin(), k.weights.end());
            else return kInf;
        },
        kind_);
}

Moments DistributionSpec::moments() const {
    const double hi = support_max();
    return std::visit(
        [&](const auto& k) -> Moments {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, PointMass>) {
                return {k.w0, k.w0 * k.w0};
            } else if constexpr (std::is_same_v<T, Exponential>) {
                if (!std::isfinite(hi)) return {1.0 / k.rate, 2.0 / (k.rate * k.rate)};
                return exponential_truncated_moments(k.rate, 0.0, hi);
            } else if constexpr (std::is_same_v<T, Pareto>) {
                if (!std::isfinite(hi)) {
                    const double mean =
                        k.shape > 1.0 ? k.shape * k.scale / (k.shape - 1.0) : kInf;
                    const double second =
                        k.shape > 2.0 ? k.shape * k.scale * k.scale / (k.shape - 2.0) : kInf;
                    return {mean, second};
                }
                return pareto_truncated_moments(k.shape, k.scale, k.scale, hi);
            } else {
                return empirical_moments(k.weights);
            }
        },
        kind_);
}

std::string DistributionSpec::text() const {
    std::ostringstream os;
    std::visit(
        [&](const auto& k) {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, PointMass>) os << "pointmass:" << k.w0;
            else if constexpr (std::is_same_v<T, Exponential>) os << "exponential:" << k.rate;
            else if constexpr (std::is_same_v<T, Pareto>) os << "pareto:" << k.shape << ":" << k.scale;
            else os << "empirical(m=" << k.weights.size() << ")";
        },
        kind_);
    if (has_upper_cut()) os << "|cut=" << *upper_cut_;
    return os.str();
}

Eigen::VectorXd sample_weights(const DistributionSpec& dist, Eigen::Index n,
                               std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("sample_weights: n must be >= 1");
    Eigen::VectorXd w(n);
    if (const auto* pm = std::get_if<PointMass>(&dist.kind()); pm && !dist.has_upper_cut()) {
        w.setConstant(pm->w0);
        return w;
    }
    Rng rng(seed);
    if (const auto* em = std::get_if<Empirical>(&dist.kind())) {
        for (Eigen::Index i = 0; i < n; ++i)
            w[i] = em->weights[rng.uniform_index(em->weights.size())];
        return w;
    }
    for (Eigen::Index i = 0; i < n; ++i) w[i] = dist.quantile(rng.uniform());
    return w;
}

// ---- ScaledDistribution ---------------------------------------------------

ScaledDistribution::ScaledDistribution(DistributionSpec base, double scale)
    : base_(std::move(base)), scale_(scale) {
    if (!(scale > 0.0)) throw std::invalid_argument("ScaledDistribution: scale must be > 0");
    const double q = kTruncationQuantile;
    double w_lo = base_.support_min();
    double w_hi = base_.support_max();
    double lost = 0.0;
    if (w_lo <= 0.0) {
        w_lo = base_.quantile(q);
        lost += q;
    }
    if (!std::isfinite(w_hi)) {
        w_hi = base_.quantile(1.0 - q);
        lost += q;
    }
    truncation_mass_ = lost;
    retained_ = 1.0 - lost;
    v_min_ = scale_ * w_lo;
    v_max_ = scale_ * w_hi;
    if (const auto* em = std::get_if<Empirical>(&base_.kind())) {
        atoms_.reserve(em->weights.size());
        for (double w : em->weights) atoms_.push_back(scale_ * w);
    }
}

bool ScaledDistribution::is_point_mass() const {
    return std::holds_alternative<PointMass>(base_.kind());
}

bool ScaledDistribution::is_empirical() const {
    return std::holds_alternative<Empirical>(base_.kind());
}

double ScaledDistribution::pdf(double v) const {
    if (v < v_min_ || v > v_max_) return 0.0;
    const double w = v / scale_;
    return std::visit(
        [&](const auto& k) -> double {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, Exponential>) {
                double d = k.rate * std::exp(-k.rate * w);
                if (base_.has_upper_cut()) d /= 1.0 - std::exp(-k.rate * base_.upper_cut());
                return d / retained_ / scale_;
            } else if constexpr (std::is_same_v<T, Pareto>) {
                double d = k.shape * std::pow(k.scale, k.shape) * std::pow(w, -k.shape - 1.0);
                if (base_.has_upper_cut())
                    d /= 1.0 - std::pow(k.scale / base_.upper_cut(), k.shape);
                return d / retained_ / scale_;
            } else {
                throw std::logic_error("pdf: discrete distribution has no density");
            }
        },
        base_.kind());
}

Moments ScaledDistribution::moments() const {
    const double a = v_min_ / scale_;
    const double b = v_max_ / scale_;
    Moments m = std::visit(
        [&](const auto& k) -> Moments {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, PointMass>) {
                return {k.w0, k.w0 * k.w0};
            } else if constexpr (std::is_same_v<T, Exponential>) {
                return exponential_truncated_moments(k.rate, a, b);
            } else if constexpr (std::is_same_v<T, Pareto>) {
                return pareto_truncated_moments(k.shape, k.scale, a, b);
            } else {
                return empirical_moments(k.weights);
            }
        },
        base_.kind());
    return {scale_ * m.mean, scale_ * scale_ * m.second_moment};
}

double integrate(const ScaledDistribution& dist,
                 const std::function<double(double)>& f, double tol) {
    if (dist.is_point_mass()) {
        const double v = dist.v_min();
        const double y = f(v);
        if (!std::isfinite(y)) throw quadrature_error("integrate: integrand not finite at point mass");
        return y;
    }
    if (dist.is_empirical()) {
        double acc = 0.0;
        for (double v : dist.atoms()) {
            const double y = f(v);
            if (!std::isfinite(y)) throw quadrature_error("integrate: integrand not finite at atom");
            acc += y;
        }
        return acc / static_cast<double>(dist.atoms().size());
    }
    const auto& rule = rule16();
    const double a = dist.v_min(), b = dist.v_max();
    auto composite = [&](int panels) {
        const double h = (b - a) / panels;
        double acc = 0.0;
        for (int p = 0; p < panels; ++p) {
            const double mid = a + (p + 0.5) * h;
            double local = 0.0;
            for (int k = 0; k < 16; ++k) {
                const double v = mid + 0.5 * h * rule.x[k];
                const double y = f(v) * dist.pdf(v);
                if (!std::isfinite(y))
                    throw quadrature_error("integrate: integrand not finite inside support");
                local += rule.w[k] * y;
            }
            acc += 0.5 * h * local;
        }
        return acc;
    };
    double prev = composite(8);
    for (int panels = 16; panels <= (1 << 15); panels *= 2) {
        const double cur = composite(panels);
        if (std::abs(cur - prev) < tol) return cur;
        prev = cur;
    }
    throw quadrature_error("integrate: panel refinement did not converge to tolerance");
}

}  // namespace epicost
