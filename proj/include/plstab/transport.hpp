#pragma once

// Monotone (quantile) transport between 1-D grid densities.
//
// Densities are read as piecewise constant on their cells, so the CDF is
// piecewise linear and the quantile function is its exact generalized inverse.
// T(x) = Q_g(F_f(x)) and T'(x) = f(x) / g(T(x)) with both densities normalized.

#include "plstab/errors.hpp"
#include "plstab/grid_function.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

namespace plstab {

inline constexpr double kInfiniteSlope = std::numeric_limits<double>::infinity();

class Cdf {
public:
    explicit Cdf(const GridFunction& f) : x0_(f.x0()), dx_(f.dx()), bounds_(f.size() + 1, 0.0), weight_(f.size()) {
        const double m = mass(f);
        if (!(m > 0.0)) throw DomainError("zero mass");
        for (std::size_t i = 0; i < f.size(); ++i) bounds_[i + 1] = bounds_[i] + f[i];
        const double total = bounds_.back();
        for (double& b : bounds_) b /= total;
        for (std::size_t i = 0; i < f.size(); ++i) weight_[i] = bounds_[i + 1] - bounds_[i];
    }

    /// F at an arbitrary point; linear inside each cell.
    [[nodiscard]] double operator()(double x) const noexcept {
        const double u = (x - x0_) / dx_ + 0.5;
        if (u <= 0.0) return 0.0;
        const auto n = static_cast<double>(weight_.size());
        if (u >= n) return 1.0;
        const auto k = static_cast<std::size_t>(u);
        return bounds_[k] + (u - static_cast<double>(k)) * weight_[k];
    }

    /// F at node i (the centre of cell i).
    [[nodiscard]] double at_node(std::size_t i) const noexcept { return bounds_[i] + 0.5 * weight_[i]; }

    struct Located {
        double x;
        std::size_t cell;
    };

    /// Generalized inverse inf{x : F(x) >= p}, together with the cell holding it.
    [[nodiscard]] Located locate(double p) const {
        if (!(p >= 0.0 && p <= 1.0)) throw DomainError("quantile level outside [0,1]");
        auto it = std::lower_bound(bounds_.begin() + 1, bounds_.end(), p);
        auto k = static_cast<std::size_t>(it - bounds_.begin()) - 1;
        if (k >= weight_.size()) k = weight_.size() - 1;
        while (k + 1 < weight_.size() && weight_[k] <= 0.0) ++k;
        const double frac = weight_[k] > 0.0 ? std::clamp((p - bounds_[k]) / weight_[k], 0.0, 1.0) : 0.0;
        return {x0_ + (static_cast<double>(k) - 0.5 + frac) * dx_, k};
    }

    [[nodiscard]] double quantile(double p) const { return locate(p).x; }

    /// CDF sampled at the nodes.
    [[nodiscard]] std::vector<double> samples() const {
        std::vector<double> s(weight_.size());
        for (std::size_t i = 0; i < s.size(); ++i) s[i] = at_node(i);
        return s;
    }

    /// Normalized cell masses.
    [[nodiscard]] const std::vector<double>& weights() const noexcept { return weight_; }
    [[nodiscard]] double dx() const noexcept { return dx_; }

private:
    double x0_;
    double dx_;
    std::vector<double> bounds_;
    std::vector<double> weight_;
};

[[nodiscard]] inline Cdf cdf(const GridFunction& f) { return Cdf(f); }
[[nodiscard]] inline double quantile(const Cdf& F, double p) { return F.quantile(p); }

/// Sampled nondecreasing map. x[k] is node `first_index + k` of the source grid.
struct MonotoneMap {
    std::vector<double> x;
    std::vector<double> T;
    std::vector<double> Tprime;
    std::size_t first_index = 0;
    /// Normalized source mass on cells whose target density vanishes (T' = +inf).
    double excluded_mass = 0.0;

    [[nodiscard]] std::size_t size() const noexcept { return x.size(); }

    /// Linear interpolation of T between samples, clamped at the ends.
    [[nodiscard]] double operator()(double at) const noexcept {
        if (x.empty()) return at;
        if (at <= x.front()) return T.front();
        if (at >= x.back()) return T.back();
        const double dx = x.size() > 1 ? x[1] - x[0] : 1.0;
        const auto k = std::min(static_cast<std::size_t>((at - x.front()) / dx), x.size() - 2);
        const double s = (at - x[k]) / dx;
        return T[k] + s * (T[k + 1] - T[k]);
    }
};

/// Quantile coupling of f onto g over the support of f.
[[nodiscard]] inline MonotoneMap monotone_transport(const GridFunction& f, const GridFunction& g) {
    const Cdf F(f);
    const Cdf G(g);
    const auto bounds = support_bounds(f);
    MonotoneMap m;
    if (!bounds) return m;
    const auto [lo, hi] = *bounds;
    const auto& fw = F.weights();
    const auto& gw = G.weights();
    m.first_index = lo;
    m.x.reserve(hi - lo + 1);
    m.T.reserve(hi - lo + 1);
    m.Tprime.reserve(hi - lo + 1);
    for (std::size_t i = lo; i <= hi; ++i) {
        const auto [t, cell] = G.locate(F.at_node(i));
        m.x.push_back(f.x(i));
        m.T.push_back(t);
        // Ratio of normalized densities; the common dx cancels only when the
        // grids share a spacing, so keep it explicit.
        const double fi = fw[i] / f.dx();
        const double gi = gw[cell] / g.dx();
        if (fi <= 0.0) {
            m.Tprime.push_back(0.0);
        } else if (gi <= 0.0) {
            m.Tprime.push_back(kInfiniteSlope);
            m.excluded_mass += fw[i];
        } else {
            m.Tprime.push_back(fi / gi);
        }
    }
    return m;
}

/// The inverse coupling S of g onto f; S(T(x)) = x up to grid resolution.
[[nodiscard]] inline MonotoneMap inverse_map(const GridFunction& f, const GridFunction& g) {
    return monotone_transport(g, f);
}

/// Finite-difference slope of T, for cross-checking the Jacobian-based T'.
[[nodiscard]] inline std::vector<double> finite_difference_slope(const MonotoneMap& m) {
    std::vector<double> d(m.size(), 0.0);
    if (m.size() < 2) return d;
    for (std::size_t k = 0; k < m.size(); ++k) {
        const std::size_t a = k == 0 ? 0 : k - 1;
        const std::size_t b = k + 1 == m.size() ? k : k + 1;
        d[k] = (m.T[b] - m.T[a]) / (m.x[b] - m.x[a]);
    }
    return d;
}

struct TransportDeficit {
    double value = 0.0;
    /// Normalized f-mass skipped because T' was infinite there.
    double excluded_mass = 0.0;

    [[nodiscard]] bool flagged() const noexcept { return excluded_mass > 0.0; }
};

/// tau * int f (1 - sqrt T')^2 / T'^(1-lambda), f and g normalized internally.
[[nodiscard]] inline TransportDeficit transport_deficit(const GridFunction& f, const GridFunction& g, double lambda) {
    if (!(lambda > 0.0 && lambda < 1.0)) throw DomainError("lambda must lie in (0,1)");
    const double tau = std::min(lambda, 1.0 - lambda);
    const MonotoneMap m = monotone_transport(f, g);
    const double fm = mass(f);
    double sum = 0.0;
    for (std::size_t k = 0; k < m.size(); ++k) {
        const double tp = m.Tprime[k];
        if (!(tp > 0.0) || std::isinf(tp)) continue;
        const double r = 1.0 - std::sqrt(tp);
        sum += f[m.first_index + k] * r * r / std::pow(tp, 1.0 - lambda);
    }
    return {tau * f.dx() * sum / fm, m.excluded_mass};
}

/// int f (1 - sqrt T')^2 / (2 sqrt T'); equal to transport_deficit at lambda = 1/2.
[[nodiscard]] inline TransportDeficit midpoint_deficit(const GridFunction& f, const GridFunction& g) {
    const MonotoneMap m = monotone_transport(f, g);
    const double fm = mass(f);
    double sum = 0.0;
    for (std::size_t k = 0; k < m.size(); ++k) {
        const double tp = m.Tprime[k];
        if (!(tp > 0.0) || std::isinf(tp)) continue;
        const double s = std::sqrt(tp);
        sum += f[m.first_index + k] * (1.0 - s) * (1.0 - s) / (2.0 * s);
    }
    return {f.dx() * sum / fm, m.excluded_mass};
}

/// Measure of {f > eta} on which T' leaves [lo, hi].
[[nodiscard]] inline double bad_set_measure(const GridFunction& f, const MonotoneMap& m, double eta, double lo = 0.1,
                                            double hi = 10.0) {
    if (!(eta > 0.0)) throw DomainError("eta must be positive");
    std::size_t count = 0;
    for (std::size_t k = 0; k < m.size(); ++k) {
        const double tp = m.Tprime[k];
        if (f[m.first_index + k] > eta && (tp > hi || tp < lo)) ++count;
    }
    return f.dx() * static_cast<double>(count);
}

/// Points cutting mass `level` off each tail of the normalized f.
[[nodiscard]] inline std::pair<double, double> tail_cut_points(const GridFunction& f, double level) {
    if (!(level > 0.0 && level < 0.5)) throw DomainError("tail mass level must lie in (0, 1/2)");
    const Cdf F(f);
    return {F.quantile(level), F.quantile(1.0 - level)};
}

}  // namespace plstab
