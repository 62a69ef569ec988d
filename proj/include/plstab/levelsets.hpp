#pragma once

// Superlevel-set measures, symmetric decreasing rearrangement, truncated
// log-hypographs and the scalar inequalities built from them.

#include "plstab/errors.hpp"
#include "plstab/grid_function.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstdint>
#include <functional>
#include <numeric>
#include <random>
#include <utility>
#include <vector>

namespace plstab {

struct DistributionFunction {
    std::vector<double> thresholds;
    /// measures[k] = dx * #{cells with value >= thresholds[k]}.
    std::vector<double> measures;
};

[[nodiscard]] inline DistributionFunction distribution_function(const GridFunction& f, const std::vector<double>& thresholds) {
    for (std::size_t k = 0; k < thresholds.size(); ++k) {
        if (!(thresholds[k] > 0.0)) throw DomainError("thresholds must be positive");
        if (k > 0 && !(thresholds[k] > thresholds[k - 1])) throw DomainError("thresholds must be increasing");
    }
    std::vector<double> sorted(f.values().begin(), f.values().end());
    std::sort(sorted.begin(), sorted.end());
    DistributionFunction d{thresholds, {}};
    d.measures.reserve(thresholds.size());
    for (double t : thresholds) {
        const auto below = std::lower_bound(sorted.begin(), sorted.end(), t) - sorted.begin();
        d.measures.push_back(f.dx() * static_cast<double>(sorted.size() - static_cast<std::size_t>(below)));
    }
    return d;
}

/// Values sorted in decreasing order onto a grid centred at 0 with the same dx
/// and cell count. Cells are filled by increasing |centre|; on ties the right
/// cell comes first.
[[nodiscard]] inline GridFunction symmetric_rearrangement(const GridFunction& f) {
    const std::size_t n = f.size();
    std::vector<double> sorted(f.values().begin(), f.values().end());
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    const double half = 0.5 * static_cast<double>(n - 1);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double ca = std::abs(static_cast<double>(a) - half);
        const double cb = std::abs(static_cast<double>(b) - half);
        if (ca != cb) return ca < cb;
        return a > b;
    });
    std::vector<double> v(n);
    for (std::size_t k = 0; k < n; ++k) v[order[k]] = sorted[k];
    return GridFunction(-half * f.dx(), f.dx(), std::move(v));
}

/// Counts sampled (x, y) with h*(lambda x + (1-lambda) y) < f*(x)^lambda g*(y)^(1-lambda)
/// beyond 1e-6 of the common scale, after discounting the right side by the largest
/// one-cell log change of f and g inside their supports. x and y are drawn uniformly from the support
/// nodes of f* and g*; h* at an off-node point is the larger of its two neighbours.
[[nodiscard]] inline std::size_t check_rearranged_pl(const GridFunction& h, const GridFunction& f, const GridFunction& g,
                                                     double lambda, std::size_t samples, std::uint64_t seed = 1) {
    if (!(lambda > 0.0 && lambda < 1.0)) throw DomainError("lambda must lie in (0,1)");
    const GridFunction hs = symmetric_rearrangement(h);
    const GridFunction fs = symmetric_rearrangement(f);
    const GridFunction gs = symmetric_rearrangement(g);
    const auto bf = support_bounds(fs);
    const auto bg = support_bounds(gs);
    if (!bf || !bg) return 0;
    const double scale = std::max({sup_norm(hs), sup_norm(fs), sup_norm(gs)});
    const double tol = 1e-6 * scale;
    // A node-sampled h can miss the supremum between nodes by one cell of log-slope.
    auto cell_log_step = [](const GridFunction& u) {
        double m = 0.0;
        for (std::size_t i = 0; i + 1 < u.size(); ++i) {
            if (u[i] > kZeroThreshold && u[i + 1] > kZeroThreshold) m = std::max(m, std::abs(std::log(u[i + 1] / u[i])));
        }
        return m;
    };
    const double shrink = std::exp(-(lambda * cell_log_step(f) + (1.0 - lambda) * cell_log_step(g)));

    auto h_at = [&](double z) {
        const double u = (z - hs.x0()) / hs.dx();
        const double r = std::round(u);
        if (std::abs(u - r) < 1e-9) {
            if (r < 0 || r > static_cast<double>(hs.size() - 1)) return 0.0;
            return hs[static_cast<std::size_t>(r)];
        }
        const double fl = std::floor(u);
        double best = 0.0;
        for (double k : {fl, fl + 1.0}) {
            if (k >= 0 && k <= static_cast<double>(hs.size() - 1)) best = std::max(best, hs[static_cast<std::size_t>(k)]);
        }
        return best;
    };

    std::mt19937_64 gen(seed);
    std::uniform_int_distribution<std::size_t> pick_f(bf->first, bf->second);
    std::uniform_int_distribution<std::size_t> pick_g(bg->first, bg->second);
    std::size_t violations = 0;
    for (std::size_t s = 0; s < samples; ++s) {
        const std::size_t i = pick_f(gen);
        const std::size_t j = pick_g(gen);
        const double z = lambda * fs.x(i) + (1.0 - lambda) * gs.x(j);
        const double rhs = std::pow(fs[i], lambda) * std::pow(gs[j], 1.0 - lambda);
        if (h_at(z) < shrink * rhs - tol) ++violations;
    }
    return violations;
}

struct HypographArea {
    double theta;
    double epsilon;
    double area;
};

/// Area of {(x, s) : theta log eps < s < log f(x)}.
[[nodiscard]] inline HypographArea hypograph_area(const GridFunction& f, double theta, double epsilon) {
    if (!(theta > 0.0)) throw DomainError("theta must be positive");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("epsilon must lie in (0,1)");
    const double floor_log = theta * std::log(epsilon);
    const double level = std::exp(floor_log);
    if (!(level < sup_norm(f))) throw DomainError("empty hypograph");
    double area = 0.0;
    for (double v : f.values()) {
        if (v > level) area += std::log(v) - floor_log;
    }
    return {theta, epsilon, f.dx() * area};
}

/// H2(S_h) - (lambda sqrt H2(S_f) + (1-lambda) sqrt H2(S_g))^2.
[[nodiscard]] inline double bm_two_term_gap(const GridFunction& f, const GridFunction& g, const GridFunction& h,
                                            double lambda, double theta, double epsilon) {
    const double af = hypograph_area(f, theta, epsilon).area;
    const double ag = hypograph_area(g, theta, epsilon).area;
    const double ah = hypograph_area(h, theta, epsilon).area;
    const double mix = lambda * std::sqrt(af) + (1.0 - lambda) * std::sqrt(ag);
    return ah - mix * mix;
}

struct LemmaSides {
    double lhs;
    double rhs;
};

/// lhs = x - (lambda sqrt y + (1-lambda) sqrt z)^2,
/// rhs = |x - (lambda y + (1-lambda) z)| + tau |sqrt y - sqrt z|^2.
/// lhs is evaluated as (x - m) + lambda(1-lambda)(sqrt y - sqrt z)^2, which is the
/// same number without the cancellation in the squared mean.
[[nodiscard]] inline LemmaSides numerical_lemma_gap(double x, double y, double z, double lambda) {
    if (!(x > 0.0 && y > 0.0 && z > 0.0)) throw DomainError("x, y, z must be positive");
    if (!(lambda > 0.0 && lambda < 1.0)) throw DomainError("lambda must lie in (0,1)");
    const double mean = lambda * std::sqrt(y) + (1.0 - lambda) * std::sqrt(z);
    // A few ulps of slack: x = y = z must be admissible.
    if (x < mean * mean * (1.0 - 8.0 * std::numeric_limits<double>::epsilon())) {
        throw DomainError("x below the squared mean");
    }
    const double tau = std::min(lambda, 1.0 - lambda);
    const double d = std::sqrt(y) - std::sqrt(z);
    const double d2 = d * d;
    const double e = x - (lambda * y + (1.0 - lambda) * z);
    return {e + (lambda * (1.0 - lambda)) * d2, std::abs(e) + tau * d2};
}

/// int_0^t_max |H1{u >= t} - H1{v >= t}| dt, exact for cell data.
[[nodiscard]] inline double distribution_gap(const GridFunction& u, const GridFunction& v, double t_max) {
    std::vector<double> su(u.values().begin(), u.values().end());
    std::vector<double> sv(v.values().begin(), v.values().end());
    std::sort(su.begin(), su.end());
    std::sort(sv.begin(), sv.end());
    std::vector<double> cuts{0.0, t_max};
    for (double a : su) {
        if (a > 0.0 && a < t_max) cuts.push_back(a);
    }
    for (double a : sv) {
        if (a > 0.0 && a < t_max) cuts.push_back(a);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    auto measure_above = [](const std::vector<double>& s, double dx, double b) {
        const auto k = std::lower_bound(s.begin(), s.end(), b) - s.begin();
        return dx * static_cast<double>(s.size() - static_cast<std::size_t>(k));
    };
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        const double b = cuts[k + 1];
        // On (a, b] the superlevel sets are constant and equal to {value >= b}.
        total += (b - cuts[k]) * std::abs(measure_above(su, u.dx(), b) - measure_above(sv, v.dx(), b));
    }
    return total;
}

/// Continuous piecewise-linear function through (xs[k], ys[k]), extended by its
/// end slopes.
struct PiecewiseLinear {
    std::vector<double> xs;
    std::vector<double> ys;

    [[nodiscard]] std::size_t segment(double x) const {
        const auto it = std::upper_bound(xs.begin(), xs.end(), x);
        const auto k = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - xs.begin() - 1, 0));
        return std::min(k, xs.size() - 2);
    }
    [[nodiscard]] double slope(double x) const {
        const std::size_t k = segment(x);
        return (ys[k + 1] - ys[k]) / (xs[k + 1] - xs[k]);
    }
    [[nodiscard]] double operator()(double x) const {
        const std::size_t k = segment(x);
        return ys[k] + slope(x) * (x - xs[k]);
    }
    [[nodiscard]] double lipschitz() const {
        double l = 0.0;
        for (std::size_t k = 0; k + 1 < xs.size(); ++k) l = std::max(l, std::abs((ys[k + 1] - ys[k]) / (xs[k + 1] - xs[k])));
        return l;
    }
};

struct TraceSides {
    double lhs;
    double rhs;
};

/// f must increase up to 0 and decrease after it.
/// lhs = sum |Phi(b)| |jump of f at b| over cell boundaries b (the grid is padded
/// with zeros), rhs = dx sum f |Phi'|.
[[nodiscard]] inline TraceSides trace_inequality_check(const GridFunction& f, const PiecewiseLinear& phi) {
    if (phi.xs.size() < 2 || phi.xs.size() != phi.ys.size()) throw DomainError("Phi needs at least two knots");
    for (std::size_t k = 1; k < phi.xs.size(); ++k) {
        if (!(phi.xs[k] > phi.xs[k - 1])) throw DomainError("Phi knots must increase");
    }
    if (std::abs(phi(0.0)) > 1e-12 * (1.0 + phi.lipschitz())) throw DomainError("Phi(0) must vanish");
    const std::size_t n = f.size();
    // Nondecreasing left of 0 and nonincreasing right of it.
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const bool rising = f[i + 1] > f[i];
        const bool falling = f[i + 1] < f[i];
        const double eps = 1e-9 * f.dx();
        if ((rising && f.x(i + 1) > eps) || (falling && f.x(i) < -eps)) {
            throw PreconditionError("f is not unimodal about 0", {i + 1});
        }
    }
    double lhs = 0.0;
    double rhs = 0.0;
    for (std::size_t b = 0; b <= n; ++b) {
        const double left = b == 0 ? 0.0 : f[b - 1];
        const double right = b == n ? 0.0 : f[b];
        const double at = f.x0() + (static_cast<double>(b) - 0.5) * f.dx();
        lhs += std::abs(phi(at)) * std::abs(right - left);
    }
    for (std::size_t i = 0; i < n; ++i) rhs += f[i] * std::abs(phi.slope(f.x(i)));
    return {lhs, f.dx() * rhs};
}

}  // namespace plstab
