#pragma once

// Distances to the extremal family, the counterexample family and exponent fits.
//
// Extremal triples have the form
//   f = a^{-(1-lambda)} h(x + (1-lambda) x0),  g = a^{lambda} h(x - lambda x0),
// for log-concave h, and stability_distance reports distances to that family.

#include "plstab/concavity.hpp"
#include "plstab/errors.hpp"
#include "plstab/grid_function.hpp"
#include "plstab/logconcave.hpp"
#include "plstab/radial.hpp"
#include "plstab/supconvolution.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

namespace plstab {

struct Alignment {
    double distance = 0.0;
    double shift = 0.0;
    double scale = 1.0;
};

namespace detail {

/// dx sum |u(x_k) - a v(x_k - s)| over nodes of a grid phased with u that
/// covers both supports.
class AlignmentObjective {
public:
    AlignmentObjective(const GridFunction& u, const GridFunction& v) : u_(u), v_(v), dx_(std::min(u.dx(), v.dx())) {
        const auto bu = support_bounds(u);
        const auto bv = support_bounds(v);
        if (!bu || !bv) throw DomainError("zero mass");
        // value_at is positive up to the neighbouring node, so widen by one cell.
        ua_ = u.x(bu->first) - u.dx();
        ub_ = u.x(bu->second) + u.dx();
        va_ = v.x(bv->first) - v.dx();
        vb_ = v.x(bv->second) + v.dx();
    }

    [[nodiscard]] double operator()(double s, double a) const {
        const double lo = std::min(ua_, va_ + s);
        const double hi = std::max(ub_, vb_ + s);
        const auto k0 = static_cast<long long>(std::floor((lo - u_.x0()) / dx_));
        const auto k1 = static_cast<long long>(std::ceil((hi - u_.x0()) / dx_));
        double sum = 0.0;
        for (long long k = k0; k <= k1; ++k) {
            const double x = u_.x0() + dx_ * static_cast<double>(k);
            sum += std::abs(u_.value_at(x) - a * v_.value_at(x - s));
        }
        return dx_ * sum;
    }

    [[nodiscard]] double dx() const noexcept { return dx_; }
    [[nodiscard]] double shift_lo() const noexcept { return ua_ - vb_; }
    [[nodiscard]] double shift_hi() const noexcept { return ub_ - va_; }

private:
    const GridFunction& u_;
    const GridFunction& v_;
    double dx_;
    double ua_, ub_, va_, vb_;
};

template <typename Fn>
std::pair<double, double> golden_min(Fn&& fn, double a, double b, int iterations = 80) {
    auto [x, v] = golden_max([&](double s) { return -fn(s); }, a, b, iterations);
    return {x, -v};
}

}  // namespace detail

/// Minimizes int |u(x) - a v(x - s)| over the shift s (and a when optimize_scale).
/// Coarse search at 4 dx over all overlapping shifts, then golden-section
/// refinement; with scale, shift and scale are refined alternately.
[[nodiscard]] inline Alignment aligned_l1_distance(const GridFunction& u, const GridFunction& v, bool optimize_scale) {
    const detail::AlignmentObjective D(u, v);
    const double ratio = mass(u) / mass(v);
    double a = optimize_scale ? ratio : 1.0;
    const double step = 4.0 * D.dx();

    double s = 0.0;
    double best = D(0.0, a);
    const auto k0 = static_cast<long long>(std::ceil(D.shift_lo() / step));
    const auto k1 = static_cast<long long>(std::floor(D.shift_hi() / step));
    for (long long k = k0; k <= k1; ++k) {
        const double c = step * static_cast<double>(k);
        const double val = D(c, a);
        if (val < best) {
            best = val;
            s = c;
        }
    }

    auto refine_shift = [&](double half_width) {
        const auto [sr, vr] = detail::golden_min([&](double x) { return D(x, a); }, s - half_width, s + half_width);
        if (vr < best) {
            best = vr;
            s = sr;
        }
    };
    refine_shift(step);
    if (optimize_scale) {
        for (int round = 0; round < 6; ++round) {
            const auto [ar, vr] = detail::golden_min([&](double x) { return D(s, x); }, 0.5 * ratio, 2.0 * ratio);
            if (vr < best) {
                best = vr;
                a = ar;
            }
            refine_shift(round == 0 ? step : D.dx());
        }
    }
    return {best, s, a};
}

struct StabilityReport {
    double lambda = 0.5;
    double tau = 0.5;
    double epsilon = 0.0;
    double distance_f = 0.0;
    double distance_g = 0.0;
    double distance_h = 0.0;
    double shift = 0.0;  // x0
    double scale = 1.0;  // a
    std::optional<GridFunction> witness;
};

/// Distances of the normalized triple to the extremal family generated by the
/// witness h~, an aligned copy of the 1/2 sup-convolution of the normalized
/// (hulled where needed) pair. (a, x0) come from the f-distance and are reused
/// for g.
[[nodiscard]] inline StabilityReport stability_distance(const GridFunction& f, const GridFunction& g, const GridFunction& h,
                                                        double lambda) {
    if (!(lambda > 0.0 && lambda < 1.0)) throw DomainError("lambda must lie in (0,1)");
    const double mf = mass(f);
    const double mg = mass(g);
    if (!(mf > 0.0) || !(mg > 0.0) || !(mass(h) > 0.0)) throw DomainError("zero mass");
    StabilityReport r;
    r.lambda = lambda;
    r.tau = std::min(lambda, 1.0 - lambda);
    r.epsilon = pl_deficit(h, f, g, lambda);

    const GridFunction fn = normalize(f);
    const GridFunction gn = normalize(g);
    const GridFunction hn = scale_amplitude(h, 1.0 / (std::pow(mf, lambda) * std::pow(mg, 1.0 - lambda)));
    const GridFunction fw = is_log_concave(fn) ? fn : normalize(log_concave_hull(fn).hull);
    const GridFunction gw = is_log_concave(gn) ? gn : normalize(log_concave_hull(gn).hull);

    const GridFunction w = sup_convolution(fw, gw, 0.5).h;
    const Alignment ah = aligned_l1_distance(hn, w, true);
    GridFunction witness = translate(scale_amplitude(w, ah.scale), ah.shift);
    r.distance_h = ah.distance;

    const Alignment af = aligned_l1_distance(fn, witness, true);
    r.distance_f = af.distance;
    r.scale = std::pow(af.scale, -1.0 / (1.0 - lambda));
    r.shift = -af.shift / (1.0 - lambda);
    const GridFunction g_model = translate(scale_amplitude(witness, std::pow(r.scale, lambda)), lambda * r.shift);
    r.distance_g = l1_distance(gn, g_model);
    r.witness = std::move(witness);
    return r;
}

enum class PhiId { odd_poly, even_radial };

struct CounterexampleConfig {
    double delta = 0.05;
    double t = 0.5;
    std::size_t grid_n = 4096;
    PhiId phi_id = PhiId::odd_poly;
    /// Ambient dimension for the radial family.
    int n = 2;
    /// Half-width of the line grid, or the outer radius of the radial grid.
    double extent = 8.0;
};

struct CounterexampleResult {
    GridFunction f;
    GridFunction g;
    GridFunction h;
    double epsilon;
    double distance;
};

/// x(1-x^2)^3 scaled to maximum 1 on [-1, 1], zero outside. The maximum sits at
/// the root of (1-x^2) - 6x^2, i.e. x = 1/sqrt 7.
[[nodiscard]] inline double odd_bump(double x) {
    if (std::abs(x) >= 1.0) return 0.0;
    static const double peak = [] {
        const double s = 1.0 / std::sqrt(7.0);
        return s * std::pow(1.0 - s * s, 3);
    }();
    return x * std::pow(1.0 - x * x, 3) / peak;
}

inline void validate(const CounterexampleConfig& cfg) {
    if (!(cfg.delta >= 0.0 && cfg.delta < 0.5)) throw DomainError("delta must lie in [0, 1/2)");
    if (!(cfg.t > 0.0 && cfg.t < 1.0)) throw DomainError("t must lie in (0,1)");
    if (cfg.grid_n < 64) throw DomainError("grid_n must be at least 64");
}

/// f = e^{-pi x^2}, g = (1 + delta phi) f, h = h_t. The distance is the best
/// translate distance between g and f.
[[nodiscard]] inline CounterexampleResult counterexample_family(const CounterexampleConfig& cfg) {
    validate(cfg);
    const double L = cfg.extent;
    GridFunction f = GridFunction::sample(-L, L, cfg.grid_n, [](double x) { return std::exp(-std::numbers::pi * x * x); });
    GridFunction g = normalize(GridFunction::sample(
        -L, L, cfg.grid_n, [&](double x) { return (1.0 + cfg.delta * odd_bump(x)) * std::exp(-std::numbers::pi * x * x); }));
    f = normalize(f);
    GridFunction h = sup_convolution(f, g, cfg.t).h;
    const double eps = pl_deficit(h, f, g, cfg.t);
    const double dist = aligned_l1_distance(g, f, false).distance;
    return {std::move(f), std::move(g), std::move(h), eps, dist};
}

struct RadialCounterexampleResult {
    RadialProfile f;
    RadialProfile g;
    RadialProfile h;
    double epsilon;
    double distance;
};

/// Radial analogue: phi = b(r)(r - rbar) with b a C^2 bump on [1/2, 2] and rbar
/// chosen so that phi has zero f-weighted mean; scaled to maximum 1.
[[nodiscard]] inline RadialCounterexampleResult radial_counterexample_family(const CounterexampleConfig& cfg) {
    validate(cfg);
    if (cfg.n < 2) throw DomainError("radial family needs n >= 2");
    const double R = cfg.extent;
    const RadialProfile f = radial_normalize(
        RadialProfile::sample(cfg.n, R, cfg.grid_n, [](double r) { return std::exp(-std::numbers::pi * r * r); }));
    auto bump = [](double r) {
        const double u = (r - 1.25) / 0.75;
        return std::abs(u) < 1.0 ? std::pow(1.0 - u * u, 3) : 0.0;
    };
    const auto w = f.weights();
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        num += w[i] * f[i] * bump(f.r(i)) * f.r(i);
        den += w[i] * f[i] * bump(f.r(i));
    }
    const double rbar = num / den;
    std::vector<double> phi(f.size());
    double peak = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        phi[i] = bump(f.r(i)) * (f.r(i) - rbar);
        peak = std::max(peak, phi[i]);
    }
    std::vector<double> gv(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double p = phi[i] / peak;
        if (!(1.0 + cfg.delta * p > 0.0)) throw DomainError("delta too large for the radial perturbation");
        gv[i] = (1.0 + cfg.delta * p) * f[i];
    }
    const RadialProfile g = radial_normalize(RadialProfile(cfg.n, f.r0(), f.dr(), std::move(gv)));
    RadialProfile h = radial_sup_convolution(f, g, cfg.t);
    const double eps = radial_pl_deficit(h, f, g, cfg.t);
    const double dist = radial_l1_distance(g, f);
    return {f, g, std::move(h), eps, dist};
}

struct ExponentFit {
    double slope;
    double intercept;
    double r2;
};

/// Least squares of log(distance) on log(epsilon).
[[nodiscard]] inline ExponentFit exponent_fit(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 3) throw DomainError("exponent_fit needs at least 3 points");
    double sx = 0, sy = 0;
    for (const auto& [e, d] : points) {
        if (!(e > 0.0) || !(d > 0.0)) throw DomainError("exponent_fit needs positive values");
        sx += std::log(e);
        sy += std::log(d);
    }
    const auto n = static_cast<double>(points.size());
    const double mx = sx / n;
    const double my = sy / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (const auto& [e, d] : points) {
        const double dx = std::log(e) - mx;
        const double dy = std::log(d) - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (!(sxx > 0.0)) throw DomainError("exponent_fit needs distinct epsilons");
    const double slope = sxy / sxx;
    const double r2 = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
    return {slope, my - slope * mx, r2};
}

struct TauRow {
    double t;
    double tau;
    double epsilon;
    double distance;
    double ratio;  // distance / sqrt(epsilon / tau)
};

[[nodiscard]] inline std::vector<TauRow> tau_scaling_probe(const std::vector<double>& ts, double delta,
                                                           std::size_t grid_n = 4096) {
    std::vector<TauRow> rows;
    for (double t : ts) {
        const CounterexampleResult c = counterexample_family({delta, t, grid_n, PhiId::odd_poly, 2, 8.0});
        const double tau = std::min(t, 1.0 - t);
        rows.push_back({t, tau, c.epsilon, c.distance, c.distance / std::sqrt(std::max(c.epsilon, 0.0) / tau)});
    }
    return rows;
}

struct LambdaReduction {
    double eps_half_bound;
    double direct_eps_half;

    [[nodiscard]] bool holds(double tol = 1e-6) const noexcept { return direct_eps_half <= eps_half_bound + tol; }
};

/// The 1/2-deficit compared with the lambda-deficit over tau.
[[nodiscard]] inline LambdaReduction general_lambda_reduction(const GridFunction& f, const GridFunction& g, double lambda) {
    if (!(lambda > 0.0 && lambda < 1.0)) throw DomainError("lambda must lie in (0,1)");
    require_log_concave(f, "f");
    require_log_concave(g, "g");
    const GridFunction fn = normalize(f);
    const GridFunction gn = normalize(g);
    const double tau = std::min(lambda, 1.0 - lambda);
    const double eps_l = pl_deficit(sup_convolution(fn, gn, lambda).h, fn, gn, lambda);
    const double eps_h = pl_deficit(sup_convolution(fn, gn, 0.5).h, fn, gn, 0.5);
    return {eps_l / tau, eps_h};
}

}  // namespace plstab
