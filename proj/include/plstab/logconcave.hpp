#pragma once

// Log-concave hulls, medians and the pointwise envelope bounds for log-concave
// probability densities.

#include "plstab/concavity.hpp"
#include "plstab/errors.hpp"
#include "plstab/grid_function.hpp"
#include "plstab/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace plstab {

struct LogConcaveEnvelope {
    GridFunction base;
    GridFunction hull;
    std::vector<std::size_t> knots;
};

/// exp of the least concave majorant of log f over the convex hull of the support.
/// Zero cells inside that hull are bridged.
[[nodiscard]] inline LogConcaveEnvelope log_concave_hull(const GridFunction& f) {
    std::vector<std::size_t> pts;
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (f[i] > kZeroThreshold) pts.push_back(i);
    }
    if (pts.empty()) throw DomainError("zero mass");
    const std::vector<double> lv = log_values(f);
    // Upper hull by monotone chain; collinear points are dropped.
    std::vector<std::size_t> up;
    auto cross = [&](std::size_t o, std::size_t a, std::size_t b) {
        const double ax = static_cast<double>(a) - static_cast<double>(o);
        const double bx = static_cast<double>(b) - static_cast<double>(o);
        return ax * (lv[b] - lv[o]) - bx * (lv[a] - lv[o]);
    };
    for (std::size_t p : pts) {
        while (up.size() >= 2 && cross(up[up.size() - 2], up.back(), p) >= 0.0) up.pop_back();
        up.push_back(p);
    }
    std::vector<double> hv(f.size(), 0.0);
    for (std::size_t k = 0; k + 1 < up.size(); ++k) {
        const std::size_t a = up[k];
        const std::size_t b = up[k + 1];
        for (std::size_t i = a; i <= b; ++i) {
            const double s = static_cast<double>(i - a) / static_cast<double>(b - a);
            hv[i] = i == a ? f[a] : i == b ? f[b] : std::exp(lv[a] + s * (lv[b] - lv[a]));
        }
    }
    if (up.size() == 1) hv[up[0]] = f[up[0]];
    for (std::size_t i = 0; i < f.size(); ++i) hv[i] = std::max(hv[i], f[i]);
    return {f, GridFunction(f.x0(), f.dx(), std::move(hv)), std::move(up)};
}

/// hull * 1{hull > s0}.
[[nodiscard]] inline GridFunction level_cut(const LogConcaveEnvelope& env, double s0) {
    if (!(s0 >= 0.0)) throw DomainError("cut level must be nonnegative");
    std::vector<double> v(env.hull.values().begin(), env.hull.values().end());
    for (double& y : v) {
        if (!(y > s0)) y = 0.0;
    }
    return GridFunction(env.hull.x0(), env.hull.dx(), std::move(v));
}

[[nodiscard]] inline double median(const GridFunction& f) { return Cdf(f).quantile(0.5); }

struct EnvelopeReport {
    double anchor = 0.0;        // m, or x for the nu check
    double anchor_value = 0.0;  // phi at the anchor
    double window = 0.0;        // half-width of the checked window
    double worst_lower = 0.0;   // max of lower-bound / phi
    double worst_upper = 0.0;   // max of phi / upper-bound
    std::size_t cells = 0;

    [[nodiscard]] bool passes(double tol) const noexcept { return worst_lower <= 1.0 + tol && worst_upper <= 1.0 + tol; }
};

namespace detail {

/// Geometric interpolation between nodes; exact for piecewise log-linear data.
inline double log_linear_at(const GridFunction& f, double x) {
    const double u = (x - f.x0()) / f.dx();
    if (u < 0.0 || u > static_cast<double>(f.size() - 1)) return 0.0;
    const auto k = std::min(static_cast<std::size_t>(u), f.size() - 2);
    const double s = u - static_cast<double>(k);
    const double a = f[k];
    const double b = f[k + 1];
    if (a > 0.0 && b > 0.0) return a * std::pow(b / a, s);
    return a + s * (b - a);
}

inline EnvelopeReport envelope_ratios(const GridFunction& fn, double anchor, double rate_scale) {
    EnvelopeReport r;
    r.anchor = anchor;
    r.anchor_value = log_linear_at(fn, anchor);
    if (!(r.anchor_value > 0.0)) throw DomainError("density vanishes at the anchor");
    const double rate = r.anchor_value / rate_scale;
    r.window = std::log(2.0) / rate;
    for (std::size_t i = 0; i < fn.size(); ++i) {
        const double d = std::abs(fn.x(i) - anchor);
        if (d > r.window) continue;
        ++r.cells;
        const double lower = r.anchor_value * std::exp(-rate * d);
        const double upper = r.anchor_value * std::exp(rate * d);
        r.worst_lower = std::max(r.worst_lower, fn[i] > 0.0 ? lower / fn[i] : std::numeric_limits<double>::infinity());
        r.worst_upper = std::max(r.worst_upper, fn[i] / upper);
    }
    return r;
}

}  // namespace detail

/// phi(m) e^{-2 phi(m)|x-m|} <= phi(x) <= phi(m) e^{2 phi(m)|x-m|} for |x-m| <= log 2 / (2 phi(m)).
[[nodiscard]] inline EnvelopeReport median_envelope_check(const GridFunction& f) {
    require_log_concave(f, "density");
    const GridFunction fn = normalize(f);
    return detail::envelope_ratios(fn, median(fn), 0.5);
}

struct NuEnvelopeReport {
    double nu = 0.0;
    EnvelopeReport envelope;
    /// max over w > x of phi(w) / phi(x).
    double tail_ratio = 0.0;

    /// Part (i) at tolerance tol, and phi(w) <= 2 phi(x) beyond x.
    [[nodiscard]] bool passes(double tol) const noexcept { return envelope.passes(tol) && tail_ratio <= 2.0 * (1.0 + tol); }
};

/// Envelope around x with rate phi(x)/nu, nu = int_x^inf phi, and the tail bound beyond x.
[[nodiscard]] inline NuEnvelopeReport nu_envelope_check(const GridFunction& f, double x) {
    require_log_concave(f, "density");
    const GridFunction fn = normalize(f);
    NuEnvelopeReport r;
    r.nu = 1.0 - Cdf(fn)(x);
    if (r.nu > 0.5 + 1e-9) throw DomainError("nu exceeds 1/2");
    if (!(r.nu > 0.0)) throw DomainError("nu must be positive");
    r.envelope = detail::envelope_ratios(fn, x, r.nu);
    for (std::size_t i = 0; i < fn.size(); ++i) {
        if (fn.x(i) > x) r.tail_ratio = std::max(r.tail_ratio, fn[i] / r.envelope.anchor_value);
    }
    return r;
}

struct InterpolationCheck {
    bool hypothesis_holds;
    bool conclusion_holds;
};

/// If phi(lambda) <= (1+eta) phi(0)^(1-lambda) phi(1)^lambda, then
/// phi(1/2) <= (1 + eta/tau) sqrt(phi(0) phi(1)).
[[nodiscard]] inline InterpolationCheck interpolation_check(double phi0, double phi_lambda, double phi_half, double phi1,
                                                            double lambda, double eta) {
    if (!(lambda > 0.0 && lambda < 1.0)) throw DomainError("lambda must lie in (0,1)");
    const double tau = std::min(lambda, 1.0 - lambda);
    if (!(eta >= 0.0) || eta >= 2.0 * tau) throw DomainError("hypothesis range");
    const bool hyp = phi_lambda <= (1.0 + eta) * std::pow(phi0, 1.0 - lambda) * std::pow(phi1, lambda);
    const bool concl = phi_half <= (1.0 + eta / tau) * std::sqrt(phi0 * phi1);
    return {hyp, concl};
}

}  // namespace plstab
