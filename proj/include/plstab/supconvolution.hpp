#pragma once

// Sup-convolution h_t(z) = sup_{z = t x + (1-t) y} f(x)^t g(y)^(1-t).
//
// Work happens in the log domain. For each output node z the candidates are
// the f-nodes x, paired with y = (z - t x)/(1-t), where log g is read through a
// cubic Hermite (Catmull-Rom) interpolant. That interpolant reproduces
// quadratics, so Gaussian inputs are handled without interpolation error. The
// best node is then polished by golden-section search on the continuous
// objective, because near-equality deficits live far below the grid scale.

#include "plstab/concavity.hpp"
#include "plstab/errors.hpp"
#include "plstab/grid_function.hpp"
#include "plstab/transport.hpp"

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

namespace plstab {

struct SupConvResult {
    GridFunction h;
    double t;
    /// Maximizing x for each output node (NaN where h vanishes).
    std::vector<double> attained_x;
};

namespace detail {

/// log of a grid function between nodes. Catmull-Rom inside the support, one
/// sided tangents next to its edges, -inf outside or next to zero cells.
class LogInterpolant {
public:
    explicit LogInterpolant(const GridFunction& f) : x0_(f.x0()), dx_(f.dx()), lv_(log_values(f)) {
        const auto b = support_bounds(f);
        if (b) {
            lo_ = b->first;
            hi_ = b->second;
            empty_ = false;
        }
    }

    [[nodiscard]] bool empty() const noexcept { return empty_; }
    [[nodiscard]] std::size_t lo() const noexcept { return lo_; }
    [[nodiscard]] std::size_t hi() const noexcept { return hi_; }
    [[nodiscard]] double node(std::size_t i) const noexcept { return lv_[i]; }
    [[nodiscard]] double x(std::size_t i) const noexcept { return x0_ + dx_ * static_cast<double>(i); }

    [[nodiscard]] double operator()(double y) const noexcept {
        if (empty_) return kNegInf;
        double u = (y - x0_) / dx_;
        const auto flo = static_cast<double>(lo_);
        const auto fhi = static_cast<double>(hi_);
        if (u < flo - 1e-9 || u > fhi + 1e-9) return kNegInf;
        u = std::clamp(u, flo, fhi);
        auto k = static_cast<std::size_t>(std::floor(u));
        double s = u - static_cast<double>(k);
        if (k >= hi_) {
            k = hi_;
            s = 0.0;
        }
        if (s < 1e-12) return lv_[k];
        if (s > 1.0 - 1e-12) return lv_[k + 1];
        const double p1 = lv_[k];
        const double p2 = lv_[k + 1];
        if (p1 == kNegInf || p2 == kNegInf) return kNegInf;
        const double p0 = k > lo_ ? lv_[k - 1] : kNegInf;
        const double p3 = k + 2 <= hi_ ? lv_[k + 2] : kNegInf;
        const double m1 = p0 == kNegInf ? p2 - p1 : 0.5 * (p2 - p0);
        const double m2 = p3 == kNegInf ? p2 - p1 : 0.5 * (p3 - p1);
        const double s2 = s * s;
        const double s3 = s2 * s;
        return (2 * s3 - 3 * s2 + 1) * p1 + (s3 - 2 * s2 + s) * m1 + (-2 * s3 + 3 * s2) * p2 + (s3 - s2) * m2;
    }

private:
    double x0_;
    double dx_;
    std::vector<double> lv_;
    std::size_t lo_ = 0;
    std::size_t hi_ = 0;
    bool empty_ = true;
};

template <typename Fn>
std::pair<double, double> golden_max(Fn&& fn, double a, double b, int iterations = 60) {
    constexpr double r = 0.6180339887498949;
    double c = b - r * (b - a);
    double d = a + r * (b - a);
    double fc = fn(c);
    double fd = fn(d);
    for (int it = 0; it < iterations && b - a > 1e-15 * (1.0 + std::abs(a)); ++it) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = fn(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = fn(d);
        }
    }
    return fc >= fd ? std::pair{c, fc} : std::pair{d, fd};
}

inline SupConvResult sup_convolution_lower(const GridFunction& f, const GridFunction& g, double t) {
    const double dz = std::min(f.dx(), g.dx());
    const double zlo = t * f.x0() + (1.0 - t) * g.x0();
    const double zhi = t * f.x_end() + (1.0 - t) * g.x_end();
    const auto nz = static_cast<std::size_t>(std::ceil((zhi - zlo) / dz - 1e-9)) + 1;

    std::vector<double> hv(nz, 0.0);
    std::vector<double> ax(nz, std::numeric_limits<double>::quiet_NaN());
    const LogInterpolant LF(f);
    const LogInterpolant LG(g);
    if (LF.empty() || LG.empty()) return {GridFunction(zlo, dz, std::move(hv)), t, std::move(ax)};

    const double s = 1.0 - t;
    const double ylo = LG.x(LG.lo());
    const double yhi = LG.x(LG.hi());
    const double xlo = LF.x(LF.lo());
    const double xhi = LF.x(LF.hi());
    auto z_at = [&](std::size_t k) { return zlo + dz * static_cast<double>(k); };
    auto node_value = [&](std::size_t i, double z) { return t * LF.node(i) + s * LG((z - t * f.x(i)) / s); };

    // Feasible f-node range for z: y inside the g support and x inside the f support.
    auto feasible = [&](double z) -> std::pair<std::ptrdiff_t, std::ptrdiff_t> {
        const double xa = std::max((z - s * yhi) / t, xlo);
        const double xb = std::min((z - s * ylo) / t, xhi);
        const auto ia = static_cast<std::ptrdiff_t>(std::ceil((xa - f.x0()) / f.dx() - 1e-9));
        const auto ib = static_cast<std::ptrdiff_t>(std::floor((xb - f.x0()) / f.dx() + 1e-9));
        return {ia, ib};
    };

    std::vector<std::ptrdiff_t> best(nz, -1);
    std::vector<double> bestv(nz, kNegInf);

    auto scan = [&](std::size_t k, std::ptrdiff_t a, std::ptrdiff_t b) {
        const double z = z_at(k);
        const auto [fa, fb] = feasible(z);
        a = std::max(a, fa);
        b = std::min(b, fb);
        std::ptrdiff_t arg = -1;
        double v = kNegInf;
        for (std::ptrdiff_t i = a; i <= b; ++i) {
            const double c = node_value(static_cast<std::size_t>(i), z);
            if (c > v) {
                v = c;
                arg = i;
            }
        }
        if (arg < 0) arg = std::clamp(fa, a, std::max(a, b));
        best[k] = arg;
        bestv[k] = v;
    };

    const bool monotone = is_log_concave(f) && is_log_concave(g);
    const auto nf = static_cast<std::ptrdiff_t>(f.size());
    if (monotone) {
        // Log-concave inputs make the argmax nondecreasing in z, so a divide and
        // conquer over rows needs only O(N log N) evaluations.
        struct Frame {
            std::ptrdiff_t zl, zh, il, ih;
        };
        std::vector<Frame> stack{{0, static_cast<std::ptrdiff_t>(nz) - 1, 0, nf - 1}};
        while (!stack.empty()) {
            const Frame fr = stack.back();
            stack.pop_back();
            if (fr.zl > fr.zh) continue;
            const std::ptrdiff_t mid = fr.zl + (fr.zh - fr.zl) / 2;
            scan(static_cast<std::size_t>(mid), fr.il, fr.ih);
            const std::ptrdiff_t a = best[static_cast<std::size_t>(mid)];
            stack.push_back({fr.zl, mid - 1, fr.il, std::max(fr.il, std::min(a, fr.ih))});
            stack.push_back({mid + 1, fr.zh, std::min(fr.ih, std::max(a, fr.il)), fr.ih});
        }
    } else {
        for (std::size_t k = 0; k < nz; ++k) scan(k, 0, nf - 1);
    }

    for (std::size_t k = 0; k < nz; ++k) {
        if (bestv[k] == kNegInf) continue;
        const double z = z_at(k);
        const auto [fa, fb] = feasible(z);
        std::ptrdiff_t i = best[k];
        double v = bestv[k];
        // Local hill climb guards against interpolation wiggles in the pruned search.
        for (bool moved = true; moved;) {
            moved = false;
            for (std::ptrdiff_t j = std::max(fa, i - 2); j <= std::min(fb, i + 2); ++j) {
                const double c = node_value(static_cast<std::size_t>(j), z);
                if (c > v) {
                    v = c;
                    i = j;
                    moved = true;
                }
            }
        }
        double xbest = f.x(static_cast<std::size_t>(i));
        const double lo = std::max({f.x(static_cast<std::size_t>(std::max<std::ptrdiff_t>(i - 1, 0))), xlo, (z - s * yhi) / t});
        const double hi = std::min({f.x(static_cast<std::size_t>(std::min<std::ptrdiff_t>(i + 1, nf - 1))), xhi, (z - s * ylo) / t});
        if (hi > lo) {
            auto obj = [&](double x) { return t * LF(x) + s * LG((z - t * x) / s); };
            const auto [xr, vr] = golden_max(obj, lo, hi);
            if (vr > v) {
                v = vr;
                xbest = xr;
            }
        }
        hv[k] = std::exp(v);
        ax[k] = xbest;
    }
    return {GridFunction(zlo, dz, std::move(hv)), t, std::move(ax)};
}

}  // namespace detail

[[nodiscard]] inline SupConvResult sup_convolution(const GridFunction& f, const GridFunction& g, double t) {
    if (!(t > 0.0 && t < 1.0)) throw DomainError("t must lie in (0,1)");
    if (t <= 0.5) return detail::sup_convolution_lower(f, g, t);
    // Scan over the function with the larger weight so that y moves by at most
    // one cell per x-step.
    SupConvResult r = detail::sup_convolution_lower(g, f, 1.0 - t);
    for (std::size_t k = 0; k < r.attained_x.size(); ++k) {
        const double z = r.h.x(k);
        r.attained_x[k] = (z - (1.0 - t) * r.attained_x[k]) / t;
    }
    r.t = t;
    return r;
}

/// mass(h) / (mass(f)^lambda mass(g)^(1-lambda)) - 1.
[[nodiscard]] inline double pl_deficit(const GridFunction& h, const GridFunction& f, const GridFunction& g, double lambda) {
    const double mf = mass(f);
    const double mg = mass(g);
    if (!(mf > 0.0) || !(mg > 0.0)) throw DomainError("zero mass");
    return mass(h) / (std::pow(mf, lambda) * std::pow(mg, 1.0 - lambda)) - 1.0;
}

/// (t, mass(h_t)) for each t.
[[nodiscard]] inline std::vector<std::pair<double, double>> integral_curve(const GridFunction& f, const GridFunction& g,
                                                                            const std::vector<double>& ts) {
    std::vector<std::pair<double, double>> out;
    out.reserve(ts.size());
    for (std::size_t k = 0; k < ts.size(); ++k) {
        if (k > 0 && !(ts[k] > ts[k - 1])) throw DomainError("t grid must be increasing");
        out.emplace_back(ts[k], mass(sup_convolution(f, g, ts[k]).h));
    }
    return out;
}

/// h~((x + T(x))/2) = sqrt(f(x) g(T(x))) for the normalized pair, on the grid of
/// the 1/2 sup-convolution. Each output node is pulled back through the
/// increasing map x -> (x + T(x))/2 by bisection.
[[nodiscard]] inline GridFunction midpoint_interpolant(const GridFunction& f, const GridFunction& g) {
    const GridFunction fn = normalize(f);
    const GridFunction gn = normalize(g);
    const Cdf F(fn);
    const Cdf G(gn);
    const double dz = std::min(f.dx(), g.dx());
    const double zlo = 0.5 * (f.x0() + g.x0());
    const double zhi = 0.5 * (f.x_end() + g.x_end());
    const auto nz = static_cast<std::size_t>(std::ceil((zhi - zlo) / dz - 1e-9)) + 1;
    std::vector<double> v(nz, 0.0);

    const auto bounds = support_bounds(fn);
    if (bounds) {
        const double a = fn.x(bounds->first) - 0.5 * fn.dx();
        const double b = fn.x(bounds->second) + 0.5 * fn.dx();
        auto T = [&](double x) { return G.quantile(std::clamp(F(x), 0.0, 1.0)); };
        auto M = [&](double x) { return 0.5 * (x + T(x)); };
        const double ma = M(a);
        const double mb = M(b);
        for (std::size_t k = 0; k < nz; ++k) {
            const double z = zlo + dz * static_cast<double>(k);
            if (z < ma || z > mb) continue;
            double lo = a;
            double hi = b;
            for (int it = 0; it < 100 && hi - lo > 1e-14 * (1.0 + std::abs(lo)); ++it) {
                const double mid = 0.5 * (lo + hi);
                (M(mid) < z ? lo : hi) = mid;
            }
            const double x = 0.5 * (lo + hi);
            v[k] = std::sqrt(fn.value_at(x) * gn.value_at(T(x)));
        }
    }
    return GridFunction(zlo, dz, std::move(v));
}

}  // namespace plstab
