#pragma once

// Radial densities on R^n stored as profiles f(r) on a uniform grid r_i = r0 + i dr.
//
// Cell i is the shell between max(0, r_i - dr/2) and r_i + dr/2 and carries its
// exact volume. That equals omega_n dr r^(n-1) to leading order and stays exact
// for constant profiles, including the degenerate cell at r = 0.

#include "plstab/errors.hpp"
#include "plstab/grid_function.hpp"
#include "plstab/supconvolution.hpp"
#include "plstab/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <utility>
#include <vector>

namespace plstab {

/// Surface measure of the unit sphere in R^n, 2 pi^(n/2) / Gamma(n/2).
[[nodiscard]] inline double sphere_measure(int n) {
    if (n < 1) throw DomainError("dimension must be at least 1");
    return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

class RadialProfile {
public:
    RadialProfile(int n, double r0, double dr, std::vector<double> values) : n_(n), profile_(r0, dr, std::move(values)) {
        if (n_ < 1) throw DomainError("dimension must be at least 1");
        if (!(r0 >= 0.0)) throw DomainError("profile must start at r >= 0");
    }
    RadialProfile(int n, GridFunction profile) : n_(n), profile_(std::move(profile)) {
        if (n_ < 1) throw DomainError("dimension must be at least 1");
        if (!(profile_.x0() >= -1e-12)) throw DomainError("profile must start at r >= 0");
    }

    template <typename Fn>
    static RadialProfile sample(int n, double r_max, std::size_t count, Fn&& fn) {
        return RadialProfile(n, GridFunction::sample(0.0, r_max, count, std::forward<Fn>(fn)));
    }

    [[nodiscard]] int n() const noexcept { return n_; }
    [[nodiscard]] double r0() const noexcept { return profile_.x0(); }
    [[nodiscard]] double dr() const noexcept { return profile_.dx(); }
    [[nodiscard]] std::size_t size() const noexcept { return profile_.size(); }
    [[nodiscard]] double r(std::size_t i) const noexcept { return profile_.x(i); }
    [[nodiscard]] double operator[](std::size_t i) const noexcept { return profile_[i]; }
    [[nodiscard]] const GridFunction& profile() const noexcept { return profile_; }

    [[nodiscard]] double inner_edge(std::size_t i) const noexcept { return std::max(0.0, r(i) - 0.5 * dr()); }
    [[nodiscard]] double outer_edge(std::size_t i) const noexcept { return r(i) + 0.5 * dr(); }

    /// Volume of shell i.
    [[nodiscard]] double weight(std::size_t i) const {
        const double a = inner_edge(i);
        const double b = outer_edge(i);
        return sphere_measure(n_) / n_ * (std::pow(b, n_) - std::pow(a, n_));
    }

    [[nodiscard]] std::vector<double> weights() const {
        std::vector<double> w(size());
        const double c = sphere_measure(n_) / n_;
        for (std::size_t i = 0; i < size(); ++i) w[i] = c * (std::pow(outer_edge(i), n_) - std::pow(inner_edge(i), n_));
        return w;
    }

private:
    int n_;
    GridFunction profile_;
};

[[nodiscard]] inline double radial_mass(const RadialProfile& p) {
    const auto w = p.weights();
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) s += w[i] * p[i];
    return s;
}

[[nodiscard]] inline RadialProfile radial_normalize(const RadialProfile& p) {
    const double m = radial_mass(p);
    if (!(m > 0.0)) throw DomainError("zero mass");
    return RadialProfile(p.n(), scale_amplitude(p.profile(), 1.0 / m));
}

namespace detail {

/// Radial CDF with mass linear in r^n inside each shell.
class RadialCdf {
public:
    explicit RadialCdf(const RadialProfile& p) : p_(p), bounds_(p.size() + 1, 0.0), weight_(p.size()) {
        const auto w = p.weights();
        for (std::size_t i = 0; i < p.size(); ++i) bounds_[i + 1] = bounds_[i] + w[i] * p[i];
        const double total = bounds_.back();
        if (!(total > 0.0)) throw DomainError("zero mass");
        for (double& b : bounds_) b /= total;
        for (std::size_t i = 0; i < p.size(); ++i) weight_[i] = bounds_[i + 1] - bounds_[i];
    }

    [[nodiscard]] double at_node(std::size_t i) const {
        const int n = p_.n();
        const double a = std::pow(p_.inner_edge(i), n);
        const double b = std::pow(p_.outer_edge(i), n);
        return bounds_[i] + weight_[i] * (std::pow(p_.r(i), n) - a) / (b - a);
    }

    struct Located {
        double r;
        std::size_t cell;
    };

    [[nodiscard]] Located locate(double q) const {
        auto it = std::lower_bound(bounds_.begin() + 1, bounds_.end(), q);
        auto k = static_cast<std::size_t>(it - bounds_.begin()) - 1;
        if (k >= weight_.size()) k = weight_.size() - 1;
        while (k + 1 < weight_.size() && weight_[k] <= 0.0) ++k;
        const double frac = weight_[k] > 0.0 ? std::clamp((q - bounds_[k]) / weight_[k], 0.0, 1.0) : 0.0;
        const int n = p_.n();
        const double a = std::pow(p_.inner_edge(k), n);
        const double b = std::pow(p_.outer_edge(k), n);
        return {std::pow(a + frac * (b - a), 1.0 / n), k};
    }

private:
    const RadialProfile& p_;
    std::vector<double> bounds_;
    std::vector<double> weight_;
};

}  // namespace detail

/// Monotone map pushing f(r) r^(n-1) dr onto g(r) r^(n-1) dr. T(0) = 0.
[[nodiscard]] inline MonotoneMap radial_transport(const RadialProfile& f, const RadialProfile& g) {
    if (f.n() != g.n()) throw DomainError("dimension mismatch");
    const int n = f.n();
    const detail::RadialCdf F(f);
    const detail::RadialCdf G(g);
    const double mf = radial_mass(f);
    const double mg = radial_mass(g);
    MonotoneMap m;
    const auto bounds = support_bounds(f.profile());
    if (!bounds) return m;
    m.first_index = bounds->first;
    const auto w = f.weights();
    for (std::size_t i = bounds->first; i <= bounds->second; ++i) {
        const double r = f.r(i);
        const auto [t, cell] = G.locate(F.at_node(i));
        const double fi = f[i] / mf;
        const double gi = g[cell] / mg;
        double slope;
        if (fi <= 0.0) {
            slope = 0.0;
        } else if (gi <= 0.0) {
            slope = kInfiniteSlope;
            m.excluded_mass += w[i] * fi;
        } else if (r <= 0.0) {
            slope = std::pow(fi / gi, 1.0 / n);
        } else {
            slope = fi * std::pow(r, n - 1) / (gi * std::pow(t, n - 1));
        }
        m.x.push_back(r);
        m.T.push_back(r <= 0.0 ? 0.0 : t);
        m.Tprime.push_back(slope);
    }
    return m;
}

struct LemmaSquareSides {
    double lhs;
    double q;
};

/// lhs = ((a+1)/2)^(n-1) (1+b)/2 - sqrt(b a^(n-1)), q = (sqrt(b a^(n-1)) - 1)^2.
[[nodiscard]] inline LemmaSquareSides lemma_square_sides(double a, double b, int n) {
    if (!(a > 1.0 / 16.0 && a < 16.0 && b > 1.0 / 16.0 && b < 16.0)) throw DomainError("a, b must lie in (1/16, 16)");
    if (n < 1) throw DomainError("dimension must be at least 1");
    const double p = std::sqrt(b * std::pow(a, n - 1));
    return {std::pow(0.5 * (a + 1.0), n - 1) * 0.5 * (1.0 + b) - p, (p - 1.0) * (p - 1.0)};
}

/// Minimum of lhs/q over a log-spaced steps x steps grid of (1/16, 16)^2. Where
/// q < 1e-12 the ratio is replaced by the smallest ratio at four neighbours at
/// relative distance 1e-6.
[[nodiscard]] inline double lemma_square_min_ratio(int n, int steps) {
    if (steps < 100) throw DomainError("grid_steps must be at least 100");
    auto ratio_at = [n](double a, double b) {
        const auto s = lemma_square_sides(a, b, n);
        return s.q > 0.0 ? s.lhs / s.q : std::numeric_limits<double>::infinity();
    };
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < steps; ++i) {
        const double a = std::pow(16.0, 2.0 * (i + 0.5) / steps - 1.0);
        for (int j = 0; j < steps; ++j) {
            const double b = std::pow(16.0, 2.0 * (j + 0.5) / steps - 1.0);
            const auto s = lemma_square_sides(a, b, n);
            double r;
            if (s.q < 1e-12) {
                constexpr double h = 1e-6;
                r = std::min({ratio_at(a * (1 + h), b), ratio_at(a * (1 - h), b), ratio_at(a, b * (1 + h)), ratio_at(a, b * (1 - h))});
            } else {
                r = s.lhs / s.q;
            }
            best = std::min(best, r);
        }
    }
    return best;
}

/// omega_n int f lhs(a, b) / sqrt(b a^(n-1)) r^(n-1) dr with a = T/r, b = T'.
[[nodiscard]] inline TransportDeficit radial_deficit(const RadialProfile& f, const RadialProfile& g) {
    const MonotoneMap m = radial_transport(f, g);
    const int n = f.n();
    const double mf = radial_mass(f);
    const auto w = f.weights();
    double sum = 0.0;
    for (std::size_t k = 0; k < m.size(); ++k) {
        const std::size_t i = m.first_index + k;
        const double b = m.Tprime[k];
        if (!(b > 0.0) || std::isinf(b)) continue;
        const double a = m.x[k] > 0.0 ? m.T[k] / m.x[k] : b;
        const double p = std::sqrt(b * std::pow(a, n - 1));
        const double lhs = std::pow(0.5 * (a + 1.0), n - 1) * 0.5 * (1.0 + b) - p;
        sum += w[i] * (f[i] / mf) * lhs / p;
    }
    return {sum, m.excluded_mass};
}

/// omega_n int f (sqrt(T' T^(n-1)/r^(n-1)) - 1)^2 r^(n-1) dr / sqrt(T' T^(n-1)/r^(n-1)),
/// restricted to cells with T/r and T' in (1/16, 16). Together with the lemma
/// constant this lower-bounds radial_deficit.
[[nodiscard]] inline double radial_square_term(const RadialProfile& f, const RadialProfile& g) {
    const MonotoneMap m = radial_transport(f, g);
    const int n = f.n();
    const double mf = radial_mass(f);
    const auto w = f.weights();
    double sum = 0.0;
    for (std::size_t k = 0; k < m.size(); ++k) {
        const std::size_t i = m.first_index + k;
        const double b = m.Tprime[k];
        const double a = m.x[k] > 0.0 ? m.T[k] / m.x[k] : b;
        if (!(a > 1.0 / 16 && a < 16 && b > 1.0 / 16 && b < 16)) continue;
        const double p = std::sqrt(b * std::pow(a, n - 1));
        sum += w[i] * (f[i] / mf) * (p - 1.0) * (p - 1.0) / p;
    }
    return sum;
}

/// Radial L1 distance on the common refinement of the two profile grids.
[[nodiscard]] inline double radial_l1_distance(const RadialProfile& f, const RadialProfile& g) {
    if (f.n() != g.n()) throw DomainError("dimension mismatch");
    const UniformGrid grid = common_grid(f.profile(), g.profile());
    const RadialProfile d(f.n(), grid.x0, grid.dx, std::vector<double>(grid.n, 0.0));
    const auto w = d.weights();
    double s = 0.0;
    for (std::size_t i = 0; i < grid.n; ++i) {
        const double r = d.r(i);
        s += w[i] * std::abs(f.profile().value_at(r) - g.profile().value_at(r));
    }
    return s;
}

[[nodiscard]] inline bool is_nonincreasing(const RadialProfile& p) {
    for (std::size_t i = 1; i < p.size(); ++i) {
        if (p[i] > p[i - 1] * (1.0 + 1e-12)) return false;
    }
    return true;
}

/// Sup-convolution of radially nonincreasing profiles, computed on the profiles:
/// h(rho) = sup_r f(r)^t g((rho - t r)/(1-t))^(1-t).
[[nodiscard]] inline RadialProfile radial_sup_convolution(const RadialProfile& f, const RadialProfile& g, double t) {
    if (f.n() != g.n()) throw DomainError("dimension mismatch");
    if (!is_nonincreasing(f) || !is_nonincreasing(g)) {
        throw DomainError("radial sup-convolution needs nonincreasing profiles; rearrange first");
    }
    return RadialProfile(f.n(), sup_convolution(f.profile(), g.profile(), t).h);
}

[[nodiscard]] inline double radial_pl_deficit(const RadialProfile& h, const RadialProfile& f, const RadialProfile& g,
                                              double lambda) {
    return radial_mass(h) / (std::pow(radial_mass(f), lambda) * std::pow(radial_mass(g), 1.0 - lambda)) - 1.0;
}

/// Even extension of an n = 1 profile to a symmetric grid on R.
[[nodiscard]] inline GridFunction even_extension(const RadialProfile& p) {
    if (p.r0() != 0.0) throw DomainError("even extension needs a profile starting at 0");
    const std::size_t n = p.size();
    std::vector<double> v(2 * n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        v[n - 1 + i] = p[i];
        v[n - 1 - i] = p[i];
    }
    return GridFunction(-p.r(n - 1), p.dr(), std::move(v));
}

}  // namespace plstab
