#pragma once

// Uniform-grid densities on the real line.
//
// A GridFunction stores values v_i at nodes x_i = x0 + i*dx, i = 0..N-1. Each
// value stands for a cell [x_i - dx/2, x_i + dx/2), so integrals use the
// rectangle (midpoint-cell) rule and are exactly invariant under permutations
// of the values. Between nodes the function is read by linear interpolation;
// outside [x_0, x_{N-1}] it is zero.

#include "plstab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace plstab {

/// Cells at or below this absolute value are treated as outside the support.
inline constexpr double kZeroThreshold = 1e-300;

class GridFunction {
public:
    GridFunction(double x0, double dx, std::vector<double> values)
        : x0_(x0), dx_(dx), values_(std::move(values)) {
        if (!(dx_ > 0.0) || !std::isfinite(dx_)) throw DomainError("grid spacing must be positive");
        if (!std::isfinite(x0_)) throw DomainError("grid origin must be finite");
        if (values_.size() < 2) throw DomainError("grid needs at least two cells");
        for (double v : values_) {
            if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError("grid values must be finite and nonnegative");
        }
    }

    /// Samples fn at n equally spaced nodes spanning [lo, hi] inclusive.
    template <typename Fn>
    static GridFunction sample(double lo, double hi, std::size_t n, Fn&& fn) {
        if (n < 2 || !(hi > lo)) throw DomainError("sample: need n >= 2 and hi > lo");
        const double dx = (hi - lo) / static_cast<double>(n - 1);
        std::vector<double> v(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double x = (i + 1 == n) ? hi : lo + dx * static_cast<double>(i);
            v[i] = fn(x);
        }
        return GridFunction(lo, dx, std::move(v));
    }

    [[nodiscard]] double x0() const noexcept { return x0_; }
    [[nodiscard]] double dx() const noexcept { return dx_; }
    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] double x(std::size_t i) const noexcept { return x0_ + dx_ * static_cast<double>(i); }
    [[nodiscard]] double x_end() const noexcept { return x(values_.size() - 1); }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] double operator[](std::size_t i) const noexcept { return values_[i]; }

    /// Linear interpolation between nodes, zero outside the node range.
    [[nodiscard]] double value_at(double x) const noexcept {
        const double u = (x - x0_) / dx_;
        const double last = static_cast<double>(values_.size() - 1);
        if (u < -1e-9 || u > last + 1e-9) return 0.0;
        const double uc = std::clamp(u, 0.0, last);
        auto i = static_cast<std::size_t>(std::floor(uc));
        if (i >= values_.size() - 1) return values_.back();
        const double s = uc - static_cast<double>(i);
        return values_[i] + s * (values_[i + 1] - values_[i]);
    }

    /// Value of the cell [x_i - dx/2, x_i + dx/2) containing x (piecewise-constant reading).
    [[nodiscard]] double cell_value_at(double x) const noexcept {
        const double u = (x - x0_) / dx_ + 0.5;
        if (u < 0.0 || u >= static_cast<double>(values_.size())) return 0.0;
        return values_[static_cast<std::size_t>(u)];
    }

private:
    double x0_;
    double dx_;
    std::vector<double> values_;
};

/// Inclusive index window; cells outside it carry values <= threshold.
/// hi_index == lo_index - 1 encodes the empty window.
struct SupportWindow {
    std::ptrdiff_t lo_index = 0;
    std::ptrdiff_t hi_index = -1;
    double threshold = 0.0;

    [[nodiscard]] bool empty() const noexcept { return hi_index < lo_index; }
    [[nodiscard]] bool contains(std::size_t i) const noexcept {
        const auto k = static_cast<std::ptrdiff_t>(i);
        return k >= lo_index && k <= hi_index;
    }
};

[[nodiscard]] inline double mass(const GridFunction& f) {
    const auto v = f.values();
    return f.dx() * std::accumulate(v.begin(), v.end(), 0.0);
}

[[nodiscard]] inline double sup_norm(const GridFunction& f) {
    const auto v = f.values();
    return *std::max_element(v.begin(), v.end());
}

[[nodiscard]] inline GridFunction scale_amplitude(const GridFunction& f, double a) {
    if (!(a > 0.0)) throw DomainError("scale_amplitude: factor must be positive");
    std::vector<double> v(f.values().begin(), f.values().end());
    for (double& y : v) y *= a;
    return GridFunction(f.x0(), f.dx(), std::move(v));
}

[[nodiscard]] inline GridFunction normalize(const GridFunction& f) {
    const double m = mass(f);
    if (!(m > 0.0)) throw DomainError("zero mass");
    return scale_amplitude(f, 1.0 / m);
}

[[nodiscard]] inline GridFunction translate(const GridFunction& f, double s) {
    return GridFunction(f.x0() + s, f.dx(), std::vector<double>(f.values().begin(), f.values().end()));
}

/// Indices of the first and last cell above the zero threshold; nullopt for f == 0.
[[nodiscard]] inline std::optional<std::pair<std::size_t, std::size_t>> support_bounds(const GridFunction& f) {
    const auto v = f.values();
    std::size_t lo = 0;
    while (lo < v.size() && v[lo] <= kZeroThreshold) ++lo;
    if (lo == v.size()) return std::nullopt;
    std::size_t hi = v.size() - 1;
    while (v[hi] <= kZeroThreshold) --hi;
    return std::make_pair(lo, hi);
}

/// Smallest window outside of which every cell is <= threshold.
[[nodiscard]] inline SupportWindow support_window(const GridFunction& f, double threshold) {
    const auto v = f.values();
    SupportWindow w{0, -1, threshold};
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] > threshold) {
            if (w.empty()) w.lo_index = static_cast<std::ptrdiff_t>(i);
            w.hi_index = static_cast<std::ptrdiff_t>(i);
        }
    }
    if (w.empty()) w = SupportWindow{0, -1, threshold};
    return w;
}

/// Mass of f carried by cells outside the window.
[[nodiscard]] inline double tail_mass(const GridFunction& f, const SupportWindow& window) {
    const auto v = f.values();
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!window.contains(i)) s += v[i];
    }
    return f.dx() * s;
}

/// Fraction of mass sitting in the two outermost cells; a cheap proxy for mass
/// lost beyond the declared range.
[[nodiscard]] inline double boundary_mass_fraction(const GridFunction& f) {
    const double m = mass(f);
    if (!(m > 0.0)) return 0.0;
    return f.dx() * (f.values().front() + f.values().back()) / m;
}

struct UniformGrid {
    double x0;
    double dx;
    std::size_t n;
};

/// Grid at the finer of the two spacings covering both node ranges.
[[nodiscard]] inline UniformGrid common_grid(const GridFunction& f, const GridFunction& g) {
    const double dx = std::min(f.dx(), g.dx());
    const double lo = std::min(f.x0(), g.x0());
    const double hi = std::max(f.x_end(), g.x_end());
    const auto n = static_cast<std::size_t>(std::ceil((hi - lo) / dx - 1e-9)) + 1;
    return {lo, dx, std::max<std::size_t>(n, 2)};
}

[[nodiscard]] inline GridFunction resample(const GridFunction& f, const UniformGrid& grid) {
    std::vector<double> v(grid.n);
    for (std::size_t i = 0; i < grid.n; ++i) v[i] = f.value_at(grid.x0 + grid.dx * static_cast<double>(i));
    return GridFunction(grid.x0, grid.dx, std::move(v));
}

/// L1 distance on the common refinement grid.
[[nodiscard]] inline double l1_distance(const GridFunction& f, const GridFunction& g) {
    const UniformGrid grid = common_grid(f, g);
    double s = 0.0;
    for (std::size_t i = 0; i < grid.n; ++i) {
        const double x = grid.x0 + grid.dx * static_cast<double>(i);
        s += std::abs(f.value_at(x) - g.value_at(x));
    }
    return grid.dx * s;
}

// ---------------------------------------------------------------------------
// CSV: two columns "x,value", strictly increasing equally spaced x.

[[nodiscard]] inline GridFunction parse_csv(std::istream& in, const std::string& source = "csv") {
    std::vector<double> xs;
    std::vector<double> ys;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw DomainError(source + ":" + std::to_string(line_no) + ": expected two comma-separated columns");
        }
        char* end = nullptr;
        const std::string a = line.substr(0, comma);
        const std::string b = line.substr(comma + 1);
        const double x = std::strtod(a.c_str(), &end);
        const bool x_ok = end != a.c_str();
        const double y = std::strtod(b.c_str(), &end);
        const bool y_ok = end != b.c_str();
        if (!x_ok || !y_ok) {
            if (xs.empty() && line_no == 1) continue;  // header
            throw DomainError(source + ":" + std::to_string(line_no) + ": malformed number");
        }
        xs.push_back(x);
        ys.push_back(y);
    }
    if (xs.size() < 2) throw DomainError(source + ": need at least two rows");
    const double dx = (xs.back() - xs.front()) / static_cast<double>(xs.size() - 1);
    if (!(dx > 0.0)) throw DomainError(source + ": x must be strictly increasing");
    for (std::size_t i = 1; i < xs.size(); ++i) {
        const double step = xs[i] - xs[i - 1];
        if (!(step > 0.0)) throw DomainError(source + ": x must be strictly increasing");
        if (std::abs(step - dx) > 1e-9 * std::abs(dx) + 1e-9 * std::abs(xs[i])) {
            throw DomainError(source + ": x spacing is not uniform at row " + std::to_string(i + 1));
        }
    }
    return GridFunction(xs.front(), dx, std::move(ys));
}

[[nodiscard]] inline GridFunction read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open " + path);
    return parse_csv(in, path);
}

inline void write_csv(std::ostream& out, const GridFunction& f) {
    char buf[64];
    out << "x,value\n";
    for (std::size_t i = 0; i < f.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", f.x(i), f[i]);
        out << buf;
    }
}

}  // namespace plstab
