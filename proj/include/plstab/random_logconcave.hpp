#pragma once

// Seeded generators for random log-concave test densities.

#include "plstab/grid_function.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace plstab {

/// mt19937_64 with a fixed uniform mapping, so sequences do not depend on the
/// standard library's distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    [[nodiscard]] double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
    [[nodiscard]] double uniform(double a, double b) { return a + (b - a) * uniform(); }
    [[nodiscard]] std::size_t index(std::size_t lo, std::size_t hi) {
        return lo + static_cast<std::size_t>(gen_() % static_cast<std::uint64_t>(hi - lo + 1));
    }
    [[nodiscard]] std::uint64_t next() { return gen_(); }

private:
    std::mt19937_64 gen_;
};

/// Density with log f = min of 3..6 affine pieces, normalized to mass 1. The
/// first two pieces have slopes of opposite sign so the density decays both ways.
[[nodiscard]] inline GridFunction random_log_concave(Rng& rng, double lo = -8.0, double hi = 8.0, std::size_t n = 2048) {
    struct Piece {
        double a, c, b;
    };
    const std::size_t count = rng.index(3, 6);
    std::vector<Piece> pieces;
    for (std::size_t k = 0; k < count; ++k) {
        double a;
        if (k == 0) {
            a = rng.uniform(3.0, 8.0);
        } else if (k == 1) {
            a = rng.uniform(-8.0, -3.0);
        } else {
            a = rng.uniform(-8.0, 8.0);
        }
        const double c = rng.uniform(-1.5, 1.5);
        const double b = rng.uniform(0.0, 1.0);
        pieces.push_back({a, c, b});
    }
    const GridFunction f = GridFunction::sample(lo, hi, n, [&](double x) {
        double v = pieces[0].a * (x - pieces[0].c) + pieces[0].b;
        for (const Piece& p : pieces) v = std::min(v, p.a * (x - p.c) + p.b);
        return std::exp(v);
    });
    return normalize(f);
}

/// Normalized f^(1-s) f2^s on a shared grid; log-concave when both inputs are.
[[nodiscard]] inline GridFunction geometric_mix(const GridFunction& f, const GridFunction& f2, double s) {
    if (f.size() != f2.size() || f.x0() != f2.x0() || f.dx() != f2.dx()) throw DomainError("geometric_mix needs a shared grid");
    std::vector<double> v(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        v[i] = f[i] > 0.0 && f2[i] > 0.0 ? std::exp((1.0 - s) * std::log(f[i]) + s * std::log(f2[i])) : 0.0;
    }
    return normalize(GridFunction(f.x0(), f.dx(), std::move(v)));
}

}  // namespace plstab
