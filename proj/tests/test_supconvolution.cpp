#include "oracles.hpp"
#include "plstab/random_logconcave.hpp"
#include "plstab/supconvolution.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace plstab;

namespace {

double gpi(double x) { return std::exp(-std::numbers::pi * x * x); }

GridFunction gauss(double shift = 0.0, std::size_t n = 2048) {
    return GridFunction::sample(-8.0, 8.0, n, [=](double x) { return gpi(x - shift); });
}

GridFunction box(double a, double b, double height, std::size_t n = 4096) {
    return GridFunction::sample(-1.0, 3.0, n, [=](double x) { return x > a && x < b ? height : 0.0; });
}

double sup_abs_diff(const GridFunction& h, const std::function<double(double)>& ref) {
    double m = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) m = std::max(m, std::abs(h[i] - ref(h.x(i))));
    return m;
}

}  // namespace

TEST(SupConvolution, EqualityCase) {
    const GridFunction f = gauss();
    for (double t : {0.1, 0.3, 0.5, 0.8}) {
        const SupConvResult r = sup_convolution(f, f, t);
        EXPECT_LE(sup_abs_diff(r.h, gpi), 1e-4) << "t=" << t;
        EXPECT_NEAR(pl_deficit(r.h, f, f, t), 0.0, 1e-4);
    }
}

TEST(SupConvolution, TranslatedEqualityCase) {
    const GridFunction f = gauss();
    const GridFunction g = gauss(1.0);
    for (double lam : {0.25, 0.5, 0.75}) {
        const GridFunction h = sup_convolution(f, g, lam).h;
        EXPECT_LE(sup_abs_diff(h, [&](double z) { return gpi(z - (1.0 - lam)); }), 1e-4) << "lambda=" << lam;
    }
}

TEST(SupConvolution, UniformPairClosedForm) {
    const GridFunction f = box(0.0, 1.0, 1.0);
    const GridFunction g = box(0.0, 2.0, 0.5);
    const GridFunction h = sup_convolution(f, g, 0.5).h;
    const double height = 1.0 / std::numbers::sqrt2;
    for (std::size_t i = 0; i < h.size(); ++i) {
        const double z = h.x(i);
        if (z > 2 * f.dx() && z < 1.5 - 2 * f.dx()) { EXPECT_NEAR(h[i], height, 1e-9); }
        if (z < -2 * f.dx() || z > 1.5 + 2 * f.dx()) { EXPECT_EQ(h[i], 0.0); }
    }
    EXPECT_NEAR(mass(h), 1.5 * height, 2e-3);
    EXPECT_NEAR(pl_deficit(h, f, g, 0.5), oracle::uniform_pair_deficit(), 1e-3);
}

TEST(SupConvolution, MatchesBruteForce) {
    Rng rng(21);
    const GridFunction f = random_log_concave(rng, -8, 8, 1024);
    const GridFunction g = random_log_concave(rng, -8, 8, 1024);
    // Exact piecewise log-linear readings of the sampled densities.
    auto reader = [](const GridFunction& u) {
        return [&u](double x) {
            const double s = (x - u.x0()) / u.dx();
            if (s < 0 || s > static_cast<double>(u.size() - 1)) return 0.0;
            const auto k = std::min(static_cast<std::size_t>(s), u.size() - 2);
            const double a = u[k], b = u[k + 1];
            const double w = s - static_cast<double>(k);
            return a > 0 && b > 0 ? a * std::pow(b / a, w) : a + w * (b - a);
        };
    };
    for (double t : {0.3, 0.7}) {
        const GridFunction h = sup_convolution(f, g, t).h;
        for (std::size_t i = 0; i < h.size(); i += 37) {
            const double ref = oracle::sup_convolution_at(reader(f), reader(g), t, h.x(i), -8.0, 8.0, 4000);
            if (ref < 1e-6) continue;
            EXPECT_NEAR(h[i] / ref, 1.0, 0.05) << "t=" << t << " z=" << h.x(i);
        }
    }
}

TEST(SupConvolution, PlInequalityOnRandomPairs) {
    Rng rng(31);
    for (int k = 0; k < 8; ++k) {
        const GridFunction f = random_log_concave(rng, -8, 8, 1024);
        const GridFunction g = random_log_concave(rng, -8, 8, 1024);
        for (double t : {0.1, 0.5, 0.9}) EXPECT_GE(pl_deficit(sup_convolution(f, g, t).h, f, g, t), -1e-6);
    }
}

TEST(SupConvolution, NonLogConcaveInputUsesFullScan) {
    // Two separated bumps: the monotone argmax shortcut would be wrong here.
    const GridFunction f = GridFunction::sample(-8, 8, 801, [](double x) { return gpi(x - 3) + gpi(x + 3); });
    const GridFunction g = gauss(0.0, 801);
    const GridFunction h = sup_convolution(f, g, 0.5).h;
    auto ff = [](double x) { return gpi(x - 3) + gpi(x + 3); };
    for (double z : {-1.5, 0.0, 1.5}) {
        const double ref = oracle::sup_convolution_at(ff, gpi, 0.5, z, -8.0, 8.0);
        EXPECT_NEAR(h.value_at(z), ref, 2e-3 * ref) << "z=" << z;
    }
    EXPECT_GE(pl_deficit(h, f, g, 0.5), -1e-6);
}

TEST(SupConvolution, ScalingAndTranslationCovariance) {
    Rng rng(41);
    const GridFunction f = random_log_concave(rng, -8, 8, 1024);
    const GridFunction g = random_log_concave(rng, -8, 8, 1024);
    const double lam = 0.3;
    const double a = 2.5;
    const GridFunction h = sup_convolution(f, g, lam).h;
    const GridFunction hs =
        sup_convolution(scale_amplitude(f, std::pow(a, -(1.0 - lam))), scale_amplitude(g, std::pow(a, lam)), lam).h;
    for (std::size_t i = 0; i < h.size(); ++i) EXPECT_NEAR(hs[i], h[i], 1e-10 * (1.0 + h[i]));

    const double s = 0.75;
    const SupConvResult moved = sup_convolution(translate(f, s), g, lam);
    EXPECT_NEAR(moved.h.x0(), h.x0() + lam * s, 1e-12);
    for (std::size_t i = 0; i < h.size(); ++i) EXPECT_NEAR(moved.h[i], h[i], 1e-9 * (1.0 + h[i]));
}

TEST(SupConvolution, OutputSpacingIsFinerInput) {
    const GridFunction f = GridFunction::sample(-6, 6, 600, gpi);
    const GridFunction g = GridFunction::sample(-6, 6, 1500, gpi);
    EXPECT_NEAR(sup_convolution(f, g, 0.4).h.dx(), g.dx(), 1e-15);
    EXPECT_THROW((void)sup_convolution(f, g, 0.0), DomainError);
}

TEST(IntegralCurve, FlatForEqualityFamilies) {
    const GridFunction f = gauss();
    for (const auto& [t, m] : integral_curve(f, f, {0.2, 0.5, 0.8})) EXPECT_NEAR(m, mass(f), 1e-4);
    for (const auto& [t, m] : integral_curve(f, gauss(1.5), {0.2, 0.5, 0.8})) EXPECT_NEAR(m, mass(f), 1e-4);
}

TEST(IntegralCurve, LogConcaveInTForUniformPair) {
    const auto c = integral_curve(box(0.0, 1.0, 1.0, 2048), box(0.0, 2.0, 0.5, 2048), {0.25, 0.5, 0.75});
    const double d2 = std::log(c[0].second) + std::log(c[2].second) - 2.0 * std::log(c[1].second);
    EXPECT_LE(d2, 1e-3);
}

TEST(MidpointInterpolant, Examples) {
    const GridFunction f = gauss();
    const GridFunction fn = normalize(f);
    EXPECT_LE(l1_distance(midpoint_interpolant(f, f), fn), 1e-3);

    const GridFunction u = box(0.0, 1.0, 1.0);
    const GridFunction v = box(0.0, 2.0, 0.5);
    const GridFunction m = midpoint_interpolant(u, v);
    // sqrt of the normalized heights; 1/sqrt 2 up to the sampled box lengths.
    const double height = std::sqrt(sup_norm(normalize(u)) * sup_norm(normalize(v)));
    EXPECT_NEAR(height, 1.0 / std::numbers::sqrt2, 1e-3);
    for (std::size_t i = 0; i < m.size(); ++i) {
        const double z = m.x(i);
        if (z > 3 * u.dx() && z < 1.5 - 3 * u.dx()) { EXPECT_NEAR(m[i], height, 1e-12); }
    }
    EXPECT_LE(mass(m), mass(sup_convolution(normalize(u), normalize(v), 0.5).h) + 1e-6);
}

TEST(MidpointInterpolant, TransportChainAndDomination) {
    Rng rng(51);
    for (int k = 0; k < 5; ++k) {
        const GridFunction f = random_log_concave(rng, -8, 8, 2048);
        const GridFunction g = random_log_concave(rng, -8, 8, 2048);
        const GridFunction m = midpoint_interpolant(f, g);
        const GridFunction h = sup_convolution(f, g, 0.5).h;
        const double md = midpoint_deficit(f, g).value;
        const double eps = pl_deficit(h, f, g, 0.5);
        EXPECT_GE(mass(m), 1.0 - md - 5e-3);
        EXPECT_LE(mass(m), mass(h) + 1e-6);
        EXPECT_LE(mass(h) - mass(m), eps + 1e-3);
        EXPECT_GE(eps, md - 1e-6);
        EXPECT_GE(md, 0.0);
    }
}
