#include "oracles.hpp"
#include "plstab/deficit.hpp"
#include "plstab/random_logconcave.hpp"
#include "plstab/transport.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace plstab;

namespace {

GridFunction normal(double mu, double sigma, double lo = -12.0, double hi = 12.0, std::size_t n = 4096) {
    return GridFunction::sample(lo, hi, n, [=](double x) { return oracle::normal_pdf(x, mu, sigma); });
}

GridFunction box(double a, double b, double lo, double hi, std::size_t n) {
    // Half-open with a guard, so [a, b) holds exactly (b - a) / dx nodes.
    return GridFunction::sample(lo, hi, n, [=](double x) { return x > a - 1e-9 && x < b - 1e-9 ? 1.0 / (b - a) : 0.0; });
}

}  // namespace

TEST(Cdf, QuantileExamples) {
    const GridFunction u = box(0.0, 1.0, -0.5, 1.5, 2001);
    EXPECT_NEAR(quantile(cdf(u), 0.5), 0.5, u.dx());
    EXPECT_NEAR(quantile(cdf(u), 0.0), 0.0, u.dx());
    const GridFunction n = normal(0.0, 1.0);
    EXPECT_NEAR(quantile(cdf(n), 0.8413), 1.0, 1e-2);
    EXPECT_NEAR(oracle::normal_cdf(1.0), 0.8413, 1e-4);
    EXPECT_THROW((void)quantile(cdf(n), 1.5), DomainError);
}

TEST(Cdf, RoundTrip) {
    Rng rng(2);
    const GridFunction f = random_log_concave(rng);
    const Cdf F(f);
    for (double p = 0.01; p <= 0.99; p += 0.0137) EXPECT_NEAR(F(F.quantile(p)), p, 1e-6);
}

TEST(MonotoneTransport, Identity) {
    const GridFunction f = normal(0.0, 1.0);
    const MonotoneMap m = monotone_transport(f, f);
    for (std::size_t k = 0; k < m.size(); ++k) {
        if (f[m.first_index + k] < 1e-3 * sup_norm(f)) continue;
        EXPECT_NEAR(m.Tprime[k], 1.0, 1e-6);
        EXPECT_NEAR(m.T[k], m.x[k], 1e-9);
    }
}

TEST(MonotoneTransport, UniformDoubling) {
    const GridFunction f = box(0.0, 1.0, -1.0, 3.0, 4001);
    const GridFunction g = box(0.0, 2.0, -1.0, 3.0, 4001);
    const MonotoneMap m = monotone_transport(f, g);
    for (std::size_t k = 0; k < m.size(); ++k) {
        EXPECT_NEAR(m.T[k], 2.0 * m.x[k], 2.0 * f.dx());
        EXPECT_NEAR(m.Tprime[k], 2.0, 1e-9);
    }
    const MonotoneMap s = inverse_map(f, g);
    for (std::size_t k = 0; k < s.size(); ++k) EXPECT_NEAR(s.T[k], 0.5 * s.x[k], 2.0 * f.dx());
}

TEST(MonotoneTransport, AffineGaussianMap) {
    const MonotoneMap m = monotone_transport(normal(0.0, 1.0), normal(3.0, 2.0));
    for (std::size_t k = 0; k < m.size(); ++k) {
        if (std::abs(m.x[k]) <= 2.0) {
            EXPECT_NEAR(m.T[k], 3.0 + 2.0 * m.x[k], 1e-3);
            EXPECT_NEAR(m.Tprime[k], 2.0, 1e-2);
        }
    }
}

TEST(MonotoneTransport, AffineEquivariance) {
    Rng rng(4);
    const GridFunction f = random_log_concave(rng);
    const GridFunction g = random_log_concave(rng);
    const MonotoneMap m = monotone_transport(f, g);
    const MonotoneMap ms = monotone_transport(translate(f, 0.7), translate(g, -1.3));
    ASSERT_EQ(m.size(), ms.size());
    for (std::size_t k = 0; k < m.size(); ++k) EXPECT_NEAR(ms.T[k], m.T[k] - 1.3, 2.0 * f.dx());
}

TEST(MonotoneTransport, RoundTripAndJacobian) {
    Rng rng(6);
    const GridFunction f = random_log_concave(rng, -8, 8, 4096);
    const GridFunction g = random_log_concave(rng, -8, 8, 4096);
    const MonotoneMap t = monotone_transport(f, g);
    const MonotoneMap s = inverse_map(f, g);
    double jac = 0.0;
    for (std::size_t k = 0; k < t.size(); ++k) {
        const std::size_t i = t.first_index + k;
        if (f[i] < 1e-3 * sup_norm(f)) continue;
        EXPECT_NEAR(s(t.T[k]), t.x[k], 2.0 * f.dx());
        jac += f.dx() * std::abs(f[i] - g.value_at(t.T[k]) * t.Tprime[k]);
    }
    EXPECT_LE(jac, 1e-2);
    const auto fd = finite_difference_slope(t);
    for (std::size_t k = 1; k + 1 < t.size(); ++k) {
        const std::size_t i = t.first_index + k;
        if (f[i] < 1e-2 * sup_norm(f)) continue;
        EXPECT_NEAR(fd[k], t.Tprime[k], 0.15 * t.Tprime[k]);
    }
}

TEST(MonotoneTransport, JumpsOverGapsInTarget) {
    // g vanishes on the cell around x = 1. The quantile map jumps over it, so
    // T never lands inside the gap and T' stays finite.
    const GridFunction f = box(0.0, 1.0, -1.0, 3.0, 401);
    std::vector<double> gv(401, 0.0);
    for (std::size_t i = 100; i < 300; ++i) gv[i] = i == 200 ? 0.0 : 1.0;
    const GridFunction g(-1.0, 0.01, gv);
    const MonotoneMap m = monotone_transport(f, g);
    bool jumped = false;
    for (std::size_t k = 0; k < m.size(); ++k) {
        EXPECT_FALSE(m.T[k] > 0.995 + 1e-12 && m.T[k] < 1.005 - 1e-12) << "T=" << m.T[k];
        EXPECT_TRUE(std::isfinite(m.Tprime[k]));
        if (k > 0 && m.T[k - 1] < 0.995 + 1e-12 && m.T[k] > 1.005 - 1e-12) jumped = true;
    }
    EXPECT_TRUE(jumped);
    const TransportDeficit td = transport_deficit(f, g, 0.5);
    EXPECT_FALSE(td.flagged());
    EXPECT_EQ(td.excluded_mass, 0.0);
}

TEST(TransportDeficit, Examples) {
    const GridFunction n1 = normal(0.0, 1.0);
    EXPECT_NEAR(transport_deficit(n1, n1, 0.3).value, 0.0, 1e-8);
    const GridFunction f = box(0.0, 1.0, -1.0, 3.0, 4096);
    const GridFunction g = box(0.0, 2.0, -1.0, 3.0, 4096);
    const double closed = oracle::uniform_pair_deficit();
    EXPECT_NEAR(closed, 0.0606601718, 1e-9);
    EXPECT_NEAR(transport_deficit(f, g, 0.5).value, closed, 1e-3);
    EXPECT_NEAR(midpoint_deficit(f, g).value, closed, 1e-3);
    EXPECT_NEAR(midpoint_deficit(f, f).value, 0.0, 1e-12);
    EXPECT_THROW((void)transport_deficit(f, g, 1.0), DomainError);
}

TEST(TransportDeficit, MidpointIdentity) {
    Rng rng(8);
    for (int k = 0; k < 5; ++k) {
        const GridFunction f = random_log_concave(rng);
        const GridFunction g = random_log_concave(rng);
        EXPECT_NEAR(midpoint_deficit(f, g).value, transport_deficit(f, g, 0.5).value, 1e-10);
    }
}

TEST(TransportDeficit, BelowSupConvolutionDeficitForGaussians) {
    const GridFunction f = normal(0.0, 1.0);
    const GridFunction g = normal(0.0, 1.1);
    const double eps = pl_deficit(sup_convolution(f, g, 0.5).h, f, g, 0.5);
    EXPECT_LE(transport_deficit(f, g, 0.5).value, eps + 1e-4);
}

TEST(BadSet, Measures) {
    const GridFunction f = box(0.0, 1.0, -1.0, 3.0, 4001);
    const GridFunction g = box(0.0, 2.0, -1.0, 3.0, 4001);
    EXPECT_EQ(bad_set_measure(f, monotone_transport(f, f), 1e-3), 0.0);
    EXPECT_EQ(bad_set_measure(f, monotone_transport(f, g), 0.5), 0.0);
    EXPECT_NEAR(bad_set_measure(f, monotone_transport(f, g), 0.5, 3.0), 1.0, 2.0 * f.dx());
}

TEST(TailCut, Examples) {
    const GridFunction u = box(0.0, 1.0, -0.5, 1.5, 2001);
    const auto [a, b] = tail_cut_points(u, 0.1);
    EXPECT_NEAR(a, 0.1, u.dx());
    EXPECT_NEAR(b, 0.9, u.dx());
    const auto [c, d] = tail_cut_points(normal(0.0, 1.0), 0.1587);
    EXPECT_NEAR(c, -1.0, 1e-2);
    EXPECT_NEAR(d, 1.0, 1e-2);
    EXPECT_NEAR(c, -d, 2.0 * 24.0 / 4095.0);
    EXPECT_THROW((void)tail_cut_points(u, 0.5), DomainError);
}

TEST(Bilipschitz, Examples) {
    const GridFunction n1 = normal(0.0, 1.0);
    EXPECT_TRUE(check_bilipschitz(n1, n1, 0.01).holds);
    const BilipschitzReport r = check_bilipschitz(n1, normal(0.0, 1.5), 0.01);
    EXPECT_TRUE(r.holds);
    EXPECT_NEAR(r.max_Tprime, 1.5, 2e-2);

    const GridFunction a = normal(0.0, 1.0, -100.0, 100.0, 1 << 16);
    const GridFunction b = normal(0.0, 20.0, -100.0, 100.0, 1 << 16);
    const BilipschitzReport wide = check_bilipschitz(a, b, 0.01);
    EXPECT_FALSE(wide.holds);
    EXPECT_GT(wide.max_Tprime, 16.0);
    EXPECT_FALSE(wide.hypothesis_holds);
}

TEST(DeficitReport, Consistency) {
    const GridFunction f = box(0.0, 1.0, -1.0, 3.0, 4096);
    const GridFunction g = box(0.0, 2.0, -1.0, 3.0, 4096);
    const DeficitReport r = deficit_report(f, g, 0.5);
    EXPECT_EQ(r.tau, 0.5);
    EXPECT_NEAR(r.epsilon, oracle::uniform_pair_deficit(), 1e-3);
    EXPECT_GE(r.epsilon, r.midpoint_deficit - 1e-3);
    EXPECT_GE(r.midpoint_deficit, 0.0);
    EXPECT_LT(r.tail_cut.first, r.tail_cut.second);
}
