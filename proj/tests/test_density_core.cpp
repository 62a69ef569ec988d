#include "oracles.hpp"
#include "plstab/concavity.hpp"
#include "plstab/grid_function.hpp"
#include "plstab/random_logconcave.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

using namespace plstab;

namespace {

GridFunction gauss_pi(double lo, double hi, std::size_t n) {
    return GridFunction::sample(lo, hi, n, [](double x) { return std::exp(-std::numbers::pi * x * x); });
}

GridFunction indicator(double a, double b, double lo, double hi, std::size_t n, double height = 1.0) {
    return GridFunction::sample(lo, hi, n, [=](double x) { return x >= a && x < b ? height : 0.0; });
}

}  // namespace

TEST(GridFunction, RejectsBadInput) {
    EXPECT_THROW(GridFunction(0.0, 0.0, {1.0, 2.0}), DomainError);
    EXPECT_THROW(GridFunction(0.0, 1.0, {1.0}), DomainError);
    EXPECT_THROW(GridFunction(0.0, 1.0, {1.0, -1.0}), DomainError);
    EXPECT_THROW(GridFunction(0.0, 1.0, {1.0, NAN}), DomainError);
}

TEST(GridFunction, InterpolationAndCellReading) {
    const GridFunction f(0.0, 1.0, {0.0, 2.0, 4.0});
    EXPECT_DOUBLE_EQ(f.value_at(0.5), 1.0);
    EXPECT_DOUBLE_EQ(f.value_at(2.0), 4.0);
    EXPECT_DOUBLE_EQ(f.value_at(2.5), 0.0);
    EXPECT_DOUBLE_EQ(f.cell_value_at(1.4), 2.0);
    EXPECT_DOUBLE_EQ(f.cell_value_at(2.6), 0.0);
}

TEST(Mass, ZeroFunction) { EXPECT_EQ(mass(GridFunction(0.0, 0.1, std::vector<double>(10, 0.0))), 0.0); }

TEST(Mass, IndicatorWithinOneCell) {
    const double dx = 1e-3;
    const GridFunction f(-1.0, dx, [&] {
        std::vector<double> v(4001);
        for (std::size_t i = 0; i < v.size(); ++i) {
            const double x = -1.0 + dx * static_cast<double>(i);
            v[i] = x >= -1e-12 && x <= 1.0 + 1e-12 ? 1.0 : 0.0;
        }
        return v;
    }());
    EXPECT_NEAR(mass(f), 1.0, dx + 1e-12);
}

TEST(Mass, GaussianIntegral) { EXPECT_NEAR(mass(gauss_pi(-6.0, 6.0, 4096)), 1.0, 1e-6); }

TEST(Transforms, NormalizeScaleTranslate) {
    const GridFunction two = indicator(0.0, 1.0, -1.0, 2.0, 3001, 2.0);
    const GridFunction one = normalize(two);
    EXPECT_NEAR(sup_norm(one), 1.0, 2e-3);
    EXPECT_NEAR(mass(one), 1.0, 1e-12);
    const GridFunction f = gauss_pi(-6.0, 6.0, 4097);
    EXPECT_NEAR(sup_norm(f), 1.0, 1e-9);
    EXPECT_NEAR(mass(scale_amplitude(f, 3.7)), 3.7 * mass(f), 1e-12 * mass(f));
    EXPECT_EQ(mass(translate(f, 1.234)), mass(f));
    const GridFunction same = translate(f, 0.0);
    EXPECT_EQ(same.x0(), f.x0());
    EXPECT_EQ(l1_distance(same, f), 0.0);
    EXPECT_THROW((void)scale_amplitude(f, 0.0), DomainError);
    EXPECT_THROW((void)normalize(GridFunction(0.0, 1.0, {0.0, 0.0})), DomainError);
}

TEST(L1Distance, IndicatorsOfDifferentLength) {
    const GridFunction a = normalize(indicator(0.0, 1.0, -1.0, 3.0, 4001));
    const GridFunction b = normalize(indicator(0.0, 2.0, -1.0, 3.0, 4001));
    EXPECT_NEAR(l1_distance(a, a), 0.0, 1e-15);
    EXPECT_NEAR(l1_distance(a, b), 1.0, 2e-3);
}

TEST(L1Distance, ShiftedNormals) {
    const GridFunction a = GridFunction::sample(-10, 10, 8192, [](double x) { return oracle::normal_pdf(x); });
    const GridFunction b = GridFunction::sample(-10, 10, 8192, [](double x) { return oracle::normal_pdf(x, 0.1); });
    // 2 (Phi(0.05) - Phi(-0.05)) = 0.0797552...
    EXPECT_NEAR(oracle::normal_shift_l1(0.1), 0.0797552, 1e-6);
    EXPECT_NEAR(l1_distance(a, b), oracle::normal_shift_l1(0.1), 1e-4);
}

TEST(L1Distance, TriangleInequalityOnRandomTriples) {
    Rng rng(11);
    for (int k = 0; k < 10; ++k) {
        const GridFunction a = random_log_concave(rng, -8, 8, 512);
        const GridFunction b = random_log_concave(rng, -6, 9, 700);
        const GridFunction c = random_log_concave(rng, -9, 7, 333);
        EXPECT_LE(l1_distance(a, c), l1_distance(a, b) + l1_distance(b, c) + 1e-9);
    }
}

TEST(Resample, OwnGridIsIdentity) {
    const GridFunction f = gauss_pi(-4.0, 4.0, 513);
    const GridFunction r = resample(f, {f.x0(), f.dx(), f.size()});
    for (std::size_t i = 0; i < f.size(); ++i) EXPECT_NEAR(r[i], f[i], 1e-12);
}

TEST(TailMass, Windows) {
    const GridFunction e = GridFunction::sample(0.0, 30.0, 60001, [](double x) { return std::exp(-x); });
    EXPECT_EQ(tail_mass(e, SupportWindow{0, static_cast<std::ptrdiff_t>(e.size()) - 1, 0.0}), 0.0);
    EXPECT_DOUBLE_EQ(tail_mass(e, SupportWindow{}), mass(e));
    // Cells with x <= 3.
    const auto last = static_cast<std::ptrdiff_t>(std::floor(3.0 / e.dx() + 1e-9));
    const GridFunction en = normalize(e);
    EXPECT_NEAR(tail_mass(en, SupportWindow{0, last, 0.0}), std::exp(-3.0), 1e-4);
}

TEST(SupportWindow, ThresholdAndBoundary) {
    const GridFunction f = gauss_pi(-6.0, 6.0, 1001);
    const SupportWindow w = support_window(f, 1e-3);
    EXPECT_FALSE(w.empty());
    EXPECT_LT(f[static_cast<std::size_t>(w.lo_index - 1)], 1e-3 + 1e-15);
    EXPECT_GT(f[static_cast<std::size_t>(w.lo_index)], 1e-3);
    EXPECT_LT(boundary_mass_fraction(f), 1e-10);
    EXPECT_GT(boundary_mass_fraction(gauss_pi(-1.0, 1.0, 101)), 1e-3);
}

TEST(Csv, RoundTripAndErrors) {
    const GridFunction f = gauss_pi(-2.0, 2.0, 41);
    std::stringstream ss;
    write_csv(ss, f);
    const GridFunction g = parse_csv(ss);
    ASSERT_EQ(g.size(), f.size());
    for (std::size_t i = 0; i < f.size(); ++i) EXPECT_EQ(g[i], f[i]);
    EXPECT_NEAR(g.dx(), f.dx(), 1e-15);

    std::stringstream bad("0,1\n1,2\n3,1\n");
    EXPECT_THROW((void)parse_csv(bad), DomainError);
    std::stringstream junk("x,value\n0,abc\n1,2\n");
    EXPECT_THROW((void)parse_csv(junk), DomainError);
    std::stringstream neg("0,1\n1,-2\n");
    EXPECT_THROW((void)parse_csv(neg), DomainError);
}

TEST(LogConcavity, Examples) {
    EXPECT_TRUE(is_log_concave(gauss_pi(-5, 5, 1001)));
    EXPECT_TRUE(is_log_concave(indicator(0.0, 1.0, -1.0, 2.0, 301)));
    const GridFunction mix = GridFunction::sample(-8, 8, 1601, [](double x) {
        return 0.5 * oracle::normal_pdf(x, -3.0) + 0.5 * oracle::normal_pdf(x, 3.0);
    });
    const LogConcavity r = is_log_concave(mix);
    EXPECT_FALSE(r);
    ASSERT_TRUE(r.first_violation.has_value());
    EXPECT_NEAR(mix.x(*r.first_violation), 0.0, 3.0);
    EXPECT_THROW(require_log_concave(mix, "mixture"), PreconditionError);
    try {
        require_log_concave(mix, "mixture");
    } catch (const PreconditionError& e) {
        EXPECT_FALSE(e.cells().empty());
        EXPECT_NE(e.check().find("mixture"), std::string::npos);
    }
}

TEST(RandomLogConcave, NormalizedAndLogConcave) {
    Rng rng(3);
    for (int k = 0; k < 20; ++k) {
        const GridFunction f = random_log_concave(rng);
        EXPECT_NEAR(mass(f), 1.0, 1e-12);
        EXPECT_TRUE(is_log_concave(f));
        EXPECT_LT(boundary_mass_fraction(f), 1e-8);
    }
    Rng a(5), b(5);
    const GridFunction fa = random_log_concave(a);
    const GridFunction fb = random_log_concave(b);
    for (std::size_t i = 0; i < fa.size(); ++i) ASSERT_EQ(fa[i], fb[i]);
}
