#pragma once

// Seeded property checks shared by the `invariants` command and the acceptance
// runner. Every check is deterministic in its seed and returns a one-line summary.

#include "plstab/deficit.hpp"
#include "plstab/levelsets.hpp"
#include "plstab/logconcave.hpp"
#include "plstab/radial.hpp"
#include "plstab/random_logconcave.hpp"
#include "plstab/stability.hpp"
#include "plstab/supconvolution.hpp"
#include "plstab/transport.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

namespace plstab {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

[[nodiscard]] inline std::string fmt_g(double v, int digits = 6) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

[[nodiscard]] inline std::string format_line(const CheckResult& r) {
    return std::string(r.passed ? "PASS " : "FAIL ") + r.name + (r.detail.empty() ? "" : " " + r.detail);
}

struct PairDeficits {
    double lambda;
    double epsilon;
    double transport;
    double mirrored;
};

/// Random log-concave pairs on [-8, 8]; for each lambda the sup-convolution
/// deficit and both transport deficits.
[[nodiscard]] inline std::vector<PairDeficits> random_pair_deficits(std::uint64_t seed, std::size_t pairs, std::size_t grid_n,
                                                                    const std::vector<double>& lambdas) {
    Rng rng(seed);
    std::vector<PairDeficits> out;
    for (std::size_t p = 0; p < pairs; ++p) {
        const GridFunction f = random_log_concave(rng, -8.0, 8.0, grid_n);
        const GridFunction g = random_log_concave(rng, -8.0, 8.0, grid_n);
        for (double lam : lambdas) {
            const double eps = pl_deficit(sup_convolution(f, g, lam).h, f, g, lam);
            out.push_back({lam, eps, transport_deficit(f, g, lam).value, transport_deficit(g, f, 1.0 - lam).value});
        }
    }
    return out;
}

[[nodiscard]] inline CheckResult check_pl_inequality(const std::vector<PairDeficits>& rows) {
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& r : rows) worst = std::min(worst, r.epsilon);
    return {"pl_inequality", worst >= -1e-6, "cases=" + std::to_string(rows.size()) + " min_eps=" + fmt_g(worst)};
}

[[nodiscard]] inline CheckResult check_deficit_domination(const std::vector<PairDeficits>& rows) {
    double worst = std::numeric_limits<double>::infinity();
    double worst_mirror = std::numeric_limits<double>::infinity();
    for (const auto& r : rows) {
        worst = std::min(worst, r.epsilon - (0.98 * r.transport - 1e-8));
        worst_mirror = std::min(worst_mirror, r.epsilon - (0.98 * r.mirrored - 1e-8));
    }
    return {"deficit_domination", worst >= 0.0 && worst_mirror >= 0.0,
            "min_margin=" + fmt_g(worst) + " min_margin_mirrored=" + fmt_g(worst_mirror)};
}

[[nodiscard]] inline CheckResult check_rearrangement(std::uint64_t seed, std::size_t triples, std::size_t grid_n,
                                                     std::size_t samples = 2000) {
    Rng rng(seed);
    bool equimeasurable = true;
    double worst_invariance = 0.0;
    std::size_t violations = 0;
    const double lambdas[] = {0.25, 0.5, 0.75};
    for (std::size_t k = 0; k < triples; ++k) {
        const GridFunction f = random_log_concave(rng, -8.0, 8.0, grid_n);
        const GridFunction g = random_log_concave(rng, -8.0, 8.0, grid_n);
        const double lam = lambdas[k % 3];
        const GridFunction h = sup_convolution(f, g, lam).h;
        for (const GridFunction* u : {&f, &g, &h}) {
            std::vector<double> a(u->values().begin(), u->values().end());
            const GridFunction us = symmetric_rearrangement(*u);
            std::vector<double> b(us.values().begin(), us.values().end());
            std::sort(a.begin(), a.end());
            std::sort(b.begin(), b.end());
            equimeasurable = equimeasurable && a == b;
        }
        const double d0 = pl_deficit(h, f, g, lam);
        const double d1 = pl_deficit(symmetric_rearrangement(h), symmetric_rearrangement(f), symmetric_rearrangement(g), lam);
        worst_invariance = std::max(worst_invariance, std::abs(d1 - d0));
        violations += check_rearranged_pl(h, f, g, lam, samples, rng.next());
    }
    return {"rearrangement", equimeasurable && worst_invariance <= 1e-10 && violations == 0,
            std::string("equimeasurable=") + (equimeasurable ? "yes" : "no") + " max_deficit_change=" +
                fmt_g(worst_invariance) + " violations=" + std::to_string(violations)};
}

[[nodiscard]] inline CheckResult check_numerical_lemma(std::uint64_t seed, std::size_t count) {
    Rng rng(seed);
    std::size_t violations = 0;
    for (std::size_t k = 0; k < count; ++k) {
        const double lam = rng.uniform(1e-6, 1.0 - 1e-6);
        const double y = std::exp(rng.uniform(-7.0, 7.0));
        const double z = rng.uniform() < 0.1 ? y : std::exp(rng.uniform(-7.0, 7.0));
        const double mean = lam * std::sqrt(y) + (1.0 - lam) * std::sqrt(z);
        const double base = mean * mean;
        const double pick = rng.uniform();
        double x = base;
        if (pick > 0.2) x = base * (1.0 + std::exp(rng.uniform(-30.0, 3.0)));
        const LemmaSides s = numerical_lemma_gap(x, y, z, lam);
        if (!(s.lhs <= s.rhs)) ++violations;
    }
    return {"numerical_lemma", violations == 0, "triples=" + std::to_string(count) + " violations=" + std::to_string(violations)};
}

/// Random unimodal f and piecewise-linear Phi with Phi(0) = 0.
[[nodiscard]] inline CheckResult check_trace_inequality(std::uint64_t seed, std::size_t trials, std::size_t grid_n) {
    Rng rng(seed);
    double worst = -std::numeric_limits<double>::infinity();
    bool ok = true;
    for (std::size_t k = 0; k < trials; ++k) {
        const double dx = 8.0 / static_cast<double>(grid_n - 1);
        const std::size_t peak = rng.index(grid_n / 8, grid_n - grid_n / 8);
        const std::size_t a = rng.index(0, peak);
        const std::size_t b = rng.index(peak, grid_n - 1);
        std::vector<double> v(grid_n, 0.0);
        double level = 0.0;
        for (std::size_t i = a; i <= peak; ++i) {
            level += rng.uniform() < 0.3 ? rng.uniform(0.0, 0.05) : 0.0;
            v[i] = level + (i == peak ? 0.5 : 0.0);
        }
        level = v[peak];
        for (std::size_t i = peak + 1; i <= b; ++i) {
            level = std::max(0.0, level - (rng.uniform() < 0.3 ? rng.uniform(0.0, 0.05) : 0.0));
            v[i] = level;
        }
        // The mode sits on the node x = 0.
        const double lo = -static_cast<double>(peak) * dx;
        const GridFunction f(lo, dx, std::move(v));
        PiecewiseLinear phi;
        const std::size_t knots = rng.index(2, 6);
        std::vector<double> xs{0.0};
        for (std::size_t j = 0; j < knots; ++j) xs.push_back(rng.uniform(-5.0, 5.0));
        std::sort(xs.begin(), xs.end());
        xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
        for (double x : xs) {
            phi.xs.push_back(x);
            phi.ys.push_back(x == 0.0 ? 0.0 : rng.uniform(-3.0, 3.0));
        }
        const TraceSides s = trace_inequality_check(f, phi);
        const double slack = 10.0 * dx * phi.lipschitz() * sup_norm(f);
        worst = std::max(worst, s.lhs - s.rhs - slack);
        ok = ok && s.lhs <= s.rhs + slack;
    }
    return {"trace_inequality", ok, "trials=" + std::to_string(trials) + " max_excess=" + fmt_g(worst)};
}

/// Median and nu envelope bounds on random log-concave densities at tolerance 5e-3.
[[nodiscard]] inline CheckResult check_envelopes(std::uint64_t seed, std::size_t count, std::size_t grid_n) {
    Rng rng(seed);
    double worst_median = 0.0;
    double worst_nu = 0.0;
    double worst_tail = 0.0;
    bool ok = true;
    for (std::size_t k = 0; k < count; ++k) {
        const GridFunction f = random_log_concave(rng, -6.0, 6.0, grid_n);
        const EnvelopeReport m = median_envelope_check(f);
        const double x = Cdf(f).quantile(0.75);
        const NuEnvelopeReport nu = nu_envelope_check(f, x);
        worst_median = std::max({worst_median, m.worst_lower, m.worst_upper});
        worst_nu = std::max({worst_nu, nu.envelope.worst_lower, nu.envelope.worst_upper});
        worst_tail = std::max(worst_tail, nu.tail_ratio);
        ok = ok && m.passes(5e-3) && nu.passes(5e-3);
    }
    return {"envelopes", ok,
            "densities=" + std::to_string(count) + " worst_median_ratio=" + fmt_g(worst_median) +
                " worst_nu_ratio=" + fmt_g(worst_nu) + " worst_tail_ratio=" + fmt_g(worst_tail)};
}

/// Second differences of log mass(h_t) on t = 0.1..0.9.
[[nodiscard]] inline CheckResult check_log_concave_in_t(std::uint64_t seed, std::size_t pairs, std::size_t grid_n) {
    Rng rng(seed);
    std::vector<double> ts;
    for (int k = 1; k <= 9; ++k) ts.push_back(0.1 * k);
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p < pairs; ++p) {
        const GridFunction f = random_log_concave(rng, -8.0, 8.0, grid_n);
        const GridFunction g = random_log_concave(rng, -8.0, 8.0, grid_n);
        const auto curve = integral_curve(f, g, ts);
        for (std::size_t k = 1; k + 1 < curve.size(); ++k) {
            const double d2 = std::log(curve[k - 1].second) + std::log(curve[k + 1].second) - 2.0 * std::log(curve[k].second);
            worst = std::max(worst, d2);
        }
    }
    return {"log_concave_in_t", worst <= 1e-3, "pairs=" + std::to_string(pairs) + " max_second_difference=" + fmt_g(worst)};
}

[[nodiscard]] inline CheckResult check_lemma_square(int steps) {
    const double r1 = lemma_square_min_ratio(1, steps);
    const double r2 = lemma_square_min_ratio(2, steps);
    const double r3 = lemma_square_min_ratio(3, steps);
    const double r5 = lemma_square_min_ratio(5, steps);
    const bool ok = std::abs(r1 - 0.5) <= 1e-6 && r2 > 0.01 && r3 > 0.01 && r5 > 0.01;
    return {"lemma_square", ok,
            "n1=" + fmt_g(r1, 10) + " n2=" + fmt_g(r2) + " n3=" + fmt_g(r3) + " n5=" + fmt_g(r5)};
}

/// n = 1 radial operations against the 1-D operations on even extensions.
[[nodiscard]] inline CheckResult check_radial_reduction(std::size_t grid_n) {
    const auto f = RadialProfile::sample(1, 6.0, grid_n, [](double r) { return std::exp(-std::numbers::pi * r * r); });
    const auto g = RadialProfile::sample(1, 6.0, grid_n, [](double r) { return std::exp(-std::numbers::pi * r * r / 1.69); });
    const GridFunction fe = even_extension(f);
    const GridFunction ge = even_extension(g);
    double worst = 0.0;
    worst = std::max(worst, std::abs(radial_mass(f) - mass(fe)));
    worst = std::max(worst, std::abs(radial_deficit(f, g).value - midpoint_deficit(fe, ge).value));
    worst = std::max(worst, std::abs(radial_l1_distance(f, g) - l1_distance(fe, ge)));
    const RadialProfile h = radial_sup_convolution(f, g, 0.5);
    const GridFunction he = sup_convolution(fe, ge, 0.5).h;
    worst = std::max(worst, std::abs(radial_pl_deficit(h, f, g, 0.5) - pl_deficit(he, fe, ge, 0.5)));
    return {"radial_reduction", worst <= 1e-6, "max_abs_difference=" + fmt_g(worst)};
}

[[nodiscard]] inline CheckResult check_bm_gap(std::uint64_t seed, std::size_t triples, std::size_t grid_n) {
    Rng rng(seed);
    double worst = std::numeric_limits<double>::infinity();
    const double lambdas[] = {0.25, 0.5, 0.75};
    for (std::size_t k = 0; k < triples; ++k) {
        const GridFunction f0 = random_log_concave(rng, -8.0, 8.0, grid_n);
        const GridFunction g0 = random_log_concave(rng, -8.0, 8.0, grid_n);
        // Unit sup norm, so the truncation level sits below every peak.
        const GridFunction f = scale_amplitude(f0, 1.0 / sup_norm(f0));
        const GridFunction g = scale_amplitude(g0, 1.0 / sup_norm(g0));
        const double lam = lambdas[k % 3];
        const GridFunction h = sup_convolution(f, g, lam).h;
        worst = std::min(worst, bm_two_term_gap(f, g, h, lam, 0.25, 1e-4));
    }
    return {"bm_two_term_gap", worst >= -1e-6, "triples=" + std::to_string(triples) + " min_gap=" + fmt_g(worst)};
}

[[nodiscard]] inline CheckResult check_hull(std::uint64_t seed, std::size_t count, std::size_t grid_n) {
    Rng rng(seed);
    double worst = 0.0;
    bool ok = true;
    for (std::size_t k = 0; k < count; ++k) {
        const GridFunction f = random_log_concave(rng, -8.0, 8.0, grid_n);
        const GridFunction g = random_log_concave(rng, -8.0, 8.0, grid_n);
        std::vector<double> mix(f.size());
        for (std::size_t i = 0; i < f.size(); ++i) mix[i] = 0.5 * f[i] + 0.5 * translate(g, 3.0).value_at(f.x(i));
        const GridFunction m(f.x0(), f.dx(), std::move(mix));
        const LogConcaveEnvelope env = log_concave_hull(m);
        const LogConcaveEnvelope again = log_concave_hull(env.hull);
        for (std::size_t i = 0; i < m.size(); ++i) {
            ok = ok && env.hull[i] >= m[i] * (1.0 - 1e-12);
            worst = std::max(worst, std::abs(again.hull[i] - env.hull[i]) / std::max(env.hull[i], 1e-300));
        }
        ok = ok && static_cast<bool>(is_log_concave(env.hull));
    }
    ok = ok && worst <= 1e-10;
    return {"log_concave_hull", ok, "count=" + std::to_string(count) + " idempotence_error=" + fmt_g(worst)};
}

/// The full property suite at desk-check sizes.
[[nodiscard]] inline std::vector<CheckResult> run_invariants(std::uint64_t seed) {
    std::vector<CheckResult> out;
    const auto rows = random_pair_deficits(seed, 8, 1024, {0.1, 0.25, 0.5, 0.75});
    out.push_back(check_pl_inequality(rows));
    out.push_back(check_deficit_domination(rows));
    out.push_back(check_rearrangement(seed + 1, 6, 1024));
    out.push_back(check_numerical_lemma(seed + 2, 100000));
    out.push_back(check_trace_inequality(seed + 3, 50, 1024));
    out.push_back(check_envelopes(seed + 4, 20, 16384));
    out.push_back(check_log_concave_in_t(seed + 5, 3, 1024));
    out.push_back(check_lemma_square(200));
    out.push_back(check_radial_reduction(2048));
    out.push_back(check_bm_gap(seed + 6, 6, 1024));
    out.push_back(check_hull(seed + 7, 5, 1024));
    return out;
}

}  // namespace plstab
