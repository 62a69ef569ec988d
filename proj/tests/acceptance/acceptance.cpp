// Acceptance run: one PASS/FAIL line per criterion. Exit status 1 if any fails.

#include "plstab/plstab.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

using namespace plstab;

namespace {

constexpr std::uint64_t kSeed = 7;
const std::vector<double> kLambdas{0.1, 0.25, 0.5, 0.75};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<double> log_spaced(double lo, double hi, int count) {
    std::vector<double> v;
    for (int k = 0; k < count; ++k) v.push_back(lo * std::pow(hi / lo, static_cast<double>(k) / (count - 1)));
    return v;
}

double gpi(double x) { return std::exp(-std::numbers::pi * x * x); }

CheckResult equality_case() {
    double worst_eps = 0.0;
    double worst_dist = 0.0;
    for (double shift : {0.0, 0.5, 1.5}) {
        for (double lam : {0.25, 0.5, 0.75}) {
            const GridFunction f = GridFunction::sample(-8, 8, 4096, gpi);
            const GridFunction g = GridFunction::sample(-8, 8, 4096, [=](double x) { return gpi(x - shift); });
            const GridFunction h = sup_convolution(f, g, lam).h;
            const StabilityReport r = stability_distance(f, g, h, lam);
            worst_eps = std::max(worst_eps, std::abs(r.epsilon));
            worst_dist = std::max({worst_dist, r.distance_f, r.distance_g, r.distance_h});
        }
    }
    return {"equality_case", worst_eps <= 1e-4 && worst_dist <= 1e-2,
            "max_eps=" + fmt_g(worst_eps) + " max_distance=" + fmt_g(worst_dist)};
}

CheckResult uniform_pair() {
    const auto box = [](double b, double height) {
        return GridFunction::sample(-1.0, 3.0, 4096, [=](double x) { return x > 0.0 && x < b ? height : 0.0; });
    };
    const GridFunction f = box(1.0, 1.0);
    const GridFunction g = box(2.0, 0.5);
    const double closed = (3.0 - 2.0 * std::numbers::sqrt2) / (2.0 * std::numbers::sqrt2);
    const double eps = pl_deficit(sup_convolution(f, g, 0.5).h, f, g, 0.5);
    const double md = midpoint_deficit(f, g).value;
    return {"uniform_pair", std::abs(eps - closed) <= 1e-3 && std::abs(md - closed) <= 1e-3,
            "eps=" + fmt_g(eps) + " midpoint=" + fmt_g(md) + " closed_form=" + fmt_g(closed)};
}

CheckResult sharp_exponent() {
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<std::pair<double, double>> pts;
    double rmin = 1e300;
    for (double delta : log_spaced(0.002, 0.1, 12)) {
        const CounterexampleResult c = counterexample_family({delta, 0.5, 4096});
        pts.emplace_back(c.epsilon, c.distance);
        rmin = std::min(rmin, c.distance / std::sqrt(c.epsilon / 0.5));
    }
    const ExponentFit fit = exponent_fit(pts);
    const double secs = seconds_since(t0);
    return {"sharp_exponent", std::abs(fit.slope - 0.5) <= 0.05 && fit.r2 >= 0.99 && secs < 60.0,
            "slope=" + fmt_g(fit.slope) + " r2=" + fmt_g(fit.r2, 8) + " min_ratio=" + fmt_g(rmin) + " seconds=" + fmt_g(secs, 3)};
}

CheckResult tau_uniformity() {
    const auto rows = tau_scaling_probe({0.1, 0.25, 0.5}, 0.05, 4096);
    double lo = 1e300, hi = 0.0;
    for (const auto& r : rows) {
        lo = std::min(lo, r.ratio);
        hi = std::max(hi, r.ratio);
    }
    return {"tau_uniformity", hi / lo <= 10.0, "ratio_min=" + fmt_g(lo) + " ratio_max=" + fmt_g(hi) + " spread=" + fmt_g(hi / lo)};
}

CheckResult envelopes() {
    CheckResult r = check_envelopes(kSeed + 10, 50, 16384);
    // psi = e^{-x}/2 on [-log 2, inf): lower envelope on x >= 0, upper on [-log 2, 0].
    const double dx = 1e-3;
    const double x0 = -std::log(2.0) + 0.5 * dx;
    std::vector<double> v(30000);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = 0.5 * std::exp(-(x0 + dx * static_cast<double>(i)));
    const GridFunction psi = normalize(GridFunction(x0, dx, v));
    const EnvelopeReport e = median_envelope_check(psi);
    double worst = 0.0;
    for (std::size_t i = 0; i < psi.size(); ++i) {
        const double x = psi.x(i) - e.anchor;
        if (std::abs(x) > e.window) continue;
        const double env = e.anchor_value * std::exp(-2.0 * e.anchor_value * x);
        worst = std::max(worst, std::abs(psi[i] / env - 1.0));
    }
    r.name = "envelopes";
    r.passed = r.passed && worst <= 1e-6;
    r.detail += " witness_tightness=" + fmt_g(worst);
    return r;
}

CheckResult radial() {
    CheckResult red = check_radial_reduction(2048);
    std::vector<std::pair<double, double>> pts;
    for (double delta : log_spaced(0.002, 0.1, 12)) {
        CounterexampleConfig cfg{delta, 0.5, 4096};
        cfg.phi_id = PhiId::even_radial;
        cfg.n = 2;
        cfg.extent = 4.0;
        const RadialCounterexampleResult c = radial_counterexample_family(cfg);
        pts.emplace_back(c.epsilon, c.distance);
    }
    const ExponentFit fit = exponent_fit(pts);
    red.name = "radial";
    red.passed = red.passed && std::abs(fit.slope - 0.5) <= 0.07;
    red.detail += " n2_slope=" + fmt_g(fit.slope) + " r2=" + fmt_g(fit.r2, 8);
    return red;
}

CheckResult determinism() {
    auto suite = [] {
        std::string s;
        for (const auto& c : run_invariants(kSeed)) s += format_line(c) + "\n";
        return s;
    };
    const std::string a = suite();
    const std::string b = suite();
    return {"determinism", a == b, "bytes=" + std::to_string(a.size())};
}

}  // namespace

int main() {
    int failures = 0;
    int index = 0;
    auto report = [&](CheckResult r) {
        ++index;
        failures += !r.passed;
        std::printf("%s %2d %s %s\n", r.passed ? "PASS" : "FAIL", index, r.name.c_str(), r.detail.c_str());
        std::fflush(stdout);
    };

    const auto t0 = std::chrono::steady_clock::now();
    const auto rows = random_pair_deficits(kSeed, 50, 2048, kLambdas);
    const double pair_secs = seconds_since(t0);
    CheckResult pl = check_pl_inequality(rows);
    pl.passed = pl.passed && pair_secs < 30.0;
    pl.detail += " seconds=" + fmt_g(pair_secs, 3);

    report(pl);
    report(equality_case());
    report(check_deficit_domination(rows));
    report(uniform_pair());
    report(sharp_exponent());
    report(tau_uniformity());
    report(check_trace_inequality(kSeed + 3, 100, 1024));
    report(check_numerical_lemma(kSeed + 2, 1000000));
    report(check_lemma_square(200));
    report(check_rearrangement(kSeed + 1, 20, 2048));
    report(envelopes());
    report(check_log_concave_in_t(kSeed + 5, 20, 2048));
    report(radial());
    report(check_bm_gap(kSeed + 6, 20, 2048));
    report(determinism());

    std::printf("%d/%d criteria passed\n", index - failures, index);
    return failures ? 1 : 0;
}
