#pragma once

#include "plstab/concavity.hpp"
#include "plstab/supconvolution.hpp"
#include "plstab/transport.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace plstab {

struct DeficitReport {
    double lambda = 0.5;
    double tau = 0.5;
    double epsilon = 0.0;
    double transport_deficit = 0.0;
    double midpoint_deficit = 0.0;
    double bad_set_measure = 0.0;
    std::pair<double, double> tail_cut{0.0, 0.0};
    double excluded_mass = 0.0;
};

/// Tail level used for the bilipschitz window: 8 eps, kept inside (0, 1/2).
[[nodiscard]] inline double tail_level_for(double epsilon) { return std::clamp(8.0 * epsilon, 1e-12, 0.49); }

/// Deficit quantities for f, g against their own lambda sup-convolution.
[[nodiscard]] inline DeficitReport deficit_report(const GridFunction& f, const GridFunction& g, double lambda,
                                                  double eta = 1e-3) {
    DeficitReport r;
    r.lambda = lambda;
    r.tau = std::min(lambda, 1.0 - lambda);
    const GridFunction h = sup_convolution(f, g, lambda).h;
    r.epsilon = pl_deficit(h, f, g, lambda);
    const TransportDeficit td = transport_deficit(f, g, lambda);
    r.transport_deficit = td.value;
    r.excluded_mass = td.excluded_mass;
    r.midpoint_deficit = midpoint_deficit(f, g).value;
    const GridFunction fn = normalize(f);
    r.bad_set_measure = bad_set_measure(fn, monotone_transport(f, g), eta);
    r.tail_cut = tail_cut_points(f, tail_level_for(r.epsilon));
    return r;
}

struct BilipschitzReport {
    bool holds = false;
    double max_Tprime = 0.0;
    double max_Sprime = 0.0;
    std::pair<double, double> x_cut{0.0, 0.0};
    std::pair<double, double> y_cut{0.0, 0.0};
    /// Deficit of the pair against its 1/2 sup-convolution.
    double epsilon = 0.0;
    /// Whether 8 eps < 1/6, the regime in which the bound is claimed.
    bool hypothesis_holds = false;
};

/// T' < 16 on (x1, x2) and S' < 16 on (y1, y2), two boundary cells excluded.
[[nodiscard]] inline BilipschitzReport check_bilipschitz(const GridFunction& f, const GridFunction& g, double mass_level) {
    require_log_concave(f, "f");
    require_log_concave(g, "g");
    if (!(mass_level > 0.0 && mass_level < 1.0 / 6.0)) throw DomainError("mass level must lie in (0, 1/6)");
    BilipschitzReport r;
    r.x_cut = tail_cut_points(f, mass_level);
    r.y_cut = tail_cut_points(g, mass_level);
    auto max_slope = [](const MonotoneMap& m, std::pair<double, double> cut, double dx) {
        double mx = 0.0;
        for (std::size_t k = 0; k < m.size(); ++k) {
            if (m.x[k] > cut.first + 2.0 * dx && m.x[k] < cut.second - 2.0 * dx) mx = std::max(mx, m.Tprime[k]);
        }
        return mx;
    };
    r.max_Tprime = max_slope(monotone_transport(f, g), r.x_cut, f.dx());
    r.max_Sprime = max_slope(monotone_transport(g, f), r.y_cut, g.dx());
    r.holds = r.max_Tprime < 16.0 && r.max_Sprime < 16.0;
    r.epsilon = pl_deficit(sup_convolution(f, g, 0.5).h, f, g, 0.5);
    r.hypothesis_holds = 8.0 * r.epsilon < 1.0 / 6.0;
    return r;
}

}  // namespace plstab
