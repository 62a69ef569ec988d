#pragma once

#include "plstab/grid_function.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

namespace plstab {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// log of every cell, with -inf for cells at or below the zero threshold.
[[nodiscard]] inline std::vector<double> log_values(const GridFunction& f) {
    std::vector<double> out(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) out[i] = f[i] > kZeroThreshold ? std::log(f[i]) : kNegInf;
    return out;
}

struct LogConcavity {
    bool log_concave = true;
    std::optional<std::size_t> first_violation;

    explicit operator bool() const noexcept { return log_concave; }
};

/// Discrete midpoint concavity of log f on the support interval. A zero cell
/// strictly inside the support counts as a violation.
[[nodiscard]] inline LogConcavity is_log_concave(const GridFunction& f, double tol = 1e-9) {
    const auto bounds = support_bounds(f);
    if (!bounds) return {};
    const auto [lo, hi] = *bounds;
    for (std::size_t i = lo; i <= hi; ++i) {
        if (f[i] <= kZeroThreshold) return {false, i};
    }
    for (std::size_t i = lo + 1; i + 1 <= hi; ++i) {
        const double d2 = std::log(f[i - 1]) + std::log(f[i + 1]) - 2.0 * std::log(f[i]);
        if (d2 > tol) return {false, i};
    }
    return {};
}

/// Cells where log-concavity fails, for precondition diagnostics.
[[nodiscard]] inline std::vector<std::size_t> log_concavity_violations(const GridFunction& f, double tol = 1e-9) {
    std::vector<std::size_t> bad;
    const auto bounds = support_bounds(f);
    if (!bounds) return bad;
    const auto [lo, hi] = *bounds;
    for (std::size_t i = lo; i <= hi; ++i) {
        if (f[i] <= kZeroThreshold) {
            bad.push_back(i);
        } else if (i > lo && i < hi && f[i - 1] > kZeroThreshold && f[i + 1] > kZeroThreshold) {
            const double d2 = std::log(f[i - 1]) + std::log(f[i + 1]) - 2.0 * std::log(f[i]);
            if (d2 > tol) bad.push_back(i);
        }
    }
    return bad;
}

inline void require_log_concave(const GridFunction& f, const char* what) {
    if (!is_log_concave(f)) throw PreconditionError(std::string(what) + " is not log-concave", log_concavity_violations(f));
}

}  // namespace plstab
