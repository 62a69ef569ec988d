#pragma once

// Declarative experiment configs and the report writers behind the plstab CLI.

#include "plstab/deficit.hpp"
#include "plstab/errors.hpp"
#include "plstab/grid_function.hpp"
#include "plstab/invariants.hpp"
#include "plstab/levelsets.hpp"
#include "plstab/radial.hpp"
#include "plstab/stability.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace plstab {

inline constexpr const char* kVersion = "0.1.0";

/// Validation failure; path() names the offending field, e.g. "densities[0].sigma".
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string path, const std::string& what)
        : std::runtime_error(path.empty() ? what : path + ": " + what), path_(std::move(path)) {}
    [[nodiscard]] const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

enum class Command { deficit, stability, counterexample, radial, invariants, hypograph };

[[nodiscard]] inline const char* to_string(Command c) {
    switch (c) {
        case Command::deficit: return "deficit";
        case Command::stability: return "stability";
        case Command::counterexample: return "counterexample";
        case Command::radial: return "radial";
        case Command::invariants: return "invariants";
        case Command::hypograph: return "hypograph";
    }
    return "?";
}

[[nodiscard]] inline std::optional<Command> parse_command(const std::string& s) {
    static const std::map<std::string, Command> names{{"deficit", Command::deficit},
                                                      {"stability", Command::stability},
                                                      {"counterexample", Command::counterexample},
                                                      {"radial", Command::radial},
                                                      {"invariants", Command::invariants},
                                                      {"hypograph", Command::hypograph}};
    const auto it = names.find(s);
    if (it == names.end()) return std::nullopt;
    return it->second;
}

struct DensitySpec {
    std::string kind;  // gaussian, exponential, uniform, bump, csv
    std::map<std::string, double> params;
    std::string path;  // csv only
    double amplitude = 1.0;
};

struct GridSpec {
    double min = -8.0;
    double max = 8.0;
    std::size_t n = 4096;
};

struct SweepSpec {
    std::string param;
    std::vector<double> values;
};

struct OutputSpec {
    std::string path;  // empty: standard output
    std::string format = "json";
};

struct ExperimentConfig {
    Command command = Command::deficit;
    std::vector<DensitySpec> densities;
    double lambda = 0.5;
    GridSpec grid;
    std::optional<SweepSpec> sweep;
    OutputSpec output;
    std::uint64_t seed = 1;
    double t = 0.5;
    double delta = 0.05;
    int dimension = 2;
    double theta = 0.25;
    double epsilon = 1e-4;
};

namespace detail {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

inline const std::map<std::string, std::vector<std::string>>& density_keys() {
    static const std::map<std::string, std::vector<std::string>> keys{
        {"gaussian", {"mu", "sigma"}}, {"exponential", {"rate", "loc"}}, {"uniform", {"a", "b"}},
        {"bump", {"center", "width"}}, {"csv", {"path"}}};
    return keys;
}

inline std::vector<std::string> sweep_params(Command c) {
    switch (c) {
        case Command::deficit:
        case Command::stability: return {"lambda"};
        case Command::counterexample:
        case Command::radial: return {"delta", "t"};
        case Command::hypograph: return {"theta", "epsilon"};
        case Command::invariants: return {"seed"};
    }
    return {};
}

inline void reject_unknown(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
    for (const auto& [key, _] : obj.items()) {
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
            throw ConfigError(path.empty() ? key : path + "." + key, "unknown key");
        }
    }
}

inline double number(const json& v, const std::string& path) {
    if (!v.is_number()) throw ConfigError(path, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(path, "must be finite");
    return x;
}

inline DensitySpec parse_density(const json& d, const std::string& path) {
    if (!d.is_object()) throw ConfigError(path, "expected an object");
    if (!d.contains("kind") || !d["kind"].is_string()) throw ConfigError(path + ".kind", "missing density kind");
    DensitySpec s;
    s.kind = d["kind"].get<std::string>();
    const auto it = density_keys().find(s.kind);
    if (it == density_keys().end()) throw ConfigError(path + ".kind", "unknown density kind '" + s.kind + "'");
    for (const auto& [key, v] : d.items()) {
        if (key == "kind") continue;
        const std::string p = path + "." + key;
        if (key == "amplitude") {
            s.amplitude = number(v, p);
            if (!(s.amplitude > 0.0)) throw ConfigError(p, "must be positive");
            continue;
        }
        if (std::find(it->second.begin(), it->second.end(), key) == it->second.end()) throw ConfigError(p, "unknown key");
        if (key == "path") {
            if (!v.is_string()) throw ConfigError(p, "expected a string");
            s.path = v.get<std::string>();
        } else {
            s.params[key] = number(v, p);
        }
    }
    auto get = [&](const char* k, double def) { return s.params.count(k) ? s.params[k] : def; };
    if (s.kind == "gaussian") {
        s.params["mu"] = get("mu", 0.0);
        s.params["sigma"] = get("sigma", 1.0);
        if (!(s.params["sigma"] > 0.0)) throw ConfigError(path + ".sigma", "must be positive");
    } else if (s.kind == "exponential") {
        s.params["rate"] = get("rate", 1.0);
        s.params["loc"] = get("loc", 0.0);
        if (!(s.params["rate"] > 0.0)) throw ConfigError(path + ".rate", "must be positive");
    } else if (s.kind == "uniform") {
        s.params["a"] = get("a", -0.5);
        s.params["b"] = get("b", 0.5);
        if (!(s.params["a"] < s.params["b"])) throw ConfigError(path + ".b", "must exceed a");
    } else if (s.kind == "bump") {
        s.params["center"] = get("center", 0.0);
        s.params["width"] = get("width", 1.0);
        if (!(s.params["width"] > 0.0)) throw ConfigError(path + ".width", "must be positive");
    } else if (s.path.empty()) {
        throw ConfigError(path + ".path", "missing csv path");
    }
    return s;
}

inline std::string locate(const std::string& text, std::size_t byte) {
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace detail

/// Parses and validates a JSON experiment config. Unknown keys are rejected.
[[nodiscard]] inline ExperimentConfig parse_config(const std::string& text) {
    using detail::json;
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("", "malformed JSON at " + detail::locate(text, e.byte));
    }
    if (!j.is_object()) throw ConfigError("", "config must be a JSON object");
    detail::reject_unknown(j, "",
                           {"command", "densities", "lambda", "grid", "sweep", "output", "seed", "t", "delta", "dimension",
                            "theta", "epsilon"});
    ExperimentConfig c;
    if (!j.contains("command") || !j["command"].is_string()) throw ConfigError("command", "missing command");
    const auto cmd = parse_command(j["command"].get<std::string>());
    if (!cmd) throw ConfigError("command", "unknown command '" + j["command"].get<std::string>() + "'");
    c.command = *cmd;
    if (j.contains("densities")) {
        const json& d = j["densities"];
        if (!d.is_array()) throw ConfigError("densities", "expected an array");
        for (std::size_t k = 0; k < d.size(); ++k) {
            c.densities.push_back(detail::parse_density(d[k], "densities[" + std::to_string(k) + "]"));
        }
    }
    if (j.contains("lambda")) c.lambda = detail::number(j["lambda"], "lambda");
    if (j.contains("t")) c.t = detail::number(j["t"], "t");
    if (j.contains("delta")) c.delta = detail::number(j["delta"], "delta");
    if (j.contains("theta")) c.theta = detail::number(j["theta"], "theta");
    if (j.contains("epsilon")) c.epsilon = detail::number(j["epsilon"], "epsilon");
    if (j.contains("dimension")) {
        if (!j["dimension"].is_number_integer()) throw ConfigError("dimension", "expected an integer");
        c.dimension = j["dimension"].get<int>();
    }
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned()) throw ConfigError("seed", "expected a nonnegative integer");
        c.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("grid")) {
        const json& g = j["grid"];
        if (!g.is_object()) throw ConfigError("grid", "expected an object");
        detail::reject_unknown(g, "grid", {"min", "max", "n"});
        if (g.contains("min")) c.grid.min = detail::number(g["min"], "grid.min");
        if (g.contains("max")) c.grid.max = detail::number(g["max"], "grid.max");
        if (g.contains("n")) {
            if (!g["n"].is_number_unsigned()) throw ConfigError("grid.n", "expected a positive integer");
            c.grid.n = g["n"].get<std::size_t>();
        }
    }
    if (j.contains("sweep")) {
        const json& s = j["sweep"];
        if (!s.is_object()) throw ConfigError("sweep", "expected an object");
        detail::reject_unknown(s, "sweep", {"param", "values"});
        if (!s.contains("param") || !s["param"].is_string()) throw ConfigError("sweep.param", "missing sweep parameter");
        if (!s.contains("values") || !s["values"].is_array()) throw ConfigError("sweep.values", "expected an array");
        SweepSpec sw;
        sw.param = s["param"].get<std::string>();
        for (std::size_t k = 0; k < s["values"].size(); ++k) {
            sw.values.push_back(detail::number(s["values"][k], "sweep.values[" + std::to_string(k) + "]"));
        }
        c.sweep = std::move(sw);
    }
    if (j.contains("output")) {
        const json& o = j["output"];
        if (!o.is_object()) throw ConfigError("output", "expected an object");
        detail::reject_unknown(o, "output", {"path", "format"});
        if (o.contains("path")) {
            if (!o["path"].is_string()) throw ConfigError("output.path", "expected a string");
            c.output.path = o["path"].get<std::string>();
        }
        if (o.contains("format")) {
            if (!o["format"].is_string()) throw ConfigError("output.format", "expected a string");
            c.output.format = o["format"].get<std::string>();
        }
    }
    return c;
}

/// Range checks shared by parsed configs and CLI overrides.
inline void validate(const ExperimentConfig& c) {
    if (!(c.grid.n >= 64 && c.grid.n <= (std::size_t{1} << 20))) throw ConfigError("grid.n", "must lie in [64, 2^20]");
    if (!(c.grid.min < c.grid.max)) throw ConfigError("grid.max", "must exceed grid.min");
    if (c.output.format != "json" && c.output.format != "csv") throw ConfigError("output.format", "must be json or csv");
    auto open_unit = [](double v, const char* path) {
        if (!(v > 0.0 && v < 1.0)) throw ConfigError(path, "must lie in (0,1)");
    };
    if (c.sweep) {
        const auto allowed = detail::sweep_params(c.command);
        if (std::find(allowed.begin(), allowed.end(), c.sweep->param) == allowed.end()) {
            throw ConfigError("sweep.param", "cannot sweep '" + c.sweep->param + "' for " + to_string(c.command));
        }
        if (c.sweep->values.empty()) throw ConfigError("sweep.values", "must not be empty");
        for (std::size_t k = 0; k < c.sweep->values.size(); ++k) {
            if (!std::isfinite(c.sweep->values[k])) throw ConfigError("sweep.values[" + std::to_string(k) + "]", "must be finite");
        }
    }
    switch (c.command) {
        case Command::deficit:
        case Command::stability:
            if (c.densities.size() != 2) throw ConfigError("densities", "needs exactly two densities");
            open_unit(c.lambda, "lambda");
            break;
        case Command::hypograph:
            if (c.densities.size() != 1) throw ConfigError("densities", "needs exactly one density");
            if (!(c.theta > 0.0)) throw ConfigError("theta", "must be positive");
            open_unit(c.epsilon, "epsilon");
            break;
        case Command::counterexample:
        case Command::radial:
            if (!c.densities.empty()) throw ConfigError("densities", "not used by " + std::string(to_string(c.command)));
            open_unit(c.t, "t");
            if (!(c.delta >= 0.0 && c.delta < 0.5)) throw ConfigError("delta", "must lie in [0, 1/2)");
            if (c.command == Command::radial && c.dimension < 2) throw ConfigError("dimension", "must be at least 2");
            break;
        case Command::invariants: break;
    }
}

/// Samples a density on the config grid (csv densities keep their own grid).
[[nodiscard]] inline GridFunction build_density(const DensitySpec& s, const GridSpec& grid) {
    const auto& p = s.params;
    std::function<double(double)> fn;
    if (s.kind == "gaussian") {
        const double mu = p.at("mu");
        const double sigma = p.at("sigma");
        fn = [=](double x) {
            const double z = (x - mu) / sigma;
            return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * std::numbers::pi));
        };
    } else if (s.kind == "exponential") {
        const double rate = p.at("rate");
        const double loc = p.at("loc");
        fn = [=](double x) { return x >= loc ? rate * std::exp(-rate * (x - loc)) : 0.0; };
    } else if (s.kind == "uniform") {
        const double a = p.at("a");
        const double b = p.at("b");
        fn = [=](double x) { return x >= a && x <= b ? 1.0 / (b - a) : 0.0; };
    } else if (s.kind == "bump") {
        const double c = p.at("center");
        const double w = p.at("width");
        fn = [=](double x) {
            const double u = (x - c) / w;
            return std::abs(u) < 1.0 ? 35.0 / 32.0 * std::pow(1.0 - u * u, 3) / w : 0.0;
        };
    } else if (s.kind == "csv") {
        return scale_amplitude(read_csv(s.path), s.amplitude);
    } else {
        throw ConfigError("kind", "unknown density kind '" + s.kind + "'");
    }
    return scale_amplitude(GridFunction::sample(grid.min, grid.max, grid.n, fn), s.amplitude);
}

/// FNV-1a 64 of the bytes.
[[nodiscard]] inline std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : bytes) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Canonical JSON of the effective config; the report hash is taken over it.
[[nodiscard]] inline nlohmann::ordered_json to_json(const ExperimentConfig& c) {
    nlohmann::ordered_json j;
    j["command"] = to_string(c.command);
    j["densities"] = nlohmann::ordered_json::array();
    for (const auto& d : c.densities) {
        nlohmann::ordered_json o;
        o["kind"] = d.kind;
        for (const auto& [k, v] : d.params) o[k] = v;
        if (!d.path.empty()) o["path"] = d.path;
        o["amplitude"] = d.amplitude;
        j["densities"].push_back(o);
    }
    j["lambda"] = c.lambda;
    j["grid"] = {{"min", c.grid.min}, {"max", c.grid.max}, {"n", c.grid.n}};
    if (c.sweep) j["sweep"] = {{"param", c.sweep->param}, {"values", c.sweep->values}};
    j["output"] = {{"path", c.output.path}, {"format", c.output.format}};
    j["seed"] = c.seed;
    j["t"] = c.t;
    j["delta"] = c.delta;
    j["dimension"] = c.dimension;
    j["theta"] = c.theta;
    j["epsilon"] = c.epsilon;
    return j;
}

/// The output block is left out so the same experiment hashes alike wherever it is written.
[[nodiscard]] inline std::string config_hash(const ExperimentConfig& c) {
    auto j = to_json(c);
    j.erase("output");
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(j.dump())));
    return buf;
}

/// One table row; columns keep their insertion order.
using Row = std::vector<std::pair<std::string, double>>;

struct Report {
    std::vector<Row> rows;
    std::vector<std::pair<std::string, double>> summary;
    std::vector<CheckResult> checks;  // invariants only
    std::vector<std::string> warnings;
};

/// Runs fn(0..count-1) on `jobs` threads; results keep index order and the
/// first exception by index is rethrown.
template <class T, class Fn>
std::vector<T> parallel_map(std::size_t count, unsigned jobs, Fn fn) {
    std::vector<std::optional<T>> out(count);
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                out[i].emplace(fn(i));
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const unsigned n = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
    std::vector<std::thread> pool;
    for (unsigned k = 1; k < n; ++k) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    std::vector<T> res;
    res.reserve(count);
    for (auto& o : out) res.push_back(std::move(*o));
    return res;
}

namespace detail {

inline ExperimentConfig with_param(ExperimentConfig c, const std::string& param, double v) {
    if (param == "lambda") c.lambda = v;
    else if (param == "delta") c.delta = v;
    else if (param == "t") c.t = v;
    else if (param == "theta") c.theta = v;
    else if (param == "epsilon") c.epsilon = v;
    else if (param == "seed") c.seed = static_cast<std::uint64_t>(v);
    return c;
}

inline Row deficit_row(const ExperimentConfig& c, const std::vector<GridFunction>& d) {
    const DeficitReport r = deficit_report(d[0], d[1], c.lambda);
    // Throws PreconditionError for inputs that are not log-concave.
    const BilipschitzReport b = check_bilipschitz(d[0], d[1], std::min(tail_level_for(r.epsilon), 0.16));
    return {{"lambda", r.lambda},
            {"tau", r.tau},
            {"epsilon", r.epsilon},
            {"transport_deficit", r.transport_deficit},
            {"midpoint_deficit", r.midpoint_deficit},
            {"bad_set_measure", r.bad_set_measure},
            {"tail_cut_lo", r.tail_cut.first},
            {"tail_cut_hi", r.tail_cut.second},
            {"excluded_mass", r.excluded_mass},
            {"max_Tprime", b.max_Tprime},
            {"max_Sprime", b.max_Sprime},
            {"bilipschitz", b.holds ? 1.0 : 0.0}};
}

inline Row stability_row(const ExperimentConfig& c, const std::vector<GridFunction>& d) {
    const GridFunction h = sup_convolution(d[0], d[1], c.lambda).h;
    const StabilityReport r = stability_distance(d[0], d[1], h, c.lambda);
    return {{"lambda", r.lambda},         {"tau", r.tau},
            {"epsilon", r.epsilon},       {"distance_f", r.distance_f},
            {"distance_g", r.distance_g}, {"distance_h", r.distance_h},
            {"shift", r.shift},           {"scale", r.scale}};
}

inline Row counterexample_row(const ExperimentConfig& c) {
    const double tau = std::min(c.t, 1.0 - c.t);
    double eps;
    double dist;
    if (c.command == Command::radial) {
        const auto r = radial_counterexample_family({c.delta, c.t, c.grid.n, PhiId::even_radial, c.dimension, c.grid.max});
        eps = r.epsilon;
        dist = r.distance;
    } else {
        const auto r = counterexample_family({c.delta, c.t, c.grid.n, PhiId::odd_poly, 2, std::max(-c.grid.min, c.grid.max)});
        eps = r.epsilon;
        dist = r.distance;
    }
    const double ratio = eps > 0.0 ? dist / std::sqrt(eps / tau) : 0.0;
    Row row{{"delta", c.delta}, {"t", c.t}, {"tau", tau}, {"epsilon", eps}, {"distance", dist}, {"ratio", ratio}};
    if (c.command == Command::radial) row.insert(row.begin(), {"n", static_cast<double>(c.dimension)});
    return row;
}

inline Row hypograph_row(const ExperimentConfig& c, const std::vector<GridFunction>& d) {
    const HypographArea a = hypograph_area(d[0], c.theta, c.epsilon);
    return {{"theta", a.theta}, {"epsilon", a.epsilon}, {"area", a.area}};
}

inline double column(const Row& r, const std::string& name) {
    for (const auto& [k, v] : r) {
        if (k == name) return v;
    }
    return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace detail

/// Computes the report for a validated config. Throws ConfigError, DomainError or
/// PreconditionError.
[[nodiscard]] inline Report compute(const ExperimentConfig& cfg, unsigned jobs = 1) {
    validate(cfg);
    Report rep;
    std::vector<GridFunction> dens;
    for (std::size_t k = 0; k < cfg.densities.size(); ++k) {
        dens.push_back(build_density(cfg.densities[k], cfg.grid));
        const double b = boundary_mass_fraction(dens.back());
        if (b >= 1e-8) {
            rep.warnings.push_back("densities[" + std::to_string(k) + "] has boundary mass fraction " + fmt_g(b) +
                                   "; widen the grid");
        }
    }
    if (cfg.command == Command::invariants) {
        rep.checks = run_invariants(cfg.seed);
        std::size_t passed = 0;
        for (const auto& c : rep.checks) passed += c.passed;
        rep.summary = {{"passed", static_cast<double>(passed)}, {"total", static_cast<double>(rep.checks.size())}};
        return rep;
    }
    std::vector<ExperimentConfig> points;
    if (cfg.sweep) {
        for (double v : cfg.sweep->values) points.push_back(detail::with_param(cfg, cfg.sweep->param, v));
    } else {
        points.push_back(cfg);
    }
    for (const auto& p : points) validate(p);
    rep.rows = parallel_map<Row>(points.size(), jobs, [&](std::size_t i) -> Row {
        const ExperimentConfig& p = points[i];
        switch (p.command) {
            case Command::deficit: return detail::deficit_row(p, dens);
            case Command::stability: return detail::stability_row(p, dens);
            case Command::hypograph: return detail::hypograph_row(p, dens);
            default: return detail::counterexample_row(p);
        }
    });
    if ((cfg.command == Command::counterexample || cfg.command == Command::radial) && rep.rows.size() >= 3) {
        std::vector<std::pair<double, double>> pts;
        double cmin = std::numeric_limits<double>::infinity();
        double cmax = 0.0;
        for (const Row& r : rep.rows) {
            const double e = detail::column(r, "epsilon");
            const double d = detail::column(r, "distance");
            if (e > 0.0 && d > 0.0) {
                pts.emplace_back(e, d);
                cmin = std::min(cmin, detail::column(r, "ratio"));
                cmax = std::max(cmax, detail::column(r, "ratio"));
            }
        }
        if (pts.size() >= 3) {
            const ExponentFit fit = exponent_fit(pts);
            rep.summary = {{"slope", fit.slope}, {"intercept", fit.intercept}, {"r2", fit.r2}, {"ratio_min", cmin}, {"ratio_max", cmax}};
        }
    }
    return rep;
}

[[nodiscard]] inline std::string csv_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

/// Renders a report; identical inputs give identical bytes.
[[nodiscard]] inline std::string render(const ExperimentConfig& cfg, const Report& rep) {
    std::ostringstream out;
    if (cfg.output.format == "csv") {
        out << "# plstab " << kVersion << " command=" << to_string(cfg.command) << " config_hash=" << config_hash(cfg)
            << " seed=" << cfg.seed << " grid=" << csv_number(cfg.grid.min) << ":" << csv_number(cfg.grid.max) << ":"
            << cfg.grid.n << "\n";
        if (cfg.command == Command::invariants) {
            out << "name,passed,detail\n";
            for (const auto& c : rep.checks) out << c.name << "," << (c.passed ? 1 : 0) << ",\"" << c.detail << "\"\n";
        } else if (!rep.rows.empty()) {
            for (std::size_t k = 0; k < rep.rows[0].size(); ++k) out << (k ? "," : "") << rep.rows[0][k].first;
            out << "\n";
            for (const Row& r : rep.rows) {
                for (std::size_t k = 0; k < r.size(); ++k) out << (k ? "," : "") << csv_number(r[k].second);
                out << "\n";
            }
        }
        if (!rep.summary.empty()) {
            out << "#";
            for (const auto& [k, v] : rep.summary) out << " " << k << "=" << csv_number(v);
            out << "\n";
        }
        return out.str();
    }
    nlohmann::ordered_json j;
    j["version"] = kVersion;
    j["command"] = to_string(cfg.command);
    j["config_hash"] = config_hash(cfg);
    j["seed"] = cfg.seed;
    j["grid"] = {{"min", cfg.grid.min}, {"max", cfg.grid.max}, {"n", cfg.grid.n}};
    if (cfg.command == Command::invariants) {
        j["checks"] = nlohmann::ordered_json::array();
        for (const auto& c : rep.checks) j["checks"].push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    } else {
        j["rows"] = nlohmann::ordered_json::array();
        for (const Row& r : rep.rows) {
            nlohmann::ordered_json o;
            for (const auto& [k, v] : r) o[k] = v;
            j["rows"].push_back(o);
        }
    }
    if (!rep.summary.empty()) {
        nlohmann::ordered_json s;
        for (const auto& [k, v] : rep.summary) s[k] = v;
        j["summary"] = s;
    }
    return j.dump(2) + "\n";
}

struct RunResult {
    int exit_code = 0;
    std::string output;  // the rendered report, or empty on failure
    std::string error;
    std::vector<std::string> warnings;
};

/// Exit codes: 0 success, 2 validation or I/O error, 3 numerical precondition failure.
[[nodiscard]] inline RunResult run(const ExperimentConfig& cfg, unsigned jobs = 1) {
    RunResult res;
    try {
        Report rep = compute(cfg, jobs);
        res.warnings = rep.warnings;
        res.output = render(cfg, rep);
        if (!cfg.output.path.empty()) {
            std::ofstream f(cfg.output.path, std::ios::binary);
            if (!f) throw ConfigError("output.path", "cannot write '" + cfg.output.path + "'");
            f << res.output;
            if (!f) throw ConfigError("output.path", "cannot write '" + cfg.output.path + "'");
        }
        if (cfg.command == Command::invariants) {
            for (const auto& c : rep.checks) {
                if (!c.passed) res.exit_code = 1;
            }
        }
    } catch (const PreconditionError& e) {
        res.exit_code = 3;
        res.error = e.what();
    } catch (const std::exception& e) {
        res.exit_code = 2;
        res.error = e.what();
    }
    return res;
}

}  // namespace plstab
