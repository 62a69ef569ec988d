// plstab <command> [--config FILE] [flags]

#include "plstab/experiment.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

// "name=lo:hi:count" (log-spaced when lo, hi > 0, else evenly spaced) or "name=v1,v2,...".
plstab::SweepSpec parse_sweep(const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos || eq == 0) throw plstab::ConfigError("sweep", "expected name=lo:hi:count or name=v1,v2");
    plstab::SweepSpec s;
    s.param = text.substr(0, eq);
    const std::string rest = text.substr(eq + 1);
    auto to_double = [](const std::string& v) {
        std::size_t used = 0;
        double x = 0.0;
        try {
            x = std::stod(v, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != v.size()) throw plstab::ConfigError("sweep.values", "bad number '" + v + "'");
        return x;
    };
    if (rest.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        std::stringstream ss(rest);
        for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
        if (parts.size() != 3) throw plstab::ConfigError("sweep", "range needs lo:hi:count");
        const double lo = to_double(parts[0]);
        const double hi = to_double(parts[1]);
        const double cnt = to_double(parts[2]);
        if (!(cnt >= 1 && cnt == std::floor(cnt))) throw plstab::ConfigError("sweep", "count must be a positive integer");
        const auto n = static_cast<std::size_t>(cnt);
        const bool geometric = lo > 0.0 && hi > 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double u = n == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(n - 1);
            s.values.push_back(geometric ? std::exp(std::log(lo) + u * (std::log(hi) - std::log(lo))) : lo + u * (hi - lo));
        }
    } else {
        std::stringstream ss(rest);
        for (std::string p; std::getline(ss, p, ',');) s.values.push_back(to_double(p));
    }
    return s;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw plstab::ConfigError("config", "cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical checks for Prekopa-Leindler stability", "plstab"};
    app.require_subcommand(1, 1);
    app.set_version_flag("--version", plstab::kVersion);

    std::string config_path;
    std::optional<double> lambda, t, delta;
    std::optional<std::size_t> n;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out, format, sweep;
    unsigned jobs = 1;

    const std::pair<const char*, const char*> commands[] = {
        {"deficit", "PL deficit and transport deficits of two densities"},
        {"stability", "distance of a pair to the extremal family"},
        {"counterexample", "perturbed Gaussian family; sweep delta to fit the exponent"},
        {"radial", "radial perturbation family in dimension n"},
        {"invariants", "run the property suite"},
        {"hypograph", "area of the truncated log-hypograph"},
    };
    for (const auto& [name, about] : commands) {
        auto* sub = app.add_subcommand(name, about);
        sub->add_option("--config", config_path, "JSON experiment config");
        sub->add_option("--lambda", lambda, "PL weight in (0,1)");
        sub->add_option("--n", n, "grid points");
        sub->add_option("--seed", seed, "random seed");
        sub->add_option("--out", out, "output file (default: standard output)");
        sub->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
        sub->add_option("--t", t, "sup-convolution weight for the counterexample family");
        sub->add_option("--delta", delta, "perturbation size for the counterexample family");
        sub->add_option("--sweep", sweep, "name=lo:hi:count or name=v1,v2,...");
        sub->add_option("--jobs", jobs, "worker threads for sweeps")->check(CLI::Range(1u, 256u));
    }
    CLI11_PARSE(app, argc, argv);
    const std::string command = app.get_subcommands().front()->get_name();

    plstab::ExperimentConfig cfg;
    try {
        if (!config_path.empty()) {
            cfg = plstab::parse_config(slurp(config_path));
            if (command != plstab::to_string(cfg.command)) {
                throw plstab::ConfigError("command", "config is for '" + std::string(plstab::to_string(cfg.command)) +
                                                         "', not '" + command + "'");
            }
        } else {
            cfg.command = *plstab::parse_command(command);
        }
        if (const char* env = std::getenv("PLSTAB_SEED"); env && *env) {
            char* end = nullptr;
            const unsigned long long v = std::strtoull(env, &end, 10);
            if (*end != '\0') throw plstab::ConfigError("PLSTAB_SEED", "expected a nonnegative integer");
            cfg.seed = v;
        }
        if (lambda) cfg.lambda = *lambda;
        if (t) cfg.t = *t;
        if (delta) cfg.delta = *delta;
        if (n) cfg.grid.n = *n;
        if (seed) cfg.seed = *seed;
        if (out) cfg.output.path = *out;
        if (format) cfg.output.format = *format;
        if (sweep) cfg.sweep = parse_sweep(*sweep);
        plstab::validate(cfg);
    } catch (const std::exception& e) {
        std::cerr << "plstab: " << e.what() << "\n";
        return 2;
    }

    const plstab::RunResult res = plstab::run(cfg, jobs);
    for (const auto& w : res.warnings) std::cerr << "plstab: warning: " << w << "\n";
    if (res.exit_code >= 2) {
        std::cerr << "plstab: " << res.error << "\n";
        return res.exit_code;
    }
    if (cfg.output.path.empty()) std::cout << res.output;
    return res.exit_code;
}
