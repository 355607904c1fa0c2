// config.hpp: flat key/value experiment configuration.
//
//   # comment
//   experiment = dynamics
//   chain.L = 33
//   bath.kappa = 2
//   sweep.gamma = [0.5, 2, 20]
//
// Keys are dotted, values are scalars or bracketed comma lists.

#pragma once

#include "aahdiss/bath.hpp"
#include "aahdiss/core.hpp"
#include "aahdiss/heom.hpp"
#include "aahdiss/lattice.hpp"
#include "aahdiss/semiclassical.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace aahdiss {

enum class ExperimentKind { dynamics, spectrum, collapse, compare_markovian, semiclassical, filter_sizes };

inline const char* to_string(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::dynamics: return "dynamics";
        case ExperimentKind::spectrum: return "spectrum";
        case ExperimentKind::collapse: return "collapse";
        case ExperimentKind::compare_markovian: return "compare_markovian";
        case ExperimentKind::semiclassical: return "semiclassical";
        case ExperimentKind::filter_sizes: return "filter_sizes";
    }
    return "dynamics";
}

inline std::optional<ExperimentKind> parse_experiment_kind(const std::string& s) {
    for (auto k : {ExperimentKind::dynamics, ExperimentKind::spectrum, ExperimentKind::collapse,
                   ExperimentKind::compare_markovian, ExperimentKind::semiclassical,
                   ExperimentKind::filter_sizes})
        if (s == to_string(k)) return k;
    if (s == "compare") return ExperimentKind::compare_markovian;
    if (s == "filter-sizes") return ExperimentKind::filter_sizes;
    return std::nullopt;
}

struct TimeGrid {
    double t_min{0.01};  // first nonzero sample on log grids
    double t_max{10.0};
    int points{200};
    bool log{true};

    // Log grids start with t = 0 followed by `points` log-spaced samples in [t_min, t_max].
    std::vector<double> samples() const {
        std::vector<double> t{0.0};
        if (log) {
            for (int i = 0; i < points; ++i)
                t.push_back(points == 1 ? t_max
                                        : t_min * std::pow(t_max / t_min, double(i) / double(points - 1)));
        } else {
            for (int i = 1; i <= points; ++i) t.push_back(t_max * double(i) / double(points));
        }
        return t;
    }
};

struct FitWindow {
    double lo{0.0};
    double hi{0.0};
};

struct ExperimentConfig {
    ExperimentKind kind{ExperimentKind::dynamics};
    ChainSpec chain{};
    BathSpec bath{2.0, 1.0, 0.0};
    TierSpec tier{6};
    TimeGrid time{};
    int initial_site{0};  // 0 selects the central site

    // Sweep axes; empty means "use the scalar value".
    std::vector<double> sweep_gamma, sweep_kappa, sweep_h, sweep_omega0, sweep_g;
    std::vector<int> sweep_L;

    std::optional<FitWindow> fit_early, fit_late;
    int filter_width{5};

    double rtol{1e-8};
    double atol{1e-10};

    std::size_t spectrum_count{0};  // 0 means L² eigenvalues
    double zero_tol{0.0};           // 0 means 1e-9·κ
    std::size_t dense_limit{8000};
    double memory_budget_gib{3.0};

    double g{0.2};  // semiclassical noise strength
    LocalizationModel model{LocalizationModel::deep};

    int filter_min_L{9};
    int filter_max_L{101};
    double filter_epsilon{0.02};

    bool dump_rho{false};
    std::string output_dir{"out"};

    std::map<std::string, std::string> raw;  // every key as read, for the manifest
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

inline bool parse_double(const std::string& s, double& out) {
    try {
        std::size_t pos = 0;
        out = std::stod(s, &pos);
        return pos == s.size() && std::isfinite(out);
    } catch (...) {
        return false;
    }
}

inline bool parse_int(const std::string& s, int& out) {
    try {
        std::size_t pos = 0;
        out = std::stoi(s, &pos);
        return pos == s.size();
    } catch (...) {
        return false;
    }
}

inline bool is_list(const std::string& v) { return v.size() >= 2 && v.front() == '[' && v.back() == ']'; }

inline std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    const std::string body = trim(v.substr(1, v.size() - 2));
    if (body.empty()) return out;
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(trim(item));
    return out;
}

}  // namespace detail

// Reads `key = value` lines. Duplicate keys and malformed lines are reported together.
inline std::map<std::string, std::string> parse_key_values(std::istream& in) {
    std::map<std::string, std::string> kv;
    std::vector<std::string> problems;
    std::string line;
    int n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            problems.push_back("line " + std::to_string(n) + ": expected 'key = value'");
            continue;
        }
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (key.empty()) {
            problems.push_back("line " + std::to_string(n) + ": empty key");
            continue;
        }
        if (!kv.emplace(key, value).second) problems.push_back(key + ": duplicate key");
    }
    if (!problems.empty()) throw validation_error(std::move(problems));
    return kv;
}

// Builds and validates a config; every offending field is listed in the thrown validation_error.
// `fallback` is the kind used when the file has no `experiment` key.
inline ExperimentConfig config_from_key_values(const std::map<std::string, std::string>& kv,
                                               ExperimentKind fallback = ExperimentKind::dynamics) {
    ExperimentConfig c;
    c.kind = fallback;
    c.raw = kv;
    std::vector<std::string> problems;
    std::set<std::string> used;

    auto get = [&](const std::string& key) -> const std::string* {
        used.insert(key);
        auto it = kv.find(key);
        return it == kv.end() ? nullptr : &it->second;
    };
    auto real = [&](const std::string& key, double& dst) {
        if (const auto* v = get(key))
            if (!detail::parse_double(*v, dst)) problems.push_back(key + ": expected a number, got '" + *v + "'");
    };
    auto integer = [&](const std::string& key, int& dst) {
        if (const auto* v = get(key))
            if (!detail::parse_int(*v, dst)) problems.push_back(key + ": expected an integer, got '" + *v + "'");
    };
    auto real_list = [&](const std::string& key, std::vector<double>& dst) {
        const auto* v = get(key);
        if (!v) return;
        if (!detail::is_list(*v)) {
            double x;
            if (detail::parse_double(*v, x)) dst = {x};
            else problems.push_back(key + ": expected a list '[a, b, ...]'");
            return;
        }
        const auto items = detail::split_list(*v);
        if (items.empty()) problems.push_back(key + ": sweep list is empty");
        for (const auto& s : items) {
            double x;
            if (detail::parse_double(s, x)) dst.push_back(x);
            else problems.push_back(key + ": bad list entry '" + s + "'");
        }
    };
    auto window = [&](const std::string& key, std::optional<FitWindow>& dst) {
        const auto* v = get(key);
        if (!v) return;
        std::vector<std::string> items;
        if (detail::is_list(*v)) items = detail::split_list(*v);
        FitWindow w;
        if (items.size() != 2 || !detail::parse_double(items[0], w.lo) || !detail::parse_double(items[1], w.hi)) {
            problems.push_back(key + ": expected '[lo, hi]'");
            return;
        }
        if (!(w.lo > 0.0 && w.hi > w.lo)) problems.push_back(key + ": need 0 < lo < hi");
        dst = w;
    };

    if (const auto* v = get("experiment")) {
        if (auto k = parse_experiment_kind(*v)) c.kind = *k;
        else problems.push_back("experiment: unknown kind '" + *v + "'");
    }

    integer("chain.L", c.chain.L);
    real("chain.J", c.chain.J);
    real("chain.h", c.chain.h);
    real("chain.phi", c.chain.phi);
    real("chain.beta", c.chain.beta);
    real("bath.kappa", c.bath.kappa);
    real("bath.gamma", c.bath.gamma);
    real("bath.omega0", c.bath.omega0);
    integer("hierarchy.tier", c.tier.tier);
    integer("initial.site", c.initial_site);

    real("time.t_min", c.time.t_min);
    real("time.t_max", c.time.t_max);
    integer("time.points", c.time.points);
    if (const auto* v = get("time.spacing")) {
        if (*v == "log") c.time.log = true;
        else if (*v == "linear") c.time.log = false;
        else problems.push_back("time.spacing: expected 'log' or 'linear'");
    }

    real_list("sweep.gamma", c.sweep_gamma);
    real_list("sweep.kappa", c.sweep_kappa);
    real_list("sweep.h", c.sweep_h);
    real_list("sweep.omega0", c.sweep_omega0);
    real_list("sweep.g", c.sweep_g);
    {
        std::vector<double> Ls;
        real_list("sweep.L", Ls);
        for (double x : Ls) {
            if (x != std::floor(x)) problems.push_back("sweep.L: entries must be integers");
            c.sweep_L.push_back(static_cast<int>(x));
        }
    }

    window("fit.early", c.fit_early);
    window("fit.late", c.fit_late);
    integer("observables.filter_width", c.filter_width);

    real("integrator.rtol", c.rtol);
    real("integrator.atol", c.atol);

    {
        int k = 0;
        integer("spectrum.count", k);
        if (k < 0) problems.push_back("spectrum.count: must be >= 0");
        c.spectrum_count = static_cast<std::size_t>(std::max(k, 0));
        int lim = static_cast<int>(c.dense_limit);
        integer("spectrum.dense_limit", lim);
        if (lim <= 0) problems.push_back("spectrum.dense_limit: must be positive");
        c.dense_limit = static_cast<std::size_t>(std::max(lim, 1));
    }
    real("spectrum.zero_tol", c.zero_tol);
    real("limits.memory_gib", c.memory_budget_gib);

    real("semiclassical.g", c.g);
    if (const auto* v = get("semiclassical.model")) {
        if (*v == "deep") c.model = LocalizationModel::deep;
        else if (*v == "exact") c.model = LocalizationModel::exact;
        else problems.push_back("semiclassical.model: expected 'deep' or 'exact'");
    }

    integer("filter.min_L", c.filter_min_L);
    integer("filter.max_L", c.filter_max_L);
    real("filter.epsilon", c.filter_epsilon);

    if (const auto* v = get("output.dump_rho")) {
        if (*v == "true") c.dump_rho = true;
        else if (*v == "false") c.dump_rho = false;
        else problems.push_back("output.dump_rho: expected 'true' or 'false'");
    }
    if (const auto* v = get("output.dir")) c.output_dir = *v;

    for (const auto& [k, v] : kv)
        if (!used.count(k)) problems.push_back(k + ": unknown key");

    // Range checks on scalars and every sweep value.
    auto check_L = [&](int L, const std::string& key) {
        if (L < 3 || L % 2 == 0) problems.push_back(key + ": L must be odd and >= 3 (got " + std::to_string(L) + ")");
    };
    if (c.kind != ExperimentKind::filter_sizes) {
        if (c.sweep_L.empty()) check_L(c.chain.L, "chain.L");
        for (int L : c.sweep_L) check_L(L, "sweep.L");
    }
    if (!(c.chain.J > 0.0)) problems.push_back("chain.J: must be > 0");
    if (!(c.chain.h >= 0.0)) problems.push_back("chain.h: must be >= 0");
    for (double h : c.sweep_h)
        if (!(h >= 0.0)) problems.push_back("sweep.h: entries must be >= 0");
    if (!(c.bath.kappa >= 0.0)) problems.push_back("bath.kappa: must be >= 0");
    for (double k : c.sweep_kappa)
        if (!(k >= 0.0)) problems.push_back("sweep.kappa: entries must be >= 0");
    if (!(c.bath.gamma > 0.0)) problems.push_back("bath.gamma: must be > 0");
    for (double g : c.sweep_gamma)
        if (!(g > 0.0)) problems.push_back("sweep.gamma: entries must be > 0");
    if (!(c.bath.omega0 >= 0.0)) problems.push_back("bath.omega0: must be >= 0");
    for (double w : c.sweep_omega0)
        if (!(w >= 0.0)) problems.push_back("sweep.omega0: entries must be >= 0");
    if (!(c.g >= 0.0)) problems.push_back("semiclassical.g: must be >= 0");
    for (double g : c.sweep_g)
        if (!(g >= 0.0)) problems.push_back("sweep.g: entries must be >= 0");
    if (c.tier.tier < 0) problems.push_back("hierarchy.tier: must be >= 0");
    if (!(c.time.t_max > 0.0)) problems.push_back("time.t_max: must be > 0");
    if (c.time.points < 1) problems.push_back("time.points: must be >= 1");
    if (c.time.log && !(c.time.t_min > 0.0 && c.time.t_min < c.time.t_max))
        problems.push_back("time.t_min: log grids need 0 < t_min < t_max");
    if (c.filter_width < 1) problems.push_back("observables.filter_width: must be >= 1");
    if (!(c.rtol > 0.0)) problems.push_back("integrator.rtol: must be > 0");
    if (!(c.atol > 0.0)) problems.push_back("integrator.atol: must be > 0");
    if (!(c.zero_tol >= 0.0)) problems.push_back("spectrum.zero_tol: must be >= 0");
    if (!(c.memory_budget_gib > 0.0)) problems.push_back("limits.memory_gib: must be > 0");
    if (c.filter_min_L < 3) problems.push_back("filter.min_L: must be >= 3");
    if (c.filter_max_L < c.filter_min_L) problems.push_back("filter.max_L: must be >= filter.min_L");
    if (!(c.filter_epsilon > 0.0 && c.filter_epsilon < 1.0)) problems.push_back("filter.epsilon: must lie in (0, 1)");
    if (c.initial_site < 0) problems.push_back("initial.site: must be >= 0");
    if (c.output_dir.empty()) problems.push_back("output.dir: must not be empty");
    if (c.kind == ExperimentKind::semiclassical || c.kind == ExperimentKind::filter_sizes) {
        auto need_localized = [&](double h, const std::string& key) {
            if (!(h > 2.0 * c.chain.J)) problems.push_back(key + ": this experiment needs h > 2J");
        };
        if (c.sweep_h.empty()) need_localized(c.chain.h, "chain.h");
        for (double h : c.sweep_h) need_localized(h, "sweep.h");
    }

    if (!problems.empty()) throw validation_error(std::move(problems));
    return c;
}

inline ExperimentConfig parse_config(std::istream& in, ExperimentKind fallback = ExperimentKind::dynamics) {
    return config_from_key_values(parse_key_values(in), fallback);
}

inline ExperimentConfig load_config(const std::string& path, ExperimentKind fallback = ExperimentKind::dynamics) {
    std::ifstream f(path);
    if (!f) throw validation_error({"config: cannot open '" + path + "'"});
    return parse_config(f, fallback);
}

}  // namespace aahdiss
