// runner.hpp: experiment dispatch, sweeps, CSV emission and manifests.

#pragma once

#include "aahdiss/config.hpp"
#include "aahdiss/core.hpp"
#include "aahdiss/heom.hpp"
#include "aahdiss/lattice.hpp"
#include "aahdiss/markovian.hpp"
#include "aahdiss/observables.hpp"
#include "aahdiss/semiclassical.hpp"
#include "aahdiss/spectrum.hpp"

#include <nlohmann/json.hpp>

#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace aahdiss {

inline constexpr const char* version = "1.0.0";

struct SweepPoint {
    std::size_t index{0};
    ChainSpec chain;
    BathSpec bath;
    TierSpec tier;
    double g{0.0};
    std::string label;
};

struct PointResult {
    std::size_t index{0};
    std::string label;
    bool ok{false};
    std::string error;
    std::vector<std::string> files;
    nlohmann::json results = nlohmann::json::object();
    double wall_seconds{0.0};
};

struct RunOptions {
    unsigned threads{1};
    std::optional<std::string> output_dir;
    std::optional<double> rtol;
};

struct Manifest {
    std::string experiment;
    std::string output_dir;
    std::vector<PointResult> points;
    std::vector<std::string> files;  // every emitted file, manifest included
    double wall_seconds{0.0};

    std::size_t failures() const {
        std::size_t n = 0;
        for (const auto& p : points) n += p.ok ? 0 : 1;
        return n;
    }
};

namespace detail {

inline std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12e", x);
    return buf;
}

inline std::string tag(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%g", x);
    return buf;
}

struct CsvFile {
    std::filesystem::path path;
    std::ofstream os;

    CsvFile(const std::filesystem::path& p, const std::string& schema, const std::string& units,
            const std::string& columns)
        : path(p), os(p) {
        if (!os) throw std::runtime_error("cannot write " + p.string());
        os << "# schema=" << schema << " version=1 units: " << units << '\n' << columns << '\n';
    }

    void row(const std::vector<double>& v) {
        for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << fmt(v[i]);
        os << '\n';
    }

    void line(const std::string& s) { os << s << '\n'; }
};

inline std::string population_columns(int L) {
    std::string s = "time";
    for (int j = 1; j <= L; ++j) s += ",P_" + std::to_string(j);
    return s;
}

inline void write_populations(CsvFile& f, const std::vector<double>& t,
                              const std::vector<RealVector>& populations) {
    for (std::size_t i = 0; i < t.size(); ++i) {
        std::vector<double> row{t[i]};
        for (Eigen::Index j = 0; j < populations[i].size(); ++j) row.push_back(populations[i](j));
        f.row(row);
    }
}

inline void write_observables(CsvFile& f, const TransportReport& r) {
    for (std::size_t i = 0; i < r.times.size(); ++i)
        f.row({r.times[i], r.rescaled_times[i], r.sigma[i], r.sigma_filtered[i], r.ppr[i], r.l1[i]});
}

inline nlohmann::json fit_json(const PowerLawFit& f) {
    return {{"D", f.D}, {"alpha", f.alpha}, {"residual", f.residual}, {"points", f.points}};
}

inline DensityMatrix initial_state(const ExperimentConfig& c, const ChainSpec& chain) {
    const int site = c.initial_site == 0 ? chain.center() : c.initial_site;
    if (site > chain.L) throw std::invalid_argument("initial.site exceeds chain length");
    return site_projector(chain.L, site);
}

inline IntegratorOptions integrator_options(const ExperimentConfig& c) {
    IntegratorOptions o;
    o.rtol = c.rtol;
    o.atol = c.atol;
    return o;
}

inline HeomOptions heom_options(const ExperimentConfig& c) {
    HeomOptions o;
    o.memory_budget_bytes = static_cast<std::size_t>(c.memory_budget_gib * double(std::size_t{1} << 30));
    return o;
}

inline SpectrumReport heom_spectrum(const ExperimentConfig& c, const SweepPoint& p) {
    const auto g = build_heom_generator(build_aah_hamiltonian(p.chain), p.bath, p.tier, heom_options(c));
    SpectrumOptions so;
    so.dense_limit = c.dense_limit;
    const std::size_t k = c.spectrum_count ? c.spectrum_count : g.block_size();
    const double tol = c.zero_tol > 0.0 ? c.zero_tol : default_zero_tol(p.bath.kappa);
    return cluster_and_gap(dominant_eigenvalues(g, k, so), tol);
}

inline nlohmann::json spectrum_json(const SpectrumReport& r) {
    auto opt = [](const std::optional<double>& v) -> nlohmann::json {
        if (!v) return nullptr;
        if (!std::isfinite(*v)) return "inf";
        return *v;
    };
    return {{"delta", opt(r.delta)},
            {"tau_fast", opt(r.tau_fast)},
            {"tau_slow", opt(r.tau_slow)},
            {"tau_slow_longest", opt(r.tau_slow_longest)},
            {"count", r.eigenvalues.size()}};
}

}  // namespace detail

// Cartesian product of all sweep axes; scalar values fill absent axes.
inline std::vector<SweepPoint> expand_sweep(const ExperimentConfig& c) {
    auto axis = [](const std::vector<double>& v, double fallback) {
        return v.empty() ? std::vector<double>{fallback} : v;
    };
    const auto Ls = c.sweep_L.empty() ? std::vector<int>{c.chain.L} : c.sweep_L;
    std::vector<SweepPoint> out;
    for (int L : Ls)
        for (double h : axis(c.sweep_h, c.chain.h))
            for (double kappa : axis(c.sweep_kappa, c.bath.kappa))
                for (double gamma : axis(c.sweep_gamma, c.bath.gamma))
                    for (double omega0 : axis(c.sweep_omega0, c.bath.omega0))
                        for (double g : axis(c.sweep_g, c.g)) {
                            SweepPoint p;
                            p.index = out.size();
                            p.chain = c.chain;
                            p.chain.L = L;
                            p.chain.h = h;
                            p.bath = {kappa, gamma, omega0};
                            p.tier = c.tier;
                            p.g = g;
                            std::string label = "L" + std::to_string(L) + "_h" + detail::tag(h) + "_kappa" +
                                                detail::tag(kappa) + "_gamma" + detail::tag(gamma) +
                                                "_omega0" + detail::tag(omega0);
                            if (c.kind == ExperimentKind::semiclassical) label += "_g" + detail::tag(g);
                            p.label = std::to_string(p.index) + "_" + label;
                            out.push_back(std::move(p));
                        }
    return out;
}

namespace detail {

inline void run_dynamics(const ExperimentConfig& c, const SweepPoint& p, const std::filesystem::path& dir,
                         PointResult& r) {
    const auto times = c.time.samples();
    const auto g = build_heom_generator(build_aah_hamiltonian(p.chain), p.bath, p.tier, heom_options(c));
    const auto traj = evolve(g, initial_state(c, p.chain), times, integrator_options(c));
    const int j0 = p.chain.center();

    {
        CsvFile f(dir / (p.label + "_populations.csv"), "aahdiss.populations", "time[1/J] P[probability]",
                  population_columns(p.chain.L));
        std::vector<RealVector> pops;
        for (std::size_t i = 0; i < traj.size(); ++i) pops.push_back(traj.populations(i));
        write_populations(f, traj.times, pops);
        r.files.push_back(f.path.string());
    }
    const auto rep = transport_report(traj, j0, effective_rate(p.bath, p.chain.h), c.filter_width);
    {
        CsvFile f(dir / (p.label + "_observables.csv"), "aahdiss.observables",
                  "t[1/J] t_tilde[dimensionless] sigma[sites] ppr[sites] l1[dimensionless]",
                  "t,t_tilde,sigma,sigma_filtered,ppr,l1");
        write_observables(f, rep);
        r.files.push_back(f.path.string());
    }
    if (c.dump_rho) {
        CsvFile f(dir / (p.label + "_rho.csv"), "aahdiss.rho", "time[1/J]", "time,i,j,re,im");
        for (std::size_t k = 0; k < traj.size(); ++k)
            for (int a = 0; a < p.chain.L; ++a)
                for (int b = 0; b < p.chain.L; ++b)
                    f.row({traj.times[k], double(a + 1), double(b + 1), traj.states[k](a, b).real(),
                           traj.states[k](a, b).imag()});
        r.files.push_back(f.path.string());
    }

    r.results["gamma_eff"] = rep.rate;
    r.results["max_trace_defect"] = traj.diagnostics.max_trace_defect;
    r.results["min_eigenvalue"] = traj.diagnostics.min_eigenvalue;
    r.results["steps"] = traj.diagnostics.steps;

    if (c.kind == ExperimentKind::collapse) {
        std::optional<FitWindow> early = c.fit_early, late = c.fit_late;
        if (!early || !late) {
            const auto spec = heom_spectrum(c, p);
            if (!spec.tau_slow) throw diagnostics_error("collapse: no cluster structure to place fit windows");
            const double ts = rep.rate * *spec.tau_slow;
            r.results["tau_slow_tilde"] = ts;
            if (!early) early = FitWindow{1.0, ts};
            if (!late) late = FitWindow{ts, rep.rescaled_times.back()};
        }
        r.results["fit_early"] = fit_json(power_law_fit(rep.rescaled_times, rep.sigma, early->lo, early->hi));
        r.results["fit_late"] = fit_json(power_law_fit(rep.rescaled_times, rep.sigma, late->lo, late->hi));
    } else if (c.fit_early) {
        r.results["fit"] = fit_json(power_law_fit(rep.times, rep.sigma, c.fit_early->lo, c.fit_early->hi));
    }
}

inline void run_spectrum(const ExperimentConfig& c, const SweepPoint& p, const std::filesystem::path& dir,
                         PointResult& r) {
    const auto rep = heom_spectrum(c, p);
    const auto path = dir / (p.label + "_spectrum.csv");
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    os << "# schema=aahdiss.spectrum version=1 units: re[J] im[J]\n";
    write_spectrum_csv(os, rep);
    r.files.push_back(path.string());
    r.results = spectrum_json(rep);
}

inline void run_compare(const ExperimentConfig& c, const SweepPoint& p, const std::filesystem::path& dir,
                        PointResult& r) {
    const auto times = c.time.samples();
    const auto H = build_aah_hamiltonian(p.chain);
    const auto rho0 = initial_state(c, p.chain);
    const auto opt = integrator_options(c);
    const auto heom = evolve(build_heom_generator(H, p.bath, p.tier, heom_options(c)), rho0, times, opt);
    const auto br = evolve(build_bloch_redfield(H, p.bath), rho0, times, opt);
    const auto lind = evolve(build_lindblad(H, p.bath), rho0, times, opt);
    const auto f_br = fidelity_series(heom, br);
    const auto f_l = fidelity_series(heom, lind);
    for (auto [name, series] : {std::pair{"redfield", &f_br}, std::pair{"lindblad", &f_l}}) {
        CsvFile f(dir / (p.label + "_fidelity_" + name + ".csv"), std::string("aahdiss.fidelity.") + name,
                  "time[1/J] fidelity[dimensionless]", "time,fidelity");
        for (std::size_t i = 0; i < times.size(); ++i) f.row({times[i], (*series)[i]});
        r.files.push_back(f.path.string());
        r.results[std::string("min_fidelity_") + name] = *std::min_element(series->begin(), series->end());
    }
}

inline void run_semiclassical(const ExperimentConfig& c, const SweepPoint& p, const std::filesystem::path& dir,
                              PointResult& r) {
    const auto times = c.time.samples();
    const auto R = transition_rates(p.chain, p.bath, p.g, c.model);
    const int j0 = p.chain.center();
    const int start = c.initial_site == 0 ? j0 : c.initial_site;
    RealVector p0 = RealVector::Zero(R.dim());
    for (int n = 0; n < R.dim(); ++n)
        if (R.sites[static_cast<std::size_t>(n)] == start) {
            p0(n) = 1.0;
            break;
        }
    if (p0.sum() != 1.0) throw std::invalid_argument("semiclassical: no state centred on the initial site");
    const auto traj = evolve_rate_equation(R, p0, times, integrator_options(c));

    std::vector<RealVector> pops;
    for (std::size_t i = 0; i < traj.times.size(); ++i) pops.push_back(traj.site_populations(i, p.chain.L));
    {
        CsvFile f(dir / (p.label + "_populations.csv"), "aahdiss.populations", "time[1/J] P[probability]",
                  population_columns(p.chain.L));
        write_populations(f, traj.times, pops);
        r.files.push_back(f.path.string());
    }
    const double rate = effective_rate_cl(p.g, p.bath.gamma, p.chain.h, p.bath.omega0);
    std::vector<double> sigma, ppr;
    for (const auto& q : pops) {
        sigma.push_back(rmsd(q, j0));
        ppr.push_back(participation_ratio(q));
    }
    const auto filtered = moving_average(sigma, c.filter_width);
    {
        CsvFile f(dir / (p.label + "_observables.csv"), "aahdiss.observables",
                  "t[1/J] t_tilde[dimensionless] sigma[sites] ppr[sites] l1[dimensionless]",
                  "t,t_tilde,sigma,sigma_filtered,ppr,l1");
        for (std::size_t i = 0; i < times.size(); ++i)
            f.row({times[i], rate * times[i], sigma[i], filtered[i], ppr[i], 0.0});
        r.files.push_back(f.path.string());
    }
    r.results["gamma_eff_cl"] = rate;
    r.results["xi"] = R.xi;
    std::vector<double> tt;
    for (double t : times) tt.push_back(rate * t);
    if (c.fit_early) r.results["fit_early"] = fit_json(power_law_fit(tt, sigma, c.fit_early->lo, c.fit_early->hi));
    if (c.fit_late) r.results["fit_late"] = fit_json(power_law_fit(tt, sigma, c.fit_late->lo, c.fit_late->hi));
}

inline std::vector<int> odd_sizes(int min_L, int max_L) {
    std::vector<int> sizes;
    for (int L = min_L | 1; L <= max_L; L += 2) sizes.push_back(L);
    return sizes;
}

inline void run_filter_sizes(const ExperimentConfig& c, const SweepPoint& p, const std::filesystem::path& dir,
                             PointResult& r) {
    const auto sizes = odd_sizes(c.filter_min_L, c.filter_max_L);
    const auto kept = filter_sizes(sizes, p.chain.h, c.filter_epsilon, p.chain.J, p.chain.phi, p.chain.beta);
    CsvFile f(dir / (p.label + "_filtered_sizes.csv"), "aahdiss.filtered_sizes", "L[sites] ipr[dimensionless]",
              "L,ipr_center");
    for (int L : kept) {
        ChainSpec s = p.chain;
        s.L = L;
        f.line(std::to_string(L) + "," + fmt(ipr_of_site(diagonalize(build_aah_hamiltonian(s)), s.center())));
    }
    r.files.push_back(f.path.string());
    r.results["sizes"] = kept;
}

inline void run_point(const ExperimentConfig& c, const SweepPoint& p, const std::filesystem::path& dir,
                      PointResult& r) {
    switch (c.kind) {
        case ExperimentKind::dynamics:
        case ExperimentKind::collapse: run_dynamics(c, p, dir, r); break;
        case ExperimentKind::spectrum: run_spectrum(c, p, dir, r); break;
        case ExperimentKind::compare_markovian: run_compare(c, p, dir, r); break;
        case ExperimentKind::semiclassical: run_semiclassical(c, p, dir, r); break;
        case ExperimentKind::filter_sizes: run_filter_sizes(c, p, dir, r); break;
    }
}

inline nlohmann::json point_parameters(const SweepPoint& p, ExperimentKind kind) {
    nlohmann::json j = {{"L", p.chain.L},         {"J", p.chain.J},         {"h", p.chain.h},
                        {"phi", p.chain.phi},     {"beta", p.chain.beta},   {"kappa", p.bath.kappa},
                        {"gamma", p.bath.gamma},  {"omega0", p.bath.omega0}, {"tier", p.tier.tier}};
    if (kind == ExperimentKind::semiclassical) j["g"] = p.g;
    return j;
}

}  // namespace detail

// Runs every sweep point, writes per-point CSVs and manifest.json. Point failures are recorded,
// not rethrown.
inline Manifest run(ExperimentConfig c, const RunOptions& ro = {}) {
    if (ro.output_dir) c.output_dir = *ro.output_dir;
    if (ro.rtol) c.rtol = *ro.rtol;
    const auto t_start = std::chrono::steady_clock::now();
    const std::filesystem::path dir(c.output_dir);
    std::filesystem::create_directories(dir);

    auto points = expand_sweep(c);
    if (c.kind == ExperimentKind::filter_sizes) {
        points.resize(1);
        points[0].label = "0_h" + detail::tag(c.chain.h) + "_eps" + detail::tag(c.filter_epsilon);
    }
    Manifest m;
    m.experiment = to_string(c.kind);
    m.output_dir = dir.string();
    m.points.resize(points.size());

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < points.size(); i = next++) {
            auto& r = m.points[i];
            r.index = i;
            r.label = points[i].label;
            const auto t0 = std::chrono::steady_clock::now();
            try {
                detail::run_point(c, points[i], dir, r);
                r.ok = true;
            } catch (const std::exception& e) {
                r.ok = false;
                r.error = e.what();
            }
            r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        }
    };
    const unsigned n = std::max(1u, std::min<unsigned>(ro.threads, static_cast<unsigned>(points.size())));
    std::vector<std::thread> pool;
    for (unsigned k = 1; k < n; ++k) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    for (const auto& r : m.points) m.files.insert(m.files.end(), r.files.begin(), r.files.end());
    const auto manifest_path = (dir / "manifest.json").string();
    m.files.push_back(manifest_path);
    m.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();

    nlohmann::json j;
    j["code_version"] = version;
    j["experiment"] = m.experiment;
    j["config"] = c.raw;
    j["integrator"] = {{"rtol", c.rtol}, {"atol", c.atol}};
    j["files"] = m.files;
    j["wall_seconds"] = m.wall_seconds;
    j["points"] = nlohmann::json::array();
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto& r = m.points[i];
        nlohmann::json pj = {{"index", r.index},
                             {"label", r.label},
                             {"parameters", detail::point_parameters(points[i], c.kind)},
                             {"status", r.ok ? "ok" : "failed"},
                             {"files", r.files},
                             {"results", r.results},
                             {"wall_seconds", r.wall_seconds}};
        if (!r.ok) pj["error"] = r.error;
        j["points"].push_back(pj);
    }
    std::ofstream os(manifest_path);
    if (!os) throw std::runtime_error("cannot write " + manifest_path);
    os << j.dump(2) << '\n';
    return m;
}

struct VerifyEntry {
    std::string label;
    int L{0};
    int modes{0};
    std::size_t ado_count{0};
    std::size_t dimension{0};
    std::size_t memory_bytes{0};
    std::size_t eigenproblem{0};  // dense matrix order for spectrum runs, 0 otherwise
    bool within_budget{true};
    std::vector<std::string> flags;
};

// Dry run: sizes and flags for every sweep point, without simulating.
inline std::vector<VerifyEntry> verify(const ExperimentConfig& c) {
    std::vector<VerifyEntry> out;
    auto points = expand_sweep(c);
    if (c.kind == ExperimentKind::filter_sizes) points.resize(1);
    for (const auto& p : points) {
        VerifyEntry e;
        e.label = p.label;
        e.L = p.chain.L;
        const bool heom_kind = c.kind == ExperimentKind::dynamics || c.kind == ExperimentKind::collapse ||
                               c.kind == ExperimentKind::spectrum || c.kind == ExperimentKind::compare_markovian;
        if (heom_kind) {
            e.modes = p.bath.omega0 == 0.0 ? 1 : 2;
            e.ado_count = HierarchyIndex::count(e.modes, p.tier.tier);
            e.dimension = heom_dimension(p.chain.L, e.modes, p.tier.tier);
            e.memory_bytes = heom_memory_estimate(p.chain.L, e.modes, p.tier.tier);
            e.within_budget = double(e.memory_bytes) <= c.memory_budget_gib * double(std::size_t{1} << 30);
            if (c.kind == ExperimentKind::spectrum ||
                (c.kind == ExperimentKind::collapse && (!c.fit_early || !c.fit_late))) {
                e.eigenproblem = e.dimension;
                e.memory_bytes = std::max(e.memory_bytes, e.dimension * e.dimension * sizeof(cplx) * 2);
                if (e.dimension > c.dense_limit) e.flags.push_back("dense eigensolve above spectrum.dense_limit");
            }
        } else if (c.kind == ExperimentKind::semiclassical) {
            e.dimension = static_cast<std::size_t>(p.chain.L);
            e.memory_bytes = e.dimension * e.dimension * sizeof(double) * 4;
        } else {
            e.dimension = static_cast<std::size_t>(c.filter_max_L);
            e.L = c.filter_max_L;
        }
        if (p.bath.kappa == 0.0) e.flags.push_back("unitary limit; Markovian comparisons degenerate");
        if (!e.within_budget) e.flags.push_back("exceeds memory budget");
        out.push_back(std::move(e));
    }
    return out;
}

inline void write_verify_report(std::ostream& os, const ExperimentConfig& c, const std::vector<VerifyEntry>& v) {
    os << "experiment: " << to_string(c.kind) << "\npoints: " << v.size() << '\n';
    for (const auto& e : v) {
        os << e.label << ": L=" << e.L << " modes=" << e.modes << " ados=" << e.ado_count
           << " dimension=" << e.dimension << " memory_MiB=" << (e.memory_bytes >> 20)
           << " eigenproblem=" << e.eigenproblem;
        for (const auto& f : e.flags) os << " [" << f << "]";
        os << '\n';
    }
}

}  // namespace aahdiss
