// aahdiss: command-line driver for dissipative quasiperiodic-chain experiments.

#include "aahdiss/runner.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <string>
#include <thread>

namespace {

enum exit_code : int { ok = 0, validation = 1, runtime = 2, partial = 3 };

unsigned thread_count(int flag) {
    if (flag > 0) return static_cast<unsigned>(flag);
    if (const char* env = std::getenv("AAHDISS_THREADS")) {
        try {
            const int n = std::stoi(env);
            if (n > 0) return static_cast<unsigned>(n);
        } catch (...) {
        }
    }
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dissipative Aubry-Andre-Harper chain: HEOM, Markovian and semiclassical transport"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    int threads = 0;
    double tolerance = 0.0;

    struct Sub {
        const char* name;
        const char* help;
        std::optional<aahdiss::ExperimentKind> kind;
    };
    const Sub subs[] = {
        {"dynamics", "HEOM trajectories and transport observables", aahdiss::ExperimentKind::dynamics},
        {"spectrum", "dominant generator eigenvalues and cluster analysis", aahdiss::ExperimentKind::spectrum},
        {"collapse", "rescaled-time RMSD curves with early/late power-law fits", aahdiss::ExperimentKind::collapse},
        {"compare", "HEOM against Bloch-Redfield and Lindblad fidelities",
         aahdiss::ExperimentKind::compare_markovian},
        {"semiclassical", "rate-equation populations and RMSD", aahdiss::ExperimentKind::semiclassical},
        {"filter-sizes", "chain lengths whose central site is a near-eigenstate",
         aahdiss::ExperimentKind::filter_sizes},
        {"verify", "dry run: dimensions, ADO counts and memory estimates", std::nullopt},
    };
    std::vector<CLI::App*> commands;
    for (const auto& s : subs) {
        auto* cmd = app.add_subcommand(s.name, s.help);
        cmd->add_option("--config", config_path, "experiment config file")->required()->check(CLI::ExistingFile);
        cmd->add_option("--out", out_dir, "output directory (overrides output.dir)");
        cmd->add_option("--threads", threads, "sweep-point worker threads (default: AAHDISS_THREADS or 1)")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--tolerance", tolerance, "integrator relative tolerance")->check(CLI::PositiveNumber);
        commands.push_back(cmd);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? ok : validation;
    }

    try {
        std::size_t chosen = 0;
        while (!commands[chosen]->parsed()) ++chosen;
        const auto& sub = subs[chosen];
        auto config = aahdiss::load_config(config_path, sub.kind.value_or(aahdiss::ExperimentKind::dynamics));
        if (!sub.kind) {
            aahdiss::write_verify_report(std::cout, config, aahdiss::verify(config));
            return ok;
        }
        if (config.kind != *sub.kind) {
            std::cerr << "invalid configuration:\n  experiment: config declares '" << aahdiss::to_string(config.kind)
                      << "' but subcommand is '" << sub.name << "'\n";
            return validation;
        }

        aahdiss::RunOptions ro;
        ro.threads = thread_count(threads);
        if (!out_dir.empty()) ro.output_dir = out_dir;
        if (tolerance > 0.0) ro.rtol = tolerance;
        const auto manifest = aahdiss::run(config, ro);

        for (const auto& p : manifest.points)
            if (!p.ok) std::cerr << "point " << p.label << " failed: " << p.error << '\n';
        std::cout << manifest.points.size() - manifest.failures() << "/" << manifest.points.size()
                  << " points ok; manifest at " << manifest.files.back() << '\n';
        if (manifest.failures() == 0) return ok;
        return manifest.failures() == manifest.points.size() ? runtime : partial;
    } catch (const aahdiss::validation_error& e) {
        std::cerr << e.what() << '\n';
        return validation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return runtime;
    }
}
