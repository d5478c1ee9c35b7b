#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "ensctrl/multidim.hpp"
#include "ensctrl/system_io.hpp"

using nlohmann::json;
using namespace ensctrl;

namespace {

constexpr int kExitUsage = 64;
constexpr int kExitBadInput = 65;

struct CommonOpts {
    std::string spec_path;
    std::string output_path;
    int grid = 0;
    int eta_samples = 0;
    double tol_rank = -1.0;
    double tol_mono = -1.0;
    double tol_merge = -2.0;
    std::uint64_t seed = 0;
    bool seed_set = false;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("spec", o.spec_path, "system description JSON")->required();
    cmd->add_option("--output", o.output_path, "write the JSON report here");
    cmd->add_option("--grid", o.grid, "parameter grid size");
    cmd->add_option("--eta-samples", o.eta_samples, "eta samples per channel");
    cmd->add_option("--tol-rank", o.tol_rank, "relative singular-value rank threshold");
    cmd->add_option("--tol-mono", o.tol_mono, "monotonicity tolerance");
    cmd->add_option("--tol-merge", o.tol_merge, "preimage merge tolerance");
    cmd->add_option("--seed", o.seed, "sampling seed")->each([&o](const std::string&) {
        o.seed_set = true;
    });
}

AnalysisConfig merge_config(AnalysisConfig cfg, const CommonOpts& o) {
    if (o.grid > 0) cfg.n_grid = o.grid;
    if (o.eta_samples > 0) {
        cfg.n_eta = o.eta_samples;
        cfg.eta_per_channel = o.eta_samples;
    }
    if (o.tol_rank >= 0.0) cfg.tol_rank = o.tol_rank;
    if (o.tol_mono >= 0.0) cfg.tol_mono = o.tol_mono;
    if (o.tol_merge >= -1.0) cfg.tol_merge = o.tol_merge;
    if (o.seed_set) cfg.seed = o.seed;
    return cfg;
}

void write_report(const std::string& path, const json& report) {
    if (path.empty()) return;
    std::ofstream out(path);
    if (!out) throw SchemaError("cannot open output file: " + path);
    out << report.dump(2) << "\n";
}

Verdict stable_single_input(const EnsembleSystem& sys, const AnalysisConfig& cfg) {
    const auto decide = [&](int grid) {
        return single_input_verdict(sys.sample_a(grid).row(0), sys.sample_b(grid).row(0), cfg);
    };
    Verdict first = decide(cfg.n_grid);
    if (!cfg.stability_check) return first;
    Verdict second = decide(2 * cfg.n_grid - 1);
    if (second.status != first.status) {
        Verdict v;
        v.config = cfg;
        v.status = Status::Inconclusive;
        v.evidence.push_back({Reason::GridUnstable, {}, {}, -1, -1,
                              "verdict flipped under grid doubling"});
        return v;
    }
    return first;
}

Verdict decide(const EnsembleSystem& sys, const AnalysisConfig& cfg) {
    if (sys.n == 1 && sys.m == 1) return stable_single_input(sys, cfg);
    if (sys.n == 1) {
        ScalarEnsemble scalar;
        scalar.drift = [&sys](int g) { return sys.sample_a(g); };
        scalar.inputs = [&sys](int g) { return sys.sample_b(g); };
        return multi_input_verdict(scalar, cfg);
    }
    return ensemble_verdict(sys, cfg);
}

json spectral_summary(const EnsembleSystem& sys, const AnalysisConfig& cfg) {
    const SpectralProfile prof = classify(sys.sample_a(cfg.n_grid), cfg);
    json ranges = json::array();
    for (const auto& lam : prof.lambda) {
        double lo = lam.scalar(0), hi = lam.scalar(0);
        for (int j = 0; j < lam.grid_size(); ++j) {
            lo = std::min(lo, lam.scalar(j));
            hi = std::max(hi, lam.scalar(j));
        }
        ranges.push_back(json{{"lo", lo}, {"hi", hi}});
    }
    json out{{"structure", to_string(prof.tag)}, {"eigenvalue_ranges", ranges}};
    if (!prof.note.empty()) out["note"] = prof.note;
    if (prof.tag == StructureTag::DiagonalizableTracked) {
        out["max_condition"] = prof.max_cond;
        out["max_reconstruction_error"] = prof.max_recon_err;
    }
    return out;
}

// A handful of Gramian evaluations per channel for the certificate.
json gramian_summaries(const EnsembleSystem& sys, const AnalysisConfig& cfg) {
    json out = json::array();
    try {
        const SampledField a = sys.sample_a(cfg.n_grid);
        const SampledField b = sys.sample_b(cfg.n_grid);
        const SpectralProfile prof = classify(a, cfg);
        if (prof.tag == StructureTag::Unsupported) return out;
        const SampledField btilde =
            prof.needs_transform() ? transformed_inputs(prof, b) : b;
        for (std::size_t i = 0; i < prof.lambda.size(); ++i) {
            const BranchDecomposition dec = decompose(prof.lambda[i], cfg.tol_mono);
            if (dec.degenerate) continue;
            json per_channel = json::array();
            for (double eta : sample_etas(dec, prof.lambda[i], 8))
                per_channel.push_back(gramian_to_json(build_gramian(
                    dec, prof.lambda[i], btilde.row(static_cast<int>(i)), eta, cfg)));
            out.push_back(json{{"channel", i}, {"gramians", per_channel}});
        }
    } catch (const std::exception&) {
        // Certificate extras are best effort; the verdict itself already
        // carries the failure evidence.
    }
    return out;
}

int run_analyze(const CommonOpts& opts) {
    const LoadedSystem loaded = load_system(opts.spec_path);
    const AnalysisConfig cfg = merge_config(loaded.config, opts);
    const Verdict verdict = decide(loaded.system, cfg);

    json report{{"tool_version", tool_version()},
                {"input_digest", loaded.input_digest},
                {"verdict", verdict_to_json(verdict)},
                {"spectral", spectral_summary(loaded.system, cfg)},
                {"gramians", gramian_summaries(loaded.system, cfg)}};
    write_report(opts.output_path, report);
    std::cout << to_string(verdict.status) << "\n";
    for (const Evidence& e : verdict.evidence)
        std::cout << "  " << to_string(e.reason) << ": " << e.detail << "\n";
    switch (verdict.status) {
        case Status::Controllable: return 0;
        case Status::NotControllable: return 1;
        case Status::Inconclusive: return 2;
    }
    return kExitBadInput;
}

int run_synthesize(const CommonOpts& opts, double horizon, int segments, double epsilon,
                   double ridge, int steps) {
    const LoadedSystem loaded = load_system(opts.spec_path);
    const AnalysisConfig cfg = merge_config(loaded.config, opts);
    const EnsembleSystem& sys = loaded.system;
    if (!sys.x0_expr || !sys.xf_expr)
        throw SchemaError("synthesize requires x0 and xF in the system file");

    const SampledField a = sys.sample_a(cfg.n_grid);
    const SampledField b = sys.sample_b(cfg.n_grid);
    const auto [schedule, steering] =
        synthesize(a, b, sys.sample_x0(cfg.n_grid), sys.sample_xf(cfg.n_grid), horizon,
                   segments, ridge, epsilon, steps);

    json report{{"tool_version", tool_version()},
                {"input_digest", loaded.input_digest},
                {"config", config_to_json(cfg)},
                {"schedule", schedule_to_json(schedule)},
                {"steering", steering_to_json(steering)}};
    write_report(opts.output_path, report);
    std::cout << "predicted_error=" << steering.predicted_error
              << " simulated_error=" << steering.simulated_error << " epsilon=" << epsilon
              << "\n";
    return steering.simulated_error <= epsilon ? 0 : 1;
}

int run_simulate(const CommonOpts& opts, const std::string& schedule_path, int steps) {
    const LoadedSystem loaded = load_system(opts.spec_path);
    const AnalysisConfig cfg = merge_config(loaded.config, opts);
    const EnsembleSystem& sys = loaded.system;
    if (!sys.x0_expr) throw SchemaError("simulate requires x0 in the system file");

    std::ifstream in(schedule_path);
    if (!in) throw SchemaError("cannot open schedule file: " + schedule_path);
    json sched_json;
    try {
        in >> sched_json;
    } catch (const json::parse_error& e) {
        throw SchemaError(std::string("invalid schedule JSON: ") + e.what());
    }
    const ControlSchedule schedule = schedule_from_json(sched_json);

    const SampledField final_state =
        simulate(sys.sample_a(cfg.n_grid), sys.sample_b(cfg.n_grid),
                 sys.sample_x0(cfg.n_grid), schedule, steps);

    json states = json::array();
    for (int j = 0; j < final_state.grid_size(); ++j) {
        std::vector<double> x(final_state.value(j).col(0).begin(),
                              final_state.value(j).col(0).end());
        states.push_back(json{{"beta", final_state.grid_point(j)}, {"x", x}});
    }
    json report{{"tool_version", tool_version()},
                {"input_digest", loaded.input_digest},
                {"final_state", states}};
    write_report(opts.output_path, report);
    if (opts.output_path.empty()) std::cout << report.dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"uniform ensemble controllability analysis and control synthesis"};
    app.require_subcommand(1);

    CommonOpts analyze_opts, synth_opts, sim_opts;
    double horizon = 1.0, epsilon = 1e-2, ridge = -1.0;
    int segments = 32, steps = 64;
    std::string schedule_path;

    CLI::App* analyze = app.add_subcommand("analyze", "decide ensemble controllability");
    add_common(analyze, analyze_opts);

    CLI::App* synth = app.add_subcommand("synthesize", "compute a steering control");
    add_common(synth, synth_opts);
    synth->add_option("--T", horizon, "time horizon")->required();
    synth->add_option("--P", segments, "number of control segments")->required();
    synth->add_option("--epsilon", epsilon, "target sup-norm error")->required();
    synth->add_option("--ridge", ridge, "ridge regularization (negative: automatic)");
    synth->add_option("--steps", steps, "integrator steps per segment");

    CLI::App* sim = app.add_subcommand("simulate", "integrate the ensemble under a schedule");
    add_common(sim, sim_opts);
    sim->add_option("--schedule", schedule_path, "control schedule JSON")->required();
    sim->add_option("--steps", steps, "integrator steps per segment");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (analyze->parsed()) return run_analyze(analyze_opts);
        if (synth->parsed()) return run_synthesize(synth_opts, horizon, segments, epsilon, ridge, steps);
        if (sim->parsed()) return run_simulate(sim_opts, schedule_path, steps);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadInput;
    }
    return kExitUsage;
}
