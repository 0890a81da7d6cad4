// subsim: command-line front end for Subset Simulation experiments.
//
//   subsim estimate --config run.json [--seed S] [--out DIR] [--replicates R]
//   subsim sweep    --config sweep.json [--quick]
//   subsim trace    --config run.json
//   subsim selftest [--quick]
//
// Flags override the configuration file. SUBSIM_OUTPUT_DIR overrides the
// file's output_dir; --out overrides both.
//
// Exit codes: 0 success, 1 selftest failure or internal error, 2 invalid
// configuration, 3 simulation budget exceeded, 4 I/O error.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <random>
#include <string>

#include <CLI11.hpp>

#include "subsim/config.hpp"
#include "subsim/errors.hpp"
#include "subsim/experiments.hpp"
#include "subsim/output.hpp"
#include "subsim/selftest.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitBudget = 3;
constexpr int kExitIo = 4;

constexpr const char* kOutputEnv = "SUBSIM_OUTPUT_DIR";

struct Overrides {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<std::size_t> replicates;
    bool quick = false;
    bool entropy_seed = false;
    bool serial = false;
    std::optional<std::size_t> dim;
    std::optional<double> y_star;
    std::optional<double> p_target;
    std::optional<std::string> method;
    std::optional<double> level_probability;
    std::optional<std::size_t> samples_per_level;
    std::optional<std::size_t> max_levels;
    std::optional<double> spread;
    std::optional<std::string> proposal;
    std::optional<std::uint64_t> dmc_samples;
    bool adapt = false;
    bool keep_samples = false;
};

void add_common_flags(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--config", o.config_path, "JSON configuration file");
    cmd->add_option("--seed", o.seed, "Master seed (default 0)");
    cmd->add_flag("--entropy-seed", o.entropy_seed, "Seed from std::random_device instead");
    cmd->add_option("--out", o.out, "Output directory");
    cmd->add_option("--replicates", o.replicates, "Independent runs");
    cmd->add_flag("--quick", o.quick, "CI profile (20 sweep replicates)");
    cmd->add_flag("--serial", o.serial, "Disable OpenMP parallel loops");
    cmd->add_option("--dim", o.dim, "Model dimension");
    cmd->add_option("--y-star", o.y_star, "Critical threshold");
    cmd->add_option("--p-target", o.p_target, "Target failure probability (sets the threshold)");
    cmd->add_option("--method", o.method, "ss, dmc or both");
    cmd->add_option("-p,--level-probability", o.level_probability, "Level probability p");
    cmd->add_option("-n,--samples-per-level", o.samples_per_level, "Samples per level n");
    cmd->add_option("--max-levels", o.max_levels, "Conditional level cap");
    cmd->add_option("--spread", o.spread, "Proposal spread");
    cmd->add_option("--proposal", o.proposal, "gaussian or uniform");
    cmd->add_option("--dmc-samples", o.dmc_samples, "DMC sample count");
    cmd->add_flag("--adapt", o.adapt, "Adapt the proposal spread between levels");
    cmd->add_flag("--keep-samples", o.keep_samples, "Keep level samples (trace writes samples.csv)");
}

subsim::RunConfig resolve(subsim::Command command, const Overrides& o) {
    using subsim::ConfigError;
    subsim::RunConfig c = o.config_path.empty() ? subsim::RunConfig{} : subsim::load_config(o.config_path);
    c.command = command;

    if (const char* env = std::getenv(kOutputEnv); env && *env) c.output_dir = env;
    if (o.out) c.output_dir = *o.out;
    if (o.seed) c.seed = *o.seed;
    if (o.entropy_seed) {
        std::random_device rd;
        c.seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
        c.entropy_seed = true;
    }
    if (o.replicates) c.replicates = *o.replicates;
    if (o.quick) c.quick = true;
    if (o.dim) c.model.dim = *o.dim;
    if (o.y_star) {
        c.y_star = *o.y_star;
        c.p_target.reset();
    }
    if (o.p_target) {
        c.p_target = *o.p_target;
        c.y_star.reset();
    }
    if (o.method) {
        auto m = subsim::parse_method(*o.method);
        if (!m) throw ConfigError("method", "expected ss, dmc or both, got \"" + *o.method + "\"");
        c.method = *m;
    }
    if (o.level_probability) c.ss.level_probability = *o.level_probability;
    if (o.samples_per_level) c.ss.samples_per_level = *o.samples_per_level;
    if (o.max_levels) c.ss.max_levels = *o.max_levels;
    if (o.spread) c.ss.proposal.spread = {*o.spread};
    if (o.proposal) {
        if (*o.proposal == "gaussian") {
            c.ss.proposal.kind = subsim::ProposalKind::gaussian;
        } else if (*o.proposal == "uniform") {
            c.ss.proposal.kind = subsim::ProposalKind::uniform;
        } else {
            throw ConfigError("proposal.kind", "expected gaussian or uniform, got \"" + *o.proposal + "\"");
        }
    }
    if (o.dmc_samples) c.dmc_samples = *o.dmc_samples;
    if (o.adapt) c.ss.adapt = true;
    if (o.keep_samples) c.ss.keep_samples = true;
    c.validate();
    return c;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void log_paths(const std::vector<std::filesystem::path>& paths) {
    for (const auto& p : paths) std::cerr << "wrote " << p.string() << '\n';
}

int run_estimate(const subsim::RunConfig& c, subsim::Execution exec) {
    using namespace subsim;
    const auto t0 = std::chrono::steady_clock::now();
    const FailureSpec spec{linear_sum_model(c.model.dim), c.critical_threshold()};
    const std::size_t replicates = c.effective_replicates();
    const RandomStream master(c.seed);

    std::optional<SsBatch> ss;
    std::optional<DmcBatch> dmc;
    nlohmann::json results = {{"critical_threshold", spec.critical_threshold},
                              {"p_true", analytic_failure_probability(c.model.dim, spec.critical_threshold)}};
    int exit_code = kExitOk;

    if (c.method != Method::dmc) {
        if (replicates == 1) {
            // A single run uses the master seed directly, so it matches `trace`.
            SsBatch single;
            single.runs.resize(1);
            RandomStream stream(c.seed);
            try {
                single.runs[0].estimate = run_subset_simulation(spec, c.ss_config(), stream, exec);
                single.p_hat = summarize(std::vector<double>{single.runs[0].estimate->p_hat});
                single.mean_total_samples = static_cast<double>(single.runs[0].estimate->total_samples);
            } catch (const SimulationAborted& e) {
                std::cerr << "error: " << e.what() << '\n';
                single.runs[0].error = e.what();
                single.exclusions = 1;
                single.p_hat = summarize({});
                SsEstimate partial;
                partial.level_records = e.partial_records();
                results["ss_partial"] = to_json(partial);
                results["status"] = "budget_exceeded";
                const RunManifest manifest{&c, seconds_since(t0), results};
                log_paths(emit_estimate(c.output_dir, manifest, {&single, nullptr, &partial.level_records}));
                return kExitBudget;
            }
            ss = std::move(single);
        } else {
            ss = replicate_ss(spec, c.ss_config(), replicates, master.derive(0).key(), exec);
        }
        results["ss"] = {{"p_hat", to_json(ss->p_hat)},
                         {"mean_total_samples", ss->mean_total_samples},
                         {"exclusions", ss->exclusions}};
        if (ss->runs.front().estimate) results["ss"]["first_run"] = to_json(*ss->runs.front().estimate);
        if (ss->p_hat.count == 0) exit_code = kExitBudget;
        std::cerr << "ss: mean p_hat " << format_double(ss->p_hat.mean) << " over " << ss->p_hat.count
                  << " run(s), c.o.v. " << format_double(ss->p_hat.cov) << '\n';
    }

    if (c.method != Method::ss) {
        std::uint64_t n = kDefaultDmcSamples;
        if (c.dmc_samples) {
            n = *c.dmc_samples;
        } else if (ss && ss->mean_total_samples > 0) {
            n = static_cast<std::uint64_t>(std::ceil(ss->mean_total_samples));
        }
        if (replicates == 1) {
            DmcBatch single;
            single.n_samples = n;
            RandomStream stream = master.derive(1);
            single.runs.push_back(dmc_estimate(spec, n, stream));
            single.p_hat = summarize(std::vector<double>{single.runs[0].p_hat});
            dmc = std::move(single);
        } else {
            dmc = replicate_dmc(spec, n, replicates, master.derive(1).key(), exec);
        }
        results["dmc"] = {{"p_hat", to_json(dmc->p_hat)},
                          {"n_samples", n},
                          {"cov_theory", dmc_cov(results["p_true"].get<double>(), static_cast<double>(n))},
                          {"first_run", to_json(dmc->runs.front())}};
        std::cerr << "dmc: mean p_hat " << format_double(dmc->p_hat.mean) << " with N=" << n << '\n';
    }

    const std::vector<LevelRecord>* levels = nullptr;
    if (ss && ss->runs.front().estimate) levels = &ss->runs.front().estimate->level_records;
    results["status"] = exit_code == kExitOk ? "ok" : "budget_exceeded";
    const RunManifest manifest{&c, seconds_since(t0), results};
    log_paths(emit_estimate(c.output_dir, manifest, {ss ? &*ss : nullptr, dmc ? &*dmc : nullptr, levels}));
    return exit_code;
}

int run_sweep(const subsim::RunConfig& c, subsim::Execution exec) {
    using namespace subsim;
    const auto t0 = std::chrono::steady_clock::now();
    SweepSpec sweep;
    sweep.dim = c.model.dim;
    sweep.thresholds = linspace(c.sweep.y_min, c.sweep.y_max, c.sweep.points);
    sweep.replicates = c.effective_replicates();
    sweep.ss = c.ss_config();
    sweep.dmc_samples = c.dmc_samples;

    const auto rows = sweep_compare(sweep, c.seed, exec, [&](std::size_t g, const RunSummary& r) {
        std::cerr << "row " << (g + 1) << '/' << sweep.thresholds.size() << ": y*=" << r.y_star
                  << " p_true=" << r.p_true << " ss_mean=" << r.ss.mean << " dmc_mean=" << r.dmc.mean << '\n';
    });
    const RunManifest manifest{&c, seconds_since(t0), {{"rows", rows.size()}, {"status", "ok"}}};
    log_paths(emit_sweep(c.output_dir, manifest, rows));
    return kExitOk;
}

int run_trace(const subsim::RunConfig& c, subsim::Execution exec) {
    using namespace subsim;
    const auto t0 = std::chrono::steady_clock::now();
    const FailureSpec spec{linear_sum_model(c.model.dim), c.critical_threshold()};
    const auto trace = level_trace(spec, c.ss_config(), c.seed, exec);
    nlohmann::json results = {{"ss", to_json(trace.estimate)},
                              {"n_failures", trace.n_failures},
                              {"p_true", analytic_failure_probability(c.model.dim, spec.critical_threshold)},
                              {"status", "ok"}};
    const RunManifest manifest{&c, seconds_since(t0), results};
    log_paths(emit_trace(c.output_dir, manifest, trace));
    std::cerr << "trace: L=" << trace.estimate.levels << " p_hat=" << format_double(trace.estimate.p_hat) << '\n';
    return kExitOk;
}

int run_selftest(bool quick) {
    const auto results = subsim::run_selftest(quick);
    bool ok = true;
    for (const auto& r : results) {
        std::cout << (r.passed ? "PASS " : "FAIL ") << r.name;
        if (!r.detail.empty()) std::cout << ": " << r.detail;
        std::cout << '\n';
        ok = ok && r.passed;
    }
    return ok ? kExitOk : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Subset Simulation rare-event probability estimator"};
    app.require_subcommand(1);

    Overrides o;
    auto* estimate = app.add_subcommand("estimate", "Estimate a failure probability (SS, DMC or both)");
    auto* sweep = app.add_subcommand("sweep", "SS versus DMC over a grid of thresholds");
    auto* trace = app.add_subcommand("trace", "Single run with per-level responses");
    auto* selftest = app.add_subcommand("selftest", "Run the built-in invariant checks");
    for (auto* cmd : {estimate, sweep, trace}) add_common_flags(cmd, o);
    selftest->add_flag("--quick", o.quick, "Shorter statistical checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (selftest->parsed()) return run_selftest(o.quick);

        const subsim::Command command = estimate->parsed() ? subsim::Command::estimate
                                        : sweep->parsed()  ? subsim::Command::sweep
                                                           : subsim::Command::trace;
        const auto config = resolve(command, o);
        const auto exec = o.serial ? subsim::Execution::serial : subsim::Execution::parallel;
        switch (command) {
            case subsim::Command::estimate: return run_estimate(config, exec);
            case subsim::Command::sweep: return run_sweep(config, exec);
            default: return run_trace(config, exec);
        }
    } catch (const subsim::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const subsim::DomainError& e) {
        std::cerr << "invalid argument: " << e.what() << '\n';
        return kExitConfig;
    } catch (const subsim::SimulationAborted& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitBudget;
    } catch (const subsim::IoError& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFailure;
    }
}
