#include "subsim/output.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "subsim/errors.hpp"
#include "subsim/execution.hpp"

namespace subsim {

using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string sweep_csv(const std::vector<RunSummary>& rows) {
    std::ostringstream out;
    out << kSweepCsvHeader << '\n';
    for (const auto& r : rows) {
        out << format_double(r.y_star) << ',' << format_double(r.p_true) << ',' << format_double(r.ss.mean) << ','
            << format_double(r.ss.stddev) << ',' << format_double(r.ss.cov) << ','
            << format_double(r.ss_mean_total_samples) << ',' << format_double(r.dmc.mean) << ','
            << format_double(r.dmc.cov) << ',' << format_double(r.dmc_cov_theory) << ',' << r.replicates << ','
            << r.exclusions << '\n';
    }
    return out.str();
}

std::string levels_csv(const std::vector<LevelRecord>& records) {
    std::ostringstream out;
    out << kLevelsCsvHeader << '\n';
    for (const auto& rec : records) {
        const double rate = rec.acceptance_stats ? rec.acceptance_stats->acceptance_rate() : std::nan("");
        out << rec.level << ',' << format_double(rec.threshold) << ',' << rec.n_failures << ','
            << format_double(rate) << ',' << rec.evaluations_used << '\n';
    }
    return out.str();
}

std::string responses_csv(const std::vector<LevelRecord>& records) {
    std::ostringstream out;
    out << kResponsesCsvHeader << '\n';
    for (const auto& rec : records) {
        for (std::size_t i = 0; i < rec.sorted_responses.size(); ++i) {
            out << rec.level << ',' << (i + 1) << ',' << format_double(rec.sorted_responses[i]) << '\n';
        }
    }
    return out.str();
}

std::string samples_csv(const std::vector<LevelRecord>& records) {
    std::size_t dim = 0;
    for (const auto& rec : records) {
        if (!rec.samples.empty()) dim = rec.samples.front().point.size();
    }
    std::ostringstream out;
    out << "level,index,response";
    for (std::size_t k = 1; k <= dim; ++k) out << ",x" << k;
    out << '\n';
    for (const auto& rec : records) {
        for (std::size_t i = 0; i < rec.samples.size(); ++i) {
            const auto& s = rec.samples[i];
            out << rec.level << ',' << i << ',' << format_double(s.response);
            for (double v : s.point) out << ',' << format_double(v);
            out << '\n';
        }
    }
    return out.str();
}

std::string runs_csv(const SsBatch* ss, const DmcBatch* dmc) {
    std::ostringstream out;
    out << kRunsCsvHeader << '\n';
    if (ss) {
        for (std::size_t r = 0; r < ss->runs.size(); ++r) {
            const auto& run = ss->runs[r];
            if (run.estimate) {
                const auto& e = *run.estimate;
                out << r << ",ss," << format_double(e.p_hat) << ',' << e.levels << ',' << e.total_samples << ','
                    << e.total_evaluations << ",ok\n";
            } else {
                out << r << ",ss,nan,,,,aborted\n";
            }
        }
    }
    if (dmc) {
        for (std::size_t r = 0; r < dmc->runs.size(); ++r) {
            const auto& e = dmc->runs[r];
            out << r << ",dmc," << format_double(e.p_hat) << ",0," << e.n_samples << ',' << e.evaluations_used
                << ",ok\n";
        }
    }
    return out.str();
}

json to_json(const SsEstimate& est) {
    json levels = json::array();
    for (const auto& rec : est.level_records) {
        json l = {{"level", rec.level},
                  {"threshold", number_or_null(rec.threshold)},
                  {"n_failures", rec.n_failures},
                  {"n_seeds", rec.n_seeds},
                  {"conditional_probability", rec.conditional_probability},
                  {"evaluations", rec.evaluations_used},
                  {"new_samples", rec.new_samples},
                  {"tie_warning", rec.tie_warning},
                  {"repeated_state_tie", rec.repeated_state_tie}};
        if (rec.acceptance_stats) {
            const auto& s = *rec.acceptance_stats;
            l["acceptance_rate"] = s.acceptance_rate();
            l["coordinate_acceptance_rate"] =
                s.coordinate_proposals == 0
                    ? 0.0
                    : static_cast<double>(s.coordinate_acceptances) / static_cast<double>(s.coordinate_proposals);
        }
        if (rec.proposal) l["proposal_spread"] = rec.proposal->spread;
        levels.push_back(std::move(l));
    }
    return {{"p_hat", est.p_hat},
            {"levels", est.levels},
            {"thresholds", est.thresholds},
            {"total_samples", est.total_samples},
            {"total_evaluations", est.total_evaluations},
            {"tie_warning", est.tie_warning},
            {"level_records", levels}};
}

json to_json(const DmcEstimate& est) {
    return {{"p_hat", est.p_hat},
            {"n_samples", est.n_samples},
            {"n_failures", est.n_failures},
            {"theoretical_cov", est.theoretical_cov ? json(*est.theoretical_cov) : json(nullptr)},
            {"evaluations", est.evaluations_used}};
}

json to_json(const ReplicateStats& stats) {
    return {{"mean", number_or_null(stats.mean)},
            {"stddev", number_or_null(stats.stddev)},
            {"cov", number_or_null(stats.cov)},
            {"count", stats.count}};
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::error_code ec;
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path(), ec);
        if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw IoError("write failed: " + path.string());
}

json manifest_json(const RunManifest& manifest) {
    json doc = {{"tool", "subsim"},
                {"version", kVersion},
                {"threads", max_threads()},
                {"wall_time_seconds", manifest.wall_time_seconds},
                {"results", manifest.results}};
    if (manifest.config) {
        doc["config"] = to_json(*manifest.config);
        doc["seed"] = manifest.config->seed;
        doc["critical_threshold"] = nullptr;
        if (manifest.config->y_star || manifest.config->p_target) {
            doc["critical_threshold"] = manifest.config->critical_threshold();
        }
    }
    return doc;
}

std::vector<std::filesystem::path> emit_estimate(const std::filesystem::path& out_dir, const RunManifest& manifest,
                                                 const EstimateOutputs& outputs) {
    std::vector<std::filesystem::path> written;
    if (outputs.levels) {
        written.push_back(out_dir / "levels.csv");
        write_text_file(written.back(), levels_csv(*outputs.levels));
    }
    const std::size_t runs = outputs.ss ? outputs.ss->runs.size() : (outputs.dmc ? outputs.dmc->runs.size() : 0);
    if (runs > 1) {
        written.push_back(out_dir / "runs.csv");
        write_text_file(written.back(), runs_csv(outputs.ss, outputs.dmc));
    }
    written.push_back(out_dir / "summary.json");
    write_text_file(written.back(), manifest_json(manifest).dump(2) + "\n");
    return written;
}

std::vector<std::filesystem::path> emit_sweep(const std::filesystem::path& out_dir, const RunManifest& manifest,
                                              const std::vector<RunSummary>& rows) {
    std::vector<std::filesystem::path> written{out_dir / "sweep.csv", out_dir / "manifest.json"};
    write_text_file(written[0], sweep_csv(rows));
    write_text_file(written[1], manifest_json(manifest).dump(2) + "\n");
    return written;
}

std::vector<std::filesystem::path> emit_trace(const std::filesystem::path& out_dir, const RunManifest& manifest,
                                              const LevelTrace& trace) {
    const auto& records = trace.estimate.level_records;
    std::vector<std::filesystem::path> written{out_dir / "levels.csv", out_dir / "responses.csv"};
    write_text_file(written[0], levels_csv(records));
    write_text_file(written[1], responses_csv(records));
    if (!records.empty() && !records.front().samples.empty()) {
        written.push_back(out_dir / "samples.csv");
        write_text_file(written.back(), samples_csv(records));
    }
    written.push_back(out_dir / "summary.json");
    write_text_file(written.back(), manifest_json(manifest).dump(2) + "\n");
    return written;
}

}  // namespace subsim
