#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "subsim/config.hpp"
#include "subsim/experiments.hpp"

namespace subsim {

// CSV headers; the figure scripts depend on these verbatim.
inline constexpr const char* kSweepCsvHeader =
    "y_star,p_true,ss_mean,ss_std,ss_cov,ss_mean_total_samples,dmc_mean,dmc_cov,dmc_cov_theory,replicates,exclusions";
inline constexpr const char* kLevelsCsvHeader = "level,threshold,n_failures,acceptance_rate,evaluations";
inline constexpr const char* kResponsesCsvHeader = "level,rank,response";
inline constexpr const char* kRunsCsvHeader = "run,method,p_hat,levels,total_samples,evaluations,status";

/// 17 significant digits ("%.17g"); NaN and infinities as nan, inf, -inf.
[[nodiscard]] std::string format_double(double v);

[[nodiscard]] std::string sweep_csv(const std::vector<RunSummary>& rows);
[[nodiscard]] std::string levels_csv(const std::vector<LevelRecord>& records);
[[nodiscard]] std::string responses_csv(const std::vector<LevelRecord>& records);
/// level,index,response,x1..xd; needs records produced with keep_samples.
[[nodiscard]] std::string samples_csv(const std::vector<LevelRecord>& records);
[[nodiscard]] std::string runs_csv(const SsBatch* ss, const DmcBatch* dmc);

[[nodiscard]] nlohmann::json to_json(const SsEstimate& est);
[[nodiscard]] nlohmann::json to_json(const DmcEstimate& est);
[[nodiscard]] nlohmann::json to_json(const ReplicateStats& stats);

/// Writes `content` to `path`, creating parent directories. Throws IoError.
void write_text_file(const std::filesystem::path& path, const std::string& content);

struct RunManifest {
    const RunConfig* config = nullptr;
    double wall_time_seconds = 0.0;
    nlohmann::json results;
};

[[nodiscard]] nlohmann::json manifest_json(const RunManifest& manifest);

/// Output file set of one estimate command.
struct EstimateOutputs {
    const SsBatch* ss = nullptr;
    const DmcBatch* dmc = nullptr;
    /// Level records of the first SS replicate (partial when it aborted).
    const std::vector<LevelRecord>* levels = nullptr;
};

/// summary.json, levels.csv (when SS ran) and runs.csv (more than one replicate).
std::vector<std::filesystem::path> emit_estimate(const std::filesystem::path& out_dir, const RunManifest& manifest,
                                                 const EstimateOutputs& outputs);

/// sweep.csv and manifest.json.
std::vector<std::filesystem::path> emit_sweep(const std::filesystem::path& out_dir, const RunManifest& manifest,
                                              const std::vector<RunSummary>& rows);

/// summary.json, levels.csv, responses.csv and, with kept samples, samples.csv.
std::vector<std::filesystem::path> emit_trace(const std::filesystem::path& out_dir, const RunManifest& manifest,
                                              const LevelTrace& trace);

}  // namespace subsim
