#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "subsim/subset_simulation.hpp"

namespace subsim {

enum class Command { estimate, sweep, trace, selftest };
enum class Method { ss, dmc, both };

struct ModelConfig {
    std::string name = "linear_sum";
    std::size_t dim = 2;
};

struct SweepConfig {
    double y_min = 0.0;
    double y_max = 200.0;
    std::size_t points = 41;
};

inline constexpr std::size_t kQuickReplicates = 20;
inline constexpr std::size_t kDefaultSweepReplicates = 100;
inline constexpr std::uint64_t kDefaultDmcSamples = 100000;

// Resolved run configuration. Defaults: p = 0.1, n = 1000, unit-variance
// Gaussian proposal, seed 0.
struct RunConfig {
    Command command = Command::estimate;
    ModelConfig model;
    std::optional<double> y_star;
    std::optional<double> p_target;
    Method method = Method::ss;
    SsConfig ss;
    /// Empty means 1 for estimate and 100 (20 with quick) for sweep.
    std::optional<std::size_t> replicates;
    /// Empty means: matched to the SS budget when one exists, else 1e5.
    std::optional<std::uint64_t> dmc_samples;
    std::string output_dir = "out";
    bool quick = false;
    SweepConfig sweep;
    std::uint64_t seed = 0;
    bool entropy_seed = false;

    /// Throws ConfigError naming the offending field.
    void validate() const;

    /// y_star, or the threshold implied by p_target.
    [[nodiscard]] double critical_threshold() const;

    [[nodiscard]] std::size_t effective_replicates() const;

    /// SsConfig with the run seed applied.
    [[nodiscard]] SsConfig ss_config() const;
};

/// Parses a JSON configuration document. Missing keys take defaults.
/// Throws ConfigError with location (syntax) or field name (content).
/// Does not validate cross-field invariants; call RunConfig::validate().
[[nodiscard]] RunConfig parse_config(std::string_view text);

/// Reads and parses a configuration file.
[[nodiscard]] RunConfig load_config(const std::string& path);

/// Applies the keys present in `doc` onto `base`.
void apply_config(RunConfig& base, const nlohmann::json& doc);

[[nodiscard]] nlohmann::json to_json(const RunConfig& config);

[[nodiscard]] std::string_view to_string(Command c) noexcept;
[[nodiscard]] std::string_view to_string(Method m) noexcept;
[[nodiscard]] std::optional<Command> parse_command(std::string_view s) noexcept;
[[nodiscard]] std::optional<Method> parse_method(std::string_view s) noexcept;

}  // namespace subsim
