#pragma once

#include "debias/fpe.hpp"
#include "debias/instances.hpp"
#include "debias/json_io.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace debias {

struct ExperimentConfig {
    /// Either a generator spec {"family": "worst-case"|"gap"|"small-d", ...}
    /// or {"actions": FILE|object, "parameter": FILE|object}.
    Json instance;
    std::string algorithm = "fpe";
    std::int64_t horizon = 0;
    std::optional<double> delta;  // absent means 1/T
    int reps = 1;
    std::uint64_t seed = 0;
    std::string checkpoints = "pow2";
    double noise_std = 1.0;
    int workers = 1;
    /// Directory used to resolve relative instance file paths.
    std::filesystem::path base_dir;
};

/// Throws std::invalid_argument on unknown fields or invalid values.
ExperimentConfig config_from_json(const Json& j, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);
Json config_to_json(const ExperimentConfig& c);

/// FNV-1a over the canonical JSON of the semantic fields (workers excluded).
std::uint64_t config_hash(const ExperimentConfig& c);

ProblemInstance resolve_instance(const Json& spec, std::int64_t horizon, const std::filesystem::path& base_dir = {});

struct Aggregate {
    Vector mean;
    Vector sd;
    Vector ci_low;
    Vector ci_high;
};

/// Per-checkpoint mean, sample sd and mean +- 1.96 sd / sqrt(n). Rows are
/// sorted by replication index first, so the result does not depend on the
/// order in which they arrive.
Aggregate aggregate(std::vector<std::pair<int, Vector>> rows);

struct SimulationResult {
    ExperimentConfig config;
    std::uint64_t config_hash = 0;
    std::vector<std::int64_t> checkpoints;
    std::vector<RunResult> runs;  // indexed by replication
    Aggregate stats;
};

SimulationResult simulate(const ExperimentConfig& cfg);
SimulationResult simulate(const ExperimentConfig& cfg, const ProblemInstance& instance);

/// Writes regret.csv and summary.json into dir (created if needed).
void write_simulation(const SimulationResult& r, const std::filesystem::path& dir);

struct RegretRow {
    int rep = 0;
    std::int64_t checkpoint = 0;
    double cum_regret = 0.0;
};

std::string format_double(double v);
double parse_double(std::string_view s);

void write_regret_csv(const std::filesystem::path& path, const SimulationResult& r);
std::string regret_csv(const SimulationResult& r);
std::vector<RegretRow> parse_regret_csv(std::string_view text);
std::vector<RegretRow> read_regret_csv(const std::filesystem::path& path);

/// Mean regret per checkpoint, ascending.
std::vector<std::pair<std::int64_t, double>> mean_by_checkpoint(std::span<const RegretRow> rows);

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

/// Least squares fit of log R against log T.
SlopeFit fit_slope(std::span<const double> t, std::span<const double> r);

struct Comparison {
    std::vector<std::string> names;
    std::vector<std::int64_t> checkpoints;
    std::vector<Vector> mean;  // one column per config
};

/// Runs every config with the seed of the first one. Configs must share the
/// instance, horizon, replication count and noise level.
Comparison compare(const std::vector<ExperimentConfig>& cfgs);
std::string comparison_csv(const Comparison& c);

}  // namespace debias
