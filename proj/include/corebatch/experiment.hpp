#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "corebatch/gan.hpp"
#include "corebatch/metrics.hpp"

namespace corebatch {

// Which sampling stages the treatment arm compresses with the core-set.
enum class CoresetMode { Both, Prior, Target, None };

CoresetMode parse_coreset_mode(const std::string& text);
void apply_coreset_mode(SamplerConfig& sampler, CoresetMode mode);

struct GmmExperimentConfig {
    std::size_t modes = 25;
    double sigma = 0.05;
    GanConfig gan;  // per-run seed is overridden from `seeds`
    std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
    CoresetMode treatment = CoresetMode::Both;
    std::size_t eval_samples = 10000;
    bool measure_wall = true;  // false writes wall_s as 0 for byte-stable output
    std::filesystem::path logs_dir;  // non-empty: write per-run step-loss CSVs here
};

struct ArmResult {
    std::string arm;  // "coreset" or "random"
    std::uint64_t seed = 0;
    std::size_t modes = 0;
    ModeReport report;
    double wall_s = 0.0;
};

// Trains the treatment and baseline arm for every seed (paired: same seed,
// same initial weights, same dataset) and evaluates each generator on fresh
// prior draws. Rows come back seed-major, core-set arm first.
std::vector<ArmResult> run_gmm_experiment(const GmmExperimentConfig& cfg);

// Header arm,seed,modes,recovered_pct,high_quality_pct,wall_s; floats use
// %.17g so re-reading reconstructs every value exactly.
void write_results_csv(const std::vector<ArmResult>& rows, const std::filesystem::path& path);

}  // namespace corebatch
