#pragma once

#include "prunebound/config.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace prunebound {

struct CommandOptions {
    std::filesystem::path config;
    std::optional<std::uint64_t> seed;
    std::optional<std::filesystem::path> out;
    std::vector<std::string> methods;
    std::optional<std::size_t> limit;  // caps both train and test sample counts
    double m2_scale = 1.0;             // verify only: perturbs the closed-form m2
};

// Loads the config and applies the command-line overrides.
ExperimentConfig resolve_config(const CommandOptions& opts);

// Each command reads the previous stage's artifacts from the output
// directory and writes its own. Returns the process exit code; validation and
// numerical failures propagate as exceptions.
int cmd_train(const ExperimentConfig& cfg);
int cmd_prune(const ExperimentConfig& cfg);
int cmd_sketch(const ExperimentConfig& cfg);
int cmd_bounds(const ExperimentConfig& cfg, const std::vector<std::string>& methods);
int cmd_verify(const ExperimentConfig& cfg, double m2_scale);
// Whole chain, then the hidden-width sweep.
int cmd_report(const ExperimentConfig& cfg, const std::vector<std::string>& methods);

int run_command(const std::string& name, const CommandOptions& opts);

// Artifact names inside the output directory.
namespace artifact {
inline constexpr const char* kModel = "model.pbm";
inline constexpr const char* kTrainMetrics = "train_metrics.json";
inline constexpr const char* kPruned = "pruned.pbm";
inline constexpr const char* kDiscretized = "discretized.pbm";
inline constexpr const char* kMasks = "masks.pbmx";
inline constexpr const char* kPrune = "prune.json";
inline constexpr const char* kSketches = "sketch.pbmx";
inline constexpr const char* kSketch = "sketch.json";
inline constexpr const char* kBoundsJson = "bounds.json";
inline constexpr const char* kBoundsCsv = "bounds.csv";
inline constexpr const char* kBoundsSvg = "bounds.svg";
inline constexpr const char* kVerify = "verify.json";
inline constexpr const char* kSweepCsv = "sweep.csv";
inline constexpr const char* kSweepJson = "sweep.json";
inline constexpr const char* kSweepSvg = "sweep.svg";
}  // namespace artifact

}  // namespace prunebound
