#pragma once

#include "prunebound/config.hpp"
#include "prunebound/model.hpp"
#include "prunebound/pruning.hpp"
#include "prunebound/sketch.hpp"

#include <string>
#include <vector>

#include <json.hpp>

namespace prunebound {

// Every stage is a pure function of its inputs and the config; stage outputs
// carry the config hash and master seed. Random streams hang off the master
// seed: init 0, training 1, pruning 2, sketching 3, verification 4.
enum class SeedStream : std::uint64_t { Init = 0, Train = 1, Prune = 2, Sketch = 3, Verify = 4 };
RngHandle stage_rng(const ExperimentConfig& cfg, SeedStream s);

struct Datasets {
    Dataset train;
    Dataset test;
};
Datasets load_datasets(const ExperimentConfig& cfg);

struct TrainArtifacts {
    ModelStack model;
    nlohmann::json metrics;
};
TrainArtifacts run_train(const ExperimentConfig& cfg, const Datasets& data);

struct PruneArtifacts {
    PruneOutcome outcome;
    ModelStack discretized;
    nlohmann::json summary;  // d, psi, norms, Gamma, rho, sparsity and measured errors per layer
};
PruneArtifacts run_prune(const ExperimentConfig& cfg, const ModelStack& model);

struct SketchArtifacts {
    std::vector<SketchPair> pairs;
    nlohmann::json summary;
};
SketchArtifacts run_sketch(const ExperimentConfig& cfg, const ModelStack& discretized,
                           const nlohmann::json& prune_summary);

// All bound calculators in one report. `methods` filters the method map
// (empty keeps everything).
nlohmann::json run_bounds(const ExperimentConfig& cfg, const ModelStack& model, const Datasets& data,
                          const ModelStack& discretized, const nlohmann::json& prune_summary,
                          const nlohmann::json& sketch_summary, const std::vector<std::string>& methods = {});

// Method names in report order.
const std::vector<std::string>& all_methods();

// Long-form CSV (one row per method) and a bar chart of log values.
std::string report_csv(const nlohmann::json& report);
std::string report_svg(const nlohmann::json& report, const std::string& title);

// Stamp config hash, seed and log base onto an artifact.
nlohmann::json stamp(const ExperimentConfig& cfg, nlohmann::json j);

}  // namespace prunebound
