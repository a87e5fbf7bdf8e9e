#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace prunebound {

struct DataConfig {
    std::filesystem::path train_images;
    std::filesystem::path train_labels;
    std::filesystem::path test_images;
    std::filesystem::path test_labels;
    std::size_t train_limit = 5000;
    std::size_t test_limit = 1000;
};

struct ModelConfig {
    std::size_t hidden = 128;
    std::size_t depth = 5;
};

struct TrainConfig {
    std::size_t epochs = 30;
    std::size_t batch_size = 256;
    double lr = 1e-3;
};

struct PruneConfig {
    std::optional<double> d;    // empty: choose automatically
    std::optional<double> psi;  // empty: per-layer sample variance
    double d_fraction = 0.5;    // automatic d keeps eps*Gamma <= d_fraction * ||A||/L
};

struct BudgetConfig {
    double eps = 20.0;
    double lambda = 20.0;
    double delta = 0.05;
    double C = 1.0;
    std::optional<double> gamma;  // empty: smallest feasible margin
    double baseline_margin_quantile = 0.1;
};

struct SketchConfig {
    double c_m = 1.0;
    std::optional<std::size_t> degree;  // empty: ceil(ln p)
    double tol = 1e-8;
    std::size_t max_iter = 50000;
    std::size_t verify_max_dim = 0;  // recover layers with p up to this size (0: none)
};

struct VerifyConfig {
    std::size_t moment_samples = 1000000;
    std::vector<double> moment_d{0.5, 1.0, 2.0, 10.0};
    std::vector<double> moment_psi{0.25, 1.0, 4.0};
    double z_tolerance = 3.0;
    std::size_t keep_dim = 1000;
    double keep_tolerance = 0.005;
    std::size_t gamma_dim = 100;
    std::size_t gamma_trials = 200;
    double gamma_eps = 2.0;
    std::size_t balls = 300;
    std::size_t bins = 100;
    std::size_t balls_trials = 10000;
    std::size_t sparsity_dim = 1000;
    std::size_t sparsity_trials = 200;
    double sparsity_lambda = 2.0;
};

struct SweepConfig {
    std::vector<std::size_t> hidden{128, 256, 512};
    std::optional<std::size_t> epochs;  // empty: train.epochs
};

struct ExperimentConfig {
    DataConfig data;
    ModelConfig model;
    TrainConfig train;
    PruneConfig prune;
    BudgetConfig budget;
    SketchConfig sketch;
    VerifyConfig verify;
    SweepConfig sweep;
    std::uint64_t seed = 20240607;
    std::filesystem::path out_dir = "out";
};

// Parses a JSON document. Unknown keys are rejected; relative paths are
// resolved against `base_dir`.
ExperimentConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);
nlohmann::json config_to_json(const ExperimentConfig& cfg);

// FNV-1a 64 of the canonical (sorted-key, compact) JSON, as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);
std::string fnv1a_hex(const std::string& bytes);

}  // namespace prunebound
