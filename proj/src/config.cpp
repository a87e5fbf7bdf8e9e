#include "prunebound/config.hpp"

#include "prunebound/errors.hpp"

#include <cstdio>
#include <fstream>
#include <set>

namespace prunebound {

using nlohmann::json;

namespace {

// Reads keys from one JSON object and rejects any it did not ask for.
class Section {
public:
    Section(const json& j, std::string name) : j_(j), name_(std::move(name)) {
        if (!j_.is_object()) throw ValidationError("config: '" + name_ + "' must be an object");
    }
    ~Section() noexcept(false) {
        if (std::uncaught_exceptions() > 0) return;
        for (const auto& [k, v] : j_.items())
            if (!seen_.count(k)) throw ValidationError("config: unknown key '" + name_ + "." + k + "'");
    }
    template <class T>
    void get(const char* key, T& out) {
        seen_.insert(key);
        if (!j_.contains(key)) return;
        try {
            out = j_.at(key).get<T>();
        } catch (const json::exception& e) {
            throw ValidationError("config: bad value for '" + name_ + "." + key + "': " + e.what());
        }
    }
    template <class T>
    void get_optional(const char* key, std::optional<T>& out, const char* auto_word = "auto") {
        seen_.insert(key);
        if (!j_.contains(key)) return;
        const auto& v = j_.at(key);
        if (v.is_null() || (v.is_string() && v.get<std::string>() == auto_word)) {
            out.reset();
            return;
        }
        try {
            out = v.get<T>();
        } catch (const json::exception& e) {
            throw ValidationError("config: bad value for '" + name_ + "." + key + "': " + e.what());
        }
    }
    void path(const char* key, std::filesystem::path& out, const std::filesystem::path& base) {
        std::string s;
        get(key, s);
        if (!s.empty()) {
            std::filesystem::path p(s);
            out = (p.is_relative() && !base.empty()) ? (base / p).lexically_normal() : p;
        }
    }
    const json* child(const char* key) {
        seen_.insert(key);
        return j_.contains(key) ? &j_.at(key) : nullptr;
    }

private:
    const json& j_;
    std::string name_;
    std::set<std::string> seen_;
};

void require_positive(double v, const char* what) {
    if (!(v > 0.0)) throw ValidationError(std::string("config: ") + what + " must be positive");
}

void validate(const ExperimentConfig& c) {
    if (c.model.depth == 0 || c.model.hidden == 0) throw ValidationError("config: model dims must be positive");
    if (c.train.batch_size == 0) throw ValidationError("config: train.batch_size must be positive");
    require_positive(c.train.lr, "train.lr");
    if (c.prune.d) require_positive(*c.prune.d, "prune.d");
    if (c.prune.psi) require_positive(*c.prune.psi, "prune.psi");
    if (!(c.prune.d_fraction > 0.0 && c.prune.d_fraction <= 1.0))
        throw ValidationError("config: prune.d_fraction must lie in (0, 1]");
    require_positive(c.budget.eps, "budget.eps");
    if (!(c.budget.lambda >= 1.0)) throw ValidationError("config: budget.lambda must be >= 1");
    if (!(c.budget.delta > 0.0 && c.budget.delta < 1.0)) throw ValidationError("config: budget.delta must lie in (0, 1)");
    require_positive(c.budget.C, "budget.C");
    if (c.budget.gamma) require_positive(*c.budget.gamma, "budget.gamma");
    if (!(c.budget.baseline_margin_quantile > 0.0 && c.budget.baseline_margin_quantile < 1.0))
        throw ValidationError("config: budget.baseline_margin_quantile must lie in (0, 1)");
    require_positive(c.sketch.c_m, "sketch.c_m");
    if (c.sketch.degree && *c.sketch.degree == 0) throw ValidationError("config: sketch.degree must be positive");
    require_positive(c.sketch.tol, "sketch.tol");
    if (c.sweep.hidden.empty()) throw ValidationError("config: sweep.hidden must not be empty");
}

template <class T>
json opt(const std::optional<T>& v) {
    return v ? json(*v) : json("auto");
}

}  // namespace

ExperimentConfig config_from_json(const json& j, const std::filesystem::path& base_dir) {
    ExperimentConfig c;
    Section top(j, "config");
    if (const auto* d = top.child("data")) {
        Section s(*d, "data");
        s.path("train_images", c.data.train_images, base_dir);
        s.path("train_labels", c.data.train_labels, base_dir);
        s.path("test_images", c.data.test_images, base_dir);
        s.path("test_labels", c.data.test_labels, base_dir);
        s.get("train_limit", c.data.train_limit);
        s.get("test_limit", c.data.test_limit);
    }
    if (const auto* d = top.child("model")) {
        Section s(*d, "model");
        s.get("hidden", c.model.hidden);
        s.get("depth", c.model.depth);
    }
    if (const auto* d = top.child("train")) {
        Section s(*d, "train");
        s.get("epochs", c.train.epochs);
        s.get("batch_size", c.train.batch_size);
        s.get("lr", c.train.lr);
    }
    if (const auto* d = top.child("prune")) {
        Section s(*d, "prune");
        s.get_optional("d", c.prune.d);
        s.get_optional("psi", c.prune.psi, "estimate");
        s.get("d_fraction", c.prune.d_fraction);
    }
    if (const auto* d = top.child("budget")) {
        Section s(*d, "budget");
        s.get("eps", c.budget.eps);
        s.get("lambda", c.budget.lambda);
        s.get("delta", c.budget.delta);
        s.get("C", c.budget.C);
        s.get_optional("gamma", c.budget.gamma);
        s.get("baseline_margin_quantile", c.budget.baseline_margin_quantile);
    }
    if (const auto* d = top.child("sketch")) {
        Section s(*d, "sketch");
        s.get("c_m", c.sketch.c_m);
        s.get_optional("degree", c.sketch.degree);
        s.get("tol", c.sketch.tol);
        s.get("max_iter", c.sketch.max_iter);
        s.get("verify_max_dim", c.sketch.verify_max_dim);
    }
    if (const auto* d = top.child("verify")) {
        Section s(*d, "verify");
        auto& v = c.verify;
        s.get("moment_samples", v.moment_samples);
        s.get("moment_d", v.moment_d);
        s.get("moment_psi", v.moment_psi);
        s.get("z_tolerance", v.z_tolerance);
        s.get("keep_dim", v.keep_dim);
        s.get("keep_tolerance", v.keep_tolerance);
        s.get("gamma_dim", v.gamma_dim);
        s.get("gamma_trials", v.gamma_trials);
        s.get("gamma_eps", v.gamma_eps);
        s.get("balls", v.balls);
        s.get("bins", v.bins);
        s.get("balls_trials", v.balls_trials);
        s.get("sparsity_dim", v.sparsity_dim);
        s.get("sparsity_trials", v.sparsity_trials);
        s.get("sparsity_lambda", v.sparsity_lambda);
    }
    if (const auto* d = top.child("sweep")) {
        Section s(*d, "sweep");
        s.get("hidden", c.sweep.hidden);
        s.get_optional("epochs", c.sweep.epochs);
    }
    top.get("seed", c.seed);
    top.path("out_dir", c.out_dir, base_dir);
    validate(c);
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config '" + path.string() + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ValidationError("config '" + path.string() + "' is not valid JSON: " + e.what());
    }
    return config_from_json(j, path.parent_path());
}

json config_to_json(const ExperimentConfig& c) {
    json j;
    j["data"] = {{"train_images", c.data.train_images.string()},
                 {"train_labels", c.data.train_labels.string()},
                 {"test_images", c.data.test_images.string()},
                 {"test_labels", c.data.test_labels.string()},
                 {"train_limit", c.data.train_limit},
                 {"test_limit", c.data.test_limit}};
    j["model"] = {{"hidden", c.model.hidden}, {"depth", c.model.depth}};
    j["train"] = {{"epochs", c.train.epochs}, {"batch_size", c.train.batch_size}, {"lr", c.train.lr}};
    j["prune"] = {{"d", opt(c.prune.d)},
                  {"psi", c.prune.psi ? json(*c.prune.psi) : json("estimate")},
                  {"d_fraction", c.prune.d_fraction}};
    j["budget"] = {{"eps", c.budget.eps},
                   {"lambda", c.budget.lambda},
                   {"delta", c.budget.delta},
                   {"C", c.budget.C},
                   {"gamma", opt(c.budget.gamma)},
                   {"baseline_margin_quantile", c.budget.baseline_margin_quantile}};
    j["sketch"] = {{"c_m", c.sketch.c_m},
                   {"degree", opt(c.sketch.degree)},
                   {"tol", c.sketch.tol},
                   {"max_iter", c.sketch.max_iter},
                   {"verify_max_dim", c.sketch.verify_max_dim}};
    const auto& v = c.verify;
    j["verify"] = {{"moment_samples", v.moment_samples},   {"moment_d", v.moment_d},
                   {"moment_psi", v.moment_psi},           {"z_tolerance", v.z_tolerance},
                   {"keep_dim", v.keep_dim},               {"keep_tolerance", v.keep_tolerance},
                   {"gamma_dim", v.gamma_dim},             {"gamma_trials", v.gamma_trials},
                   {"gamma_eps", v.gamma_eps},             {"balls", v.balls},
                   {"bins", v.bins},                       {"balls_trials", v.balls_trials},
                   {"sparsity_dim", v.sparsity_dim},       {"sparsity_trials", v.sparsity_trials},
                   {"sparsity_lambda", v.sparsity_lambda}};
    j["sweep"] = {{"hidden", c.sweep.hidden}, {"epochs", opt(c.sweep.epochs)}};
    j["seed"] = c.seed;
    j["out_dir"] = c.out_dir.string();
    return j;
}

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : bytes) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string config_hash(const ExperimentConfig& cfg) {
    json j = config_to_json(cfg);
    j.erase("out_dir");  // where artifacts land does not change what they contain
    return fnv1a_hex(j.dump());
}

}  // namespace prunebound
