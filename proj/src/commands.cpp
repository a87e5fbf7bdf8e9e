#include "prunebound/commands.hpp"

#include "prunebound/errors.hpp"
#include "prunebound/persist.hpp"
#include "prunebound/pipeline.hpp"
#include "prunebound/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace prunebound {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

void write_json(const fs::path& path, const json& j) { write_text_file(path, j.dump(2) + "\n"); }

json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("missing artifact '" + path.string() + "'; run the earlier stage first");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw FormatError("artifact '" + path.string() + "' is not valid JSON: " + e.what());
    }
}

ModelStack read_model(const fs::path& path) {
    if (!fs::exists(path)) throw ValidationError("missing artifact '" + path.string() + "'; run the earlier stage first");
    return load_model(path);
}

// Artifacts from a different config are still usable, but the mix is worth a warning.
void note_upstream(const ExperimentConfig& cfg, const json& upstream, const fs::path& path) {
    if (upstream.value("config_hash", std::string{}) != config_hash(cfg))
        std::cerr << "warning: " << path.string() << " was produced under a different config\n";
}

json stage_meta(const ExperimentConfig& cfg, const std::string& stage) { return stamp(cfg, {{"stage", stage}}); }

void save_prune(const ExperimentConfig& cfg, const PruneArtifacts& p) {
    const fs::path out = cfg.out_dir;
    save_model(out / artifact::kPruned, p.outcome.pruned, stage_meta(cfg, "prune"));
    save_model(out / artifact::kDiscretized, p.discretized, stage_meta(cfg, "discretize"));
    NamedMatrices masks;
    for (std::size_t l = 0; l < p.outcome.masks.size(); ++l)
        masks.emplace_back("mask" + std::to_string(l), p.outcome.masks[l]);
    save_matrices(out / artifact::kMasks, masks, stage_meta(cfg, "prune"));
    write_json(out / artifact::kPrune, p.summary);
}

void save_sketch(const ExperimentConfig& cfg, const SketchArtifacts& s) {
    NamedMatrices items;
    for (std::size_t l = 0; l < s.pairs.size(); ++l) {
        const std::string tag = std::to_string(l);
        items.emplace_back("A" + tag, s.pairs[l].A.adjacency);
        items.emplace_back("B" + tag, s.pairs[l].B.adjacency);
        items.emplace_back("Y" + tag, s.pairs[l].Y);
    }
    save_matrices(fs::path(cfg.out_dir) / artifact::kSketches, items, stage_meta(cfg, "sketch"));
    write_json(fs::path(cfg.out_dir) / artifact::kSketch, s.summary);
}

void save_bounds(const ExperimentConfig& cfg, const json& report) {
    const fs::path out = cfg.out_dir;
    write_json(out / artifact::kBoundsJson, report);
    write_text_file(out / artifact::kBoundsCsv, report_csv(report));
    write_text_file(out / artifact::kBoundsSvg, report_svg(report, "Generalization bounds (natural log)"));
}

void print_bounds(const json& report) {
    for (const auto& name : all_methods()) {
        if (!report.at("methods").contains(name)) continue;
        std::printf("  %-14s ln = %10.4f\n", name.c_str(), report.at("methods").at(name).at("log_value").get<double>());
    }
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string sweep_svg(const ExperimentConfig& cfg, const std::vector<json>& reports) {
    const std::vector<std::size_t>& hidden = cfg.sweep.hidden;
    static const std::vector<std::pair<std::string, std::string>> series{{"sketch", "#d95f02"},
                                                                         {"bartlett2017", "#1b9e77"},
                                                                         {"neyshabur2017", "#7570b3"},
                                                                         {"neyshabur2015", "#e7298a"}};
    double lo = 0.0;
    double hi = 1.0;
    for (const auto& r : reports)
        for (const auto& [name, _] : series)
            if (r.at("methods").contains(name)) {
                const double v = r.at("methods").at(name).at("log_value").get<double>();
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
    const double left = 70.0;
    const double right = 520.0;
    const double top = 40.0;
    const double bottom = 300.0;
    auto x = [&](std::size_t i) {
        return hidden.size() < 2 ? (left + right) / 2
                                 : left + (right - left) * static_cast<double>(i) / static_cast<double>(hidden.size() - 1);
    };
    auto y = [&](double v) { return bottom - (v - lo) / (hi - lo) * (bottom - top); };
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"680\" height=\"360\">\n";
    os << "<desc>config_hash " << config_hash(cfg) << " seed " << cfg.seed << "</desc>\n";
    os << "<text x=\"295\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">"
          "Bounds against hidden width (natural log)</text>\n";
    os << "<line x1=\"" << left << "\" y1=\"" << bottom << "\" x2=\"" << right << "\" y2=\"" << bottom
       << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << bottom
       << "\" stroke=\"black\"/>\n";
    for (std::size_t i = 0; i < hidden.size(); ++i)
        os << "<text x=\"" << x(i) << "\" y=\"" << bottom + 18
           << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << hidden[i] << "</text>\n";
    os << "<text x=\"" << (left + right) / 2 << "\" y=\"" << bottom + 40
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">hidden width</text>\n";
    std::size_t row = 0;
    for (const auto& [name, colour] : series) {
        std::string points;
        for (std::size_t i = 0; i < reports.size(); ++i) {
            if (!reports[i].at("methods").contains(name)) continue;
            const double v = reports[i].at("methods").at(name).at("log_value").get<double>();
            points += std::to_string(x(i)) + "," + std::to_string(y(v)) + " ";
        }
        if (points.empty()) continue;
        os << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"2\" points=\"" << points << "\"/>\n";
        os << "<text x=\"540\" y=\"" << top + 18.0 * static_cast<double>(row++) << "\" fill=\"" << colour
           << "\" font-family=\"sans-serif\" font-size=\"12\">" << name << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace

ExperimentConfig resolve_config(const CommandOptions& opts) {
    if (opts.config.empty()) throw ValidationError("--config is required");
    ExperimentConfig cfg = load_config(opts.config);
    if (opts.seed) cfg.seed = *opts.seed;
    if (opts.out) cfg.out_dir = *opts.out;
    if (opts.limit) {
        if (*opts.limit == 0) throw ValidationError("--limit must be positive");
        cfg.data.train_limit = std::min(cfg.data.train_limit, *opts.limit);
        cfg.data.test_limit = std::min(cfg.data.test_limit, *opts.limit);
    }
    return cfg;
}

int cmd_train(const ExperimentConfig& cfg) {
    const Datasets data = load_datasets(cfg);
    const TrainArtifacts t = run_train(cfg, data);
    save_model(fs::path(cfg.out_dir) / artifact::kModel, t.model, stage_meta(cfg, "train"));
    write_json(fs::path(cfg.out_dir) / artifact::kTrainMetrics, t.metrics);
    std::printf("train: test accuracy %.4f, model written to %s\n", t.metrics.at("test_accuracy").get<double>(),
                (fs::path(cfg.out_dir) / artifact::kModel).string().c_str());
    return 0;
}

int cmd_prune(const ExperimentConfig& cfg) {
    const fs::path model_path = fs::path(cfg.out_dir) / artifact::kModel;
    const ModelStack model = read_model(model_path);
    note_upstream(cfg, read_json(sidecar_path(model_path)), model_path);
    const PruneArtifacts p = run_prune(cfg, model);
    save_prune(cfg, p);
    std::printf("prune: d = %.6g, chi = %.6g\n", p.summary.at("d").get<double>(), p.summary.at("chi").get<double>());
    return 0;
}

int cmd_sketch(const ExperimentConfig& cfg) {
    const fs::path out = cfg.out_dir;
    const json prune = read_json(out / artifact::kPrune);
    note_upstream(cfg, prune, out / artifact::kPrune);
    const SketchArtifacts s = run_sketch(cfg, read_model(out / artifact::kDiscretized), prune);
    save_sketch(cfg, s);
    std::printf("sketch: %zu layers sketched\n", s.pairs.size());
    return 0;
}

int cmd_bounds(const ExperimentConfig& cfg, const std::vector<std::string>& methods) {
    const fs::path out = cfg.out_dir;
    const json prune = read_json(out / artifact::kPrune);
    const json sk = read_json(out / artifact::kSketch);
    note_upstream(cfg, prune, out / artifact::kPrune);
    note_upstream(cfg, sk, out / artifact::kSketch);
    const Datasets data = load_datasets(cfg);
    const json report =
        run_bounds(cfg, read_model(out / artifact::kModel), data, read_model(out / artifact::kDiscretized), prune, sk,
                   methods);
    save_bounds(cfg, report);
    std::printf("bounds:\n");
    print_bounds(report);
    return 0;
}

int cmd_verify(const ExperimentConfig& cfg, double m2_scale) {
    const VerifyReport r = run_verify(cfg, m2_scale);
    write_json(fs::path(cfg.out_dir) / artifact::kVerify, r.json);
    for (const auto& c : r.checks)
        std::printf("%s  %-44s closed %.6g  estimate %.6g  z %.3f\n", c.pass ? "PASS" : "FAIL", c.name.c_str(),
                    c.closed_form, c.estimate, c.z_score);
    if (!r.all_pass) {
        std::fprintf(stderr, "verify: %zu check(s) failed\n", r.json.at("failed").get<std::size_t>());
        return 2;
    }
    return 0;
}

int cmd_report(const ExperimentConfig& cfg, const std::vector<std::string>& methods) {
    const Datasets data = load_datasets(cfg);
    const fs::path out = cfg.out_dir;

    const TrainArtifacts t = run_train(cfg, data);
    save_model(out / artifact::kModel, t.model, stage_meta(cfg, "train"));
    write_json(out / artifact::kTrainMetrics, t.metrics);
    const PruneArtifacts p = run_prune(cfg, t.model);
    save_prune(cfg, p);
    const SketchArtifacts s = run_sketch(cfg, p.discretized, p.summary);
    save_sketch(cfg, s);
    const json report = run_bounds(cfg, t.model, data, p.discretized, p.summary, s.summary, methods);
    save_bounds(cfg, report);
    std::printf("report: hidden %zu\n", cfg.model.hidden);
    print_bounds(report);

    std::vector<json> reports;
    for (std::size_t h : cfg.sweep.hidden) {
        ExperimentConfig c = cfg;
        c.model.hidden = h;
        if (cfg.sweep.epochs) c.train.epochs = *cfg.sweep.epochs;
        const TrainArtifacts ts = run_train(c, data);
        const PruneArtifacts ps = run_prune(c, ts.model);
        const SketchArtifacts ss = run_sketch(c, ps.discretized, ps.summary);
        reports.push_back(run_bounds(c, ts.model, data, ps.discretized, ps.summary, ss.summary, methods));
        std::printf("sweep: hidden %zu done\n", h);
    }

    std::vector<std::string> present;
    for (const auto& name : all_methods())
        if (!reports.empty() && reports.front().at("methods").contains(name)) present.push_back(name);

    std::ostringstream csv;
    csv << "hidden,test_error";
    for (const auto& name : present) csv << ',' << name << "_log," << name << "_step";
    csv << ",config_hash,seed\n";
    json rows = json::array();
    json monotone = json::object();
    for (const auto& name : present) monotone[name] = true;
    for (std::size_t i = 0; i < reports.size(); ++i) {
        const json& r = reports[i];
        csv << cfg.sweep.hidden[i] << ',' << fmt(r.at("test_error").at("original").get<double>());
        json row = {{"hidden", cfg.sweep.hidden[i]}, {"test_error", r.at("test_error").at("original")}};
        for (const auto& name : present) {
            const double v = r.at("methods").at(name).at("log_value").get<double>();
            const double step = i == 0 ? 0.0 : v - reports[i - 1].at("methods").at(name).at("log_value").get<double>();
            if (step < 0.0) monotone[name] = false;
            csv << ',' << fmt(v) << ',' << fmt(step);
            row[name] = v;
        }
        csv << ',' << config_hash(cfg) << ',' << cfg.seed << '\n';
        rows.push_back(row);
    }
    write_text_file(out / artifact::kSweepCsv, csv.str());
    json growth = json::object();
    if (reports.size() >= 2)
        for (const auto& name : present)
            growth[name] = rows.back().at(name).get<double>() - rows.front().at(name).get<double>();
    json sweep = {{"stage", "sweep"}, {"rows", rows}, {"monotone_nondecreasing", monotone}, {"total_growth", growth}};
    write_json(out / artifact::kSweepJson, stamp(cfg, sweep));
    write_text_file(out / artifact::kSweepSvg, sweep_svg(cfg, reports));
    return 0;
}

int run_command(const std::string& name, const CommandOptions& opts) {
    const ExperimentConfig cfg = resolve_config(opts);
    if (name == "train") return cmd_train(cfg);
    if (name == "prune") return cmd_prune(cfg);
    if (name == "sketch") return cmd_sketch(cfg);
    if (name == "bounds") return cmd_bounds(cfg, opts.methods);
    if (name == "verify") return cmd_verify(cfg, opts.m2_scale);
    if (name == "report") return cmd_report(cfg, opts.methods);
    throw ValidationError("unknown command '" + name + "'");
}

}  // namespace prunebound
