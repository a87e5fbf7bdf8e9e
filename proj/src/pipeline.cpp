#include "prunebound/pipeline.hpp"

#include "prunebound/bounds.hpp"
#include "prunebound/errors.hpp"
#include "prunebound/linalg.hpp"
#include "prunebound/mnist.hpp"
#include "prunebound/special.hpp"
#include "prunebound/stats.hpp"
#include "prunebound/train.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace prunebound {

using nlohmann::json;

namespace {

std::vector<double> doubles(const json& layers, const char* key) {
    std::vector<double> out;
    for (const auto& l : layers) out.push_back(l.at(key).get<double>());
    return out;
}

std::vector<std::size_t> sizes(const json& layers, const char* key) {
    std::vector<std::size_t> out;
    for (const auto& l : layers) out.push_back(l.at(key).get<std::size_t>());
    return out;
}

double quantile(std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    const auto idx = static_cast<std::size_t>(std::floor(q * static_cast<double>(v.size() - 1)));
    return v[idx];
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt_short(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

}  // namespace

RngHandle stage_rng(const ExperimentConfig& cfg, SeedStream s) {
    return RngHandle{cfg.seed, 0}.derive(static_cast<std::uint64_t>(s));
}

json stamp(const ExperimentConfig& cfg, json j) {
    j["config_hash"] = config_hash(cfg);
    j["seed"] = cfg.seed;
    j["log_base"] = "e";
    return j;
}

Datasets load_datasets(const ExperimentConfig& cfg) {
    const auto& d = cfg.data;
    if (d.train_images.empty() || d.train_labels.empty() || d.test_images.empty() || d.test_labels.empty())
        throw ValidationError("config: data.train_images/train_labels/test_images/test_labels are required");
    return {load_mnist_idx(d.train_images, d.train_labels, d.train_limit),
            load_mnist_idx(d.test_images, d.test_labels, d.test_limit)};
}

TrainArtifacts run_train(const ExperimentConfig& cfg, const Datasets& data) {
    const ModelStack init =
        make_mlp(data.train.dim(), cfg.model.hidden, cfg.model.depth, 10, stage_rng(cfg, SeedStream::Init));
    TrainOptions opts;
    opts.epochs = cfg.train.epochs;
    opts.batch_size = cfg.train.batch_size;
    opts.lr = cfg.train.lr;
    TrainResult r = train(init, data.train, opts, stage_rng(cfg, SeedStream::Train));
    json m;
    m["stage"] = "train";
    m["epoch_loss"] = r.epoch_loss;
    m["train_samples"] = data.train.size();
    m["test_samples"] = data.test.size();
    m["train_accuracy"] = accuracy(r.model, data.train);
    m["test_accuracy"] = accuracy(r.model, data.test);
    m["train_cross_entropy"] = cross_entropy(r.model, data.train);
    return {std::move(r.model), stamp(cfg, std::move(m))};
}

PruneArtifacts run_prune(const ExperimentConfig& cfg, const ModelStack& model) {
    const std::size_t L = model.depth();
    const auto norms = layer_spectral_norms(model);
    std::vector<double> psi;
    std::vector<LayerDims> dims;
    for (const auto& layer : model.layers()) {
        psi.push_back(cfg.prune.psi ? *cfg.prune.psi : estimate_psi(layer.weights));
        dims.push_back({layer.out_dim(), layer.in_dim()});
    }
    const std::vector<double> eps(L, cfg.budget.eps);
    const double d = cfg.prune.d ? *cfg.prune.d
                                 : choose_pruning_strength(norms, dims, psi, eps, cfg.budget.C, cfg.prune.d_fraction);

    PruneParams params;
    params.d = d;
    params.psi = psi.front();
    params.layer_psi = psi;
    params.seed = stage_rng(cfg, SeedStream::Prune);
    PruneArtifacts out;
    out.outcome = mbp_prune(model, params);

    std::vector<double> gammas;
    std::vector<double> rho;
    for (std::size_t l = 0; l < L; ++l) {
        gammas.push_back(latala_gamma(dims[l].d1, dims[l].d2, delta_moments(d, psi[l]), cfg.budget.C).gamma_l);
        rho.push_back(choose_rho(norms[l], L, eps[l] * gammas[l], out.outcome.nnz[l], l));
    }
    out.discretized = discretize(out.outcome, rho);

    json layers = json::array();
    for (std::size_t l = 0; l < L; ++l) {
        const Matrix& a = model.layer(l).weights;
        PowerIterationOptions opts;
        opts.rng = opts.rng.derive(100 + l);
        opts.max_iter = kRandomMatrixMaxIter;
        const double prune_err = spectral_norm(subtract(out.outcome.pruned.layer(l).weights, a), opts);
        const double total_err = spectral_norm(subtract(out.discretized.layer(l).weights, a), opts);
        const double disc_err =
            spectral_norm(subtract(out.discretized.layer(l).weights, out.outcome.pruned.layer(l).weights), opts);
        const auto moments = delta_moments(d, psi[l]);
        layers.push_back({{"d1", dims[l].d1},
                          {"d2", dims[l].d2},
                          {"spectral_norm", norms[l]},
                          {"psi", psi[l]},
                          {"m2", moments.m2},
                          {"m4", moments.m4},
                          {"Gamma", gammas[l]},
                          {"eps", eps[l]},
                          {"lambda", cfg.budget.lambda},
                          {"rho", rho[l]},
                          {"J", out.outcome.nnz[l]},
                          {"j_r", out.outcome.max_col_nnz[l]},
                          {"j_c", out.outcome.max_row_nnz[l]},
                          {"prune_error", prune_err},
                          {"discretize_error", disc_err},
                          {"total_error", total_err},
                          {"prune_error_within_eps_gamma", prune_err <= eps[l] * gammas[l]},
                          {"total_error_within_norm_over_L", total_err <= norms[l] / static_cast<double>(L)}});
    }
    json s;
    s["stage"] = "prune";
    s["d"] = d;
    s["d_chosen_automatically"] = !cfg.prune.d.has_value();
    s["chi"] = chi(d);
    s["C"] = cfg.budget.C;
    s["input_dim"] = model.input_dim();
    s["layers"] = layers;
    out.summary = stamp(cfg, std::move(s));
    return out;
}

SketchArtifacts run_sketch(const ExperimentConfig& cfg, const ModelStack& discretized, const json& prune_summary) {
    const auto& players = prune_summary.at("layers");
    if (players.size() != discretized.depth()) throw ValidationError("sketch: prune summary does not match model");
    const RngHandle rng = stage_rng(cfg, SeedStream::Sketch);
    SketchArtifacts out;
    json layers = json::array();
    for (std::size_t l = 0; l < discretized.depth(); ++l) {
        const Matrix& X = discretized.layer(l).weights;
        const std::size_t d1 = X.rows();
        const std::size_t d2 = X.cols();
        const std::size_t p = std::max(d1, d2);
        const std::size_t j =
            std::max<std::size_t>(1, std::max(players[l].at("j_r").get<std::size_t>(), players[l].at("j_c").get<std::size_t>()));
        const std::size_t m = sketch_dim(j, d1, d2, p, cfg.sketch.c_m);
        const std::size_t degree = cfg.sketch.degree ? *cfg.sketch.degree : default_degree(p);
        const std::size_t m_a = std::min(m, d1);
        const std::size_t m_b = std::min(m, d2);
        const auto A = sketch_ensemble(m_a, d1, std::min(degree, d1), rng.derive(2 * l));
        const auto B = sketch_ensemble(m_b, d2, std::min(degree, d2), rng.derive(2 * l + 1));
        out.pairs.push_back(sketch(X, A, B));
        json entry = {{"d1", d1},
                      {"d2", d2},
                      {"p", p},
                      {"j", j},
                      {"m", m},
                      {"m_a", m_a},
                      {"m_b", m_b},
                      {"degree", degree},
                      {"clamped", m == p},
                      {"parameter_count", parameter_count(out.pairs.back())},
                      {"dense_count", d1 * d2}};
        if (cfg.sketch.verify_max_dim > 0 && p <= cfg.sketch.verify_max_dim) {
            try {
                const Matrix rec = recover(out.pairs.back(), cfg.sketch.tol, cfg.sketch.max_iter);
                entry["recovery_max_error"] = max_abs(subtract(rec, X));
            } catch (const ConvergenceError& e) {
                entry["recovery_failure"] = e.what();
            }
        }
        layers.push_back(std::move(entry));
    }
    json s;
    s["stage"] = "sketch";
    s["c_m"] = cfg.sketch.c_m;
    s["layers"] = layers;
    out.summary = stamp(cfg, std::move(s));
    return out;
}

const std::vector<std::string>& all_methods() {
    static const std::vector<std::string> m{"sketch", "naive", "imp", "covering",
                                            "bartlett2017", "neyshabur2017", "neyshabur2015"};
    return m;
}

json run_bounds(const ExperimentConfig& cfg, const ModelStack& model, const Datasets& data,
                const ModelStack& discretized, const json& prune_summary, const json& sketch_summary,
                const std::vector<std::string>& methods) {
    for (const auto& m : methods)
        if (std::find(all_methods().begin(), all_methods().end(), m) == all_methods().end())
            throw ValidationError("unknown method '" + m + "'");
    auto wanted = [&](const std::string& m) {
        return methods.empty() || std::find(methods.begin(), methods.end(), m) != methods.end();
    };

    const auto& pl = prune_summary.at("layers");
    const auto& sl = sketch_summary.at("layers");
    const std::size_t L = model.depth();
    if (pl.size() != L || sl.size() != L) throw ValidationError("bounds: stage summaries do not match the model");
    const std::size_t n = data.train.size();
    const double d = prune_summary.at("d").get<double>();
    const double x = chi(d);

    const auto norms = doubles(pl, "spectral_norm");
    const auto gammas = doubles(pl, "Gamma");
    const auto rhos = doubles(pl, "rho");
    const auto Js = sizes(pl, "J");
    std::vector<LayerDims> dims;
    for (const auto& l : pl) dims.push_back({l.at("d1").get<std::size_t>(), l.at("d2").get<std::size_t>()});

    BoundBudget budget = BoundBudget::uniform(L, cfg.budget.eps, cfg.budget.lambda, cfg.budget.delta, n);

    PruningErrorInputs pe;
    pe.layer_norms = norms;
    pe.gammas = gammas;
    pe.eps = budget.eps;
    pe.rhos = rhos;
    pe.Js = Js;
    pe.input_dim = model.input_dim();
    const BoundValue err = pruning_error_bound(pe);
    budget.gamma = cfg.budget.gamma ? *cfg.budget.gamma : err.value;

    const auto train_margins = margins(model, data.train);
    const double loss_ours = margin_loss_from(train_margins, budget.gamma);

    std::vector<double> positive;
    for (double m : train_margins)
        if (m > 0.0) positive.push_back(m);
    if (positive.empty()) throw NumericalError("bounds: the model classifies no training sample correctly");
    const double gamma_base = quantile(positive, cfg.budget.baseline_margin_quantile);
    const double loss_base = margin_loss_from(train_margins, gamma_base);

    json methods_json = json::object();
    auto put = [&](const std::string& name, double value, double complexity, double loss, double margin, double prob,
                   const std::string& kind) {
        if (!wanted(name)) return;
        methods_json[name] = {{"value", value},
                              {"log_value", std::log(value)},
                              {"complexity", complexity},
                              {"empirical_loss", loss},
                              {"margin", margin},
                              {"probability", prob},
                              {"kind", kind}};
    };

    std::vector<SketchLayer> sk;
    for (std::size_t l = 0; l < L; ++l) sk.push_back({dims[l].d1, dims[l].d2, std::max(dims[l].d1, dims[l].d2), rhos[l]});
    const BoundValue ours = sketch_gen_bound(sk, budget, d, loss_ours);
    put("sketch", ours.value, ours.complexity, loss_ours, budget.gamma, ours.prob, "compression");

    std::vector<std::size_t> alphas;
    for (const auto& dm : dims) {
        const double cells = static_cast<double>(dm.d1) * static_cast<double>(dm.d2);
        const double diag = static_cast<double>(std::min(dm.d1, dm.d2));
        const double a = std::min(cells, std::ceil(cfg.budget.lambda * x * (cells - diag)) + diag);
        alphas.push_back(static_cast<std::size_t>(a));
    }
    const double naive_c = naive_complexity(dims, alphas, rhos);
    const double naive = naive_bound(dims, alphas, rhos, n, loss_ours);
    double naive_prob = 1.0;
    for (std::size_t l = 0; l < L; ++l) naive_prob -= 1.0 / budget.lambda[l] + 1.0 / budget.eps[l];
    put("naive", naive, naive - loss_ours, loss_ours, budget.gamma, naive_prob, "compression");

    std::size_t widest = model.input_dim();
    for (const auto& dm : dims) widest = std::max({widest, dm.d1, dm.d2});
    const double rho_min = *std::min_element(rhos.begin(), rhos.end());
    const BoundValue imp = imp_bound(static_cast<double>(cfg.model.hidden), static_cast<double>(model.input_dim()),
                                     static_cast<double>(widest), static_cast<double>(L), rho_min, n, loss_ours,
                                     cfg.budget.delta);
    put("imp", imp.value, imp.complexity, loss_ours, budget.gamma, imp.prob, "compression");

    std::vector<double> s_norms = norms;
    std::vector<double> lips(L, 1.0);
    std::vector<std::size_t> d1s;
    for (const auto& dm : dims) d1s.push_back(dm.d1);
    const double xnorm = frobenius_norm(data.train.samples);
    const double ln_cover = bartlett_covering(xnorm, static_cast<double>(widest), gamma_base, s_norms, lips, d1s);
    const double covering = covering_naive_bound(dims, alphas, ln_cover, cfg.budget.delta, n, loss_base);
    put("covering", covering, covering - loss_base, loss_base, gamma_base, 1.0 - cfg.budget.delta, "compression");

    const auto base = baseline_bounds(model, data.train, gamma_base);
    for (const auto& [name, logv] : base) {
        if (!wanted(name)) continue;
        methods_json[name] = {{"value", std::exp(logv)},
                              {"log_value", logv},
                              {"complexity", std::exp(logv)},
                              {"empirical_loss", loss_base},
                              {"margin", gamma_base},
                              {"probability", 1.0 - cfg.budget.delta},
                              {"kind", "norm"}};
    }

    json layers = json::array();
    for (std::size_t l = 0; l < L; ++l) {
        json e = pl[l];
        e["p"] = std::max(dims[l].d1, dims[l].d2);
        e["alpha"] = alphas[l];
        e["m"] = sl[l].at("m");
        e["m_squared"] = sl[l].at("parameter_count");
        e["sketch_clamped"] = sl[l].at("clamped");
        e["kappa_subg"] = subgaussian_kappa(dims[l].d1, dims[l].d2, 1.0 / std::sqrt(static_cast<double>(dims[l].d1)));
        e["sparsity_bound"] = distributed_sparsity_bound(dims[l].d1, dims[l].d2, budget.lambda[l], d).value;
        layers.push_back(std::move(e));
    }

    const double test_err_original = 1.0 - accuracy(model, data.test);
    const double test_err_discretized = 1.0 - accuracy(discretized, data.test);

    json inter;
    inter["d"] = d;
    inter["chi"] = x;
    inter["gamma"] = budget.gamma;
    inter["gamma_from_error_bound"] = err.value;
    inter["gamma_baseline"] = gamma_base;
    inter["margin_losses"] = {{"ours", loss_ours}, {"baseline", loss_base}, {"zero", margin_loss_from(train_margins, 0.0)}};
    inter["kappa_count"] = {{"kappa", 0.5}, {"p1", kappa_tau_probability(d, 0.5)}};
    inter["data_frobenius_norm"] = xnorm;
    inter["ln_covering"] = ln_cover;
    inter["naive_complexity"] = naive_c;
    inter["layers"] = layers;

    json r;
    r["schema"] = "prunebound.bound_report/1";
    r["stage"] = "bounds";
    r["n"] = n;
    r["methods"] = methods_json;
    r["intermediates"] = inter;
    r["probability"] = ours.prob;
    r["test_error"] = {{"original", test_err_original},
                       {"discretized", test_err_discretized},
                       {"log_original", std::log(std::max(test_err_original, 1e-300))}};
    if (methods_json.contains("sketch"))
        r["checks"] = {{"sketch_bound_dominates_test_error", ours.value >= test_err_discretized}};
    r["config"] = config_to_json(cfg);
    r["config"].erase("out_dir");
    return stamp(cfg, std::move(r));
}

std::string report_csv(const json& report) {
    std::ostringstream os;
    os << "method,kind,value,log_value,complexity,empirical_loss,margin,probability,config_hash,seed\n";
    const auto hash = report.at("config_hash").get<std::string>();
    const auto seed = report.at("seed").get<std::uint64_t>();
    for (const auto& name : all_methods()) {
        if (!report.at("methods").contains(name)) continue;
        const auto& m = report.at("methods").at(name);
        os << name << ',' << m.at("kind").get<std::string>() << ',' << fmt(m.at("value").get<double>()) << ','
           << fmt(m.at("log_value").get<double>()) << ',' << fmt(m.at("complexity").get<double>()) << ','
           << fmt(m.at("empirical_loss").get<double>()) << ',' << fmt(m.at("margin").get<double>()) << ','
           << fmt(m.at("probability").get<double>()) << ',' << hash << ',' << seed << '\n';
    }
    return os.str();
}

std::string report_svg(const json& report, const std::string& title) {
    std::vector<std::pair<std::string, double>> bars;
    for (const auto& name : all_methods())
        if (report.at("methods").contains(name))
            bars.emplace_back(name, report.at("methods").at(name).at("log_value").get<double>());
    if (report.contains("test_error") && report.at("test_error").at("original").get<double>() > 0.0)
        bars.emplace_back("true error", report.at("test_error").at("log_original").get<double>());

    const double width = 120.0 * static_cast<double>(bars.size()) + 80.0;
    const double height = 360.0;
    const double top = 40.0;
    const double bottom = 300.0;
    double lo = 0.0;
    double hi = 1.0;
    for (const auto& [_, v] : bars) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    auto y = [&](double v) { return bottom - (v - lo) / (hi - lo) * (bottom - top); };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n";
    os << "<desc>config_hash " << report.at("config_hash").get<std::string>() << " seed "
       << report.at("seed").get<std::uint64_t>() << "</desc>\n";
    os << "<text x=\"" << width / 2 << "\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">"
       << title << "</text>\n";
    os << "<line x1=\"60\" y1=\"" << y(0.0) << "\" x2=\"" << width - 10 << "\" y2=\"" << y(0.0)
       << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"60\" y1=\"" << top << "\" x2=\"60\" y2=\"" << bottom << "\" stroke=\"black\"/>\n";
    os << "<text x=\"15\" y=\"" << (top + bottom) / 2
       << "\" font-family=\"sans-serif\" font-size=\"11\" transform=\"rotate(-90 15 " << (top + bottom) / 2
       << ")\">ln(bound)</text>\n";
    for (std::size_t i = 0; i < bars.size(); ++i) {
        const auto& [name, v] = bars[i];
        const double x0 = 80.0 + 120.0 * static_cast<double>(i);
        const double y0 = std::min(y(v), y(0.0));
        const double h = std::abs(y(v) - y(0.0));
        os << "<rect x=\"" << x0 << "\" y=\"" << y0 << "\" width=\"80\" height=\"" << h << "\" fill=\""
           << (name == "sketch" ? "#d95f02" : "#1b9e77") << "\"/>\n";
        os << "<text x=\"" << x0 + 40 << "\" y=\"" << y0 - 4
           << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << fmt_short(v) << "</text>\n";
        os << "<text x=\"" << x0 + 40 << "\" y=\"" << bottom + 20
           << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << name << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace prunebound
