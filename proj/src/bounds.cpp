#include "prunebound/bounds.hpp"

#include "prunebound/errors.hpp"
#include "prunebound/linalg.hpp"
#include "prunebound/special.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace prunebound {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw ValidationError(what);
}

double ln_or_throw(double v, const std::string& what) {
    if (!(v > 0.0)) throw ValidationError(what + " must be positive");
    return std::log(v);
}

}  // namespace

BoundBudget BoundBudget::uniform(std::size_t layers, double eps, double lambda, double delta, std::size_t n) {
    BoundBudget b;
    b.eps.assign(layers, eps);
    b.lambda.assign(layers, lambda);
    b.delta = delta;
    b.n = n;
    return b;
}

std::vector<double> layer_spectral_norms(const ModelStack& model) {
    std::vector<double> out;
    for (std::size_t l = 0; l < model.depth(); ++l) {
        PowerIterationOptions opts;
        opts.rng = opts.rng.derive(l);
        opts.max_iter = kRandomMatrixMaxIter;
        out.push_back(spectral_norm(model.layer(l).weights, opts));
    }
    return out;
}

double subgaussian_kappa(std::size_t d1, std::size_t d2, double t) {
    require(t > 0.0, "subgaussian_kappa: t must be positive");
    return d2 <= d1 ? std::sqrt(static_cast<double>(d2)) * t : 1.0;
}

double subgaussian_failure(std::size_t n, double a, double b, double t, std::size_t d1) {
    require(a > 0.0 && b > 0.0, "subgaussian_failure: a and b must be positive");
    return static_cast<double>(n) * a * std::exp(-b * t * t * static_cast<double>(d1));
}

double perturbation_bound(std::span<const double> layer_norms, std::span<const double> lipschitz,
                          std::span<const double> perturbation_norms, std::size_t input_dim,
                          std::span<const double> kappa) {
    const std::size_t L = layer_norms.size();
    require(L > 0, "perturbation_bound: no layers");
    require(lipschitz.size() == L && perturbation_norms.size() == L, "perturbation_bound: per-layer sizes differ");
    require(kappa.empty() || kappa.size() == L, "perturbation_bound: kappa needs one entry per layer");
    require(input_dim > 0, "perturbation_bound: input_dim must be positive");
    double prod = 1.0;
    double sum = 0.0;
    for (std::size_t l = 0; l < L; ++l) {
        if (!(layer_norms[l] > 0.0)) throw InfeasibleError("layer " + std::to_string(l) + " has zero norm", l);
        require(perturbation_norms[l] >= 0.0, "perturbation_bound: perturbation norms must be non-negative");
        if (perturbation_norms[l] > layer_norms[l] / static_cast<double>(L)) {
            throw InfeasibleError("layer " + std::to_string(l) + ": perturbation norm exceeds ||A||/L", l);
        }
        const double k = kappa.empty() ? 1.0 : kappa[l];
        prod *= k * lipschitz[l] * layer_norms[l];
        sum += perturbation_norms[l] / layer_norms[l];
    }
    return std::numbers::e * static_cast<double>(input_dim) * prod * sum;
}

double perturbation_bound(const ModelStack& model, std::span<const double> perturbation_norms,
                          std::size_t input_dim) {
    const auto norms = layer_spectral_norms(model);
    std::vector<double> lip;
    for (const auto& layer : model.layers()) lip.push_back(layer.lipschitz);
    return perturbation_bound(norms, lip, perturbation_norms, input_dim);
}

BoundValue pruning_error_bound(const PruningErrorInputs& in) {
    const std::size_t L = in.layer_norms.size();
    require(in.gammas.size() == L && in.eps.size() == L, "pruning_error_bound: per-layer sizes differ");
    require(!in.rhos || in.rhos->size() == L, "pruning_error_bound: rhos size differs");
    require(!in.Js || in.Js->size() == L, "pruning_error_bound: Js size differs");
    require(in.rhos.has_value() == in.Js.has_value(), "pruning_error_bound: rhos and Js go together");
    std::vector<double> budget(L);
    BoundValue out;
    out.prob = 1.0;
    for (std::size_t l = 0; l < L; ++l) {
        require(in.eps[l] > 0.0, "pruning_error_bound: eps must be positive");
        budget[l] = in.eps[l] * in.gammas[l];
        if (in.rhos) budget[l] += (*in.rhos)[l] * static_cast<double>((*in.Js)[l]);
        out.prob -= 1.0 / in.eps[l];
    }
    std::vector<double> kappa;
    if (in.subgaussian) {
        const auto& sg = *in.subgaussian;
        require(sg.t.size() == L && in.d1.size() == L && in.d2.size() == L,
                "pruning_error_bound: subgaussian inputs need one entry per layer");
        for (std::size_t l = 0; l < L; ++l) {
            kappa.push_back(subgaussian_kappa(in.d1[l], in.d2[l], sg.t[l]));
            out.prob -= subgaussian_failure(in.n, sg.a, sg.b, sg.t[l], in.d1[l]);
        }
    }
    const std::vector<double> lip = in.lipschitz.empty() ? std::vector<double>(L, 1.0) : in.lipschitz;
    out.value = perturbation_bound(in.layer_norms, lip, budget, in.input_dim, kappa);
    out.complexity = out.value;
    return out;
}

double compression_bound(double ln_J, double delta, std::size_t n, double empirical_loss) {
    require(delta > 0.0 && delta <= 1.0, "compression_bound: delta must lie in (0, 1]");
    require(n > 0, "compression_bound: n must be positive");
    require(std::isfinite(ln_J), "compression_bound: ln J must be finite");
    return empirical_loss + std::sqrt(std::max(0.0, 0.5 * (ln_J - std::log(delta))) / static_cast<double>(n));
}

double naive_complexity(std::span<const LayerDims> dims, std::span<const std::size_t> alphas,
                        std::span<const double> rhos) {
    require(dims.size() == alphas.size() && dims.size() == rhos.size(), "naive_bound: per-layer sizes differ");
    double total = 0.0;
    for (std::size_t l = 0; l < dims.size(); ++l) {
        const double cells = static_cast<double>(dims[l].d1) * static_cast<double>(dims[l].d2);
        const double a = static_cast<double>(alphas[l]);
        if (a > cells) throw ValidationError("naive_bound: alpha exceeds d1*d2 at layer " + std::to_string(l));
        total += log_binomial(cells, a);
        if (alphas[l] > 0) total += a * -ln_or_throw(rhos[l], "naive_bound: rho");
    }
    return total;
}

double naive_bound(std::span<const LayerDims> dims, std::span<const std::size_t> alphas, std::span<const double> rhos,
                   std::size_t n, double empirical_loss) {
    require(n > 0, "naive_bound: n must be positive");
    return empirical_loss + std::sqrt(std::max(0.0, naive_complexity(dims, alphas, rhos)) / static_cast<double>(n));
}

BoundValue sketch_gen_bound(std::span<const SketchLayer> layers, const BoundBudget& budget, double d,
                            double empirical_loss) {
    require(budget.n > 0, "sketch_gen_bound: n must be positive");
    require(budget.lambda.size() == layers.size() && budget.eps.size() == layers.size(),
            "sketch_gen_bound: budget needs one eps and lambda per layer");
    const double x = chi(d);
    double sum = 0.0;
    double fail = 0.0;
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const auto& s = layers[l];
        require(s.rho > 0.0 && s.rho < 1.0, "sketch_gen_bound: rho must lie in (0, 1)");
        require(s.p >= 1, "sketch_gen_bound: p must be positive");
        const double lp = std::log(static_cast<double>(s.p));
        sum += 3.0 * budget.lambda[l] * x * static_cast<double>(s.d1) * static_cast<double>(s.d2) * lp * lp *
               -std::log(s.rho);
        fail += 1.0 / budget.lambda[l] + 1.0 / budget.eps[l] + std::pow(static_cast<double>(s.p), -2.0);
    }
    BoundValue out;
    out.complexity = std::sqrt(sum / static_cast<double>(budget.n));
    out.value = empirical_loss + out.complexity;
    out.prob = 1.0 - fail;
    return out;
}

BoundValue imp_bound(double n_M, double d01, double D_G, double L, double rho, std::size_t n, double empirical_loss,
                     double delta) {
    require(D_G > 1.0, "imp_bound: D_G must exceed 1");
    require(rho > 0.0 && rho < 1.0, "imp_bound: rho must lie in (0, 1)");
    require(n > 0 && n_M > 0.0 && d01 > 0.0 && L > 0.0, "imp_bound: sizes must be positive");
    const double lg = std::log(D_G);
    const double term = (n_M * d01 * lg * lg + L * n_M * n_M * lg * lg) * -std::log(rho);
    BoundValue out;
    out.complexity = std::sqrt(term / static_cast<double>(n));
    out.value = empirical_loss + out.complexity;
    out.prob = 1.0 - delta - L * std::pow(D_G, -2.0);
    return out;
}

double bartlett_covering(double xnorm, double W, double eps, std::span<const double> s,
                         std::span<const double> rho_lip, std::span<const std::size_t> d1) {
    require(eps > 0.0, "bartlett_covering: eps must be positive");
    require(W > 0.0, "bartlett_covering: W must be positive");
    require(s.size() == rho_lip.size() && s.size() == d1.size() && !s.empty(),
            "bartlett_covering: per-layer sizes differ");
    double prod = 1.0;
    double sum = 0.0;
    for (std::size_t l = 0; l < s.size(); ++l) {
        require(s[l] > 0.0, "bartlett_covering: spectral bounds must be positive");
        require(d1[l] > 0, "bartlett_covering: d1 must be positive");
        prod *= s[l] * s[l] * rho_lip[l] * rho_lip[l];
        sum += std::pow(1.0 / (static_cast<double>(d1[l]) * s[l]), 2.0 / 3.0);
    }
    return xnorm * xnorm * std::log(2.0 * W * W) / (eps * eps) * prod * sum * sum * sum;
}

double covering_naive_bound(std::span<const LayerDims> dims, std::span<const std::size_t> alphas,
                            double ln_covering, double delta, std::size_t n, double empirical_loss) {
    require(dims.size() == alphas.size(), "covering_naive_bound: per-layer sizes differ");
    double ln_J = ln_covering;
    for (std::size_t l = 0; l < dims.size(); ++l)
        ln_J += log_binomial(static_cast<double>(dims[l].d1) * static_cast<double>(dims[l].d2),
                             static_cast<double>(alphas[l]));
    return compression_bound(ln_J, delta, n, empirical_loss);
}

std::map<std::string, double> baseline_bounds(const ModelStack& model, const Dataset& data, double gamma) {
    require(gamma > 0.0, "baseline_bounds: gamma must be positive");
    require(data.size() > 0, "baseline_bounds: empty dataset");
    const auto spec = layer_spectral_norms(model);
    const double L = static_cast<double>(model.depth());
    const double ln_n = std::log(static_cast<double>(data.size()));
    const double ln_gamma = std::log(gamma);

    std::size_t h = 0;
    for (const auto& layer : model.layers()) h = std::max(h, layer.out_dim());
    double max_input = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) max_input = std::max(max_input, euclidean_norm(data.samples.row(i)));
    require(max_input > 0.0, "baseline_bounds: every input is zero");
    // B^2 L^2 h ln(L h) in log form
    const double ln_ney_scale =
        2.0 * std::log(max_input) + 2.0 * std::log(L) + std::log(static_cast<double>(h)) + std::log(std::log(L * h));

    double ln_prod_fro = 0.0;
    double ln_prod_spec = 0.0;
    double bartlett_sum = 0.0;
    double ney_sum = 0.0;
    for (std::size_t l = 0; l < model.depth(); ++l) {
        const Matrix& a = model.layer(l).weights;
        const double fro = frobenius_norm(a);
        if (!(spec[l] > 0.0) || !(fro > 0.0))
            throw NumericalError("baseline_bounds: layer " + std::to_string(l) + " has zero norm");
        ln_prod_fro += std::log(fro);
        ln_prod_spec += std::log(spec[l]);
        bartlett_sum += std::pow(norm_2_1(transpose(a)) / spec[l], 2.0 / 3.0);
        ney_sum += fro * fro / (spec[l] * spec[l]);
    }
    const double ln_x = std::log(frobenius_norm(data.samples));

    std::map<std::string, double> out;
    out["neyshabur2015"] = L * std::log(2.0) + ln_prod_fro - ln_gamma - 0.5 * ln_n;
    out["bartlett2017"] = ln_prod_spec + 1.5 * std::log(bartlett_sum) + ln_x - ln_gamma - ln_n;
    out["neyshabur2017"] = ln_prod_spec + 0.5 * (ln_ney_scale + std::log(ney_sum)) - ln_gamma - 0.5 * ln_n;
    return out;
}

double choose_pruning_strength(std::span<const double> layer_norms, std::span<const LayerDims> dims,
                               std::span<const double> psi, std::span<const double> eps, double C, double fraction,
                               double d_min, double d_max) {
    const std::size_t L = layer_norms.size();
    require(dims.size() == L && psi.size() == L && eps.size() == L, "choose_pruning_strength: sizes differ");
    require(fraction > 0.0 && fraction <= 1.0, "choose_pruning_strength: fraction must lie in (0, 1]");
    require(d_min > 0.0 && d_max > d_min, "choose_pruning_strength: bad search interval");
    // Returns the first violating layer, or L when all layers fit.
    auto violating = [&](double d) {
        for (std::size_t l = 0; l < L; ++l) {
            const double g = latala_gamma(dims[l].d1, dims[l].d2, delta_moments(d, psi[l]), C).gamma_l;
            if (eps[l] * g > fraction * layer_norms[l] / static_cast<double>(L)) return l;
        }
        return L;
    };
    if (const auto bad = violating(d_min); bad < L)
        throw InfeasibleError("no pruning strength keeps eps*Gamma within ||A||/L at layer " + std::to_string(bad),
                              bad);
    if (violating(d_max) == L) return d_max;
    double lo = std::log(d_min);
    double hi = std::log(d_max);
    for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (violating(std::exp(mid)) == L) lo = mid;
        else hi = mid;
    }
    return std::exp(lo);
}

}  // namespace prunebound
