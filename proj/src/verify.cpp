#include "prunebound/verify.hpp"

#include "prunebound/errors.hpp"
#include "prunebound/montecarlo.hpp"
#include "prunebound/pipeline.hpp"
#include "prunebound/special.hpp"
#include "prunebound/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace prunebound {

using nlohmann::json;

namespace {

std::string label(const char* fmt, double a, double b) {
    char buf[96];
    std::snprintf(buf, sizeof buf, fmt, a, b);
    return buf;
}

Check z_check(std::string name, double closed, double est, double se, double tol) {
    Check c;
    c.name = std::move(name);
    c.closed_form = closed;
    c.estimate = est;
    c.std_error = se;
    c.z_score = se > 0.0 ? (est - closed) / se : 0.0;
    c.tolerance = tol;
    c.rule = "z";
    c.pass = std::abs(c.z_score) <= tol && std::isfinite(est);
    return c;
}

// Fraction check: the estimate must reach `threshold`; the z-score measures
// the margin in binomial standard errors.
Check fraction_check(std::string name, double threshold, std::size_t hits, std::size_t trials) {
    Check c;
    c.name = std::move(name);
    c.closed_form = threshold;
    c.estimate = static_cast<double>(hits) / static_cast<double>(trials);
    c.std_error = std::sqrt(c.estimate * (1.0 - c.estimate) / static_cast<double>(trials));
    // A fraction of exactly 0 or 1 has no sampling spread to measure against.
    c.z_score = c.std_error > 0.0 ? (c.estimate - threshold) / c.std_error : 0.0;
    c.tolerance = threshold;
    c.rule = "at_least";
    c.pass = c.estimate >= threshold;
    c.extra["hits"] = hits;
    c.extra["trials"] = trials;
    return c;
}

}  // namespace

json to_json(const Check& c) {
    json j = {{"name", c.name},         {"closed_form", c.closed_form}, {"estimate", c.estimate},
              {"std_error", c.std_error}, {"z_score", c.z_score},       {"tolerance", c.tolerance},
              {"rule", c.rule},         {"pass", c.pass}};
    if (!c.extra.empty()) j["details"] = c.extra;
    return j;
}

std::vector<Check> verify_moments(double d, double psi, std::size_t samples, double z_tol, const RngHandle& rng,
                                  double m2_scale) {
    const MomentSet cf = delta_moments(d, psi);
    const MomentEstimate est = mc_delta_moments(d, psi, samples, rng);
    const std::string tag = label("d=%g psi=%g", d, psi);
    std::vector<Check> out;
    out.push_back(z_check("moment_mean " + tag, 0.0, est.mean, est.se_mean, z_tol));
    out.push_back(z_check("moment_m2 " + tag, cf.m2 * m2_scale, est.m2, est.se_m2, z_tol));
    out.push_back(z_check("moment_m4 " + tag, cf.m4, est.m4, est.se_m4, z_tol));
    for (auto& c : out) c.extra["samples"] = samples;
    return out;
}

Check verify_keep_rate(std::size_t dim, double d, double tol, const RngHandle& rng) {
    Check c;
    c.name = label("keep_rate d=%g dim=%g", d, static_cast<double>(dim));
    c.closed_form = chi(d);
    c.estimate = mc_keep_rate(dim, dim, d, 1.0, rng);
    const double cells = static_cast<double>(dim) * static_cast<double>(dim - 1);
    c.std_error = std::sqrt(c.closed_form * (1.0 - c.closed_form) / cells);
    c.z_score = (c.estimate - c.closed_form) / c.std_error;
    c.tolerance = tol;
    c.rule = "abs";
    c.pass = std::abs(c.estimate - c.closed_form) <= tol;
    return c;
}

Check verify_keep_monotone(std::size_t dim, std::vector<double> ds, const RngHandle& rng) {
    std::sort(ds.begin(), ds.end());
    Check c;
    c.name = "keep_rate_monotone";
    c.rule = "at_most";
    c.pass = true;
    json rates = json::array();
    double prev = 2.0;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const double r = mc_keep_rate(dim, dim, ds[i], 1.0, rng.derive(i));
        rates.push_back({{"d", ds[i]}, {"rate", r}, {"chi", chi(ds[i])}});
        c.pass = c.pass && r < prev;
        prev = r;
    }
    c.closed_form = ds.empty() ? 0.0 : chi(ds.back());
    c.estimate = ds.empty() ? 0.0 : prev;
    c.extra["rates"] = rates;
    return c;
}

Check verify_gamma(std::size_t dim, double d, double psi, double eps, std::size_t trials, const RngHandle& rng) {
    const auto norms = mc_delta_spectral_norms(dim, dim, d, psi, trials, rng);
    const double gamma1 = latala_gamma(dim, dim, delta_moments(d, psi), 1.0).gamma_l;
    const double C = calibrate_C(norms, gamma1);
    const auto count = [&](double limit) {
        return static_cast<std::size_t>(std::count_if(norms.begin(), norms.end(), [&](double v) { return v <= limit; }));
    };
    Check c = fraction_check(label("gamma_markov dim=%g eps=%g", static_cast<double>(dim), eps), 1.0 - 1.0 / eps,
                             count(eps * C * gamma1), trials);
    c.extra["C_calibrated"] = C;
    c.extra["gamma_unit_C"] = gamma1;
    c.extra["fraction_at_unit_C"] = static_cast<double>(count(eps * gamma1)) / static_cast<double>(trials);
    c.extra["mean_norm"] = C * gamma1;
    return c;
}

Check verify_balls_bins(std::size_t N, std::size_t n, std::size_t trials, const RngHandle& rng) {
    const auto loads = mc_balls_bins(N, n, trials, rng);
    const auto bound = balls_bins_bound(N, n);
    const auto hits = static_cast<std::size_t>(
        std::count_if(loads.begin(), loads.end(), [&](std::size_t v) { return static_cast<double>(v) <= bound.value; }));
    Check c = fraction_check(label("balls_bins N=%g n=%g", static_cast<double>(N), static_cast<double>(n)), bound.prob,
                             hits, trials);
    c.extra["max_load_bound"] = bound.value;
    c.extra["max_load_observed"] = *std::max_element(loads.begin(), loads.end());
    return c;
}

Check verify_sparsity(std::size_t dim, double d, double lambda, std::size_t trials, const RngHandle& rng) {
    const auto stats = mc_pruned_sparsity(dim, dim, d, 1.0, trials, rng);
    const auto bound = distributed_sparsity_bound(dim, dim, lambda, d);
    std::size_t hits = 0;
    std::size_t worst = 0;
    for (const auto& s : stats) {
        const std::size_t j = std::max(s.j_r, s.j_c);
        worst = std::max(worst, j);
        if (static_cast<double>(j) <= bound.value) ++hits;
    }
    Check c = fraction_check(label("distributed_sparsity dim=%g lambda=%g", static_cast<double>(dim), lambda),
                             std::max(0.0, bound.prob), hits, trials);
    c.extra["sparsity_bound"] = bound.value;
    c.extra["max_j_observed"] = worst;
    return c;
}

Check verify_binomial_tail(std::size_t max_trials) {
    double worst = 0.0;
    for (std::size_t n = 1; n <= max_trials; ++n) {
        for (double p : {0.01, 0.1, 0.3, 0.5, 0.7, 0.9, 0.99}) {
            for (std::size_t k = 0; k <= n; ++k) {
                // P(X >= k) summed term by term in log space
                double direct = 0.0;
                for (std::size_t i = k; i <= n; ++i)
                    direct += std::exp(log_binomial(static_cast<double>(n), static_cast<double>(i)) +
                                       static_cast<double>(i) * std::log(p) +
                                       static_cast<double>(n - i) * std::log1p(-p));
                worst = std::max(worst, std::abs(binomial_tail_via_beta(n, k, p) - direct));
            }
        }
    }
    Check c;
    c.name = "binomial_tail_vs_direct_sum";
    c.closed_form = 0.0;
    c.estimate = worst;
    c.tolerance = 1e-12;
    c.rule = "at_most";
    c.pass = worst <= 1e-12;
    c.extra["max_trials"] = max_trials;
    return c;
}

Check verify_erf() {
    Check c;
    c.name = "erf_at_1";
    c.closed_form = 0.842701;
    c.estimate = erf_fn(1.0);
    c.tolerance = 1e-6;
    c.rule = "abs";
    c.pass = std::abs(c.estimate - c.closed_form) <= 1e-6;
    return c;
}

VerifyReport run_verify(const ExperimentConfig& cfg, double m2_scale) {
    const auto& v = cfg.verify;
    const RngHandle rng = stage_rng(cfg, SeedStream::Verify);
    VerifyReport r;
    std::uint64_t k = 0;
    for (double d : v.moment_d)
        for (double psi : v.moment_psi)
            for (auto& c : verify_moments(d, psi, v.moment_samples, v.z_tolerance, rng.derive(0).derive(k++), m2_scale))
                r.checks.push_back(std::move(c));
    r.checks.push_back(verify_keep_rate(v.keep_dim, 2.0, v.keep_tolerance, rng.derive(1)));
    r.checks.push_back(verify_keep_monotone(v.keep_dim, {0.5, 2.0, 10.0}, rng.derive(2)));
    r.checks.push_back(verify_gamma(v.gamma_dim, 2.0, 1.0, v.gamma_eps, v.gamma_trials, rng.derive(3)));
    r.checks.push_back(verify_balls_bins(v.balls, v.bins, v.balls_trials, rng.derive(4)));
    r.checks.push_back(verify_sparsity(v.sparsity_dim, 2.0, v.sparsity_lambda, v.sparsity_trials, rng.derive(5)));
    r.checks.push_back(verify_binomial_tail(60));
    r.checks.push_back(verify_erf());

    r.all_pass = std::all_of(r.checks.begin(), r.checks.end(), [](const Check& c) { return c.pass; });
    json checks = json::array();
    for (const auto& c : r.checks) checks.push_back(to_json(c));
    json j;
    j["stage"] = "verify";
    j["schema"] = "prunebound.verify_report/1";
    j["all_pass"] = r.all_pass;
    j["failed"] = static_cast<std::size_t>(
        std::count_if(r.checks.begin(), r.checks.end(), [](const Check& c) { return !c.pass; }));
    j["checks"] = checks;
    r.json = stamp(cfg, std::move(j));
    return r;
}

}  // namespace prunebound
