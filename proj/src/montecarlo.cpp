#include "prunebound/montecarlo.hpp"

#include "prunebound/errors.hpp"
#include "prunebound/linalg.hpp"
#include "prunebound/matrix.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace prunebound {

namespace {

constexpr std::size_t kBlock = 4096;

// Power sums of D^1, D^2, D^4, D^8 over one block.
using PowerSums = std::array<double, 4>;

PowerSums moment_block(std::size_t block, std::size_t samples, double sd, double scale, const RngHandle& normals,
                       const RngHandle& uniforms) {
    PowerSums s{};
    const std::size_t begin = block * kBlock;
    const std::size_t end = std::min(samples, begin + kBlock);
    for (std::size_t k = begin; k < end; ++k) {
        const double a = sd * normal_at(normals, k);
        const bool pruned = uniform_at(uniforms, k) < std::exp(-a * a * scale);
        const double delta = pruned ? -a : 0.0;
        const double d2 = delta * delta;
        const double d4 = d2 * d2;
        s[0] += delta;
        s[1] += d2;
        s[2] += d4;
        s[3] += d4 * d4;
    }
    return s;
}

MomentEstimate finish_moments(const std::vector<PowerSums>& blocks, std::size_t samples) {
    PowerSums total{};
    for (const auto& b : blocks)
        for (std::size_t i = 0; i < 4; ++i) total[i] += b[i];
    const double n = static_cast<double>(samples);
    MomentEstimate e;
    e.samples = samples;
    e.mean = total[0] / n;
    e.m2 = total[1] / n;
    e.m4 = total[2] / n;
    // Var(D) = E D^2 - (E D)^2, Var(D^2) = E D^4 - (E D^2)^2, Var(D^4) = E D^8 - (E D^4)^2.
    e.se_mean = std::sqrt(std::max(0.0, e.m2 - e.mean * e.mean) / n);
    e.se_m2 = std::sqrt(std::max(0.0, e.m4 - e.m2 * e.m2) / n);
    e.se_m4 = std::sqrt(std::max(0.0, total[3] / n - e.m4 * e.m4) / n);
    return e;
}

void check_moment_args(double d, double psi, std::size_t samples) {
    if (!(d > 0.0) || !(psi > 0.0)) throw ValidationError("mc_delta_moments: d and psi must be positive");
    if (samples < 2) throw ValidationError("mc_delta_moments: need at least two samples");
}

std::size_t max_load(std::size_t N, std::size_t n, const RngHandle& h) {
    std::vector<std::size_t> bins(n, 0);
    Rng rng(h);
    for (std::size_t b = 0; b < N; ++b) ++bins[rng.below(n)];
    return N == 0 ? 0 : *std::max_element(bins.begin(), bins.end());
}

}  // namespace

MomentEstimate mc_delta_moments(double d, double psi, std::size_t samples, const RngHandle& rng) {
    check_moment_args(d, psi, samples);
    const std::size_t nblocks = (samples + kBlock - 1) / kBlock;
    std::vector<PowerSums> blocks(nblocks);
    const double sd = std::sqrt(psi);
    const double scale = 1.0 / (d * psi);
    const RngHandle normals = rng.derive(0);
    const RngHandle uniforms = rng.derive(1);
    const auto nb = static_cast<std::ptrdiff_t>(nblocks);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t b = 0; b < nb; ++b)
        blocks[static_cast<std::size_t>(b)] =
            moment_block(static_cast<std::size_t>(b), samples, sd, scale, normals, uniforms);
    return finish_moments(blocks, samples);
}

double mc_keep_rate(std::size_t rows, std::size_t cols, double d, double psi, const RngHandle& rng) {
    const Matrix a = gaussian_matrix(rows, cols, psi, rng.derive(0));
    const Matrix mask = prune_mask(a, d, psi, rng.derive(1));
    const std::size_t diag = std::min(rows, cols);
    const std::size_t offdiag = rows * cols - diag;
    if (offdiag == 0) throw ValidationError("mc_keep_rate: layer has no off-diagonal entries");
    const double kept = static_cast<double>(sparsity_stats(mask).J - diag);
    return kept / static_cast<double>(offdiag);
}

std::vector<double> mc_delta_spectral_norms(std::size_t rows, std::size_t cols, double d, double psi,
                                            std::size_t trials, const RngHandle& rng) {
    std::vector<double> out(trials);
    for (std::size_t t = 0; t < trials; ++t) {
        const RngHandle h = rng.derive(t);
        const Matrix a = gaussian_matrix(rows, cols, psi, h.derive(0));
        const Matrix mask = prune_mask(a, d, psi, h.derive(1));
        const Matrix delta = subtract(hadamard(a, mask), a);
        PowerIterationOptions opts;
        opts.rng = h.derive(2);
        opts.max_iter = kRandomMatrixMaxIter;
        out[t] = spectral_norm(delta, opts);
    }
    return out;
}

double calibrate_C(const std::vector<double>& norms, double gamma_at_unit_C) {
    if (norms.empty()) throw ValidationError("calibrate_C: no trials");
    if (!(gamma_at_unit_C > 0.0)) throw ValidationError("calibrate_C: Gamma must be positive");
    double mean = 0.0;
    for (double v : norms) mean += v;
    mean /= static_cast<double>(norms.size());
    return mean / gamma_at_unit_C;
}

std::vector<std::size_t> mc_balls_bins(std::size_t N, std::size_t n, std::size_t trials, const RngHandle& rng) {
    if (n == 0) throw ValidationError("mc_balls_bins: n must be positive");
    std::vector<std::size_t> out(trials);
    const auto nt = static_cast<std::ptrdiff_t>(trials);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t t = 0; t < nt; ++t)
        out[static_cast<std::size_t>(t)] = max_load(N, n, rng.derive(static_cast<std::uint64_t>(t)));
    return out;
}

std::vector<SparsityStats> mc_pruned_sparsity(std::size_t rows, std::size_t cols, double d, double psi,
                                              std::size_t trials, const RngHandle& rng) {
    std::vector<SparsityStats> out;
    out.reserve(trials);
    for (std::size_t t = 0; t < trials; ++t) {
        const RngHandle h = rng.derive(t);
        const Matrix a = gaussian_matrix(rows, cols, psi, h.derive(0));
        out.push_back(sparsity_stats(prune_mask(a, d, psi, h.derive(1))));
    }
    return out;
}

namespace serial {

MomentEstimate mc_delta_moments(double d, double psi, std::size_t samples, const RngHandle& rng) {
    check_moment_args(d, psi, samples);
    const std::size_t nblocks = (samples + kBlock - 1) / kBlock;
    std::vector<PowerSums> blocks(nblocks);
    for (std::size_t b = 0; b < nblocks; ++b)
        blocks[b] = moment_block(b, samples, std::sqrt(psi), 1.0 / (d * psi), rng.derive(0), rng.derive(1));
    return finish_moments(blocks, samples);
}

std::vector<std::size_t> mc_balls_bins(std::size_t N, std::size_t n, std::size_t trials, const RngHandle& rng) {
    if (n == 0) throw ValidationError("mc_balls_bins: n must be positive");
    std::vector<std::size_t> out(trials);
    for (std::size_t t = 0; t < trials; ++t) out[t] = max_load(N, n, rng.derive(t));
    return out;
}

}  // namespace serial

}  // namespace prunebound
