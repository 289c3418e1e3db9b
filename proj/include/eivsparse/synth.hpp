#pragma once
#include <eivsparse/data_model.hpp>
#include <eivsparse/types.hpp>

#include <cstdint>

namespace eivsparse {

/**
 * Measurement-error model
 *   w = V beta,  y = w + eps,  X = V + Delta
 * with Var(v_j) + sigma_delta_j^2 = 1 and beta' Cov(V) beta + sigma_eps^2 = 1.
 */
struct ModelSpec
{
    Index n = 0;
    Index p = 0;
    Index r = 2;
    /// Response replicates; 0 means the same as r.
    Index r_y = 0;
    Vector beta;
    double sigma_eps = 0.0;
    Vector sigma_delta;
    Matrix v_covariance;
    std::uint64_t seed = 0;
    /// Skip the response identity (the toy example has sigma_w^2 = 1/2).
    bool enforce_response_unit_variance = true;

    Index response_replicates() const { return r_y > 0 ? r_y : r; }
};

/// Throws InputError naming the violated identity, e.g.
/// "constraint violated: σ_vj² + σ_δj² = 1 (j = 2: 0.75 + 0.5 = 1.25)".
void validate(const ModelSpec& spec, double tol = 1e-8);

struct SyntheticData
{
    ReplicatedDataset ds;
    Matrix V;    // n x p latent design
    Vector w;    // V beta
    Vector beta; // true coefficients
};

/**
 * Draw one latent row per sample from N(0, Cov(V)) and add independent noise
 * to every replicate. Random streams: latent row i uses split("V", i),
 * predictor j's noise split("delta", j), the response noise split("eps"), so
 * no draw depends on the order in which other quantities are generated.
 */
SyntheticData generate_dataset(const ModelSpec& spec);

/**
 * p = 3, r = 2, beta = (1, 0, 0), sigma_eps = 0, Sigma^2 = diag(1/2, 1/4, 1/4)
 * and Cov(V) consistent with v1 = (v2 + v3) / sqrt(2):
 *   Var(v1) = 1/2, Var(v2) = Var(v3) = 3/4, Cov(v2, v3) = -1/4,
 *   Cov(v1, v2) = Cov(v1, v3) = 1 / (2 sqrt 2).
 */
ModelSpec toy_spec(Index n, std::uint64_t seed);
SyntheticData toy_example(Index n, std::uint64_t seed);

struct MonteCarloEstimate
{
    double mean = 0.0;
    double se = 0.0; // standard error of the mean over trials
};

/**
 * Mean OLS slope over `trials` independent p = 1 data sets with beta = 1,
 * Var(v) = sigma_nu_sq, sigma_delta^2 = sigma_delta_sq,
 * sigma_eps^2 = 1 - sigma_nu_sq and r = 1. Expected value is
 * sigma_nu^2 / (sigma_nu^2 + sigma_delta^2).
 */
MonteCarloEstimate attenuation_experiment(double sigma_nu_sq, double sigma_delta_sq, Index n,
                                          Index trials, std::uint64_t seed);

/**
 * Hold V (drawn once from the ModelSpec) and beta fixed and redraw the noise
 * `trials` times; returns the mean of ||y - X beta||^2 / n, whose expectation
 * is sigma_eps^2 + ||Sigma beta||^2. Uses one replicate per trial.
 */
MonteCarloEstimate residual_decomposition_experiment(const ModelSpec& spec, Index trials,
                                                     std::uint64_t seed);

/// Knobs of the heteroscedastic benchmark ensemble.
struct EnsembleOptions
{
    Index n = 200;
    Index p = 40;
    Index r = 2;
    Index sparsity = 8;
    double sigma_delta_lo = 0.1;
    double sigma_delta_hi = 0.9;
    /// AR(1) correlation of the latent design: Corr(v_j, v_k) = rho^|j-k|.
    double rho = 0.5;
    double sigma_eps_sq = 0.1;
};

/**
 * Random spec: sigma_delta_j ~ U[lo, hi], Var(v_j) = 1 - sigma_delta_j^2,
 * AR(1) latent correlation, `sparsity` nonzero coefficients at random
 * positions with random signs and magnitudes in [0.5, 1.5], rescaled so that
 * beta' Cov(V) beta = 1 - sigma_eps_sq.
 */
ModelSpec heteroscedastic_spec(const EnsembleOptions& opts, std::uint64_t seed);

} // namespace eivsparse
