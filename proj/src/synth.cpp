#include "eivsparse/synth.hpp"

#include "eivsparse/error.hpp"
#include "eivsparse/format.hpp"
#include "eivsparse/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace eivsparse {

using detail::require;

namespace {

std::string num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

Matrix covariance_factor(const Matrix& cov)
{
    Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
    // Round-off eigenvalues of a singular covariance would otherwise leak
    // ~1e-8 noise into exact linear relations between latent columns.
    const double cut = 1e-12 * std::max(1.0, eig.eigenvalues().cwiseAbs().maxCoeff());
    const Vector root = (eig.eigenvalues().array() > cut).select(eig.eigenvalues().cwiseSqrt(), 0.0);
    return eig.eigenvectors() * root.asDiagonal();
}

MonteCarloEstimate summarize(const std::vector<double>& v)
{
    const auto m = static_cast<double>(v.size());
    MonteCarloEstimate out;
    for (double x : v) out.mean += x;
    out.mean /= m;
    double ss = 0.0;
    for (double x : v) ss += (x - out.mean) * (x - out.mean);
    out.se = v.size() > 1 ? std::sqrt(ss / (m - 1.0) / m) : 0.0;
    return out;
}

} // namespace

void validate(const ModelSpec& spec, double tol)
{
    require(spec.n >= 2, "spec: n must be >= 2");
    require(spec.p >= 1, "spec: p must be >= 1");
    require(spec.r >= 1, "spec: r must be >= 1");
    require(spec.r_y >= 0, "spec: r_y must be >= 0");
    require(spec.beta.size() == spec.p, "spec: beta must have p entries");
    require(spec.sigma_delta.size() == spec.p, "spec: sigma_delta must have p entries");
    require(spec.v_covariance.rows() == spec.p && spec.v_covariance.cols() == spec.p,
            "spec: v_covariance must be p x p");
    require(spec.beta.allFinite() && spec.sigma_delta.allFinite() && spec.v_covariance.allFinite() &&
                std::isfinite(spec.sigma_eps),
            "spec: non-finite values");
    require(spec.sigma_eps >= 0.0, "spec: sigma_eps must be >= 0");
    require((spec.sigma_delta.array() >= 0.0).all(), "spec: sigma_delta must be >= 0");

    const Matrix& C = spec.v_covariance;
    require((C - C.transpose()).cwiseAbs().maxCoeff() <= 1e-10, "spec: v_covariance is not symmetric");
    const double min_eig = Eigen::SelfAdjointEigenSolver<Matrix>(C, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
    require(min_eig >= -1e-10, "spec: v_covariance is not positive semidefinite (min eigenvalue " +
                                   num(min_eig) + ")");

    for (Index j = 0; j < spec.p; ++j) {
        const double sv = C(j, j);
        const double sd = spec.sigma_delta[j] * spec.sigma_delta[j];
        if (std::abs(sv + sd - 1.0) > tol)
            throw InputError("constraint violated: σ_vj² + σ_δj² = 1 (j = " + std::to_string(j + 1) + ": " +
                             num(sv) + " + " + num(sd) + " = " + num(sv + sd) + ")");
    }
    if (spec.enforce_response_unit_variance) {
        const double sw = spec.beta.dot(C * spec.beta);
        const double se = spec.sigma_eps * spec.sigma_eps;
        if (std::abs(sw + se - 1.0) > tol)
            throw InputError("constraint violated: σ_w² + σ_ε² = 1 (" + num(sw) + " + " + num(se) + " = " +
                             num(sw + se) + ")");
    }
}

SyntheticData generate_dataset(const ModelSpec& spec)
{
    validate(spec);
    const Index n = spec.n, p = spec.p, r = spec.r, ry = spec.response_replicates();
    const Rng root(spec.seed);

    const Matrix L = covariance_factor(spec.v_covariance);
    Matrix Z(n, p);
    for (Index i = 0; i < n; ++i) {
        Rng g = root.split(stream_tag("V"), static_cast<std::uint64_t>(i));
        for (Index j = 0; j < p; ++j) Z(i, j) = g.normal();
    }
    Matrix V = Z * L.transpose();
    Vector w = V * spec.beta;

    std::vector<Matrix> design(static_cast<std::size_t>(r), V);
    for (Index j = 0; j < p; ++j) {
        Rng g = root.split(stream_tag("delta"), static_cast<std::uint64_t>(j));
        const double s = spec.sigma_delta[j];
        for (Index i = 0; i < n; ++i)
            for (Index k = 0; k < r; ++k) design[static_cast<std::size_t>(k)](i, j) += s * g.normal();
    }
    Matrix response(n, ry);
    Rng g = root.split(stream_tag("eps"));
    for (Index i = 0; i < n; ++i)
        for (Index k = 0; k < ry; ++k) response(i, k) = w[i] + spec.sigma_eps * g.normal();

    std::vector<std::string> ids, names;
    for (Index i = 0; i < n; ++i) ids.push_back("s" + std::to_string(i + 1));
    for (Index j = 0; j < p; ++j) names.push_back("x" + std::to_string(j + 1));
    return {ReplicatedDataset(std::move(design), std::move(response), std::move(ids), std::move(names), "y"),
            std::move(V), std::move(w), spec.beta};
}

ModelSpec toy_spec(Index n, std::uint64_t seed)
{
    require(n >= 4, "toy_example: n must be >= 4");
    const double c = 1.0 / (2.0 * std::sqrt(2.0));
    ModelSpec s;
    s.n = n;
    s.p = 3;
    s.r = 2;
    s.beta = Vector::Unit(3, 0);
    s.sigma_eps = 0.0;
    s.sigma_delta = Vector(3);
    s.sigma_delta << std::sqrt(0.5), 0.5, 0.5;
    s.v_covariance.resize(3, 3);
    s.v_covariance << 0.5, c, c,
                      c, 0.75, -0.25,
                      c, -0.25, 0.75;
    s.seed = seed;
    s.enforce_response_unit_variance = false;
    return s;
}

SyntheticData toy_example(Index n, std::uint64_t seed) { return generate_dataset(toy_spec(n, seed)); }

MonteCarloEstimate attenuation_experiment(double sigma_nu_sq, double sigma_delta_sq, Index n, Index trials,
                                          std::uint64_t seed)
{
    require(sigma_nu_sq >= 0.0 && sigma_delta_sq >= 0.0, "attenuation: variances must be >= 0");
    if (std::abs(sigma_nu_sq + sigma_delta_sq - 1.0) > 1e-12)
        throw InputError("constraint violated: σ_ν² + σ_δ² = 1 (" + num(sigma_nu_sq) + " + " +
                         num(sigma_delta_sq) + ")");
    require(n >= 10, "attenuation: n must be >= 10");
    require(trials >= 1, "attenuation: trials must be >= 1");

    ModelSpec spec;
    spec.n = n;
    spec.p = 1;
    spec.r = 1;
    spec.beta = Vector::Ones(1);
    spec.sigma_eps = std::sqrt(std::max(0.0, 1.0 - sigma_nu_sq));
    spec.sigma_delta = Vector::Constant(1, std::sqrt(sigma_delta_sq));
    spec.v_covariance = Matrix::Constant(1, 1, sigma_nu_sq);

    std::vector<double> slopes;
    slopes.reserve(static_cast<std::size_t>(trials));
    const Rng root = Rng(seed).split(stream_tag("attenuation"));
    for (Index t = 0; t < trials; ++t) {
        spec.seed = root.split(static_cast<std::uint64_t>(t))();
        const SyntheticData d = generate_dataset(spec);
        const Vector x = d.ds.design_replicates().front().col(0);
        const Vector y = d.ds.response_replicates_matrix().col(0);
        const Vector xc = x.array() - x.mean();
        const Vector yc = y.array() - y.mean();
        const double sxx = xc.squaredNorm();
        require(sxx > 0.0, "attenuation: degenerate draw");
        slopes.push_back(xc.dot(yc) / sxx);
    }
    return summarize(slopes);
}

MonteCarloEstimate residual_decomposition_experiment(const ModelSpec& spec, Index trials, std::uint64_t seed)
{
    validate(spec);
    require(trials >= 2, "residual decomposition: trials must be >= 2");
    const Index n = spec.n, p = spec.p;
    const Rng root(seed);

    const Matrix L = covariance_factor(spec.v_covariance);
    Matrix Z(n, p);
    Rng gv = root.split(stream_tag("V"));
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < p; ++j) Z(i, j) = gv.normal();
    const Matrix V = Z * L.transpose();
    const Vector w = V * spec.beta;

    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(trials));
    for (Index t = 0; t < trials; ++t) {
        Rng g = root.split(stream_tag("noise"), static_cast<std::uint64_t>(t));
        Matrix X = V;
        for (Index j = 0; j < p; ++j)
            for (Index i = 0; i < n; ++i) X(i, j) += spec.sigma_delta[j] * g.normal();
        Vector y = w;
        for (Index i = 0; i < n; ++i) y[i] += spec.sigma_eps * g.normal();
        values.push_back((y - X * spec.beta).squaredNorm() / static_cast<double>(n));
    }
    return summarize(values);
}

ModelSpec heteroscedastic_spec(const EnsembleOptions& o, std::uint64_t seed)
{
    require(o.p >= 1 && o.sparsity >= 1 && o.sparsity <= o.p, "ensemble: need 1 <= sparsity <= p");
    require(o.sigma_delta_lo >= 0.0 && o.sigma_delta_lo <= o.sigma_delta_hi && o.sigma_delta_hi < 1.0,
            "ensemble: need 0 <= sigma_delta_lo <= sigma_delta_hi < 1");
    require(std::abs(o.rho) < 1.0, "ensemble: |rho| must be < 1");
    require(o.sigma_eps_sq >= 0.0 && o.sigma_eps_sq < 1.0, "ensemble: sigma_eps_sq must be in [0, 1)");

    const Rng root = Rng(seed).split(stream_tag("ensemble"));
    ModelSpec s;
    s.n = o.n;
    s.p = o.p;
    s.r = o.r;
    s.seed = root.split(stream_tag("data"))();

    Rng gd = root.split(stream_tag("sigma_delta"));
    s.sigma_delta.resize(o.p);
    for (Index j = 0; j < o.p; ++j) s.sigma_delta[j] = gd.uniform(o.sigma_delta_lo, o.sigma_delta_hi);
    const Vector sv = (1.0 - s.sigma_delta.array().square()).sqrt();
    s.v_covariance.resize(o.p, o.p);
    for (Index j = 0; j < o.p; ++j)
        for (Index k = 0; k < o.p; ++k)
            s.v_covariance(j, k) = sv[j] * sv[k] * std::pow(o.rho, static_cast<double>(std::abs(j - k)));
    s.v_covariance.diagonal() = sv.array().square();

    Rng gb = root.split(stream_tag("beta"));
    std::vector<Index> idx(static_cast<std::size_t>(o.p));
    std::iota(idx.begin(), idx.end(), Index{0});
    for (Index i = 0; i < o.sparsity; ++i) {
        const auto pick = i + static_cast<Index>(gb.below(static_cast<std::uint64_t>(o.p - i)));
        std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(pick)]);
    }
    s.beta = Vector::Zero(o.p);
    for (Index i = 0; i < o.sparsity; ++i) {
        const double mag = gb.uniform(0.5, 1.5);
        s.beta[idx[static_cast<std::size_t>(i)]] = gb.uniform() < 0.5 ? -mag : mag;
    }
    const double sw = s.beta.dot(s.v_covariance * s.beta);
    require(sw > 0.0, "ensemble: degenerate signal");
    s.beta *= std::sqrt((1.0 - o.sigma_eps_sq) / sw);
    s.sigma_eps = std::sqrt(o.sigma_eps_sq);
    return s;
}

} // namespace eivsparse
