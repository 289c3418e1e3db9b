#include "eivsparse/pursuit.hpp"

#include "eivsparse/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace eivsparse {

using detail::require;

const PathStep& SolutionPath::at_or_last(std::size_t i) const
{
    require(!steps.empty(), "empty solution path");
    return steps[std::min(i, steps.size() - 1)];
}

PathStep make_step(const Matrix& X, const Vector& y, Vector beta, double lambda, double support_tol)
{
    PathStep step;
    step.rss = (y - X * beta).squaredNorm();
    step.l1_norm = beta.lpNorm<1>();
    step.uncertainty = beta.norm();
    step.lambda = lambda;
    step.active_set = support_of(beta, support_tol);
    step.beta = std::move(beta);
    return step;
}

namespace {

void check_problem(const Matrix& X, const Vector& y, const char* who)
{
    require(X.rows() == y.size(), std::string(who) + ": X rows must match y length");
    require(X.rows() >= 1 && X.cols() >= 1, std::string(who) + ": empty design");
    require(X.allFinite(), std::string(who) + ": non-finite values in X");
    require(y.allFinite(), std::string(who) + ": non-finite values in y");
}

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

} // namespace

// --- Forward stagewise ---------------------------------------------------

SolutionPath forward_stagewise(const Matrix& X, const Vector& y, const StagewiseOptions& opts)
{
    check_problem(X, y, "forward_stagewise");
    require(opts.max_steps >= 0, "forward_stagewise: max_steps must be >= 0");
    require(opts.corr_tol >= 0.0, "forward_stagewise: corr_tol must be >= 0");
    require(opts.record_every >= 1, "forward_stagewise: record_every must be >= 1");

    const Index n = X.rows();
    const Index p = X.cols();
    const Matrix gram = X.transpose() * X;
    Vector corr = X.transpose() * y;
    Vector resid = y;
    Vector beta = Vector::Zero(p);

    // Root-mean-square column standard deviation; 1 on a standardized design.
    // Dividing by it keeps the defaults equivariant when every column is
    // rescaled by the same factor (e.g. an isotropic uncertainty scaling).
    const double col_scale =
        n > 1 ? std::sqrt(gram.diagonal().mean() / static_cast<double>(n - 1)) : 1.0;
    require(col_scale > 0.0, "forward_stagewise: design has only zero columns");

    if (opts.gamma) require(*opts.gamma > 0.0, "forward_stagewise: gamma must be > 0");
    const double gamma = opts.gamma ? *opts.gamma
                                    : 1e-3 * corr.cwiseAbs().maxCoeff() / static_cast<double>(n) /
                                          (col_scale * col_scale);

    SolutionPath path;
    path.solver = "fs";
    path.settings = {{"gamma", gamma},
                     {"max_steps", static_cast<double>(opts.max_steps)},
                     {"corr_tol", opts.corr_tol}};

    auto record = [&] {
        PathStep step;
        step.beta = beta;
        step.rss = resid.squaredNorm();
        step.l1_norm = beta.lpNorm<1>();
        step.uncertainty = beta.norm();
        step.lambda = corr.cwiseAbs().maxCoeff();
        step.active_set = support_of(beta);
        path.steps.push_back(std::move(step));
    };
    record();

    bool recorded_last = true;
    bool stopped = false;
    for (Index step = 1; step <= opts.max_steps; ++step) {
        Index best = 0;
        double best_abs = -1.0;
        for (Index j = 0; j < p; ++j) {
            if (std::abs(corr[j]) > best_abs) {
                best_abs = std::abs(corr[j]);
                best = j;
            }
        }
        if (best_abs / (static_cast<double>(n) * col_scale) < opts.corr_tol || best_abs == 0.0) {
            stopped = true;
            break;
        }
        // A step of size gamma along x_best changes the RSS by
        // -2 gamma |c| + gamma^2 ||x||^2; stop once that is no longer negative.
        if (best_abs <= 0.5 * gamma * gram(best, best)) {
            stopped = true;
            break;
        }
        const double eta = gamma * sign(corr[best]);
        beta[best] += eta;
        resid.noalias() -= eta * X.col(best);
        if (step % 1000 == 0)
            corr.noalias() = X.transpose() * resid;
        else
            corr.noalias() -= eta * gram.col(best);

        recorded_last = step % opts.record_every == 0;
        if (recorded_last) record();
    }
    if (!recorded_last) record();
    if (!stopped && opts.max_steps > 0) {
        path.truncated = true;
        path.warnings.push_back("forward_stagewise: max_steps reached before convergence");
    }
    return path;
}

// --- LARS ----------------------------------------------------------------

namespace {

/// Cholesky factor of the active-set Gram submatrix, grown one column at a time.
class ActiveCholesky
{
public:
    explicit ActiveCholesky(const Matrix& gram) : gram_(gram) {}

    const std::vector<Index>& members() const { return members_; }
    bool empty() const { return members_.empty(); }

    /// Append column j; false (and no change) when it is numerically in the
    /// span of the current members.
    bool try_insert(Index j, double tol)
    {
        const auto k = static_cast<Index>(members_.size());
        Vector g(k);
        for (Index i = 0; i < k; ++i) g[i] = gram_(members_[static_cast<std::size_t>(i)], j);
        Vector l = g;
        if (k > 0) L_.topLeftCorner(k, k).triangularView<Eigen::Lower>().solveInPlace(l);
        const double d2 = gram_(j, j) - l.squaredNorm();
        if (!(d2 > tol * gram_(j, j))) return false;
        Matrix grown = Matrix::Zero(k + 1, k + 1);
        grown.topLeftCorner(k, k) = L_;
        grown.block(k, 0, 1, k) = l.transpose();
        grown(k, k) = std::sqrt(d2);
        L_ = std::move(grown);
        members_.push_back(j);
        return true;
    }

    void remove(Index j)
    {
        auto kept = members_;
        kept.erase(std::find(kept.begin(), kept.end(), j));
        members_.clear();
        L_.resize(0, 0);
        for (Index m : kept) {
            // A subset of an independent set stays independent.
            try_insert(m, 0.0);
        }
    }

    Vector solve(const Vector& rhs) const
    {
        Vector x = L_.triangularView<Eigen::Lower>().solve(rhs);
        return L_.transpose().triangularView<Eigen::Upper>().solve(x);
    }

private:
    const Matrix& gram_;
    Matrix L_;
    std::vector<Index> members_;
};

} // namespace

SolutionPath lars_path(const Matrix& X, const Vector& y, const LarsOptions& opts)
{
    check_problem(X, y, "lars_path");
    require(X.rows() >= 2, "lars_path: needs n >= 2");
    const Index n = X.rows();
    const Index p = X.cols();
    const Index max_steps = opts.max_steps > 0 ? opts.max_steps : 8 * std::min(n, p) + 8;
    const bool lasso = opts.mode == LarsMode::lasso;

    const Matrix gram = X.transpose() * X;
    const Vector xty = X.transpose() * y;
    Vector beta = Vector::Zero(p);
    Vector corr = xty;

    SolutionPath path;
    path.solver = lasso ? "lars-lasso" : "lars";
    path.settings = {{"lasso_mode", lasso ? 1.0 : 0.0},
                     {"collinear_tol", opts.collinear_tol},
                     {"skip_collinear", opts.on_collinear == CollinearPolicy::skip ? 1.0 : 0.0}};

    std::vector<char> active(static_cast<std::size_t>(p), 0);
    std::vector<char> ignored(static_cast<std::size_t>(p), 0);
    ActiveCholesky chol(gram);

    auto max_corr = [&] {
        double m = 0.0;
        for (Index j = 0; j < p; ++j)
            if (!ignored[static_cast<std::size_t>(j)]) m = std::max(m, std::abs(corr[j]));
        return m;
    };
    auto record = [&] { path.steps.push_back(make_step(X, y, beta, corr.cwiseAbs().maxCoeff())); };

    record();
    const double c0 = max_corr();
    if (c0 == 0.0) return path;
    const double c_floor = 1e-12 * c0;

    // Try to add `candidates` (index order); returns false if the path must stop.
    auto admit = [&](const std::vector<Index>& candidates, std::size_t step_no) {
        for (Index j : candidates) {
            if (chol.try_insert(j, opts.collinear_tol)) {
                active[static_cast<std::size_t>(j)] = 1;
                continue;
            }
            const std::string msg = "step " + std::to_string(step_no) + ": variable " +
                                    std::to_string(j) + " is collinear with the active set";
            if (opts.on_collinear == CollinearPolicy::truncate) {
                path.truncated = true;
                path.warnings.push_back(msg + "; path truncated");
                return false;
            }
            ignored[static_cast<std::size_t>(j)] = 1;
            path.ignored.push_back(j);
            path.warnings.push_back(msg + "; ignored for the rest of the path");
        }
        return true;
    };

    Index last_dropped = -1;
    for (Index step = 1;; ++step) {
        double C = max_corr();
        if (C <= c_floor) break;
        if (step > max_steps) {
            path.truncated = true;
            path.warnings.push_back("lars_path: step budget exhausted");
            break;
        }

        if (chol.empty()) {
            std::vector<Index> entering;
            for (Index j = 0; j < p; ++j) {
                if (!ignored[static_cast<std::size_t>(j)] && std::abs(corr[j]) >= C * (1.0 - opts.tie_tol))
                    entering.push_back(j);
            }
            if (!admit(entering, path.steps.size())) break;
            if (chol.empty()) continue;
            C = max_corr();
        }

        const auto& members = chol.members();
        const auto k = static_cast<Index>(members.size());
        Vector signs(k);
        for (Index i = 0; i < k; ++i) signs[i] = sign(corr[members[static_cast<std::size_t>(i)]]);
        const Vector w_raw = chol.solve(signs);
        const double norm_const = 1.0 / std::sqrt(signs.dot(w_raw));
        const Vector w = norm_const * w_raw;
        Vector a = Vector::Zero(p);
        for (Index i = 0; i < k; ++i) a.noalias() += w[i] * gram.col(members[static_cast<std::size_t>(i)]);

        const double gamma_full = C / norm_const;
        double gamma_join = std::numeric_limits<double>::infinity();
        std::vector<double> join_len(static_cast<std::size_t>(p), std::numeric_limits<double>::infinity());
        for (Index j = 0; j < p; ++j) {
            const auto ju = static_cast<std::size_t>(j);
            if (active[ju] || ignored[ju]) continue;
            // A variable dropped at the previous knot sits on the boundary; only
            // its nontrivial crossing (usually with the opposite sign) counts.
            const double min_len = j == last_dropped ? 1e-9 * gamma_full : -1.0;
            double best = std::numeric_limits<double>::infinity();
            const double den1 = norm_const - a[j];
            const double den2 = norm_const + a[j];
            if (den1 > 1e-14 * norm_const) {
                const double len = std::max(C - corr[j], 0.0) / den1;
                if (len > min_len) best = std::min(best, len);
            }
            if (den2 > 1e-14 * norm_const) {
                const double len = std::max(C + corr[j], 0.0) / den2;
                if (len > min_len) best = std::min(best, len);
            }
            join_len[ju] = best;
            gamma_join = std::min(gamma_join, best);
        }

        double gamma = std::min(gamma_join, gamma_full);
        Index drop = -1;
        if (lasso) {
            for (Index i = 0; i < k; ++i) {
                const Index m = members[static_cast<std::size_t>(i)];
                if (w[i] == 0.0) continue;
                const double g = -beta[m] / w[i];
                if (g > 1e-15 * gamma_full && g < gamma) {
                    gamma = g;
                    drop = m;
                }
            }
        }

        for (Index i = 0; i < k; ++i) beta[members[static_cast<std::size_t>(i)]] += gamma * w[i];
        if (drop >= 0) beta[drop] = 0.0;
        corr.noalias() = xty - gram * beta;
        record();

        if (drop >= 0) {
            chol.remove(drop);
            active[static_cast<std::size_t>(drop)] = 0;
            last_dropped = drop;
            continue;
        }
        last_dropped = -1;
        if (gamma_join < gamma_full) {
            std::vector<Index> entering;
            const double cutoff = gamma_join + opts.tie_tol * std::max(gamma_join, gamma_full);
            for (Index j = 0; j < p; ++j)
                if (join_len[static_cast<std::size_t>(j)] <= cutoff) entering.push_back(j);
            if (!admit(entering, path.steps.size() - 1)) break;
            continue;
        }
        break; // least-squares fit on the active set reached
    }
    return path;
}

double lasso_objective(const Vector& beta, const Matrix& X, const Vector& y, double lambda,
                       const std::optional<ScalingMatrix>& D)
{
    require(lambda >= 0.0, "lasso_objective: lambda must be >= 0");
    require(X.rows() == y.size() && X.cols() == beta.size(), "lasso_objective: shape mismatch");
    const double fit = 0.5 * (y - X * beta).squaredNorm();
    if (!D) return fit + lambda * beta.lpNorm<1>();
    require(D->size() == beta.size(), "lasso_objective: D dimension mismatch");
    return fit + lambda * beta.cwiseProduct(D->diag()).lpNorm<1>();
}

double design_uncertainty(const Vector& beta, const ScalingMatrix& S)
{
    require(beta.size() == S.size(), "design_uncertainty: dimension mismatch");
    return beta.cwiseProduct(S.diag()).norm();
}

std::vector<double> path_uncertainty(const SolutionPath& path, const ScalingMatrix& S,
                                     bool coefficients_are_scaled,
                                     const std::optional<ScalingMatrix>& scaling)
{
    const ScalingMatrix& D = scaling ? *scaling : S;
    require(D.size() == S.size(), "path_uncertainty: scaling dimension mismatch");
    std::vector<double> out;
    out.reserve(path.steps.size());
    for (const auto& step : path.steps) {
        require(step.beta.size() == S.size(), "path_uncertainty: dimension mismatch");
        if (coefficients_are_scaled)
            out.push_back(design_uncertainty(unscale_coefficients(step.beta, D), S));
        else
            out.push_back(design_uncertainty(step.beta, S));
    }
    return out;
}

void annotate_uncertainty(SolutionPath& path, const ScalingMatrix& S)
{
    const auto u = path_uncertainty(path, S, path.scaled);
    for (std::size_t i = 0; i < u.size(); ++i) path.steps[i].uncertainty = u[i];
}

} // namespace eivsparse
