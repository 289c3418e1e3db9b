#pragma once
#include <eivsparse/data_model.hpp>
#include <eivsparse/types.hpp>

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace eivsparse {

/// One point on a solution path.
struct PathStep
{
    Vector beta;
    IndexSet active_set;
    double rss = 0.0;         // ||y - X beta||^2
    double l1_norm = 0.0;     // ||beta||_1
    double uncertainty = 0.0; // ||S beta||_2; ||beta||_2 until annotate_uncertainty runs
    double lambda = 0.0;      // max_j |x_j'(y - X beta)| (Dantzig: the grid value)
};

/// Ordered sequence of path steps plus the settings that produced them.
struct SolutionPath
{
    std::vector<PathStep> steps;
    std::string solver;
    std::vector<std::pair<std::string, double>> settings;
    bool scaled = false;
    /// Set when a solver stopped early (degenerate active set, step budget).
    bool truncated = false;
    /// Variables skipped for good because they were collinear with the active set.
    IndexSet ignored;
    std::vector<std::string> warnings;

    std::size_t size() const { return steps.size(); }
    const PathStep& back() const { return steps.back(); }
    /// Step i, or the last step when the path is shorter (cross-fold alignment).
    const PathStep& at_or_last(std::size_t i) const;
};

/// Fill PathStep::rss, l1_norm, active_set (|beta_j| > support_tol) and
/// uncertainty = ||beta||_2 from a coefficient vector.
PathStep make_step(const Matrix& X, const Vector& y, Vector beta, double lambda,
                   double support_tol = 0.0);

struct StagewiseOptions
{
    /// Step size; unset selects 1e-3 * max_j |x_j'y| / (n s^2), where s is
    /// the root-mean-square column standard deviation (1 when standardized).
    std::optional<double> gamma;
    Index max_steps = 100000;
    /// Stop once max_j |x_j'r| / (n s) < corr_tol.
    double corr_tol = 1e-4;
    /// Record every k-th update (the final state is always recorded).
    Index record_every = 1;
};

/**
 * Forward stagewise regression with fixed step size gamma.
 *
 * Each update moves the coefficient of the column with the largest absolute
 * residual inner product x_j'r (lowest index on ties) by gamma * sign(x_j'r).
 * Stops when the largest correlation falls below corr_tol, when a full step
 * would no longer reduce the residual sum of squares, or after max_steps.
 */
SolutionPath forward_stagewise(const Matrix& X, const Vector& y, const StagewiseOptions& opts = {});

enum class LarsMode
{
    plain,
    lasso, // drop variables whose coefficient crosses zero
};

enum class CollinearPolicy
{
    skip,     // leave the variable out for the rest of the path and continue
    truncate, // stop the path at the offending step
};

struct LarsOptions
{
    LarsMode mode = LarsMode::lasso;
    CollinearPolicy on_collinear = CollinearPolicy::skip;
    /// Relative threshold on the new Cholesky pivot for a joining column.
    double collinear_tol = 1e-10;
    /// Joining candidates whose step lengths agree within this relative
    /// tolerance enter together (in index order).
    double tie_tol = 1e-12;
    Index max_steps = 0; // 0: 8 * min(n, p) + 8
};

/**
 * Least angle regression path from beta = 0 to the least-squares fit.
 *
 * Each knot is recorded with lambda = max_j |x_j'r|. In lasso mode the
 * path is the lasso solution path of 1/2 ||y - X beta||^2 + lambda ||beta||_1.
 */
SolutionPath lars_path(const Matrix& X, const Vector& y, const LarsOptions& opts = {});

/// 1/2 ||y - X beta||^2 + lambda ||beta||_1, or lambda ||D beta||_1 when D is given.
double lasso_objective(const Vector& beta, const Matrix& X, const Vector& y, double lambda,
                       const std::optional<ScalingMatrix>& D = std::nullopt);

/**
 * Design uncertainty ||S beta_orig||_2 for every step of a path.
 *
 * When coefficients_are_scaled the step coefficients belong to the scaled
 * design X D^-1 and are mapped back with beta_orig = D^-1 beta, where D is
 * `scaling` if given and S otherwise. With D == S the result is ||beta||_2.
 */
std::vector<double> path_uncertainty(const SolutionPath& path, const ScalingMatrix& S,
                                     bool coefficients_are_scaled,
                                     const std::optional<ScalingMatrix>& scaling = std::nullopt);

/// Overwrite PathStep::uncertainty with path_uncertainty(path, S, path.scaled).
void annotate_uncertainty(SolutionPath& path, const ScalingMatrix& S);

/// Uncertainty of a single coefficient vector on the original design scale.
double design_uncertainty(const Vector& beta, const ScalingMatrix& S);

} // namespace eivsparse
