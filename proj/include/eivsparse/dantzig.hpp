#pragma once
#include <eivsparse/data_model.hpp>
#include <eivsparse/lp.hpp>
#include <eivsparse/pursuit.hpp>

#include <optional>

namespace eivsparse {

/**
 * Dantzig selector instance:
 *   minimize ||D beta||_1  subject to  |x_j'(y - X beta)| <= sigma_eps * lambda * D_jj
 * with D = identity when absent.
 */
struct DantzigProblem
{
    Matrix X;
    Vector y;
    double lambda = 0.0;
    double sigma_eps = 1.0;
    std::optional<ScalingMatrix> D;
};

/**
 * Explicit LP over (alpha, beta), 2p variables with alpha flagged >= 0:
 *   minimize 1'(D alpha)
 *   s.t.  beta - alpha <= 0,  -beta - alpha <= 0                (alpha box, 2p rows)
 *         X'(y - X beta) <= s D1,  -X'(y - X beta) <= s D1      (band, 2p rows)
 * where s = sigma_eps * lambda.
 */
LpStandardForm build_dantzig_lp(const DantzigProblem& prob);

/// Half-widths s * D_jj of the correlation band rows of an LP built above.
Vector dantzig_band_halfwidths(const LpStandardForm& lp, const Matrix& X, const Vector& y);

struct DantzigOptions
{
    double lp_tol = 1e-9;
    /// Coefficients with |beta_j| below this are reported as exact zeros.
    double zero_tol = 1e-8;
};

struct DantzigSolution
{
    LpStatus status = LpStatus::infeasible;
    Vector beta;
    double objective = 0.0;
};

/// Solve a single instance.
DantzigSolution solve_dantzig(const DantzigProblem& prob, const DantzigOptions& opts = {});

/// `count` geometric values from max_j |x_j'y| / (D_jj sigma_eps) down to
/// `ratio` times that value.
Vector default_dantzig_grid(const Matrix& X, const Vector& y, double sigma_eps,
                            const std::optional<ScalingMatrix>& D = std::nullopt,
                            Index count = 50, double ratio = 1e-3);

/**
 * One Dantzig solve per lambda in a strictly decreasing positive grid,
 * warm-starting each LP from the previous optimal basis. Coefficients are on
 * the design scale of X (also when D is given). Grid points whose LP does not
 * reach optimality are skipped with a warning. PathStep::uncertainty is
 * ||D beta||_2 when D is given and ||beta||_2 otherwise.
 */
SolutionPath dantzig_path(const Matrix& X, const Vector& y, double sigma_eps,
                          const Vector& lambda_grid,
                          const std::optional<ScalingMatrix>& D = std::nullopt,
                          const DantzigOptions& opts = {});

} // namespace eivsparse
