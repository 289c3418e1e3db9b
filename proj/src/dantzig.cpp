#include "eivsparse/dantzig.hpp"

#include "eivsparse/error.hpp"

#include <cmath>

namespace eivsparse {

using detail::require;

namespace {

Vector weights_of(const std::optional<ScalingMatrix>& D, Index p)
{
    if (!D) return Vector::Ones(p);
    require(D->size() == p, "Dantzig: D dimension mismatch");
    return D->diag();
}

void check(const DantzigProblem& prob)
{
    require(prob.X.rows() == prob.y.size(), "Dantzig: X rows must match y length");
    require(prob.X.cols() >= 1 && prob.X.rows() >= 1, "Dantzig: empty design");
    require(prob.X.allFinite() && prob.y.allFinite(), "Dantzig: non-finite data");
    require(prob.lambda >= 0.0 && std::isfinite(prob.lambda), "Dantzig: lambda must be >= 0");
    require(prob.sigma_eps >= 0.0 && std::isfinite(prob.sigma_eps),
            "Dantzig: sigma_eps must be >= 0");
}

// Assemble the LP from the Gram matrix and X'y so paths can reuse them.
LpStandardForm assemble(const Matrix& gram, const Vector& xty, double halfwidth, const Vector& w)
{
    const Index p = gram.rows();
    LpStandardForm lp;
    lp.c = Vector::Zero(2 * p);
    lp.c.head(p) = w;
    lp.nonnegative.assign(static_cast<std::size_t>(2 * p), 0);
    for (Index j = 0; j < p; ++j) lp.nonnegative[static_cast<std::size_t>(j)] = 1;

    lp.A = Matrix::Zero(4 * p, 2 * p);
    lp.b = Vector::Zero(4 * p);
    const Matrix I = Matrix::Identity(p, p);
    // beta - alpha <= 0
    lp.A.block(0, 0, p, p) = -I;
    lp.A.block(0, p, p, p) = I;
    // -beta - alpha <= 0
    lp.A.block(p, 0, p, p) = -I;
    lp.A.block(p, p, p, p) = -I;
    // X'y - G beta <= s w   <=>   -G beta <= s w - X'y
    lp.A.block(2 * p, p, p, p) = -gram;
    lp.b.segment(2 * p, p) = halfwidth * w - xty;
    // -(X'y - G beta) <= s w   <=>   G beta <= s w + X'y
    lp.A.block(3 * p, p, p, p) = gram;
    lp.b.segment(3 * p, p) = halfwidth * w + xty;

    lp.blocks = {{"alpha box: beta - alpha <= 0", 0, p},
                 {"alpha box: -beta - alpha <= 0", p, p},
                 {"correlation band: X'(y - X beta) <= sigma*lambda*D1", 2 * p, p},
                 {"correlation band: -X'(y - X beta) <= sigma*lambda*D1", 3 * p, p}};
    return lp;
}

Vector band_rhs(const Vector& xty, double halfwidth, const Vector& w)
{
    const Index p = xty.size();
    Vector b = Vector::Zero(4 * p);
    b.segment(2 * p, p) = halfwidth * w - xty;
    b.segment(3 * p, p) = halfwidth * w + xty;
    return b;
}

} // namespace

LpStandardForm build_dantzig_lp(const DantzigProblem& prob)
{
    check(prob);
    const Index p = prob.X.cols();
    const Matrix gram = prob.X.transpose() * prob.X;
    const Vector xty = prob.X.transpose() * prob.y;
    return assemble(gram, xty, prob.sigma_eps * prob.lambda, weights_of(prob.D, p));
}

Vector dantzig_band_halfwidths(const LpStandardForm& lp, const Matrix& X, const Vector& y)
{
    const Index p = X.cols();
    require(lp.constraints() == 4 * p, "dantzig_band_halfwidths: LP shape mismatch");
    return lp.b.segment(2 * p, p) + X.transpose() * y;
}

DantzigSolution solve_dantzig(const DantzigProblem& prob, const DantzigOptions& opts)
{
    const LpSolution sol = solve_lp(build_dantzig_lp(prob), opts.lp_tol);
    const Index p = prob.X.cols();
    DantzigSolution out;
    out.status = sol.status;
    out.objective = sol.objective;
    out.beta = sol.x.tail(p);
    for (Index j = 0; j < p; ++j)
        if (std::abs(out.beta[j]) < opts.zero_tol) out.beta[j] = 0.0;
    return out;
}

Vector default_dantzig_grid(const Matrix& X, const Vector& y, double sigma_eps,
                            const std::optional<ScalingMatrix>& D, Index count, double ratio)
{
    require(sigma_eps > 0.0, "default_dantzig_grid: sigma_eps must be > 0");
    require(count >= 1, "default_dantzig_grid: count must be >= 1");
    require(ratio > 0.0 && ratio < 1.0, "default_dantzig_grid: ratio must be in (0, 1)");
    const Vector w = weights_of(D, X.cols());
    const double top = (X.transpose() * y).cwiseAbs().cwiseQuotient(w).maxCoeff() / sigma_eps;
    require(top > 0.0, "default_dantzig_grid: X'y is zero, no informative grid");
    Vector grid(count);
    for (Index i = 0; i < count; ++i) {
        const double t = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
        grid[i] = top * std::pow(ratio, t);
    }
    return grid;
}

SolutionPath dantzig_path(const Matrix& X, const Vector& y, double sigma_eps,
                          const Vector& lambda_grid, const std::optional<ScalingMatrix>& D,
                          const DantzigOptions& opts)
{
    check({X, y, 0.0, sigma_eps, std::nullopt});
    require(lambda_grid.size() >= 1, "dantzig_path: empty lambda grid");
    for (Index i = 0; i < lambda_grid.size(); ++i) {
        require(lambda_grid[i] > 0.0 && std::isfinite(lambda_grid[i]),
                "dantzig_path: lambda grid must be positive");
        if (i > 0) require(lambda_grid[i] < lambda_grid[i - 1], "dantzig_path: lambda grid must be strictly decreasing");
    }
    const Index p = X.cols();
    const Vector w = weights_of(D, p);
    const Matrix gram = X.transpose() * X;
    const Vector xty = X.transpose() * y;

    SolutionPath path;
    path.solver = "dantzig";
    path.settings = {{"sigma_eps", sigma_eps},
                     {"lp_tol", opts.lp_tol},
                     {"zero_tol", opts.zero_tol},
                     {"weighted", D ? 1.0 : 0.0}};

    LpSolver solver(assemble(gram, xty, sigma_eps * lambda_grid[0], w), opts.lp_tol);
    for (Index i = 0; i < lambda_grid.size(); ++i) {
        const double lambda = lambda_grid[i];
        const LpSolution sol =
            i == 0 ? solver.solve() : solver.resolve(band_rhs(xty, sigma_eps * lambda, w));
        if (sol.status != LpStatus::optimal) {
            path.warnings.push_back("lambda index " + std::to_string(i) + ": LP status " +
                                    to_string(sol.status) + "; grid point skipped");
            continue;
        }
        Vector beta = sol.x.tail(p);
        for (Index j = 0; j < p; ++j)
            if (std::abs(beta[j]) < opts.zero_tol) beta[j] = 0.0;
        PathStep step = make_step(X, y, std::move(beta), lambda);
        step.uncertainty = step.beta.cwiseProduct(w).norm();
        path.steps.push_back(std::move(step));
    }
    return path;
}

} // namespace eivsparse
