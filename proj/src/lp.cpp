#include "eivsparse/lp.hpp"

#include "eivsparse/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace eivsparse {

namespace {

constexpr double kPivotTol = 1e-11;
constexpr Index kRefactorEvery = 64;
constexpr Index kDegenerateStreak = 40;

} // namespace

const char* to_string(LpStatus s)
{
    switch (s) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
    case LpStatus::iteration_limit: return "iteration_limit";
    }
    return "unknown";
}

LpSolver::LpSolver(LpStandardForm lp, double tol, Index max_iterations)
    : lp_(std::move(lp)), tol_(tol), max_iterations_(max_iterations)
{
    detail::require(tol_ > 0.0, "LP tolerance must be > 0");
    detail::require(lp_.A.rows() == lp_.b.size(), "LP: A rows must match b");
    detail::require(lp_.A.cols() == lp_.c.size(), "LP: A columns must match c");
    detail::require(lp_.A.rows() >= 1 && lp_.c.size() >= 1, "LP: empty problem");
    detail::require(lp_.nonnegative.empty() ||
                        static_cast<Index>(lp_.nonnegative.size()) == lp_.c.size(),
                    "LP: nonnegative flags must match variable count");
    detail::require(lp_.A.allFinite() && lp_.b.allFinite() && lp_.c.allFinite(),
                    "LP: non-finite coefficients");
    build();
}

void LpSolver::build()
{
    const Index m = lp_.A.rows();
    const Index nv = lp_.c.size();
    columns_.clear();
    for (Index i = 0; i < nv; ++i) {
        columns_.push_back({i, 1.0});
        if (!lp_.is_nonnegative(i)) columns_.push_back({i, -1.0});
    }
    const auto n_struct = static_cast<Index>(columns_.size());
    for (Index r = 0; r < m; ++r) columns_.push_back({-1, 0.0});
    const auto n_cols = static_cast<Index>(columns_.size());

    row_scale_.resize(m);
    for (Index r = 0; r < m; ++r) {
        const double mx = lp_.A.row(r).cwiseAbs().maxCoeff();
        row_scale_[r] = mx > 0.0 ? 1.0 / mx : 1.0;
    }

    A_ = Matrix::Zero(m, n_cols);
    cost_ = Vector::Zero(n_cols);
    for (Index j = 0; j < n_struct; ++j) {
        const auto& col = columns_[static_cast<std::size_t>(j)];
        A_.col(j) = col.sign * lp_.A.col(col.variable).cwiseProduct(row_scale_);
        cost_[j] = col.sign * lp_.c[col.variable];
    }
    for (Index r = 0; r < m; ++r) A_(r, n_struct + r) = 1.0;
    b_ = lp_.b.cwiseProduct(row_scale_);

    basis_.resize(static_cast<std::size_t>(m));
    in_basis_.assign(static_cast<std::size_t>(n_cols), 0);
    for (Index r = 0; r < m; ++r) {
        basis_[static_cast<std::size_t>(r)] = n_struct + r;
        in_basis_[static_cast<std::size_t>(n_struct + r)] = 1;
    }
    T_ = A_;
    rhs_ = b_;
    d_ = cost_;
    since_refactor_ = 0;
    if (max_iterations_ <= 0) max_iterations_ = 50 * (m + n_cols) + 1000;
}

void LpSolver::refactor()
{
    const Index m = A_.rows();
    Matrix B(m, m);
    for (Index r = 0; r < m; ++r) B.col(r) = A_.col(basis_[static_cast<std::size_t>(r)]);
    Eigen::PartialPivLU<Matrix> lu(B);
    T_ = lu.solve(A_);
    rhs_ = lu.solve(b_);
    since_refactor_ = 0;
}

void LpSolver::reprice(const Vector& costs)
{
    Vector cb(A_.rows());
    for (Index r = 0; r < A_.rows(); ++r) cb[r] = costs[basis_[static_cast<std::size_t>(r)]];
    d_ = costs - T_.transpose() * cb;
    for (Index j : basis_) d_[j] = 0.0;
}

void LpSolver::pivot(Index row, Index col)
{
    const double piv = T_(row, col);
    T_.row(row) /= piv;
    rhs_[row] /= piv;
    const Eigen::RowVectorXd prow = T_.row(row);
    Vector factors = T_.col(col);
    factors[row] = 0.0;
    T_.noalias() -= factors * prow;
    rhs_.noalias() -= factors * rhs_[row];
    T_.col(col).setZero();
    T_(row, col) = 1.0;

    const double dq = d_[col];
    d_.noalias() -= dq * prow.transpose();
    d_[col] = 0.0;

    auto& leaving = basis_[static_cast<std::size_t>(row)];
    in_basis_[static_cast<std::size_t>(leaving)] = 0;
    leaving = col;
    in_basis_[static_cast<std::size_t>(col)] = 1;
    ++iterations_;
    ++since_refactor_;
}

bool LpSolver::dual_feasible() const
{
    for (Index j = 0; j < d_.size(); ++j)
        if (!in_basis_[static_cast<std::size_t>(j)] && d_[j] < -tol_) return false;
    return true;
}

// The reduced costs d_ must already correspond to `costs`.
LpStatus LpSolver::dual_simplex(const Vector& costs)
{
    const Index m = A_.rows();
    const Index nc = A_.cols();
    Index degenerate = 0;
    while (true) {
        if (iterations_ >= max_iterations_) return LpStatus::iteration_limit;
        if (since_refactor_ >= kRefactorEvery) {
            refactor();
            reprice(costs);
        }
        const bool bland = degenerate >= kDegenerateStreak;

        Index row = -1;
        double worst = -tol_;
        for (Index r = 0; r < m; ++r) {
            if (rhs_[r] >= -tol_) continue;
            if (bland) {
                if (row < 0 || basis_[static_cast<std::size_t>(r)] < basis_[static_cast<std::size_t>(row)])
                    row = r;
            } else if (rhs_[r] < worst) {
                worst = rhs_[r];
                row = r;
            }
        }
        if (row < 0) return LpStatus::optimal;

        Index col = -1;
        double best_ratio = std::numeric_limits<double>::infinity();
        double best_mag = 0.0;
        for (Index j = 0; j < nc; ++j) {
            if (in_basis_[static_cast<std::size_t>(j)]) continue;
            const double t = T_(row, j);
            if (t >= -kPivotTol) continue;
            const double ratio = std::max(d_[j], 0.0) / -t;
            const double slack = 1e-12 * std::max(1.0, best_ratio);
            if (col < 0 || ratio < best_ratio - slack) {
                best_ratio = ratio;
                best_mag = -t;
                col = j;
            } else if (!bland && ratio <= best_ratio + slack && -t > best_mag) {
                best_ratio = std::min(best_ratio, ratio);
                best_mag = -t;
                col = j;
            }
        }
        if (col < 0) {
            if (since_refactor_ > 0) {
                refactor();
                reprice(costs);
                continue;
            }
            return LpStatus::infeasible;
        }
        degenerate = best_ratio <= 1e-12 ? degenerate + 1 : 0;
        pivot(row, col);
    }
}

LpStatus LpSolver::primal_simplex()
{
    const Index m = A_.rows();
    const Index nc = A_.cols();
    Index degenerate = 0;
    while (true) {
        if (iterations_ >= max_iterations_) return LpStatus::iteration_limit;
        if (since_refactor_ >= kRefactorEvery) {
            refactor();
            reprice(cost_);
        }
        const bool bland = degenerate >= kDegenerateStreak;

        Index col = -1;
        double most_negative = -tol_;
        for (Index j = 0; j < nc; ++j) {
            if (in_basis_[static_cast<std::size_t>(j)] || d_[j] >= -tol_) continue;
            if (bland) {
                col = j;
                break;
            }
            if (d_[j] < most_negative) {
                most_negative = d_[j];
                col = j;
            }
        }
        if (col < 0) return LpStatus::optimal;

        Index row = -1;
        double best_ratio = std::numeric_limits<double>::infinity();
        double best_mag = 0.0;
        for (Index r = 0; r < m; ++r) {
            const double t = T_(r, col);
            if (t <= kPivotTol) continue;
            const double ratio = std::max(rhs_[r], 0.0) / t;
            const double slack = 1e-12 * std::max(1.0, best_ratio);
            const bool better = row < 0 || ratio < best_ratio - slack;
            const bool tie = !better && ratio <= best_ratio + slack;
            if (better) {
                best_ratio = ratio;
                best_mag = t;
                row = r;
            } else if (tie) {
                const bool take = bland ? basis_[static_cast<std::size_t>(r)] <
                                              basis_[static_cast<std::size_t>(row)]
                                        : t > best_mag;
                if (take) {
                    best_ratio = std::min(best_ratio, ratio);
                    best_mag = t;
                    row = r;
                }
            }
        }
        if (row < 0) return LpStatus::unbounded;
        degenerate = best_ratio <= 1e-12 ? degenerate + 1 : 0;
        pivot(row, col);
    }
}

LpSolution LpSolver::extract(LpStatus status) const
{
    LpSolution sol;
    sol.status = status;
    sol.iterations = iterations_;
    const Index m = A_.rows();

    // One step of iterative refinement on the basic values, using the slack
    // block of the tableau as B^-1.
    Vector xb = rhs_;
    Vector resid = b_;
    for (Index r = 0; r < m; ++r) resid.noalias() -= A_.col(basis_[static_cast<std::size_t>(r)]) * xb[r];
    xb.noalias() += T_.rightCols(m) * resid;

    sol.x = Vector::Zero(lp_.c.size());
    for (Index r = 0; r < m; ++r) {
        const auto& col = columns_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(r)])];
        if (col.variable >= 0) sol.x[col.variable] += col.sign * xb[r];
    }
    sol.objective = lp_.c.dot(sol.x);
    sol.max_violation = std::max(0.0, (lp_.A * sol.x - lp_.b).maxCoeff());
    return sol;
}

LpSolution LpSolver::solve()
{
    iterations_ = 0;
    if (dual_feasible()) return extract(dual_simplex(cost_));

    bool primal_feasible = true;
    for (Index r = 0; r < rhs_.size(); ++r) primal_feasible = primal_feasible && rhs_[r] >= -tol_;
    if (!primal_feasible) {
        // Zero-cost dual phase: every basis is dual feasible, so the dual
        // simplex walks to a primal feasible basis or proves infeasibility.
        const Vector zero = Vector::Zero(cost_.size());
        d_.setZero();
        const LpStatus phase1 = dual_simplex(zero);
        if (phase1 != LpStatus::optimal) return extract(phase1);
        refactor();
        reprice(cost_);
    }
    return extract(primal_simplex());
}

LpSolution LpSolver::resolve(const Vector& b)
{
    detail::require(b.size() == lp_.b.size(), "LP resolve: b has wrong length");
    detail::require(b.allFinite(), "LP resolve: non-finite b");
    lp_.b = b;
    b_ = b.cwiseProduct(row_scale_);
    const Index m = A_.rows();
    rhs_ = T_.rightCols(m) * b_;
    iterations_ = 0;
    if (dual_feasible()) return extract(dual_simplex(cost_));
    build();
    return solve();
}

LpSolution solve_lp(const LpStandardForm& lp, double tol)
{
    LpSolver solver(lp, tol);
    return solver.solve();
}

} // namespace eivsparse
