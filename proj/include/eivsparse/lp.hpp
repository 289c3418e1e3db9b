#pragma once
#include <eivsparse/types.hpp>

#include <string>
#include <vector>

namespace eivsparse {

/// Named group of consecutive constraint rows.
struct LpBlock
{
    std::string description;
    Index first_row = 0;
    Index rows = 0;
};

/**
 * Linear program  minimize c'x  subject to  A x <= b.
 *
 * Variables are free unless flagged in `nonnegative`, which adds x_i >= 0.
 * An empty `nonnegative` means every variable is free.
 */
struct LpStandardForm
{
    Vector c;
    Matrix A;
    Vector b;
    std::vector<char> nonnegative;
    std::vector<LpBlock> blocks;

    Index variables() const { return c.size(); }
    Index constraints() const { return A.rows(); }
    bool is_nonnegative(Index i) const
    {
        return !nonnegative.empty() && nonnegative[static_cast<std::size_t>(i)] != 0;
    }
};

enum class LpStatus
{
    optimal,
    infeasible,
    unbounded,
    iteration_limit,
};

const char* to_string(LpStatus s);

struct LpSolution
{
    LpStatus status = LpStatus::infeasible;
    Vector x;
    double objective = 0.0;
    Index iterations = 0;
    /// max_i (A x - b)_i, clipped at 0.
    double max_violation = 0.0;
};

/**
 * Dense tableau simplex solver that can be re-solved after the right-hand
 * side changes.
 *
 * Starting from the slack basis it runs the dual simplex when that basis is
 * dual feasible (c >= 0 on every column) and otherwise a zero-cost dual
 * phase to reach primal feasibility followed by the primal simplex. Pricing
 * uses the largest reduced cost / infeasibility and falls back to Bland's
 * rule after a run of degenerate pivots. Rows are equilibrated internally.
 */
class LpSolver
{
public:
    explicit LpSolver(LpStandardForm lp, double tol = 1e-9, Index max_iterations = 0);

    LpSolution solve();

    /// Replace b and re-optimise from the current basis (dual simplex when
    /// the basis is still dual feasible).
    LpSolution resolve(const Vector& b);

    const LpStandardForm& problem() const { return lp_; }

private:
    struct Column
    {
        Index variable; // original variable, or -1 for a slack
        double sign;
    };

    void build();
    void refactor();
    void reprice(const Vector& costs);
    void pivot(Index row, Index col);
    LpStatus dual_simplex(const Vector& costs);
    LpStatus primal_simplex();
    LpSolution extract(LpStatus status) const;
    bool dual_feasible() const;

    LpStandardForm lp_;
    double tol_;
    Index max_iterations_;
    Index iterations_ = 0;
    Index since_refactor_ = 0;

    std::vector<Column> columns_;
    Vector row_scale_;
    Matrix A_; // equilibrated [A_struct | I]
    Vector b_;
    Vector cost_;
    Matrix T_;   // B^-1 A_
    Vector rhs_; // B^-1 b_
    Vector d_;   // reduced costs
    std::vector<Index> basis_;
    std::vector<char> in_basis_;
};

/// One-shot convenience wrapper around LpSolver.
LpSolution solve_lp(const LpStandardForm& lp, double tol = 1e-9);

} // namespace eivsparse
