#include "unit/helpers.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace eivsparse;

namespace {

// Best feasible vertex of min c'x s.t. Ax <= b over free x, by trying every
// set of nv rows.
double vertex_minimum(const Matrix& A, const Vector& b, const Vector& c)
{
    const auto m = A.rows();
    const auto nv = A.cols();
    double best = std::numeric_limits<double>::infinity();
    std::vector<int> pick(static_cast<std::size_t>(nv));
    for (int i = 0; i < nv; ++i) pick[static_cast<std::size_t>(i)] = i;
    while (true) {
        Matrix M(nv, nv);
        Vector r(nv);
        for (Index i = 0; i < nv; ++i) {
            M.row(i) = A.row(pick[static_cast<std::size_t>(i)]);
            r[i] = b[pick[static_cast<std::size_t>(i)]];
        }
        Eigen::FullPivLU<Matrix> lu(M);
        if (lu.rank() == nv) {
            const Vector x = lu.solve(r);
            if (((A * x - b).array() <= 1e-9).all()) best = std::min(best, c.dot(x));
        }
        int i = static_cast<int>(nv) - 1;
        while (i >= 0 && pick[static_cast<std::size_t>(i)] == m - nv + i) --i;
        if (i < 0) break;
        ++pick[static_cast<std::size_t>(i)];
        for (int k = i + 1; k < nv; ++k) pick[static_cast<std::size_t>(k)] = pick[static_cast<std::size_t>(k - 1)] + 1;
    }
    return best;
}

} // namespace

TEST_SUITE("lp")
{
    TEST_CASE("minimize x subject to x >= 1")
    {
        LpStandardForm lp;
        lp.c = Vector::Ones(1);
        lp.A = -Matrix::Ones(1, 1);
        lp.b = -Vector::Ones(1);
        const auto sol = solve_lp(lp);
        CHECK(sol.status == LpStatus::optimal);
        CHECK(std::abs(sol.x[0] - 1.0) < 1e-12);
        CHECK(std::abs(sol.objective - 1.0) < 1e-12);
    }

    TEST_CASE("infeasible and unbounded are reported by status")
    {
        LpStandardForm inf;
        inf.c = Vector::Ones(1);
        inf.A.resize(2, 1);
        inf.A << 1, -1;
        inf.b.resize(2);
        inf.b << 0, -1;
        CHECK(solve_lp(inf).status == LpStatus::infeasible);

        LpStandardForm unb;
        unb.c = -Vector::Ones(1);
        unb.A = -Matrix::Ones(1, 1);
        unb.b = Vector::Zero(1);
        unb.nonnegative = {1};
        CHECK(solve_lp(unb).status == LpStatus::unbounded);
    }

    TEST_CASE("random bounded LPs match vertex enumeration")
    {
        Rng rng(31);
        for (int t = 0; t < 60; ++t) {
            const Index nv = 2 + t % 3;
            const Index m = nv + 4;
            LpStandardForm lp;
            lp.A = testing::random_matrix(m, nv, rng);
            // Box rows keep the feasible set bounded.
            Matrix box(2 * nv, nv);
            box << Matrix::Identity(nv, nv), -Matrix::Identity(nv, nv);
            lp.A.conservativeResize(m + 2 * nv, nv);
            lp.A.bottomRows(2 * nv) = box;
            lp.b = Vector(m + 2 * nv);
            for (Index i = 0; i < m; ++i) lp.b[i] = rng.uniform(0.1, 2.0);
            lp.b.tail(2 * nv).setConstant(3.0);
            lp.c = testing::random_vector(nv, rng);
            const auto sol = solve_lp(lp);
            REQUIRE(sol.status == LpStatus::optimal);
            CHECK(sol.max_violation < 1e-9);
            CHECK(std::abs(sol.objective - vertex_minimum(lp.A, lp.b, lp.c)) < 1e-9);
        }
    }

    TEST_CASE("resolve after a right-hand-side change matches a fresh solve")
    {
        Rng rng(32);
        LpStandardForm lp;
        const Index nv = 3;
        lp.A = testing::random_matrix(8, nv, rng);
        lp.A.conservativeResize(14, nv);
        lp.A.bottomRows(6) << Matrix::Identity(3, 3), -Matrix::Identity(3, 3);
        lp.b = Vector::Constant(14, 1.0);
        lp.c = testing::random_vector(nv, rng);
        LpSolver solver(lp);
        REQUIRE(solver.solve().status == LpStatus::optimal);
        for (int t = 0; t < 20; ++t) {
            Vector b = lp.b;
            for (Index i = 0; i < 8; ++i) b[i] = rng.uniform(0.05, 2.0);
            const auto warm = solver.resolve(b);
            LpStandardForm fresh = lp;
            fresh.b = b;
            const auto cold = solve_lp(fresh);
            REQUIRE(warm.status == cold.status);
            CHECK(std::abs(warm.objective - cold.objective) < 1e-9);
        }
    }

    TEST_CASE("malformed problems are rejected")
    {
        LpStandardForm lp;
        lp.c = Vector::Ones(2);
        lp.A = Matrix::Ones(1, 3);
        lp.b = Vector::Ones(1);
        CHECK_THROWS_AS(LpSolver{lp}, InputError);
    }
}
