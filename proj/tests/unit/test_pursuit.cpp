#include "oracles/oracles.hpp"
#include "unit/helpers.hpp"

#include <doctest.h>

#include <cmath>

using namespace eivsparse;

namespace {

double soft(double c, double lambda) { return c > lambda ? c - lambda : c < -lambda ? c + lambda : 0.0; }

// Point of a LARS path with the given l1 norm, by linear interpolation
// between the surrounding knots.
Vector at_l1(const SolutionPath& path, double l1)
{
    for (std::size_t s = 1; s < path.size(); ++s) {
        const PathStep& a = path.steps[s - 1];
        const PathStep& b = path.steps[s];
        if (b.l1_norm >= l1) {
            const double t = b.l1_norm > a.l1_norm ? (l1 - a.l1_norm) / (b.l1_norm - a.l1_norm) : 1.0;
            return a.beta + t * (b.beta - a.beta);
        }
    }
    return path.back().beta;
}

} // namespace

TEST_SUITE("pursuit")
{
    TEST_CASE("fs: response orthogonal to every column gives a single zero step")
    {
        Matrix X(4, 2);
        X << 1, 1, -1, 1, 1, -1, -1, -1;
        Vector y(4);
        y << 1, -1, -1, 1;
        const auto path = forward_stagewise(X, y, {.gamma = 0.01});
        REQUIRE(path.size() == 1);
        CHECK(path.back().beta.isZero());
    }

    TEST_CASE("fs: aligned column moves alone until correlations meet")
    {
        // Unit-variance 2x2 identity design; x1'y = 3 sqrt2, x2'y = sqrt2.
        const double s2 = std::sqrt(2.0);
        Matrix X(2, 2);
        X << s2, 0, 0, s2;
        Vector y(2);
        y << 3, 1;
        const double gamma = 1e-3;
        const auto path = forward_stagewise(X, y, {.gamma = gamma, .max_steps = 100000, .corr_tol = 0.0});
        std::size_t first = 0;
        while (first < path.size() && path.steps[first].beta[1] == 0.0) ++first;
        REQUIRE(first < path.size());
        // Correlations 3 sqrt2 - 2 b1 and sqrt2 meet at b1 = sqrt2.
        CHECK(std::abs(path.steps[first].beta[0] - s2) <= gamma);
        for (std::size_t s = 1; s < first; ++s) CHECK(path.steps[s].beta[0] > path.steps[s - 1].beta[0]);
        const Eigen::Vector2d ols(3 / s2, 1 / s2);
        CHECK((path.back().beta - ols).cwiseAbs().maxCoeff() < 2 * gamma);
    }

    TEST_CASE("fs: invalid options")
    {
        const auto d = testing::random_standardized(10, 3, 1);
        CHECK_THROWS_AS(forward_stagewise(d.X, d.y, {.gamma = 0.0}), InputError);
        CHECK_THROWS_AS(forward_stagewise(d.X, d.y, {.gamma = -1.0}), InputError);
        Matrix bad = d.X;
        bad(0, 0) = std::nan("");
        CHECK_THROWS_AS(forward_stagewise(bad, d.y), InputError);
    }

    TEST_CASE("fs: step budget marks the path truncated")
    {
        const auto d = testing::random_standardized(20, 3, 2);
        const auto path = forward_stagewise(d.X, d.y, {.gamma = 1e-4, .max_steps = 10});
        CHECK(path.truncated);
        CHECK(path.size() == 11);
    }

    TEST_CASE("fs ends close to the lasso path at matched l1 norm")
    {
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            const auto d = testing::random_standardized(60, 4, 100 + seed);
            const double gamma = 1e-3;
            const auto fs = forward_stagewise(d.X, d.y, {.gamma = gamma, .max_steps = 1000000, .corr_tol = 0.0});
            const auto lars = lars_path(d.X, d.y);
            const Vector ref = at_l1(lars, fs.back().l1_norm);
            CHECK((fs.back().beta - ref).cwiseAbs().maxCoeff() <= 10 * gamma * std::sqrt(4.0));
        }
    }

    TEST_CASE("lars: zero response")
    {
        const auto d = testing::random_standardized(10, 3, 3);
        const auto path = lars_path(d.X, Vector::Zero(10));
        REQUIRE(path.size() == 1);
        CHECK(path.back().beta.isZero());
        CHECK(path.back().lambda == 0.0);
    }

    TEST_CASE("lars: orthonormal design gives soft-thresholded correlations at every knot")
    {
        Rng rng(8);
        const Matrix Q = Eigen::HouseholderQR<Matrix>(testing::random_matrix(20, 5, rng)).householderQ() *
                         Matrix::Identity(20, 5);
        const Vector y = testing::random_vector(20, rng);
        const Vector c = Q.transpose() * y;
        for (auto mode : {LarsMode::lasso, LarsMode::plain}) {
            const auto path = lars_path(Q, y, {.mode = mode});
            CHECK(path.size() == 6);
            for (const auto& step : path.steps)
                for (Index j = 0; j < 5; ++j) CHECK(std::abs(step.beta[j] - soft(c[j], step.lambda)) < 1e-12);
        }
    }

    TEST_CASE("lars: lasso knots agree with coordinate descent")
    {
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const auto d = testing::random_standardized(20, 8, 500 + seed);
            const auto path = lars_path(d.X, d.y);
            for (const auto& step : path.steps) {
                if (step.lambda <= 1e-9) continue;
                const Vector ref = oracle::cd_lasso(d.X, d.y, step.lambda);
                CHECK((step.beta - ref).cwiseAbs().maxCoeff() < 1e-6);
            }
        }
    }

    TEST_CASE("lars: a variable dropped at a knot can rejoin in the next segment")
    {
        Rng rng = Rng(7).split(stream_tag("rejoin"));
        int paths_with_drops = 0;
        for (int t = 0; t < 100; ++t) {
            const Matrix X = testing::random_matrix(20, 8, rng);
            const Vector y = X * testing::random_vector(8, rng) + testing::random_vector(20, rng);
            const auto path = lars_path(X, y);
            const Vector ls = X.colPivHouseholderQr().solve(y);
            paths_with_drops += path.size() > 9;
            CHECK(path.back().lambda < 1e-9 * path.steps.front().lambda);
            CHECK((path.back().beta - ls).cwiseAbs().maxCoeff() < 1e-9);
        }
        CHECK(paths_with_drops > 0);
    }

    TEST_CASE("lars: equiangular knots and monotone rss")
    {
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const auto d = testing::random_standardized(30, 10, 900 + seed);
            for (auto mode : {LarsMode::lasso, LarsMode::plain}) {
                const auto path = lars_path(d.X, d.y, {.mode = mode});
                for (std::size_t s = 0; s < path.size(); ++s) {
                    const auto& st = path.steps[s];
                    const Vector c = d.X.transpose() * (d.y - d.X * st.beta);
                    for (Index j : st.active_set) CHECK(std::abs(std::abs(c[j]) - st.lambda) < 1e-8);
                    CHECK(c.cwiseAbs().maxCoeff() <= st.lambda + 1e-8);
                    if (s > 0) CHECK(st.rss <= path.steps[s - 1].rss + 1e-10);
                }
                CHECK(path.back().lambda < 1e-8);
            }
        }
    }

    TEST_CASE("lars: collinear column is skipped or truncates")
    {
        Rng rng(5);
        Matrix X = testing::random_matrix(15, 4, rng);
        X.col(3) = X.col(0);
        const Vector y = X.col(0) * 2.0 + X.col(1) + 0.1 * testing::random_vector(15, rng);
        const auto d = standardize(X, y);

        const auto skip = lars_path(d.X, d.y);
        CHECK(skip.ignored.size() == 1);
        CHECK_FALSE(skip.warnings.empty());
        CHECK(skip.back().lambda < 1e-8);

        const auto cut = lars_path(d.X, d.y, {.on_collinear = CollinearPolicy::truncate});
        CHECK(cut.truncated);
        CHECK(cut.size() <= skip.size());
    }

    TEST_CASE("lasso objective: special cases and change of variables")
    {
        const auto d = testing::random_standardized(12, 3, 4);
        CHECK(lasso_objective(Vector::Zero(3), d.X, d.y, 0.7) == doctest::Approx(0.5 * d.y.squaredNorm()));
        const Vector ols = d.X.colPivHouseholderQr().solve(d.y);
        CHECK(lasso_objective(ols, d.X, d.y, 0.0) == doctest::Approx(0.5 * (d.y - d.X * ols).squaredNorm()));
        CHECK_THROWS_AS(lasso_objective(ols, d.X, d.y, -1.0), InputError);

        Rng rng(6);
        Vector diag(3);
        diag << 0.2, 1.3, 0.7;
        const ScalingMatrix D(diag);
        const Vector bp = testing::random_vector(3, rng);
        const double a = lasso_objective(bp, apply_scaling(d.X, D), d.y, 0.9);
        const double b = lasso_objective(unscale_coefficients(bp, D), d.X, d.y, 0.9, D);
        CHECK(std::abs(a - b) < 1e-10);
    }

    TEST_CASE("lars on the scaled design solves the generalized lasso")
    {
        for (std::uint64_t seed = 0; seed < 3; ++seed) {
            const auto d = testing::random_standardized(25, 3, 40 + seed, 1.0);
            Vector diag(3);
            diag << 0.3, 0.9, 0.6;
            const ScalingMatrix D(diag);
            const auto path = lars_path(apply_scaling(d.X, D), d.y);
            for (const auto& step : path.steps) {
                if (step.lambda <= 1e-9) continue;
                const Vector beta = unscale_coefficients(step.beta, D);
                const auto f = [&](const Vector& b) { return lasso_objective(b, d.X, d.y, step.lambda, D); };
                const Vector ref = oracle::grid_minimize(f, Vector::Zero(3), 4.0 * (1.0 + beta.cwiseAbs().maxCoeff()));
                CHECK((beta - ref).cwiseAbs().maxCoeff() < 1e-5);
                CHECK(f(beta) <= f(ref) + 1e-9);
            }
        }
    }

    TEST_CASE("path uncertainty")
    {
        SolutionPath path;
        Vector b1(3), b2(3);
        b1 << 1, 0, 0;
        b2 << 0, 1, 1;
        b2 /= std::sqrt(2.0);
        const auto d = testing::random_standardized(5, 3, 7);
        path.steps = {make_step(d.X, d.y, Vector::Zero(3), 0), make_step(d.X, d.y, b1, 0),
                      make_step(d.X, d.y, b2, 0)};
        Vector s(3);
        s << std::sqrt(0.5), 0.5, 0.5;
        const ScalingMatrix S(s);

        const auto u = path_uncertainty(path, S, false);
        CHECK(u[0] == 0.0);
        CHECK(std::abs(u[1] - std::sqrt(0.5)) < 1e-12);
        CHECK(std::abs(u[2] - 0.5) < 1e-12);
        CHECK(std::abs(u[1] / u[2] - std::sqrt(2.0)) < 1e-12);

        const auto id = path_uncertainty(path, ScalingMatrix::identity(3), false);
        CHECK(std::abs(id[2] - 1.0) < 1e-12);

        // Coefficients fitted on the S-scaled design: uncertainty is ||beta'||.
        const auto scaled = path_uncertainty(path, S, true);
        CHECK(std::abs(scaled[1] - 1.0) < 1e-12);
        CHECK(std::abs(scaled[2] - 1.0) < 1e-12);

        CHECK_THROWS_AS(path_uncertainty(path, ScalingMatrix::identity(2), false), InputError);
    }

    TEST_CASE("main-result identity on random inputs")
    {
        Rng rng(77);
        for (int i = 0; i < 200; ++i) {
            Vector s(6);
            for (Index j = 0; j < 6; ++j) s[j] = rng.uniform(0.05, 3.0);
            const ScalingMatrix S(s);
            const Vector bp = testing::random_vector(6, rng);
            CHECK(std::abs(design_uncertainty(unscale_coefficients(bp, S), S) - bp.norm()) < 1e-12);
        }
    }
}
