#include "unit/helpers.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace eivsparse;

TEST_SUITE("variance")
{
    TEST_CASE("anova: hand example")
    {
        Matrix z(2, 2);
        z << 1, 3, 5, 7;
        const auto e = anova_components(z);
        CHECK(e.ss_error == 4.0);
        CHECK(e.s_delta_sq == 2.0);
        CHECK(e.ss_treatment == 16.0);
        CHECK(e.s_nu_sq == 7.0);
        CHECK(e.df_treatment == 1);
        CHECK(e.df_error == 2);
        CHECK(e.signal_to_noise() == 3.5);
    }

    TEST_CASE("anova: identical replicates give zero uncertainty")
    {
        Matrix z(3, 2);
        z << 1, 1, 4, 4, 9, 9;
        const auto e = anova_components(z);
        CHECK(e.s_delta_sq == 0.0);
        CHECK(e.s_nu_sq > 0.0);
        CHECK(std::isinf(e.signal_to_noise()));

        const auto flat = anova_components(Matrix::Constant(4, 3, 2.5));
        CHECK(flat.s_delta_sq == 0.0);
        CHECK(flat.s_nu_sq == 0.0);
    }

    TEST_CASE("anova: negative signal estimate is clamped")
    {
        Matrix z(2, 2);
        z << 0, 10, 10, 0;
        const auto e = anova_components(z);
        CHECK(e.s_nu_sq == 0.0);
        CHECK(e.s_delta_sq == 50.0);
    }

    TEST_CASE("anova: precondition errors")
    {
        try {
            anova_components(Matrix::Ones(3, 1));
            FAIL("expected an error");
        } catch (const InputError& e) {
            CHECK(std::string(e.what()).find("replicates < 2") != std::string::npos);
        }
        CHECK_THROWS_AS(anova_components(Matrix::Ones(1, 3)), InputError);
    }

    TEST_CASE("anova: decomposition identity and permutation invariance")
    {
        Rng rng(21);
        Matrix z = testing::random_matrix(12, 3, rng);
        for (Index i = 0; i < 12; ++i) z.row(i).array() += 3.0 * rng.normal();
        const auto e = anova_components(z);
        REQUIRE(e.s_nu_sq > 0.0);
        CHECK(e.replicates * e.s_nu_sq + e.s_delta_sq == doctest::Approx(e.ss_treatment / 11.0).epsilon(1e-14));

        Matrix shuffled = z;
        shuffled.row(0).swap(shuffled.row(7));
        shuffled.row(3).swap(shuffled.row(11));
        const auto f = anova_components(shuffled);
        CHECK(f.s_delta_sq == doctest::Approx(e.s_delta_sq).epsilon(1e-14));
        CHECK(f.s_nu_sq == doctest::Approx(e.s_nu_sq).epsilon(1e-14));
    }

    TEST_CASE("anova: consistency at n = 2000, r = 2, sigma_delta^2 = 0.25")
    {
        int good = 0;
        constexpr int seeds = 40;
        for (int s = 0; s < seeds; ++s) {
            Rng rng(1000 + s);
            Matrix z(2000, 2);
            for (Index i = 0; i < 2000; ++i) {
                const double v = std::sqrt(0.75) * rng.normal();
                z(i, 0) = v + 0.5 * rng.normal();
                z(i, 1) = v + 0.5 * rng.normal();
            }
            const auto e = anova_components(z);
            good += std::abs(e.s_delta_sq - 0.25) / 0.25 < 0.1;
        }
        CHECK(good >= 38);
    }

    TEST_CASE("scaling matrix from estimates")
    {
        Vector v(3);
        v << 0.5, 0.25, 0.25;
        const auto D = build_scaling_matrix(v);
        CHECK(D.diag()[0] == std::sqrt(0.5));
        CHECK(D.diag()[1] == 0.5);
        CHECK(D.diag()[2] == 0.5);

        CHECK(build_scaling_matrix(Vector::Ones(3)).diag() == Vector::Ones(3));

        Vector w(2);
        w << 0.0, 1.0;
        const auto F = build_scaling_matrix(w, 1e-3);
        CHECK(F.diag()[0] == 1e-3);
        CHECK(F.diag()[1] == 1.0);

        CHECK_THROWS_AS(build_scaling_matrix(Vector::Zero(3)), NumericalError);
    }

    TEST_CASE("scaling matrix: floor uses the median of the positive entries")
    {
        Vector v(4);
        v << 0.0, 1.0, 4.0, 16.0;
        CHECK(build_scaling_matrix(v, 0.5).diag()[0] == 1.0);
        Vector u(3);
        u << 0.0, 1.0, 9.0;
        CHECK(build_scaling_matrix(u, 0.5).diag()[0] == 1.0);
    }

    TEST_CASE("standardized-scale conversion divides by r and sd^2")
    {
        AnovaEstimate e;
        e.s_delta_sq = 2.0;
        e.s_nu_sq = 8.0;
        e.replicates = 2;
        Vector sd(1);
        sd << 2.0;
        const auto out = to_standardized_scale({e}, sd);
        CHECK(out[0].s_delta_sq == 0.25);
        CHECK(out[0].s_nu_sq == 2.0);
    }

    TEST_CASE("per-variable and response ANOVA on a dataset")
    {
        Matrix r1(2, 2), r2(2, 2), y(2, 2);
        r1 << 1, 0, 5, 0;
        r2 << 3, 1, 7, 1;
        y << 1, 3, 5, 7;
        const ReplicatedDataset ds({r1, r2}, y, {});
        const auto est = anova_per_variable(ds);
        CHECK(est[0].s_delta_sq == 2.0);
        CHECK(est[0].s_nu_sq == 7.0);
        CHECK(est[1].s_delta_sq == 0.5);
        CHECK(anova_response(ds).s_nu_sq == 7.0);
    }
}
