#include "unit/helpers.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace eivsparse;

namespace {

SyntheticData small_ensemble(std::uint64_t seed, Index n = 40, Index p = 6)
{
    EnsembleOptions o;
    o.n = n;
    o.p = p;
    o.sparsity = 2;
    return generate_dataset(heteroscedastic_spec(o, seed));
}

} // namespace

TEST_SUITE("cv")
{
    TEST_CASE("folds: sizes, loops and determinism")
    {
        const auto plan = make_folds(10, 2, 0, 4);
        CHECK(plan.outer_loops == 50);
        CHECK(plan.models() == 100);
        for (const auto& f : plan.fold_of) CHECK(std::count(f.begin(), f.end(), 0) == 5);

        const auto ten = make_folds(23, 10, 0, 4);
        CHECK(ten.outer_loops == 10);
        CHECK(ten.models() == 100);
        for (const auto& f : ten.fold_of) {
            for (Index k = 0; k < 10; ++k) {
                const auto c = std::count(f.begin(), f.end(), k);
                CHECK((c == 2 || c == 3));
            }
        }
        CHECK(make_folds(23, 10, 0, 4).fold_of == ten.fold_of);
        CHECK(make_folds(23, 10, 0, 5).fold_of != ten.fold_of);
        CHECK(default_outer_loops(3) == 33);
        CHECK(default_outer_loops(200) == 1);
        CHECK_THROWS_AS(make_folds(5, 6, 0, 1), InputError);
        CHECK_THROWS_AS(make_folds(5, 1, 0, 1), InputError);
    }

    TEST_CASE("select_optimal and selection_agreement")
    {
        CHECK(select_optimal(Vector(Eigen::Vector3d(3, 1, 2))) == 1);
        CHECK(select_optimal(Vector(Eigen::Vector3d(3, 2, 1))) == 2);
        CHECK(select_optimal(Vector(Eigen::Vector3d(2, 1, 1))) == 1);

        auto a = selection_agreement({1, 2, 3}, {1, 2, 3});
        CHECK(a.jaccard == 1.0);
        a = selection_agreement({1}, {2});
        CHECK(a.frac_a_in_b == 0.0);
        CHECK(a.frac_b_in_a == 0.0);
        CHECK(a.jaccard == 0.0);
        a = selection_agreement({1, 2, 3, 4}, {3, 4, 5});
        CHECK(a.frac_a_in_b == 0.5);
        CHECK(a.frac_b_in_a == doctest::Approx(2.0 / 3.0));
        CHECK(a.jaccard == doctest::Approx(2.0 / 5.0));
    }

    TEST_CASE("noiseless single predictor")
    {
        Rng rng(3);
        Matrix x(20, 1);
        for (Index i = 0; i < 20; ++i) x(i, 0) = rng.normal();
        const ReplicatedDataset ds({x, x}, Matrix(x), {});
        for (Index k : {2, 5}) {
            CvConfig cfg;
            const auto res = nested_kfold_cv(ds, make_folds(ds, k, 0, 1), cfg);
            CHECK(res.msep.minCoeff() < 1e-10);
            CHECK(res.failures == 0);
        }
    }

    TEST_CASE("isotropic scaling changes neither selection nor predictions")
    {
        const auto d = small_ensemble(10);
        const PreparedDesign plain = prepare_design(d.ds, false);
        PreparedDesign iso = plain;
        iso.D = ScalingMatrix(Vector::Constant(d.ds.predictors(), 0.37));
        iso.X = apply_scaling(plain.X, *iso.D);
        const Matrix raw = collapse_replicates(d.ds).design;
        for (auto method : {CvMethod::lars, CvMethod::fs, CvMethod::dantzig}) {
            CvConfig cfg;
            cfg.method = method;
            cfg.dantzig_grid_size = 10;
            const auto a = fit_path(plain, cfg);
            const auto b = fit_path(iso, cfg);
            REQUIRE(a.size() == b.size());
            for (std::size_t s = 0; s < a.size(); ++s) {
                CHECK(a.steps[s].active_set == b.steps[s].active_set);
                const Vector pa = plain.transform(raw) * a.steps[s].beta;
                const Vector pb = iso.transform(raw) * b.steps[s].beta;
                CHECK((pa - pb).cwiseAbs().maxCoeff() < 1e-8);
            }
        }
    }

    TEST_CASE("no leakage: test rows never influence the scaling")
    {
        const auto d = small_ensemble(11);
        const auto plan = make_folds(d.ds, 5, 2, 3);
        CvConfig cfg;
        cfg.scaled = true;
        cfg.capture_scalings = true;
        const auto before = nested_kfold_cv(d.ds, plan, cfg);

        std::vector<Matrix> reps = d.ds.design_replicates();
        Matrix resp = d.ds.response_replicates_matrix();
        for (Index i = 0; i < d.ds.samples(); ++i) {
            if (plan.fold_of[0][static_cast<std::size_t>(i)] != 0) continue;
            reps[0].row(i).array() += 1e3;
            reps[1].row(i).array() -= 7e2;
            resp.row(i).array() *= 50.0;
        }
        const ReplicatedDataset poisoned(reps, resp, d.ds.sample_ids());
        const auto after = nested_kfold_cv(poisoned, plan, cfg);
        REQUIRE(before.fold_scalings.size() == 10);
        CHECK(before.fold_scalings[0] == after.fold_scalings[0]);
        CHECK(before.fold_scalings[1] != after.fold_scalings[1]);
    }

    TEST_CASE("determinism and thread independence")
    {
        const auto d = small_ensemble(12);
        const auto plan = make_folds(d.ds, 4, 3, 9);
        CvConfig cfg;
        cfg.scaled = true;
        cfg.refit_ridge = true;
        const auto a = cv_result_to_json(nested_kfold_cv(d.ds, plan, cfg));
        const auto b = cv_result_to_json(nested_kfold_cv(d.ds, plan, cfg));
        cfg.threads = 3;
        const auto c = cv_result_to_json(nested_kfold_cv(d.ds, plan, cfg));
        CHECK(a == b);
        CHECK(a == c);
    }

    TEST_CASE("every method produces finite curves of consistent length")
    {
        const auto d = small_ensemble(13);
        const auto plan = make_folds(d.ds, 4, 2, 1);
        for (auto method : {CvMethod::fs, CvMethod::lars, CvMethod::dantzig, CvMethod::ridge_all}) {
            for (bool scaled : {false, true}) {
                CvConfig cfg;
                cfg.method = method;
                cfg.scaled = scaled;
                cfg.refit_ridge = true;
                cfg.dantzig_grid_size = 15;
                const auto res = nested_kfold_cv(d.ds, plan, cfg);
                CAPTURE(to_string(method));
                CHECK(res.failures == 0);
                CHECK_FALSE(res.unreliable);
                CHECK(res.msep.allFinite());
                CHECK((res.msep.array() > 0.0).all());
                CHECK(res.se.size() == res.msep.size());
                CHECK(res.uncertainty.size() == res.msep.size());
                CHECK(res.optimal_index < res.msep.size());
                CHECK(res.nonzero_count == static_cast<Index>(res.selected_support.size()));
                CHECK(std::isfinite(res.refit_msep));
                if (method == CvMethod::dantzig) CHECK(res.msep.size() == 15);
                if (method == CvMethod::ridge_all) CHECK(res.msep.size() == 30);
            }
        }
    }

    TEST_CASE("plan mismatch and method names")
    {
        const auto d = small_ensemble(14);
        CHECK_THROWS_AS(nested_kfold_cv(d.ds, make_folds(10, 2, 1, 1), {}), InputError);
        CHECK(parse_cv_method("ridge-all") == CvMethod::ridge_all);
        CHECK_THROWS_AS(parse_cv_method("svm"), InputError);
    }
}
