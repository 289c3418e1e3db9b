#include "unit/helpers.hpp"

#include <doctest.h>
#include <json.hpp>

#include <sstream>

using namespace eivsparse;

TEST_SUITE("export")
{
    TEST_CASE("path csv and json")
    {
        const auto d = testing::random_standardized(15, 4, 2);
        const auto path = lars_path(d.X, d.y);
        std::ostringstream csv;
        write_path_csv(csv, path);
        std::istringstream lines(csv.str());
        std::string header, first, second;
        std::getline(lines, header);
        std::getline(lines, first);
        std::getline(lines, second);
        CHECK(header == "step,lambda,l1_norm,rss,uncertainty,nonzeros,coefficients");
        CHECK(first.substr(0, 2) == "0,");
        CHECK(second.find(':') != std::string::npos);

        const auto j = nlohmann::json::parse(path_to_json(path, {"a", "b", "c", "d"}));
        CHECK(j["solver"].get<std::string>().rfind("lars", 0) == 0);
        CHECK(j["steps"].size() == path.size());
        CHECK(j["steps"][1]["active_set"].size() == 1);
        // Round-trip precision.
        CHECK(j["steps"][1]["lambda"].get<double>() == path.steps[1].lambda);
    }

    TEST_CASE("cv json and curves")
    {
        const auto s = heteroscedastic_spec({.n = 30, .p = 5, .r = 2, .sparsity = 2}, 3);
        const auto data = generate_dataset(s);
        const auto res = nested_kfold_cv(data.ds, make_folds(data.ds, 3, 2, 1), {});
        const auto j = nlohmann::json::parse(cv_result_to_json(res, data.ds.predictor_names()));
        CHECK(j["k"] == 3);
        CHECK(j["msep"].size() == static_cast<std::size_t>(res.msep.size()));
        CHECK(j["nonzero_count"] == res.nonzero_count);
        for (const auto& v : j["selected_support"]) CHECK((v.get<int>() >= 1 && v.get<int>() <= 5));

        std::ostringstream csv;
        write_cv_curves_csv(csv, res);
        CHECK(csv.str().rfind("step,msep,se,uncertainty,nonzeros\n", 0) == 0);
    }

    TEST_CASE("anova csv")
    {
        AnovaEstimate e;
        e.s_delta_sq = 2;
        e.s_nu_sq = 7;
        std::ostringstream out;
        write_anova_csv(out, {"x"}, {e});
        CHECK(out.str() == "variable,s_delta_sq,s_nu_sq,signal_to_noise\nx,2,7,3.5\n");
    }
}
