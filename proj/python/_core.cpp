#include <eivsparse/eivsparse.hpp>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <fstream>

namespace py = pybind11;
using namespace pybind11::literals;
using namespace eivsparse;

namespace {

std::optional<ScalingMatrix> scaling(const std::optional<Vector>& d)
{
    if (!d) return std::nullopt;
    return ScalingMatrix(*d);
}

Matrix path_coefficients(const SolutionPath& path)
{
    if (path.steps.empty()) return Matrix(0, 0);
    Matrix out(static_cast<Index>(path.size()), path.steps.front().beta.size());
    for (std::size_t s = 0; s < path.size(); ++s) out.row(static_cast<Index>(s)) = path.steps[s].beta.transpose();
    return out;
}

Vector path_column(const SolutionPath& path, double PathStep::*field)
{
    Vector out(static_cast<Index>(path.size()));
    for (std::size_t s = 0; s < path.size(); ++s) out[static_cast<Index>(s)] = path.steps[s].*field;
    return out;
}

py::dict anova_dict(const AnovaEstimate& e)
{
    return py::dict("s_delta_sq"_a = e.s_delta_sq, "s_nu_sq"_a = e.s_nu_sq, "ss_treatment"_a = e.ss_treatment,
                    "ss_error"_a = e.ss_error, "df_treatment"_a = e.df_treatment, "df_error"_a = e.df_error,
                    "signal_to_noise"_a = e.signal_to_noise());
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Sparse regression under design uncertainty";
    m.attr("__version__") = version;

    py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

    py::class_<ReplicatedDataset>(m, "Dataset", "Replicated measurements: r design matrices (n x p) and an n x r_y response")
        .def(py::init<std::vector<Matrix>, Matrix, std::vector<std::string>, std::vector<std::string>, std::string>(),
             "design_replicates"_a, "response_replicates"_a, "sample_ids"_a = std::vector<std::string>{},
             "predictor_names"_a = std::vector<std::string>{}, "response_name"_a = "y")
        .def_property_readonly("samples", &ReplicatedDataset::samples)
        .def_property_readonly("predictors", &ReplicatedDataset::predictors)
        .def_property_readonly("replicates", &ReplicatedDataset::replicates)
        .def_property_readonly("response_replicates", &ReplicatedDataset::response_replicates)
        .def_property_readonly("design", &ReplicatedDataset::design_replicates)
        .def_property_readonly("response", &ReplicatedDataset::response_replicates_matrix)
        .def_property_readonly("sample_ids", &ReplicatedDataset::sample_ids)
        .def_property_readonly("predictor_names", &ReplicatedDataset::predictor_names)
        .def_property_readonly("response_name", &ReplicatedDataset::response_name)
        .def("subset", [](const ReplicatedDataset& ds, std::vector<Index> rows) { return ds.subset(rows); }, "rows"_a)
        .def("collapse", [](const ReplicatedDataset& ds) {
            const CollapsedData c = collapse_replicates(ds);
            return py::make_tuple(c.design, c.response);
        }, "Replicate means: (n x p design, n response)")
        .def("__repr__", [](const ReplicatedDataset& ds) {
            return "<Dataset samples=" + std::to_string(ds.samples()) + " predictors=" +
                   std::to_string(ds.predictors()) + " replicates=" + std::to_string(ds.replicates()) + ">";
        });

    m.def("load_csv", [](const std::filesystem::path& path, const std::string& sample, const std::string& replicate,
                         const std::string& response, std::vector<std::string> predictors) {
        return load_replicated_csv(path, CsvSchema{sample, replicate, response, std::move(predictors)});
    }, "path"_a, "sample_col"_a = "sample", "replicate_col"_a = "replicate", "response_col"_a = "y",
          "predictors"_a = std::vector<std::string>{}, "Read a long-form replicated CSV.");
    m.def("save_csv", [](const ReplicatedDataset& ds, const std::filesystem::path& path) {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw InputError("cannot write " + path.string());
        write_replicated_csv(out, ds);
    }, "dataset"_a, "path"_a);

    m.def("anova", [](const Matrix& values) { return anova_dict(anova_components(values)); }, "values"_a,
          "One-way ANOVA of an n x r matrix of replicates.");
    m.def("anova_per_variable", [](const ReplicatedDataset& ds) {
        py::list out;
        for (const auto& e : anova_per_variable(ds)) out.append(anova_dict(e));
        return out;
    }, "dataset"_a);
    m.def("scaling_diagonal", [](const Vector& s_delta_sq, double floor_rel) {
        return build_scaling_matrix(s_delta_sq, floor_rel).diag();
    }, "s_delta_sq"_a, "floor_rel"_a = 1e-6, "Floored uncertainty standard deviations.");

    py::class_<SolutionPath>(m, "Path")
        .def_readonly("solver", &SolutionPath::solver)
        .def_readonly("scaled", &SolutionPath::scaled)
        .def_readonly("truncated", &SolutionPath::truncated)
        .def_readonly("ignored", &SolutionPath::ignored)
        .def_readonly("warnings", &SolutionPath::warnings)
        .def_property_readonly("coefficients", &path_coefficients, "steps x p coefficient matrix")
        .def_property_readonly("rss", [](const SolutionPath& p) { return path_column(p, &PathStep::rss); })
        .def_property_readonly("l1_norm", [](const SolutionPath& p) { return path_column(p, &PathStep::l1_norm); })
        .def_property_readonly("uncertainty", [](const SolutionPath& p) { return path_column(p, &PathStep::uncertainty); })
        .def_property_readonly("lambdas", [](const SolutionPath& p) { return path_column(p, &PathStep::lambda); })
        .def_property_readonly("active_sets", [](const SolutionPath& p) {
            std::vector<IndexSet> out;
            for (const auto& s : p.steps) out.push_back(s.active_set);
            return out;
        })
        .def("__len__", &SolutionPath::size)
        .def("to_json", [](const SolutionPath& p) { return path_to_json(p); });

    m.def("forward_stagewise", [](const Matrix& X, const Vector& y, std::optional<double> gamma, Index max_steps,
                                  double corr_tol, Index record_every) {
        return forward_stagewise(X, y, StagewiseOptions{gamma, max_steps, corr_tol, record_every});
    }, "X"_a, "y"_a, "gamma"_a = py::none(), "max_steps"_a = 100000, "corr_tol"_a = 1e-4, "record_every"_a = 1);
    m.def("lars", [](const Matrix& X, const Vector& y, bool lasso, bool truncate_on_collinear) {
        LarsOptions o;
        o.mode = lasso ? LarsMode::lasso : LarsMode::plain;
        o.on_collinear = truncate_on_collinear ? CollinearPolicy::truncate : CollinearPolicy::skip;
        return lars_path(X, y, o);
    }, "X"_a, "y"_a, "lasso"_a = true, "truncate_on_collinear"_a = false);
    m.def("lasso_objective", [](const Vector& beta, const Matrix& X, const Vector& y, double lambda,
                                const std::optional<Vector>& D) { return lasso_objective(beta, X, y, lambda, scaling(D)); },
          "beta"_a, "X"_a, "y"_a, "lam"_a, "D"_a = py::none());
    m.def("path_uncertainty", [](const SolutionPath& path, const Vector& S, bool coefficients_are_scaled,
                                 const std::optional<Vector>& D) {
        return path_uncertainty(path, ScalingMatrix(S), coefficients_are_scaled, scaling(D));
    }, "path"_a, "S"_a, "coefficients_are_scaled"_a = false, "D"_a = py::none());
    m.def("design_uncertainty", [](const Vector& beta, const Vector& S) {
        return design_uncertainty(beta, ScalingMatrix(S));
    }, "beta"_a, "S"_a, "||S beta||_2");

    m.def("dantzig", [](const Matrix& X, const Vector& y, double lam, double sigma_eps, const std::optional<Vector>& D) {
        const DantzigSolution s = solve_dantzig(DantzigProblem{X, y, lam, sigma_eps, scaling(D)});
        return py::make_tuple(s.beta, s.objective, std::string(to_string(s.status)));
    }, "X"_a, "y"_a, "lam"_a, "sigma_eps"_a = 1.0, "D"_a = py::none(), "Returns (beta, objective, status).");
    m.def("dantzig_grid", [](const Matrix& X, const Vector& y, double sigma_eps, const std::optional<Vector>& D,
                             Index count, double ratio) {
        return default_dantzig_grid(X, y, sigma_eps, scaling(D), count, ratio);
    }, "X"_a, "y"_a, "sigma_eps"_a = 1.0, "D"_a = py::none(), "count"_a = 50, "ratio"_a = 1e-3);
    m.def("dantzig_path", [](const Matrix& X, const Vector& y, double sigma_eps, const Vector& grid,
                             const std::optional<Vector>& D) { return dantzig_path(X, y, sigma_eps, grid, scaling(D)); },
          "X"_a, "y"_a, "sigma_eps"_a, "grid"_a, "D"_a = py::none());

    m.def("ridge", &ridge_fit, "X"_a, "y"_a, "lam"_a, "(X'X + lam I)^-1 X'y");

    py::class_<CvResult>(m, "CvResult")
        .def_property_readonly("method", [](const CvResult& r) { return std::string(to_string(r.method)); })
        .def_readonly("scaled", &CvResult::scaled)
        .def_readonly("k", &CvResult::k)
        .def_readonly("outer_loops", &CvResult::outer_loops)
        .def_readonly("seed", &CvResult::seed)
        .def_readonly("msep", &CvResult::msep)
        .def_readonly("se", &CvResult::se)
        .def_readonly("uncertainty", &CvResult::uncertainty)
        .def_readonly("nonzeros", &CvResult::nonzeros)
        .def_readonly("optimal_index", &CvResult::optimal_index)
        .def_readonly("selected_support", &CvResult::selected_support)
        .def_readonly("nonzero_count", &CvResult::nonzero_count)
        .def_readonly("selected_beta", &CvResult::selected_beta)
        .def_readonly("refit_msep", &CvResult::refit_msep)
        .def_readonly("refit_se", &CvResult::refit_se)
        .def_readonly("models", &CvResult::models)
        .def_readonly("failures", &CvResult::failures)
        .def_readonly("unreliable", &CvResult::unreliable)
        .def_readonly("warnings", &CvResult::warnings)
        .def("to_json", [](const CvResult& r) { return cv_result_to_json(r); });

    m.def("cross_validate", [](const ReplicatedDataset& ds, const std::string& method, bool scaled, Index k,
                               Index outer_loops, std::uint64_t seed, bool refit_ridge, Index threads,
                               double floor_rel, std::optional<double> sigma_eps) {
        CvConfig c;
        c.method = parse_cv_method(method);
        c.scaled = scaled;
        c.refit_ridge = refit_ridge;
        c.threads = threads;
        c.floor_rel = floor_rel;
        c.sigma_eps = sigma_eps;
        const CvPlan plan = make_folds(ds, k, outer_loops, seed);
        py::gil_scoped_release release;
        return nested_kfold_cv(ds, plan, c);
    }, "dataset"_a, "method"_a = "lars", "scaled"_a = false, "k"_a = 10, "outer_loops"_a = 0, "seed"_a = 1,
          "refit_ridge"_a = false, "threads"_a = 1, "floor_rel"_a = 1e-6, "sigma_eps"_a = py::none(),
          "Nested repeated k-fold cross-validation; method is fs, lars, dantzig or ridge-all.");
    m.def("selection_agreement", [](const IndexSet& a, const IndexSet& b) {
        const SelectionAgreement s = selection_agreement(a, b);
        return py::dict("frac_a_in_b"_a = s.frac_a_in_b, "frac_b_in_a"_a = s.frac_b_in_a, "jaccard"_a = s.jaccard);
    }, "a"_a, "b"_a);

    const auto unpack = [](const SyntheticData& d) {
        return py::dict("dataset"_a = d.ds, "V"_a = d.V, "w"_a = d.w, "beta"_a = d.beta);
    };
    m.def("generate", [unpack](Index n, const Vector& beta, double sigma_eps, const Vector& sigma_delta,
                               const Matrix& v_covariance, Index r, std::uint64_t seed, bool enforce_response) {
        ModelSpec s;
        s.n = n;
        s.p = beta.size();
        s.r = r;
        s.beta = beta;
        s.sigma_eps = sigma_eps;
        s.sigma_delta = sigma_delta;
        s.v_covariance = v_covariance;
        s.seed = seed;
        s.enforce_response_unit_variance = enforce_response;
        return unpack(generate_dataset(s));
    }, "n"_a, "beta"_a, "sigma_eps"_a, "sigma_delta"_a, "v_covariance"_a, "r"_a = 2, "seed"_a = 0,
          "enforce_response_unit_variance"_a = true,
          "Draw from the measurement-error model; returns dataset, V, w and beta.");
    m.def("toy_example", [unpack](Index n, std::uint64_t seed) { return unpack(toy_example(n, seed)); }, "n"_a,
          "seed"_a = 0);
    m.def("heteroscedastic_ensemble", [unpack](std::uint64_t seed, Index n, Index p, Index r, Index sparsity,
                                                double rho, double sigma_eps_sq) {
        EnsembleOptions o;
        o.n = n;
        o.p = p;
        o.r = r;
        o.sparsity = sparsity;
        o.rho = rho;
        o.sigma_eps_sq = sigma_eps_sq;
        const ModelSpec s = heteroscedastic_spec(o, seed);
        py::dict d = unpack(generate_dataset(s));
        d["sigma_delta"] = s.sigma_delta;
        d["sigma_eps"] = s.sigma_eps;
        return d;
    }, "seed"_a, "n"_a = 200, "p"_a = 40, "r"_a = 2, "sparsity"_a = 8, "rho"_a = 0.5, "sigma_eps_sq"_a = 0.1);
    m.def("attenuation_experiment", [](double s_nu, double s_delta, Index n, Index trials, std::uint64_t seed) {
        const MonteCarloEstimate e = attenuation_experiment(s_nu, s_delta, n, trials, seed);
        return py::make_tuple(e.mean, e.se);
    }, "sigma_nu_sq"_a, "sigma_delta_sq"_a, "n"_a = 1000, "trials"_a = 1000, "seed"_a = 0,
          "Mean OLS slope and its standard error.");
}
