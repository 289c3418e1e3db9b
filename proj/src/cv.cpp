#include "eivsparse/cv.hpp"

#include "eivsparse/error.hpp"
#include "eivsparse/ridge.hpp"
#include "eivsparse/variance.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <thread>

namespace eivsparse {

using detail::require;

std::vector<Index> partition_samples(Index n, Index k, Rng& rng)
{
    require(k >= 2, "partition_samples: k must be >= 2");
    require(n >= k, "partition_samples: n < k leaves an empty fold");
    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    for (Index i = n - 1; i > 0; --i) {
        const auto j = static_cast<Index>(rng.below(static_cast<std::uint64_t>(i + 1)));
        std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
    }
    std::vector<Index> fold(static_cast<std::size_t>(n));
    for (Index pos = 0; pos < n; ++pos) fold[static_cast<std::size_t>(order[static_cast<std::size_t>(pos)])] = pos % k;
    return fold;
}

Index default_outer_loops(Index k)
{
    require(k >= 1, "default_outer_loops: k must be >= 1");
    return std::max<Index>(1, static_cast<Index>(std::lround(100.0 / static_cast<double>(k))));
}

CvPlan make_folds(Index samples, Index k, Index outer_loops, std::uint64_t seed)
{
    require(k >= 2, "make_folds: k must be >= 2");
    require(samples >= k, "make_folds: n < k");
    CvPlan plan;
    plan.k = k;
    plan.outer_loops = outer_loops > 0 ? outer_loops : default_outer_loops(k);
    plan.seed = seed;
    const Rng root = Rng(seed).split(stream_tag("folds"));
    for (Index loop = 0; loop < plan.outer_loops; ++loop) {
        Rng rng = root.split(static_cast<std::uint64_t>(loop));
        plan.fold_of.push_back(partition_samples(samples, k, rng));
    }
    return plan;
}

CvPlan make_folds(const ReplicatedDataset& ds, Index k, Index outer_loops, std::uint64_t seed)
{
    return make_folds(ds.samples(), k, outer_loops, seed);
}

const char* to_string(CvMethod m)
{
    switch (m) {
    case CvMethod::fs: return "fs";
    case CvMethod::lars: return "lars";
    case CvMethod::dantzig: return "dantzig";
    case CvMethod::ridge_all: return "ridge-all";
    }
    return "unknown";
}

CvMethod parse_cv_method(std::string_view name)
{
    if (name == "fs") return CvMethod::fs;
    if (name == "lars") return CvMethod::lars;
    if (name == "dantzig") return CvMethod::dantzig;
    if (name == "ridge-all" || name == "ridge_all") return CvMethod::ridge_all;
    throw InputError("unknown method '" + std::string(name) + "' (expected fs, lars, dantzig, ridge-all)");
}

Matrix PreparedDesign::transform(const Matrix& raw) const
{
    Matrix Z = standardized.transform(raw);
    return D ? apply_scaling(Z, *D) : Z;
}

Vector PreparedDesign::original_coefficients(const Vector& beta) const
{
    return D ? unscale_coefficients(beta, *D) : beta;
}

PreparedDesign prepare_design(const ReplicatedDataset& train, bool scaled, double floor_rel,
                              std::optional<double> sigma_eps)
{
    require(floor_rel > 0.0, "floor_rel must be > 0");
    const CollapsedData collapsed = collapse_replicates(train);
    PreparedDesign prep;
    prep.standardized = standardize(collapsed.design, collapsed.response);
    const Index p = train.predictors();

    Vector s_delta_sq = Vector::Zero(p);
    if (train.replicates() >= 2) {
        const auto est = to_standardized_scale(anova_per_variable(train), prep.standardized.column_sds);
        for (Index j = 0; j < p; ++j) s_delta_sq[j] = est[static_cast<std::size_t>(j)].s_delta_sq;
    } else if (scaled) {
        throw InputError("scaling needs replicates >= 2 (replicates < 2)");
    }
    prep.uncertainty_sd = s_delta_sq.cwiseSqrt();

    if (scaled) {
        try {
            prep.D = build_scaling_matrix(s_delta_sq, floor_rel);
        } catch (const NumericalError&) {
            prep.warnings.emplace_back("all uncertainty estimates are zero; design left unscaled");
        }
    }
    prep.X = prep.D ? apply_scaling(prep.standardized.X, *prep.D) : prep.standardized.X;

    if (sigma_eps) {
        require(*sigma_eps > 0.0 && std::isfinite(*sigma_eps), "sigma_eps must be > 0");
        prep.sigma_eps = *sigma_eps;
    } else {
        prep.sigma_eps = 1.0;
        if (train.response_replicates() >= 2) {
            const AnovaEstimate e = anova_response(train);
            const double s = std::sqrt(e.s_delta_sq / static_cast<double>(e.replicates)) /
                             prep.standardized.y_sd;
            if (s > 0.0 && std::isfinite(s)) prep.sigma_eps = s;
        }
    }
    return prep;
}

SolutionPath fit_path(const PreparedDesign& prep, const CvConfig& config)
{
    const Matrix& X = prep.X;
    const Vector& y = prep.standardized.y;
    SolutionPath path;
    switch (config.method) {
    case CvMethod::fs: path = forward_stagewise(X, y, config.stagewise); break;
    case CvMethod::lars: path = lars_path(X, y, config.lars); break;
    case CvMethod::dantzig: {
        const Vector grid = default_dantzig_grid(X, y, prep.sigma_eps, std::nullopt,
                                                 config.dantzig_grid_size, config.dantzig_grid_ratio);
        path = dantzig_path(X, y, prep.sigma_eps, grid, std::nullopt, config.dantzig);
        if (static_cast<Index>(path.size()) != grid.size())
            throw NumericalError("Dantzig path lost grid points: " +
                                 (path.warnings.empty() ? std::string("unknown") : path.warnings.front()));
        break;
    }
    case CvMethod::ridge_all: {
        const Vector grid = default_ridge_grid(X);
        path.solver = "ridge";
        for (Index g = grid.size() - 1; g >= 0; --g)
            path.steps.push_back(make_step(X, y, ridge_fit(X, y, grid[g]), grid[g]));
        break;
    }
    }
    path.scaled = prep.D.has_value();
    for (const auto& w : prep.warnings) path.warnings.push_back(w);
    return path;
}

Index select_optimal(const Vector& msep_curve)
{
    require(msep_curve.size() >= 1, "select_optimal: empty curve");
    Index best = 0;
    for (Index i = 1; i < msep_curve.size(); ++i)
        if (msep_curve[i] < msep_curve[best]) best = i;
    return best;
}

Index select_optimal(const CvResult& result) { return select_optimal(result.msep); }

SelectionAgreement selection_agreement(const IndexSet& a, const IndexSet& b)
{
    const std::set<Index> sa(a.begin(), a.end());
    const std::set<Index> sb(b.begin(), b.end());
    std::size_t common = 0;
    for (Index j : sa) common += sb.count(j);
    const std::size_t uni = sa.size() + sb.size() - common;
    SelectionAgreement out;
    out.frac_a_in_b = sa.empty() ? 1.0 : static_cast<double>(common) / static_cast<double>(sa.size());
    out.frac_b_in_a = sb.empty() ? 1.0 : static_cast<double>(common) / static_cast<double>(sb.size());
    out.jaccard = uni == 0 ? 1.0 : static_cast<double>(common) / static_cast<double>(uni);
    return out;
}

namespace {

struct ModelOutcome
{
    bool failed = false;
    std::string error;
    // Per path step.
    std::vector<double> mse;
    std::vector<double> uncertainty;
    std::vector<double> nonzeros;
    std::vector<IndexSet> supports;
    Vector scaling;
    double refit_mse = std::numeric_limits<double>::quiet_NaN();
};

struct FoldSplit
{
    std::vector<Index> train;
    std::vector<Index> test;
};

FoldSplit split_of(const CvPlan& plan, Index loop, Index fold)
{
    FoldSplit s;
    const auto& f = plan.fold_of[static_cast<std::size_t>(loop)];
    for (Index i = 0; i < plan.samples(); ++i) (f[static_cast<std::size_t>(i)] == fold ? s.test : s.train).push_back(i);
    return s;
}

std::uint64_t ridge_seed(std::uint64_t seed, Index loop, Index fold)
{
    return Rng(seed).split(stream_tag("ridge"), static_cast<std::uint64_t>(loop), static_cast<std::uint64_t>(fold))();
}

ModelOutcome evaluate_model(const ReplicatedDataset& ds, const CvPlan& plan, const CvConfig& config,
                            Index loop, Index fold)
{
    ModelOutcome out;
    try {
        const FoldSplit split = split_of(plan, loop, fold);
        const ReplicatedDataset train = ds.subset(split.train);
        const ReplicatedDataset test = ds.subset(split.test);
        const PreparedDesign prep = prepare_design(train, config.scaled, config.floor_rel, config.sigma_eps);
        if (config.capture_scalings) out.scaling = prep.D ? prep.D->diag() : Vector::Ones(ds.predictors());

        const SolutionPath path = fit_path(prep, config);
        require(path.size() >= 1, "solver returned an empty path");
        const CollapsedData te = collapse_replicates(test);
        const Matrix Xte = prep.transform(te.design);
        for (const PathStep& step : path.steps) {
            const Vector pred = prep.standardized.response_to_raw(Xte * step.beta);
            out.mse.push_back((te.response - pred).squaredNorm() / static_cast<double>(te.response.size()));
            out.uncertainty.push_back(prep.uncertainty_sd.cwiseProduct(prep.original_coefficients(step.beta)).norm());
            out.nonzeros.push_back(static_cast<double>(step.active_set.size()));
            out.supports.push_back(step.active_set);
            if (!std::isfinite(out.mse.back())) throw NumericalError("non-finite prediction error");
        }
    } catch (const std::exception& e) {
        out = ModelOutcome{};
        out.failed = true;
        out.error = e.what();
    }
    return out;
}

double refit_model(const ReplicatedDataset& ds, const CvPlan& plan, const CvConfig& config, Index loop,
                   Index fold, const IndexSet& support)
{
    const FoldSplit split = split_of(plan, loop, fold);
    const ReplicatedDataset train = ds.subset(split.train);
    const ReplicatedDataset test = ds.subset(split.test);
    const PreparedDesign prep = prepare_design(train, config.scaled, config.floor_rel, config.sigma_eps);
    const Index inner_k = std::min<Index>(config.ridge_k, train.samples());
    const RidgeFit fit =
        ridge_cv(prep.X, prep.standardized.y, support,
                 default_ridge_grid(support.empty() ? prep.X : prep.X(Eigen::all, support)),
                 inner_k, ridge_seed(plan.seed, loop, fold));
    const CollapsedData te = collapse_replicates(test);
    const Vector pred = prep.standardized.response_to_raw(fit.predict(prep.transform(te.design)));
    return (te.response - pred).squaredNorm() / static_cast<double>(te.response.size());
}

template <class F>
void for_each_model(Index count, Index threads, F&& body)
{
    const Index workers = std::clamp<Index>(threads, 1, std::max<Index>(1, count));
    if (workers == 1) {
        for (Index i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<Index> next{0};
    std::vector<std::thread> pool;
    for (Index w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (Index i = next++; i < count; i = next++) body(i);
        });
    for (auto& t : pool) t.join();
}

std::pair<double, double> mean_and_se(const std::vector<double>& v)
{
    const auto m = static_cast<double>(v.size());
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= m;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    const double se = v.size() > 1 ? std::sqrt(ss / (m - 1.0) / m) : 0.0;
    return {mean, se};
}

} // namespace

CvResult nested_kfold_cv(const ReplicatedDataset& ds, const CvPlan& plan, const CvConfig& config)
{
    require(plan.k >= 2, "CV plan: k must be >= 2");
    require(plan.samples() == ds.samples(), "CV plan does not match the dataset sample count");
    require(static_cast<Index>(plan.fold_of.size()) == plan.outer_loops, "CV plan: loop count mismatch");
    require(config.threads >= 1, "threads must be >= 1");

    const Index models = plan.models();
    std::vector<ModelOutcome> outcomes(static_cast<std::size_t>(models));
    for_each_model(models, config.threads, [&](Index m) {
        outcomes[static_cast<std::size_t>(m)] = evaluate_model(ds, plan, config, m / plan.k, m % plan.k);
    });

    CvResult res;
    res.method = config.method;
    res.scaled = config.scaled;
    res.refit_ridge = config.refit_ridge;
    res.k = plan.k;
    res.outer_loops = plan.outer_loops;
    res.seed = plan.seed;
    res.models = models;

    std::size_t length = 0;
    std::vector<std::size_t> ok;
    for (std::size_t m = 0; m < outcomes.size(); ++m) {
        const auto& o = outcomes[m];
        if (config.capture_scalings) res.fold_scalings.push_back(o.scaling);
        if (o.failed) {
            ++res.failures;
            res.warnings.push_back("model " + std::to_string(m) + " failed: " + o.error);
            continue;
        }
        ok.push_back(m);
        length = std::max(length, o.mse.size());
    }
    if (ok.empty()) throw NumericalError("every cross-validation model failed" +
                                         (outcomes.empty() ? std::string() : ": " + outcomes.front().error));
    res.unreliable = static_cast<double>(res.failures) > 0.1 * static_cast<double>(models);

    const auto L = static_cast<Index>(length);
    res.msep.resize(L);
    res.se.resize(L);
    res.uncertainty.resize(L);
    res.nonzeros.resize(L);
    std::vector<double> column(ok.size());
    for (Index s = 0; s < L; ++s) {
        const auto at = [&](const std::vector<double>& v) { return v[std::min(static_cast<std::size_t>(s), v.size() - 1)]; };
        double unc = 0.0, nz = 0.0;
        for (std::size_t i = 0; i < ok.size(); ++i) {
            const auto& o = outcomes[ok[i]];
            column[i] = at(o.mse);
            unc += at(o.uncertainty);
            nz += at(o.nonzeros);
        }
        const auto [mean, se] = mean_and_se(column);
        res.msep[s] = mean;
        res.se[s] = se;
        res.uncertainty[s] = unc / static_cast<double>(ok.size());
        res.nonzeros[s] = nz / static_cast<double>(ok.size());
    }
    res.optimal_index = select_optimal(res.msep);

    res.refit_msep = std::numeric_limits<double>::quiet_NaN();
    res.refit_se = std::numeric_limits<double>::quiet_NaN();
    if (config.refit_ridge) {
        const auto opt = static_cast<std::size_t>(res.optimal_index);
        for_each_model(static_cast<Index>(ok.size()), config.threads, [&](Index i) {
            const std::size_t m = ok[static_cast<std::size_t>(i)];
            auto& o = outcomes[m];
            const IndexSet& support = o.supports[std::min(opt, o.supports.size() - 1)];
            try {
                o.refit_mse = refit_model(ds, plan, config, static_cast<Index>(m) / plan.k,
                                          static_cast<Index>(m) % plan.k, support);
            } catch (const std::exception& e) {
                o.error = e.what();
            }
        });
        std::vector<double> refit;
        for (std::size_t m : ok) {
            if (std::isfinite(outcomes[m].refit_mse)) refit.push_back(outcomes[m].refit_mse);
            else res.warnings.push_back("ridge refit failed for model " + std::to_string(m) + ": " + outcomes[m].error);
        }
        if (!refit.empty()) std::tie(res.refit_msep, res.refit_se) = mean_and_se(refit);
    }

    const PreparedDesign full = prepare_design(ds, config.scaled, config.floor_rel, config.sigma_eps);
    const SolutionPath path = fit_path(full, config);
    const PathStep& chosen = path.at_or_last(static_cast<std::size_t>(res.optimal_index));
    res.selected_support = chosen.active_set;
    res.nonzero_count = static_cast<Index>(res.selected_support.size());
    res.selected_beta = full.original_coefficients(chosen.beta);
    for (const auto& w : path.warnings) res.warnings.push_back("full-data fit: " + w);
    return res;
}

} // namespace eivsparse
