#pragma once
#include <eivsparse/dantzig.hpp>
#include <eivsparse/data_model.hpp>
#include <eivsparse/pursuit.hpp>
#include <eivsparse/rng.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace eivsparse {

/// Uniform random partition of n items into k folds whose sizes differ by at
/// most one. Returns the fold index of every item.
std::vector<Index> partition_samples(Index n, Index k, Rng& rng);

/// Fold assignments for repeated k-fold cross-validation at the sample level.
struct CvPlan
{
    Index k = 0;
    Index outer_loops = 0;
    std::uint64_t seed = 0;
    /// fold_of[loop][sample] in [0, k).
    std::vector<std::vector<Index>> fold_of;

    Index samples() const { return fold_of.empty() ? 0 : static_cast<Index>(fold_of.front().size()); }
    Index models() const { return k * outer_loops; }
};

/// round(100 / k), at least 1.
Index default_outer_loops(Index k);

/// outer_loops <= 0 selects default_outer_loops(k).
CvPlan make_folds(Index samples, Index k, Index outer_loops, std::uint64_t seed);
CvPlan make_folds(const ReplicatedDataset& ds, Index k, Index outer_loops, std::uint64_t seed);

enum class CvMethod
{
    fs,
    lars,
    dantzig,
    ridge_all,
};

const char* to_string(CvMethod m);
/// Accepts "fs", "lars", "dantzig", "ridge-all" / "ridge_all".
CvMethod parse_cv_method(std::string_view name);

struct CvConfig
{
    CvMethod method = CvMethod::lars;
    bool scaled = false;
    bool refit_ridge = false;
    StagewiseOptions stagewise{.gamma = std::nullopt, .max_steps = 100000, .corr_tol = 1e-4, .record_every = 50};
    LarsOptions lars;
    DantzigOptions dantzig;
    Index dantzig_grid_size = 50;
    double dantzig_grid_ratio = 1e-3;
    /// Response noise level on the standardized scale; unset estimates it
    /// from the training response replicates.
    std::optional<double> sigma_eps;
    double floor_rel = 1e-6;
    /// Folds of the inner ridge cross-validation.
    Index ridge_k = 5;
    Index threads = 1;
    /// Record the scaling diagonal used by every model (CvResult::fold_scalings).
    bool capture_scalings = false;
};

/**
 * Training-set preprocessing shared by cross-validation and full-data fits:
 * collapse replicates, standardize, estimate uncertainty from the training
 * replicates and optionally scale the design by it.
 */
struct PreparedDesign
{
    StandardizedDesign standardized;
    /// Per-variable uncertainty standard deviation of the standardized,
    /// replicate-averaged design (zeros when r < 2).
    Vector uncertainty_sd;
    /// Scaling applied to the design, present when scaled.
    std::optional<ScalingMatrix> D;
    /// Design handed to the solvers: standardized, then divided by D.
    Matrix X;
    double sigma_eps = 1.0;
    std::vector<std::string> warnings;

    /// Map raw (collapsed) design rows into the solver coordinates.
    Matrix transform(const Matrix& raw) const;
    /// Coefficients of the solver design expressed on the standardized design.
    Vector original_coefficients(const Vector& beta) const;
};

PreparedDesign prepare_design(const ReplicatedDataset& train, bool scaled, double floor_rel = 1e-6,
                              std::optional<double> sigma_eps = std::nullopt);

/// Run the configured solver on a prepared design. ridge_all yields one
/// step per ridge penalty, strongest first.
SolutionPath fit_path(const PreparedDesign& prep, const CvConfig& config);

struct CvResult
{
    CvMethod method = CvMethod::lars;
    bool scaled = false;
    bool refit_ridge = false;
    Index k = 0;
    Index outer_loops = 0;
    std::uint64_t seed = 0;

    /// Per aligned path step, over successful models.
    Vector msep;
    Vector se;
    Vector uncertainty;
    Vector nonzeros;

    Index optimal_index = 0;
    /// Support of the full-data path at optimal_index.
    IndexSet selected_support;
    Index nonzero_count = 0;
    /// Full-data coefficients at optimal_index on the standardized design.
    Vector selected_beta;

    /// Support + ridge refit evaluated in the same folds (nan unless refit_ridge).
    double refit_msep = 0.0;
    double refit_se = 0.0;

    Index models = 0;
    Index failures = 0;
    /// More than 10% of the models failed.
    bool unreliable = false;
    std::vector<Vector> fold_scalings;
    std::vector<std::string> warnings;
};

/**
 * Nested repeated k-fold cross-validation. For every (loop, fold) the
 * uncertainty estimates, scaling, standardization and path are computed from
 * the training samples alone; test samples are mapped with the training
 * statistics. Paths are aligned by step index (grid index for Dantzig and
 * ridge_all); shorter paths are extended with their last step. MSEP is in
 * response units.
 */
CvResult nested_kfold_cv(const ReplicatedDataset& ds, const CvPlan& plan, const CvConfig& config);

/// Index of the smallest value; ties go to the smaller index.
Index select_optimal(const Vector& msep_curve);
Index select_optimal(const CvResult& result);

struct SelectionAgreement
{
    double frac_a_in_b = 0.0;
    double frac_b_in_a = 0.0;
    double jaccard = 0.0;
};

/// Overlap of two supports. An empty set is contained in anything, and two
/// empty sets have Jaccard index 1.
SelectionAgreement selection_agreement(const IndexSet& a, const IndexSet& b);

} // namespace eivsparse
