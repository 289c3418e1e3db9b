#pragma once
#include <eivsparse/data_model.hpp>
#include <eivsparse/types.hpp>

#include <vector>

namespace eivsparse {

/// One-way random-effects ANOVA summary for a single replicated variable.
struct AnovaEstimate
{
    double s_delta_sq = 0.0;   // within-sample (uncertainty) variance
    double s_nu_sq = 0.0;      // between-sample (signal) variance, clamped at 0
    double ss_treatment = 0.0; // SSTr
    double ss_error = 0.0;     // SSE
    Index df_treatment = 0;    // n - 1
    Index df_error = 0;        // n (r - 1)
    Index replicates = 0;      // r

    /// s_nu^2 / s_delta^2; +inf when s_delta^2 == 0 and s_nu^2 > 0, nan when both are 0.
    double signal_to_noise() const;
};

/**
 * Variance components from an n x r matrix of replicated values z_ij.
 *
 *   SSTr = sum_i r (zbar_i. - zbar..)^2,  SSE = sum_ij (z_ij - zbar_i.)^2
 *   s_delta^2 = SSE / (n (r - 1))
 *   s_nu^2    = max(0, (SSTr / (n - 1) - s_delta^2) / r)
 *
 * Requires n >= 2 and r >= 2.
 */
AnovaEstimate anova_components(const Matrix& values);

/// anova_components applied to every predictor of the dataset.
std::vector<AnovaEstimate> anova_per_variable(const ReplicatedDataset& ds);

/// anova_components applied to the response replicates.
AnovaEstimate anova_response(const ReplicatedDataset& ds);

/**
 * Express raw-unit uncertainty variances in the coordinates of the
 * regression design: the replicate mean has variance s_delta^2 / r, and
 * standardization divides column j by column_sds[j].
 */
std::vector<AnovaEstimate> to_standardized_scale(std::vector<AnovaEstimate> estimates,
                                                 const Vector& column_sds);

/**
 * Scaling matrix of uncertainty standard deviations:
 *   D[j] = max(sqrt(s_delta^2[j]), floor_rel * median_{k: s_delta[k] > 0} sqrt(s_delta^2[k])).
 *
 * Throws NumericalError when every estimate is zero; the caller should run
 * unscaled in that case.
 */
ScalingMatrix build_scaling_matrix(const std::vector<AnovaEstimate>& estimates,
                                   double floor_rel = 1e-6);

/// Same rule on bare variances.
ScalingMatrix build_scaling_matrix(const Vector& s_delta_sq, double floor_rel = 1e-6);

} // namespace eivsparse
