#include "eivsparse/variance.hpp"

#include "eivsparse/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace eivsparse {

double AnovaEstimate::signal_to_noise() const
{
    if (s_delta_sq > 0.0) return s_nu_sq / s_delta_sq;
    return s_nu_sq > 0.0 ? std::numeric_limits<double>::infinity()
                         : std::numeric_limits<double>::quiet_NaN();
}

AnovaEstimate anova_components(const Matrix& values)
{
    const Index n = values.rows();
    const Index r = values.cols();
    if (r < 2) throw InputError("ANOVA needs replicates >= 2 (replicates < 2)");
    if (n < 2) throw InputError("ANOVA needs at least 2 samples");
    if (!values.allFinite()) throw InputError("ANOVA input contains non-finite values");

    const Vector sample_means = values.rowwise().mean();
    const double grand_mean = sample_means.mean();

    AnovaEstimate est;
    est.replicates = r;
    est.df_treatment = n - 1;
    est.df_error = n * (r - 1);
    est.ss_treatment = static_cast<double>(r) * (sample_means.array() - grand_mean).square().sum();
    est.ss_error = (values.colwise() - sample_means).squaredNorm();
    est.s_delta_sq = est.ss_error / static_cast<double>(est.df_error);
    const double ms_treatment = est.ss_treatment / static_cast<double>(est.df_treatment);
    est.s_nu_sq = std::max(0.0, (ms_treatment - est.s_delta_sq) / static_cast<double>(r));
    return est;
}

std::vector<AnovaEstimate> anova_per_variable(const ReplicatedDataset& ds)
{
    std::vector<AnovaEstimate> out;
    out.reserve(static_cast<std::size_t>(ds.predictors()));
    for (Index j = 0; j < ds.predictors(); ++j) out.push_back(anova_components(ds.variable_replicates(j)));
    return out;
}

AnovaEstimate anova_response(const ReplicatedDataset& ds)
{
    return anova_components(ds.response_replicates_matrix());
}

std::vector<AnovaEstimate> to_standardized_scale(std::vector<AnovaEstimate> estimates,
                                                 const Vector& column_sds)
{
    detail::require(static_cast<Index>(estimates.size()) == column_sds.size(),
                    "to_standardized_scale: dimension mismatch");
    for (std::size_t j = 0; j < estimates.size(); ++j) {
        auto& e = estimates[j];
        const double sd = column_sds[static_cast<Index>(j)];
        const double factor = 1.0 / (sd * sd);
        e.s_delta_sq *= factor / static_cast<double>(e.replicates);
        e.s_nu_sq *= factor;
        e.ss_treatment *= factor;
        e.ss_error *= factor;
    }
    return estimates;
}

ScalingMatrix build_scaling_matrix(const Vector& s_delta_sq, double floor_rel)
{
    detail::require(s_delta_sq.size() >= 1, "build_scaling_matrix: no estimates");
    detail::require(floor_rel > 0.0, "build_scaling_matrix: floor_rel must be > 0");
    std::vector<double> positive;
    for (Index j = 0; j < s_delta_sq.size(); ++j) {
        detail::require(s_delta_sq[j] >= 0.0 && std::isfinite(s_delta_sq[j]),
                        "build_scaling_matrix: variances must be finite and >= 0");
        if (s_delta_sq[j] > 0.0) positive.push_back(std::sqrt(s_delta_sq[j]));
    }
    if (positive.empty()) {
        throw NumericalError("all uncertainty variances are zero; cannot form a scaling "
                             "floor (run unscaled instead)");
    }
    std::sort(positive.begin(), positive.end());
    const std::size_t m = positive.size();
    const double median =
        m % 2 == 1 ? positive[m / 2] : 0.5 * (positive[m / 2 - 1] + positive[m / 2]);
    const double floor = floor_rel * median;

    Vector diag(s_delta_sq.size());
    for (Index j = 0; j < diag.size(); ++j) diag[j] = std::max(std::sqrt(s_delta_sq[j]), floor);
    return ScalingMatrix(std::move(diag));
}

ScalingMatrix build_scaling_matrix(const std::vector<AnovaEstimate>& estimates, double floor_rel)
{
    Vector v(static_cast<Index>(estimates.size()));
    for (std::size_t j = 0; j < estimates.size(); ++j) v[static_cast<Index>(j)] = estimates[j].s_delta_sq;
    return build_scaling_matrix(v, floor_rel);
}

} // namespace eivsparse
