#pragma once
#include <eivsparse/types.hpp>

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace eivsparse {

/**
 * Raw replicated measurements: n samples, each measured r times on p
 * predictors, plus r_y replicated responses per sample.
 *
 * Replicate k of the design is an n x p matrix; the response replicates are
 * an n x r_y matrix. Instances are validated on construction and immutable
 * afterwards.
 */
class ReplicatedDataset
{
public:
    ReplicatedDataset(std::vector<Matrix> design_replicates,
                      Matrix response_replicates,
                      std::vector<std::string> sample_ids,
                      std::vector<std::string> predictor_names = {},
                      std::string response_name = "y");

    Index samples() const { return response_.rows(); }
    Index replicates() const { return static_cast<Index>(design_.size()); }
    Index predictors() const { return design_.front().cols(); }
    Index response_replicates() const { return response_.cols(); }

    const std::vector<Matrix>& design_replicates() const { return design_; }
    const Matrix& response_replicates_matrix() const { return response_; }
    const std::vector<std::string>& sample_ids() const { return ids_; }
    const std::vector<std::string>& predictor_names() const { return names_; }
    const std::string& response_name() const { return response_name_; }

    /// n x r matrix of the replicates of predictor j (the ANOVA input).
    Matrix variable_replicates(Index j) const;

    /// Dataset restricted to the given samples, in the given order.
    ReplicatedDataset subset(std::span<const Index> samples) const;

private:
    std::vector<Matrix> design_;
    Matrix response_;
    std::vector<std::string> ids_;
    std::vector<std::string> names_;
    std::string response_name_;
};

/// Column roles for long-form replicated CSV files.
struct CsvSchema
{
    std::string sample_column = "sample";
    std::string replicate_column = "replicate";
    std::string response_column = "y";
    /// Empty: every column not named above is a predictor.
    std::vector<std::string> predictor_columns;
};

/// Read a long-form CSV (one row per sample-replicate). Samples keep the
/// order of their first appearance; replicates keep file order.
ReplicatedDataset load_replicated_csv(const std::filesystem::path& path,
                                      const CsvSchema& schema);

/// Same as load_replicated_csv over an already-open stream; `source` names
/// the input in diagnostics.
ReplicatedDataset parse_replicated_csv(std::istream& in, const CsvSchema& schema,
                                       const std::string& source = "<stream>");

/// Write a dataset in the long-form layout read by load_replicated_csv.
/// Requires the response replicate count to equal the design's.
void write_replicated_csv(std::ostream& out, const ReplicatedDataset& ds,
                          const CsvSchema& schema = {});

struct CollapsedData
{
    Matrix design;   // n x p replicate means
    Vector response; // n replicate means
};

/// Per-sample arithmetic mean over replicates.
CollapsedData collapse_replicates(const ReplicatedDataset& ds);

/**
 * Mean-centred, unit-variance design and response together with the
 * statistics needed to map new rows into the same coordinates.
 */
struct StandardizedDesign
{
    Matrix X;
    Vector y;
    Vector column_means;
    Vector column_sds;
    double y_mean = 0.0;
    double y_sd = 1.0;

    /// Standardize new design rows with the stored statistics.
    Matrix transform(const Matrix& raw) const;
    Vector transform_response(const Vector& raw) const;
    /// Map standardized predictions back to response units.
    Vector response_to_raw(const Vector& standardized) const;
};

/// Centre and divide by the sample standard deviation (divisor n - 1).
/// Throws InputError naming the first zero-variance column.
StandardizedDesign standardize(const Matrix& design, const Vector& response);

/// Diagonal matrix of strictly positive per-variable uncertainty scales.
class ScalingMatrix
{
public:
    explicit ScalingMatrix(Vector diag);

    static ScalingMatrix identity(Index p) { return ScalingMatrix(Vector::Ones(p)); }

    const Vector& diag() const { return diag_; }
    Index size() const { return diag_.size(); }
    ScalingMatrix inverse() const { return ScalingMatrix(diag_.cwiseInverse()); }

private:
    Vector diag_;
};

/// X * D^-1: column j divided by D[j].
Matrix apply_scaling(const Matrix& X, const ScalingMatrix& D);

/// D^-1 * beta: coefficients of the scaled design mapped to the original one.
Vector unscale_coefficients(const Vector& beta_scaled, const ScalingMatrix& D);

/// D * beta: the inverse of unscale_coefficients.
Vector scale_coefficients(const Vector& beta, const ScalingMatrix& D);

} // namespace eivsparse
