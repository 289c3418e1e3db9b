#pragma once
#include <eivsparse/types.hpp>

#include <cstdint>

namespace eivsparse {

/// (X'X + lambda I)^-1 X'y by Cholesky; lambda == 0 requires full column rank
/// (NumericalError otherwise). No intercept: callers centre first.
Vector ridge_fit(const Matrix& X, const Vector& y, double lambda);

/// Ridge model on a column subset of a larger design, with its own centring.
struct RidgeFit
{
    IndexSet support;
    Vector beta; // one coefficient per support entry
    double lambda_ridge = 0.0;
    Vector x_means; // means of the support columns used for fitting
    double y_mean = 0.0;
    /// k-fold MSEP of every grid value, in grid order.
    Vector cv_msep;

    /// Predictions for rows of the full-width design.
    Vector predict(const Matrix& X_full) const;
};

/// 30 geometric values over [1e-4, 1e4] * (trace(X'X) / q) / n.
Vector default_ridge_grid(const Matrix& X_sub);

/**
 * Pick lambda from `grid` by k-fold MSEP (first minimum wins) and refit on all
 * rows. Folds come from partition_samples, so rows are treated as samples;
 * each fold's training part is centred independently.
 * An empty support yields the intercept-only model.
 */
RidgeFit ridge_cv(const Matrix& X_full, const Vector& y, const IndexSet& support,
                  const Vector& grid, Index k, std::uint64_t seed);

} // namespace eivsparse
