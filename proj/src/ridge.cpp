#include "eivsparse/ridge.hpp"

#include "eivsparse/cv.hpp"
#include "eivsparse/error.hpp"
#include "eivsparse/rng.hpp"

#include <cmath>
#include <limits>

namespace eivsparse {

using detail::require;

Vector ridge_fit(const Matrix& X, const Vector& y, double lambda)
{
    require(X.rows() == y.size(), "ridge_fit: X rows must match y length");
    require(lambda >= 0.0 && std::isfinite(lambda), "ridge_fit: lambda must be >= 0");
    require(X.allFinite() && y.allFinite(), "ridge_fit: non-finite data");
    const Index q = X.cols();
    if (q == 0) return Vector(0);
    if (lambda == 0.0) {
        Eigen::ColPivHouseholderQR<Matrix> qr(X);
        qr.setThreshold(1e-12);
        if (qr.rank() < q) throw NumericalError("ridge_fit: singular system at lambda = 0");
        return qr.solve(y);
    }
    Matrix A = X.transpose() * X;
    A.diagonal().array() += lambda;
    Eigen::LLT<Matrix> llt(A);
    if (llt.info() != Eigen::Success) throw NumericalError("ridge_fit: Cholesky failed");
    return llt.solve(X.transpose() * y);
}

Vector RidgeFit::predict(const Matrix& X_full) const
{
    Vector out = Vector::Constant(X_full.rows(), y_mean);
    for (std::size_t i = 0; i < support.size(); ++i) {
        const auto j = static_cast<Index>(i);
        require(support[i] < X_full.cols(), "RidgeFit::predict: support outside design");
        out.array() += beta[j] * (X_full.col(support[i]).array() - x_means[j]);
    }
    return out;
}

Vector default_ridge_grid(const Matrix& X_sub)
{
    require(X_sub.rows() >= 1, "default_ridge_grid: empty design");
    const Index q = X_sub.cols();
    double base = 1.0;
    if (q > 0) {
        const double tr = X_sub.colwise().squaredNorm().sum();
        base = tr / static_cast<double>(q) / static_cast<double>(X_sub.rows());
        if (!(base > 0.0)) base = 1.0;
    }
    constexpr Index count = 30;
    Vector grid(count);
    for (Index i = 0; i < count; ++i)
        grid[i] = base * std::pow(10.0, -4.0 + 8.0 * static_cast<double>(i) / (count - 1));
    return grid;
}

namespace {

Matrix columns(const Matrix& X, const IndexSet& support)
{
    Matrix out(X.rows(), static_cast<Index>(support.size()));
    for (std::size_t i = 0; i < support.size(); ++i) out.col(static_cast<Index>(i)) = X.col(support[i]);
    return out;
}

RidgeFit fit_centered(const Matrix& Xs, const Vector& y, const IndexSet& support, double lambda)
{
    RidgeFit fit;
    fit.support = support;
    fit.lambda_ridge = lambda;
    fit.x_means = Xs.colwise().mean().transpose();
    fit.y_mean = y.mean();
    const Matrix Xc = Xs.rowwise() - fit.x_means.transpose();
    fit.beta = ridge_fit(Xc, y.array() - fit.y_mean, lambda);
    return fit;
}

} // namespace

RidgeFit ridge_cv(const Matrix& X_full, const Vector& y, const IndexSet& support,
                  const Vector& grid, Index k, std::uint64_t seed)
{
    const Index n = X_full.rows();
    require(n == y.size(), "ridge_cv: X rows must match y length");
    require(k >= 2, "ridge_cv: k must be >= 2");
    require(n >= k, "ridge_cv: fold with fewer than 1 row (n < k)");
    require(grid.size() >= 1, "ridge_cv: empty lambda grid");
    for (Index i = 0; i < grid.size(); ++i)
        require(grid[i] > 0.0 && std::isfinite(grid[i]), "ridge_cv: grid must be positive");
    for (Index j : support) require(j >= 0 && j < X_full.cols(), "ridge_cv: support outside design");

    const Matrix Xs = columns(X_full, support);
    Rng rng = Rng(seed).split(stream_tag("ridge_cv"));
    const std::vector<Index> fold = partition_samples(n, k, rng);

    Vector sse = Vector::Zero(grid.size());
    for (Index f = 0; f < k; ++f) {
        std::vector<Index> train, test;
        for (Index i = 0; i < n; ++i) (fold[static_cast<std::size_t>(i)] == f ? test : train).push_back(i);
        const Matrix Xtr = Xs(train, Eigen::all);
        const Vector ytr = y(train);
        const Matrix Xte = Xs(test, Eigen::all);
        const Vector yte = y(test);
        for (Index g = 0; g < grid.size(); ++g) {
            RidgeFit fit = fit_centered(Xtr, ytr, {}, grid[g]);
            Vector pred = Vector::Constant(Xte.rows(), fit.y_mean);
            if (Xs.cols() > 0) pred += (Xte.rowwise() - fit.x_means.transpose()) * fit.beta;
            sse[g] += (yte - pred).squaredNorm();
        }
    }
    const Vector msep = sse / static_cast<double>(n);
    Index best = 0;
    for (Index g = 1; g < grid.size(); ++g)
        if (msep[g] < msep[best]) best = g;

    RidgeFit out = fit_centered(Xs, y, support, grid[best]);
    out.cv_msep = msep;
    return out;
}

} // namespace eivsparse
