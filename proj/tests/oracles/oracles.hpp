// Reference solvers used only by the tests. They share no code with the
// library solvers.
#pragma once
#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace oracle {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

// Cyclic coordinate descent for 1/2 ||y - X b||^2 + lambda * sum_j w_j |b_j|.
inline Vec cd_lasso(const Mat& X, const Vec& y, double lambda, const Vec& w, double tol = 1e-14,
                    int max_sweeps = 200000)
{
    const auto p = X.cols();
    Vec b = Vec::Zero(p);
    Vec r = y;
    const Vec sq = X.colwise().squaredNorm().transpose();
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double change = 0.0;
        for (Eigen::Index j = 0; j < p; ++j) {
            const double rho = X.col(j).dot(r) + sq[j] * b[j];
            const double thr = lambda * w[j];
            const double nb = rho > thr ? (rho - thr) / sq[j] : rho < -thr ? (rho + thr) / sq[j] : 0.0;
            const double d = nb - b[j];
            if (d != 0.0) {
                r -= d * X.col(j);
                b[j] = nb;
                change = std::max(change, std::abs(d));
            }
        }
        if (change < tol) break;
    }
    return b;
}

inline Vec cd_lasso(const Mat& X, const Vec& y, double lambda)
{
    return cd_lasso(X, y, lambda, Vec::Ones(X.cols()));
}

struct EnumResult
{
    bool found = false;
    double objective = std::numeric_limits<double>::infinity();
    Vec beta;
};

// Dantzig selector  min sum_j w_j |b_j|  s.t.  |X'(y - X b)|_j <= t_j  by
// enumerating candidate vertices: support S, |S| tight band rows R and their
// sides, solving G[R,S] b_S = g_R - side * t_R and keeping feasible points.
inline EnumResult dantzig_enumerate(const Mat& X, const Vec& y, const Vec& t, const Vec& w,
                                    double feas_tol = 1e-9)
{
    const int p = static_cast<int>(X.cols());
    const Mat G = X.transpose() * X;
    const Vec g = X.transpose() * y;
    EnumResult best;
    auto consider = [&](const Vec& b) {
        const Vec c = g - G * b;
        for (int j = 0; j < p; ++j)
            if (std::abs(c[j]) > t[j] + feas_tol * (1.0 + t[j])) return;
        const double obj = w.cwiseProduct(b).cwiseAbs().sum();
        if (obj < best.objective) {
            best.found = true;
            best.objective = obj;
            best.beta = b;
        }
    };
    consider(Vec::Zero(p));
    for (unsigned smask = 1; smask < (1u << p); ++smask) {
        std::vector<int> S;
        for (int j = 0; j < p; ++j)
            if (smask >> j & 1u) S.push_back(j);
        const int k = static_cast<int>(S.size());
        for (unsigned rmask = 1; rmask < (1u << p); ++rmask) {
            if (__builtin_popcount(rmask) != k) continue;
            std::vector<int> R;
            for (int j = 0; j < p; ++j)
                if (rmask >> j & 1u) R.push_back(j);
            Mat A(k, k);
            for (int a = 0; a < k; ++a)
                for (int b = 0; b < k; ++b) A(a, b) = G(R[a], S[b]);
            Eigen::FullPivLU<Mat> lu(A);
            if (lu.rank() < k) continue;
            for (unsigned sides = 0; sides < (1u << k); ++sides) {
                Vec rhs(k);
                for (int a = 0; a < k; ++a) rhs[a] = g[R[a]] - ((sides >> a & 1u) ? -1.0 : 1.0) * t[R[a]];
                const Vec bs = lu.solve(rhs);
                Vec b = Vec::Zero(p);
                for (int a = 0; a < k; ++a) b[S[a]] = bs[a];
                consider(b);
            }
        }
    }
    return best;
}

// Minimise a convex function of at most 3 variables by repeated grid
// refinement around the incumbent.
inline Vec grid_minimize(const std::function<double(const Vec&)>& f, Vec center, double radius,
                         int points = 21, int rounds = 60)
{
    const auto p = center.size();
    double best = f(center);
    for (int round = 0; round < rounds; ++round) {
        Vec incumbent = center;
        std::vector<int> idx(static_cast<std::size_t>(p), 0);
        while (true) {
            Vec z(p);
            for (Eigen::Index j = 0; j < p; ++j)
                z[j] = center[j] + radius * (2.0 * idx[static_cast<std::size_t>(j)] / (points - 1) - 1.0);
            const double v = f(z);
            if (v < best) {
                best = v;
                incumbent = z;
            }
            Eigen::Index d = 0;
            while (d < p && ++idx[static_cast<std::size_t>(d)] == points) idx[static_cast<std::size_t>(d++)] = 0;
            if (d == p) break;
        }
        center = incumbent;
        radius *= 0.6;
    }
    return center;
}

} // namespace oracle
