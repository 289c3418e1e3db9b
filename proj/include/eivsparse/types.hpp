#pragma once
#include <Eigen/Dense>
#include <cstddef>
#include <vector>

namespace eivsparse {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Sorted column indices.
using IndexSet = std::vector<Index>;

/// Indices j with |v[j]| > threshold, ascending.
inline IndexSet support_of(const Vector& v, double threshold = 0.0)
{
    IndexSet s;
    for (Index j = 0; j < v.size(); ++j)
        if (std::abs(v[j]) > threshold) s.push_back(j);
    return s;
}

inline bool all_finite(const Matrix& m) { return m.allFinite(); }

} // namespace eivsparse
