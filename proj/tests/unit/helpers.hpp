#pragma once
#include <eivsparse/eivsparse.hpp>

namespace testing {

using namespace eivsparse;

inline Matrix random_matrix(Index n, Index p, Rng& rng)
{
    Matrix m(n, p);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < p; ++j) m(i, j) = rng.normal();
    return m;
}

inline Vector random_vector(Index n, Rng& rng)
{
    Vector v(n);
    for (Index i = 0; i < n; ++i) v[i] = rng.normal();
    return v;
}

/// Standardized design and response drawn from a sparse linear model.
inline StandardizedDesign random_standardized(Index n, Index p, std::uint64_t seed, double noise = 0.5)
{
    Rng rng(seed);
    const Matrix X = random_matrix(n, p, rng);
    Vector beta = Vector::Zero(p);
    for (Index j = 0; j < p; j += 2) beta[j] = rng.uniform(-2.0, 2.0);
    const Vector y = X * beta + noise * random_vector(n, rng);
    return standardize(X, y);
}

} // namespace testing
