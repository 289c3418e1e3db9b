#pragma once
#include <stdexcept>
#include <string>

namespace eivsparse {

/// Bad input: malformed files, violated preconditions, shape mismatches.
/// The CLI maps this to exit code 2.
class InputError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

/// A solver or estimator could not produce a result (singular systems,
/// degenerate active sets, too many failed folds). CLI exit code 3.
class NumericalError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool cond, const std::string& msg)
{
    if (!cond) throw InputError(msg);
}

} // namespace detail
} // namespace eivsparse
