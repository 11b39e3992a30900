#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <stdexcept>
#include <string>

namespace polyvol {

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Index = Eigen::Index;

// Error taxonomy. InputError covers malformed or inconsistent input (the CLI
// maps it to exit code 1); NumericalError covers everything that fails while
// computing (exit code 2).
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InfeasibleError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class UnboundedError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class DegenerateError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class VolumeUnknownError : public NumericalError {
public:
    VolumeUnknownError() : NumericalError("Volume unknown!") {}
};

inline void require(bool cond, const std::string& what)
{
    if (!cond) throw InputError(what);
}

template <typename Derived>
void require_dim(const Eigen::MatrixBase<Derived>& x, Index d, const char* what)
{
    if (x.size() != d)
        throw InputError(std::string(what) + ": expected dimension " + std::to_string(d) + ", got " +
                         std::to_string(x.size()));
}

}  // namespace polyvol
