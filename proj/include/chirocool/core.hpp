#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace chirocool {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using SparseMatrix = Eigen::SparseMatrix<cplx, Eigen::ColMajor, long>;

inline constexpr cplx kI{0.0, 1.0};

// All frequencies and rates are measured in units of the trap frequency.
inline constexpr double kTrapFrequency = 1.0;

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input: out-of-range indices, mismatched dimensions, invalid configs.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A numerical routine could not produce a trustworthy answer.
class SolverError : public Error {
 public:
  enum class Kind {
    kAmbiguousSteadyState,
    kNoNormalizableSolution,
    kResidualTooLarge,
    kStepSizeUnderflow,
    kDriftExceeded,
    kFitFailure,
    kSingularSystem,
    kMemoryGuard,
    kOutOfValidity,
    kUndefinedNormalization,
  };

  SolverError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

}  // namespace chirocool
