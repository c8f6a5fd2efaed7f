#pragma once

#include <stdexcept>
#include <string>

namespace orbitflow {

struct DimensionMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct SingularMatrix : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ZeroVector : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct JacobiViolation : std::runtime_error {
  double residual;
  explicit JacobiViolation(double r)
      : std::runtime_error("bracket violates the Jacobi identity, residual = " +
                           std::to_string(r)),
        residual(r) {}
};

struct NotNilpotent : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NotInW : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NotAnIdealSum : std::runtime_error {
  double offending_norm;
  explicit NotAnIdealSum(double norm)
      : std::runtime_error("subspaces are not a sum of ideals, cross-component norm = " +
                           std::to_string(norm)),
        offending_norm(norm) {}
};

struct NotThetaStable : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NonOrthonormalBasis : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct NonCommutingDerivations : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace orbitflow
