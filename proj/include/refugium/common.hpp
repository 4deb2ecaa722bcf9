#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <string>

namespace refugium {

/// A scalar function sampled on the nodes of a region (all of Omega, or Omega_1 only).
using Field = Eigen::VectorXd;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid domain geometry or a field on the wrong node set.
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// Parameter values outside the model's admissible set.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// An iterative method failed: iteration cap, breakdown, divergence, NaN.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double last_residual)
      : Error(what), last_residual_(last_residual) {}
  double last_residual() const { return last_residual_; }

 private:
  double last_residual_;
};

/// A linear system that was expected to be nonsingular (or SPD) is not.
class SingularError : public Error {
 public:
  using Error::Error;
};

inline double max_abs(const Field& f) { return f.size() ? f.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace refugium
