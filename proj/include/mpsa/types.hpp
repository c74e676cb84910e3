#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace mpsa {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// Small fixed-capacity vector used for per-point field values (1 or 2 components).
using Values = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 2, 1>;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input: malformed files, invalid configuration, violated preconditions.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Mesh topology or geometry that cannot be discretized.
class MeshError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// Failure inside a numerical kernel (singular local system, solver breakdown).
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// The local saddle-point problem around a vertex has a non-trivial kernel
/// that changes the subface tractions.
class IllPosedError : public NumericalError {
 public:
  IllPosedError(int vertex, const std::string& what)
      : NumericalError("local problem ill-posed at vertex " + std::to_string(vertex) + ": " + what),
        vertex_(vertex) {}
  int vertex() const { return vertex_; }

 private:
  int vertex_;
};

}  // namespace mpsa
