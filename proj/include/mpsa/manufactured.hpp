#pragma once

#include "mpsa/norms.hpp"

#include <string>
#include <vector>

namespace mpsa {

/// Closed-form solution with its body force f = -div sigma(u) for constant
/// coefficients. Scalar cases use sigma = kappa grad p with kappa = mu.
struct ManufacturedCase {
  std::string name;
  int ncomp = 2;
  double mu = 1.0;
  double lambda = 1.0;
  std::function<Values(const Vec2&)> u;
  std::function<Eigen::MatrixXd(const Vec2&)> grad;
  std::function<Values(const Vec2&)> f;

  /// sigma(x) for the exact field (ncomp x 2).
  Eigen::MatrixXd stress(const Vec2& x) const;
  /// Dirichlet data u, Neumann data sigma n, body force f.
  ProblemData problem() const;
  ExactField exact() const;
};

/// Affine parameters for the linear cases: u = A x + b (scalar: a . x + b0).
struct LinearParams {
  Mat2 a = (Mat2() << 1.0, 0.5, -0.25, 2.0).finished();
  Vec2 b = Vec2(0.1, -0.2);
};

/// Names: linear, poly3, trig, divfree, scalar_trig, scalar_linear.
ManufacturedCase make_case(const std::string& name, double mu, double lambda, const LinearParams& linear = {});
std::vector<std::string> case_names();

}  // namespace mpsa
