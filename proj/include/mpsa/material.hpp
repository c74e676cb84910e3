#pragma once

#include "mpsa/types.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace mpsa {

/// Cellwise Lame parameters. The scalar pipeline reads mu as the diffusivity.
struct MaterialField {
  std::vector<double> mu;
  std::vector<double> lambda;

  static MaterialField constant(int num_cells, double mu, double lambda);
  /// Lame parameters from Poisson ratio nu for shear modulus mu.
  static MaterialField from_poisson(int num_cells, double mu, double nu);
  /// Whitespace separated "mu lambda" per line, one line per cell, '#' comments.
  static MaterialField load(const std::string& path, int num_cells);

  int size() const { return static_cast<int>(mu.size()); }
  bool is_constant() const;
  /// Throws ConfigError unless lo <= mu_K <= hi and lambda_K >= 0 for every cell.
  void validate(int num_cells, double mu_lo = 0.0, double mu_hi = 1e300) const;
  MaterialField scaled(double c) const;
};

/// Body force, boundary data and their per-component values.
/// g_neumann receives the outward unit normal so callers can return sigma(x) n.
struct ProblemData {
  std::function<Values(const Vec2&)> body_force;
  std::function<Values(const Vec2&)> dirichlet;
  std::function<Values(const Vec2&, const Vec2&)> neumann;

  /// All-zero data with `ncomp` components.
  static ProblemData homogeneous(int ncomp);
};

/// Cell-centered unknowns, ncomp values per cell, stored cell-major.
struct CellField {
  int ncomp = 2;
  Eigen::VectorXd values;

  CellField() = default;
  CellField(int num_cells, int ncomp) : ncomp(ncomp), values(Eigen::VectorXd::Zero(num_cells * ncomp)) {}
  int num_cells() const { return ncomp ? static_cast<int>(values.size()) / ncomp : 0; }
  auto at(int k) { return values.segment(k * ncomp, ncomp); }
  auto at(int k) const { return values.segment(k * ncomp, ncomp); }
};

}  // namespace mpsa
