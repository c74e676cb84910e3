#include "mpsa/material.hpp"

#include <fmt/format.h>

#include <fstream>
#include <sstream>

namespace mpsa {

MaterialField MaterialField::constant(int num_cells, double mu, double lambda) {
  return {std::vector<double>(num_cells, mu), std::vector<double>(num_cells, lambda)};
}

MaterialField MaterialField::from_poisson(int num_cells, double mu, double nu) {
  if (!(nu >= 0.0 && nu < 0.5)) throw ConfigError(fmt::format("Poisson ratio must lie in [0, 0.5) (got {})", nu));
  return constant(num_cells, mu, 2.0 * mu * nu / (1.0 - 2.0 * nu));
}

MaterialField MaterialField::load(const std::string& path, int num_cells) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open material file '{}'", path));
  MaterialField m;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
    std::istringstream ls(line);
    double mu, lambda;
    if (!(ls >> mu)) continue;
    std::string rest;
    if (!(ls >> lambda) || (ls >> rest))
      throw ConfigError(fmt::format("material file '{}' line {}: expected '<mu> <lambda>'", path, line_no));
    m.mu.push_back(mu);
    m.lambda.push_back(lambda);
  }
  m.validate(num_cells);
  return m;
}

bool MaterialField::is_constant() const {
  for (std::size_t k = 1; k < mu.size(); ++k)
    if (mu[k] != mu[0] || lambda[k] != lambda[0]) return false;
  return true;
}

void MaterialField::validate(int num_cells, double mu_lo, double mu_hi) const {
  if (size() != num_cells || static_cast<int>(lambda.size()) != num_cells)
    throw ConfigError(fmt::format("material field has {} entries for {} cells", size(), num_cells));
  for (int k = 0; k < num_cells; ++k) {
    if (!(mu[k] > 0.0) || mu[k] < mu_lo || mu[k] > mu_hi)
      throw ConfigError(fmt::format("cell {}: mu = {} outside the admissible range", k, mu[k]));
    if (!(lambda[k] >= 0.0)) throw ConfigError(fmt::format("cell {}: lambda = {} is negative", k, lambda[k]));
  }
}

MaterialField MaterialField::scaled(double c) const {
  MaterialField m = *this;
  for (auto& x : m.mu) x *= c;
  for (auto& x : m.lambda) x *= c;
  return m;
}

ProblemData ProblemData::homogeneous(int ncomp) {
  ProblemData d;
  d.body_force = [ncomp](const Vec2&) { return Values(Values::Zero(ncomp)); };
  d.dirichlet = d.body_force;
  d.neumann = [ncomp](const Vec2&, const Vec2&) { return Values(Values::Zero(ncomp)); };
  return d;
}

}  // namespace mpsa
