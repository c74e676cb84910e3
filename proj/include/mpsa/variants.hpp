#pragma once

#include "mpsa/local_assembly.hpp"

#include <optional>
#include <string>

namespace mpsa {

enum class Method { MpsaFull, MpsaReduced, FdSymmetric, DirichletCoercive, ScalarMpfa };

Method parse_method(const std::string& name);
std::string to_string(Method method);

struct VariantConfig {
  Method method = Method::MpsaFull;
  double eta = 1.0 / 3.0;
  bool force = false;            // allow reduced integration on non-simplex meshes
  std::optional<double> alpha;   // constant stabilization weight

  int ncomp() const { return method == Method::ScalarMpfa ? 1 : 2; }
};

/// Checks the variant preconditions against a mesh and material and returns
/// the formulation driving the shared local/global machinery.
Formulation make_formulation(const VariantConfig& variant, const Mesh& mesh, const MaterialField& material);

/// The single continuity point x_s + eta (x_v - x_s) on the subface of
/// sigma = [x_s, x_v] at s, with weight m_sigma^s.
struct ReducedPoint {
  Vec2 x;
  double weight;
};
ReducedPoint reduced_quadrature(const Vec2& xs, const Vec2& xv, double eta);

}  // namespace mpsa
