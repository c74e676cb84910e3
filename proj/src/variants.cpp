#include "mpsa/variants.hpp"

#include <fmt/format.h>

namespace mpsa {

Method parse_method(const std::string& name) {
  if (name == "mpsa_full") return Method::MpsaFull;
  if (name == "mpsa_reduced") return Method::MpsaReduced;
  if (name == "fd_symmetric") return Method::FdSymmetric;
  if (name == "dirichlet_coercive") return Method::DirichletCoercive;
  if (name == "scalar_mpfa") return Method::ScalarMpfa;
  throw ConfigError(fmt::format("unknown method '{}'", name));
}

std::string to_string(Method method) {
  switch (method) {
    case Method::MpsaFull: return "mpsa_full";
    case Method::MpsaReduced: return "mpsa_reduced";
    case Method::FdSymmetric: return "fd_symmetric";
    case Method::DirichletCoercive: return "dirichlet_coercive";
    case Method::ScalarMpfa: return "scalar_mpfa";
  }
  return "?";
}

Formulation make_formulation(const VariantConfig& variant, const Mesh& mesh, const MaterialField& material) {
  Formulation form;
  form.alpha = variant.alpha;
  if (form.alpha && !(*form.alpha > 0.0)) throw ConfigError("stabilization weight must be positive");
  switch (variant.method) {
    case Method::MpsaFull: break;
    case Method::MpsaReduced:
      if (!(variant.eta > 0.0 && variant.eta < 1.0))
        throw ConfigError(fmt::format("eta must lie in (0, 1) (got {})", variant.eta));
      if (!mesh.is_simplex() && !variant.force)
        throw ConfigError("reduced integration requires a simplex mesh (set force = true to override)");
      form.rule = QuadratureRule::reduced_at(variant.eta);
      break;
    case Method::FdSymmetric: form.pairing = Pairing::Gradient; break;
    case Method::DirichletCoercive:
      if (!material.is_constant()) throw ConfigError("dirichlet_coercive requires constant mu and lambda");
      for (int f = 0; f < mesh.num_faces(); ++f)
        if (mesh.face(f).is_boundary() && mesh.face(f).tag != BoundaryTag::Dirichlet)
          throw ConfigError(fmt::format("dirichlet_coercive requires a Dirichlet boundary (face {} is not)", f));
      form.law = Law::DirichletCoercive;
      break;
    case Method::ScalarMpfa: form.law = Law::Scalar; break;
  }
  return form;
}

ReducedPoint reduced_quadrature(const Vec2& xs, const Vec2& xv, double eta) {
  return {xs + eta * (xv - xs), 0.5 * (xv - xs).norm()};
}

}  // namespace mpsa
