#include "mpsa/manufactured.hpp"

#include "oracles/hyperdual.hpp"

#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <functional>
#include <random>

using namespace mpsa;
using oracle::HyperDual;

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kMu = 1.3, kLambda = 2.7;

// The displacement fields, written out again from their definitions.
template <class T>
std::array<T, 2> field(const std::string& name, T x, T y) {
  using std::sin;
  using oracle::sin;
  if (name == "linear") {
    const LinearParams p;
    return {p.a(0, 0) * x + p.a(0, 1) * y + p.b(0), p.a(1, 0) * x + p.a(1, 1) * y + p.b(1)};
  }
  if (name == "poly3") return {x * x * x - 3.0 * x * y * y, x * x * y};
  if (name == "trig") return {sin(kPi * x) * sin(kPi * y), x * (1.0 - x) * y * (1.0 - y)};
  if (name == "divfree")
    return {sin(kPi * x) * sin(kPi * x) * sin(2.0 * kPi * y), -sin(2.0 * kPi * x) * sin(kPi * y) * sin(kPi * y)};
  if (name == "scalar_trig") return {sin(kPi * x) * sin(kPi * y), T(0.0)};
  if (name == "scalar_linear") {
    const LinearParams p;
    return {p.a(0, 0) * x + p.a(0, 1) * y + p.b(0), T(0.0)};
  }
  throw std::invalid_argument(name);
}

struct Derivs {
  Vec2 u;
  Mat2 grad;               // grad(i, j) = d u_i / d x_j
  std::array<Mat2, 2> H;   // Hessian of each component
};

Derivs differentiate(const std::string& name, const Vec2& p) {
  Derivs d;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      const HyperDual x(p.x(), a == 0, b == 0, 0.0), y(p.y(), a == 1, b == 1, 0.0);
      const auto u = field<HyperDual>(name, x, y);
      for (int i = 0; i < 2; ++i) {
        d.u(i) = u[i].v;
        d.grad(i, a) = u[i].d1;
        d.H[i](a, b) = u[i].d12;
      }
    }
  return d;
}

class Manufactured : public ::testing::TestWithParam<std::string> {};

}  // namespace

TEST_P(Manufactured, FieldGradientAndForceMatchOracle) {
  const std::string name = GetParam();
  const ManufacturedCase mc = make_case(name, kMu, kLambda);
  const bool scalar = mc.ncomp == 1;
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const Vec2 p(unit(rng), unit(rng));
    const Derivs d = differentiate(name, p);
    const Values u = mc.u(p);
    const Eigen::MatrixXd g = mc.grad(p);
    const Values f = mc.f(p);
    ASSERT_EQ(u.size(), mc.ncomp);
    ASSERT_EQ(g.rows(), mc.ncomp);
    for (int i = 0; i < mc.ncomp; ++i) {
      EXPECT_NEAR(u(i), d.u(i), 1e-14);
      for (int j = 0; j < 2; ++j) EXPECT_NEAR(g(i, j), d.grad(i, j), 1e-12);
    }
    if (scalar) {
      const double lap = kMu * d.H[0].trace();
      EXPECT_NEAR(f(0), -lap, 1e-10 * std::max(1.0, std::abs(lap)));
      continue;
    }
    // -div sigma = -(mu lap u + (mu + lambda) grad div u)
    for (int i = 0; i < 2; ++i) {
      const double lap = kMu * d.H[i].trace();
      const double graddiv = (kMu + kLambda) * (d.H[0](i, 0) + d.H[1](i, 1));
      const double scale = std::max({1.0, std::abs(lap), std::abs(graddiv)});
      EXPECT_NEAR(f(i), -(lap + graddiv), 1e-10 * scale) << name << " at " << p.transpose();
    }
  }
}

TEST_P(Manufactured, StressAndNeumannData) {
  const ManufacturedCase mc = make_case(GetParam(), kMu, kLambda);
  const ProblemData pd = mc.problem();
  const Vec2 p(0.31, 0.72), n = Vec2(0.6, -0.8);
  const Eigen::MatrixXd g = mc.grad(p);
  Eigen::MatrixXd sigma;
  if (mc.ncomp == 1) {
    sigma = kMu * g;
  } else {
    sigma = kMu * (g + g.transpose()) + kLambda * g.trace() * Eigen::MatrixXd::Identity(2, 2);
  }
  EXPECT_NEAR((mc.stress(p) - sigma).norm(), 0.0, 1e-13);
  EXPECT_NEAR((pd.neumann(p, n) - sigma * n).norm(), 0.0, 1e-13);
  EXPECT_NEAR((pd.dirichlet(p) - mc.u(p)).norm(), 0.0, 0.0);
  EXPECT_NEAR((pd.body_force(p) - mc.f(p)).norm(), 0.0, 0.0);
}

INSTANTIATE_TEST_SUITE_P(Cases, Manufactured,
                         ::testing::Values("linear", "poly3", "trig", "divfree", "scalar_trig", "scalar_linear"));

TEST(ManufacturedCases, NamesAreListed) {
  EXPECT_EQ(case_names(), (std::vector<std::string>{"linear", "poly3", "trig", "divfree", "scalar_trig", "scalar_linear"}));
  EXPECT_THROW(make_case("bubble", 1.0, 1.0), ConfigError);
}

TEST(ManufacturedCases, DivergenceFreeCaseIsDivergenceFreeAndVanishesOnBoundary) {
  const ManufacturedCase mc = make_case("divfree", 1.0, 1e6);
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const Vec2 p(unit(rng), unit(rng));
    EXPECT_NEAR(mc.grad(p).trace(), 0.0, 1e-12);
    for (const Vec2& b : {Vec2(0.0, p.y()), Vec2(1.0, p.y()), Vec2(p.x(), 0.0), Vec2(p.x(), 1.0)})
      EXPECT_NEAR(mc.u(b).norm(), 0.0, 1e-14);
  }
  // f does not grow with lambda
  EXPECT_NEAR((mc.f(Vec2(0.3, 0.4)) - make_case("divfree", 1.0, 1.0).f(Vec2(0.3, 0.4))).norm(), 0.0, 1e-8);
}
