#include "mpsa/manufactured.hpp"

#include <fmt/format.h>

#include <cmath>
#include <numbers>

namespace mpsa {

namespace {

constexpr double kPi = std::numbers::pi;

Values vec(double a, double b) {
  Values v(2);
  v << a, b;
  return v;
}

Values scalar(double a) {
  Values v(1);
  v << a;
  return v;
}

}  // namespace

Eigen::MatrixXd ManufacturedCase::stress(const Vec2& x) const {
  const Eigen::MatrixXd g = grad(x);
  if (ncomp == 1) return mu * g;
  return mu * (g + g.transpose()) + lambda * g.trace() * Eigen::MatrixXd::Identity(2, 2);
}

ProblemData ManufacturedCase::problem() const {
  ProblemData p;
  p.body_force = f;
  p.dirichlet = u;
  auto self = *this;
  p.neumann = [self](const Vec2& x, const Vec2& n) -> Values { return self.stress(x) * n; };
  return p;
}

ExactField ManufacturedCase::exact() const { return {ncomp, u, grad}; }

std::vector<std::string> case_names() {
  return {"linear", "poly3", "trig", "divfree", "scalar_trig", "scalar_linear"};
}

ManufacturedCase make_case(const std::string& name, double mu, double lambda, const LinearParams& linear) {
  ManufacturedCase c;
  c.name = name;
  c.mu = mu;
  c.lambda = lambda;
  if (name == "linear") {
    const Mat2 a = linear.a;
    const Vec2 b = linear.b;
    c.u = [a, b](const Vec2& x) -> Values { return a * x + b; };
    c.grad = [a](const Vec2&) -> Eigen::MatrixXd { return a; };
    c.f = [](const Vec2&) { return vec(0.0, 0.0); };
  } else if (name == "poly3") {
    // u = (x^3 - 3 x y^2, x^2 y): div u = 4x^2 - 3y^2
    c.u = [](const Vec2& p) {
      const double x = p.x(), y = p.y();
      return vec(x * x * x - 3.0 * x * y * y, x * x * y);
    };
    c.grad = [](const Vec2& p) -> Eigen::MatrixXd {
      const double x = p.x(), y = p.y();
      Eigen::MatrixXd g(2, 2);
      g << 3.0 * x * x - 3.0 * y * y, -6.0 * x * y, 2.0 * x * y, x * x;
      return g;
    };
    c.f = [mu, lambda](const Vec2& p) {
      const double x = p.x(), y = p.y();
      return vec(-8.0 * (mu + lambda) * x, -2.0 * mu * y + 6.0 * (mu + lambda) * y);
    };
  } else if (name == "trig") {
    c.u = [](const Vec2& p) {
      const double x = p.x(), y = p.y();
      return vec(std::sin(kPi * x) * std::sin(kPi * y), x * (1.0 - x) * y * (1.0 - y));
    };
    c.grad = [](const Vec2& p) -> Eigen::MatrixXd {
      const double x = p.x(), y = p.y();
      Eigen::MatrixXd g(2, 2);
      g << kPi * std::cos(kPi * x) * std::sin(kPi * y), kPi * std::sin(kPi * x) * std::cos(kPi * y),
          (1.0 - 2.0 * x) * y * (1.0 - y), x * (1.0 - x) * (1.0 - 2.0 * y);
      return g;
    };
    c.f = [mu, lambda](const Vec2& p) {
      const double x = p.x(), y = p.y();
      const double sx = std::sin(kPi * x), sy = std::sin(kPi * y), cx = std::cos(kPi * x), cy = std::cos(kPi * y);
      const double pi2 = kPi * kPi;
      const double lap1 = -2.0 * pi2 * sx * sy;
      const double lap2 = -2.0 * y * (1.0 - y) - 2.0 * x * (1.0 - x);
      const double ddx = -pi2 * sx * sy + (1.0 - 2.0 * x) * (1.0 - 2.0 * y);
      const double ddy = pi2 * cx * cy - 2.0 * x * (1.0 - x);
      return vec(-mu * lap1 - (mu + lambda) * ddx, -mu * lap2 - (mu + lambda) * ddy);
    };
  } else if (name == "divfree") {
    // curl of the stream function sin^2(pi x) sin^2(pi y) (up to a factor); zero on the unit square boundary
    c.u = [](const Vec2& p) {
      const double sx = std::sin(kPi * p.x()), sy = std::sin(kPi * p.y());
      return vec(sx * sx * std::sin(2.0 * kPi * p.y()), -std::sin(2.0 * kPi * p.x()) * sy * sy);
    };
    c.grad = [](const Vec2& p) -> Eigen::MatrixXd {
      const double x = p.x(), y = p.y();
      const double sx = std::sin(kPi * x), sy = std::sin(kPi * y);
      const double s2x = std::sin(2.0 * kPi * x), s2y = std::sin(2.0 * kPi * y);
      const double c2x = std::cos(2.0 * kPi * x), c2y = std::cos(2.0 * kPi * y);
      Eigen::MatrixXd g(2, 2);
      g << kPi * s2x * s2y, 2.0 * kPi * sx * sx * c2y, -2.0 * kPi * c2x * sy * sy, -kPi * s2x * s2y;
      return g;
    };
    c.f = [mu](const Vec2& p) {
      const double s2x = std::sin(2.0 * kPi * p.x()), s2y = std::sin(2.0 * kPi * p.y());
      const double c2x = std::cos(2.0 * kPi * p.x()), c2y = std::cos(2.0 * kPi * p.y());
      const double pi2 = kPi * kPi;
      const double lap1 = 2.0 * pi2 * s2y * (2.0 * c2x - 1.0);
      const double lap2 = -2.0 * pi2 * s2x * (2.0 * c2y - 1.0);
      return vec(-mu * lap1, -mu * lap2);
    };
  } else if (name == "scalar_trig") {
    c.ncomp = 1;
    c.u = [](const Vec2& p) { return scalar(std::sin(kPi * p.x()) * std::sin(kPi * p.y())); };
    c.grad = [](const Vec2& p) -> Eigen::MatrixXd {
      Eigen::MatrixXd g(1, 2);
      g << kPi * std::cos(kPi * p.x()) * std::sin(kPi * p.y()), kPi * std::sin(kPi * p.x()) * std::cos(kPi * p.y());
      return g;
    };
    c.f = [mu](const Vec2& p) {
      return scalar(2.0 * kPi * kPi * mu * std::sin(kPi * p.x()) * std::sin(kPi * p.y()));
    };
  } else if (name == "scalar_linear") {
    c.ncomp = 1;
    const Vec2 a = linear.a.row(0).transpose();
    const double b = linear.b.x();
    c.u = [a, b](const Vec2& x) { return scalar(a.dot(x) + b); };
    c.grad = [a](const Vec2&) -> Eigen::MatrixXd { return a.transpose(); };
    c.f = [](const Vec2&) { return scalar(0.0); };
  } else {
    throw ConfigError(fmt::format("unknown manufactured case '{}'", name));
  }
  return c;
}

}  // namespace mpsa
