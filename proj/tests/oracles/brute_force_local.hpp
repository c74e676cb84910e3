#pragma once

// Dense solve of the full local mixed problem at an interior vertex, with the
// face point values u_{K,s}^{sigma,beta} as primal unknowns and both multiplier
// blocks kept explicit. Used to check the condensed stress weights.

#include "mpsa/geometry.hpp"
#include "mpsa/material.hpp"

#include <Eigen/Dense>

#include <vector>

namespace oracle {

struct BruteForceResult {
  // Rows: (cell * 2 + side) * 2 + comp, columns: unit cell values (cell * 2 + comp).
  Eigen::MatrixXd tractions;
  Eigen::MatrixXd gradients;  // rows (cell * 2 + comp) * 2 + dir
};

inline BruteForceResult brute_force_local(const mpsa::InteractionRegion& r, const mpsa::MaterialField& mat) {
  using Eigen::MatrixXd;
  const int nk = r.num_cells();
  const int np = static_cast<int>(r.faces.front().points.size());
  // unknown index of point value (cell, side, beta, comp)
  auto xi = [&](int k, int side, int b, int c) { return ((k * 2 + side) * np + b) * 2 + c; };
  const int nx = nk * 2 * np * 2;
  const int nu = nk * 2;

  // g-vectors from scratch: sum_j (<x>_j - x_K) g_j^T = I.
  std::vector<mpsa::Mat2> g(nk);
  std::vector<std::array<int, 2>> face_of(nk);
  for (int k = 0; k < nk; ++k) {
    const auto& c = r.cells[k];
    mpsa::Mat2 d;
    for (int j = 0; j < 2; ++j) {
      face_of[k][j] = c.faces[j];
      d.col(j) = r.faces[c.faces[j]].mean - c.center;
    }
    g[k] = d.inverse();  // sum_j d_j g_j^T = D G = I, row j is g_j
  }

  // Gradient of cell k as a linear map of [x; u]: grad(c, dir).
  auto grad_row = [&](int k, int comp, int dir) {
    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(nx + nu);
    for (int j = 0; j < 2; ++j) {
      const auto& f = r.faces[face_of[k][j]];
      for (int b = 0; b < np; ++b) row(xi(k, j, b, comp)) += f.weights[b] / f.length * g[k](j, dir);
      row(nx + k * 2 + comp) -= g[k](j, dir);
    }
    return row;
  };
  auto hooke = [&](int k, int i, int j) {
    // sigma_ij as a row over [x; u]
    const double mu = mat.mu[r.cells[k].cell], la = mat.lambda[r.cells[k].cell];
    Eigen::RowVectorXd row = mu * (grad_row(k, i, j) + grad_row(k, j, i));
    if (i == j) row += la * (grad_row(k, 0, 0) + grad_row(k, 1, 1));
    return row;
  };

  // c_D rows: u^beta - u_K - grad (x_beta - x_K) = 0
  std::vector<Eigen::RowVectorXd> crow;
  for (int k = 0; k < nk; ++k)
    for (int j = 0; j < 2; ++j) {
      const auto& f = r.faces[face_of[k][j]];
      for (int b = 0; b < np; ++b)
        for (int c = 0; c < 2; ++c) {
          Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(nx + nu);
          row(xi(k, j, b, c)) += 1.0;
          row(nx + k * 2 + c) -= 1.0;
          const mpsa::Vec2 dx = f.points[b] - r.cells[k].center;
          row -= grad_row(k, c, 0) * dx.x() + grad_row(k, c, 1) * dx.y();
          crow.push_back(row);
        }
    }

  // b_D rows: for a face test value v_sigma, sum_K m_K^s sigma_K : (grad~ v)_K,
  // with (grad~ v)_K = (1/m_K^s) m_sigma^s v_sigma (x) n_{K,sigma}.
  std::vector<Eigen::RowVectorXd> brow;
  for (const auto& f : r.faces) {
    if (f.is_boundary()) continue;
    for (int c = 0; c < 2; ++c) {
      Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(nx + nu);
      for (int i = 0; i < 2; ++i) {
        const int k = f.cells[i];
        const auto& cell = r.cells[k];
        const mpsa::Vec2 n = cell.normals[f.sides[i]];
        const double gt = f.length / cell.area;  // grad~ scale
        row += cell.area * gt * (hooke(k, c, 0) * n.x() + hooke(k, c, 1) * n.y());
      }
      brow.push_back(row);
    }
  }

  // a_D: sum alpha/m sum omega |u_K^beta - u_L^beta|^2 with alpha the harmonic mean of 2 mu + lambda.
  MatrixXd a = MatrixXd::Zero(nx, nx);
  for (const auto& f : r.faces) {
    if (f.is_boundary()) continue;
    auto stiff = [&](int k) { return 2.0 * mat.mu[r.cells[k].cell] + mat.lambda[r.cells[k].cell]; };
    const double s0 = stiff(f.cells[0]), s1 = stiff(f.cells[1]);
    const double alpha = 2.0 * s0 * s1 / (s0 + s1);
    for (int b = 0; b < np; ++b)
      for (int c = 0; c < 2; ++c) {
        Eigen::VectorXd jump = Eigen::VectorXd::Zero(nx);
        jump(xi(f.cells[0], f.sides[0], b, c)) = 1.0;
        jump(xi(f.cells[1], f.sides[1], b, c)) = -1.0;
        a += alpha / f.length * f.weights[b] * jump * jump.transpose();
      }
  }

  const int nb = static_cast<int>(brow.size()), nc = static_cast<int>(crow.size());
  const int n = nx + nb + nc;
  MatrixXd kkt = MatrixXd::Zero(n, n);
  MatrixXd rhs = MatrixXd::Zero(n, nu);
  kkt.topLeftCorner(nx, nx) = a;
  for (int i = 0; i < nb; ++i) {
    kkt.block(nx + i, 0, 1, nx) = brow[i].head(nx);
    kkt.block(0, nx + i, nx, 1) = brow[i].head(nx).transpose();
    rhs.row(nx + i) = -brow[i].tail(nu);
  }
  for (int i = 0; i < nc; ++i) {
    kkt.block(nx + nb + i, 0, 1, nx) = crow[i].head(nx);
    kkt.block(0, nx + nb + i, nx, 1) = crow[i].head(nx).transpose();
    rhs.row(nx + nb + i) = -crow[i].tail(nu);
  }
  // The c_D rows are dependent (each cell's points span only an affine
  // family), so the multipliers are not unique; the primal part is.
  Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(kkt);
  const MatrixXd sol = cod.solve(rhs);

  BruteForceResult out;
  out.tractions = MatrixXd::Zero(nk * 2 * 2, nu);
  out.gradients = MatrixXd::Zero(nk * 4, nu);
  MatrixXd xu(nx + nu, nu);
  xu.topRows(nx) = sol.topRows(nx);
  xu.bottomRows(nu) = MatrixXd::Identity(nu, nu);
  for (int k = 0; k < nk; ++k) {
    for (int c = 0; c < 2; ++c)
      for (int d = 0; d < 2; ++d) out.gradients.row((k * 2 + c) * 2 + d) = grad_row(k, c, d) * xu;
    for (int j = 0; j < 2; ++j) {
      const auto& f = r.faces[face_of[k][j]];
      const mpsa::Vec2 n = r.cells[k].normals[j];
      for (int c = 0; c < 2; ++c)
        out.tractions.row((k * 2 + j) * 2 + c) = f.length * (hooke(k, c, 0) * n.x() + hooke(k, c, 1) * n.y()) * xu;
    }
  }
  return out;
}

}  // namespace oracle
