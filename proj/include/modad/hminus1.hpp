#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <functional>

#include "modad/field.hpp"

namespace modad {

/// H^{-1} norm of a functional R via a conforming dual solve:
/// find psi with (grad psi, grad chi) + (psi, chi) = <R, chi> for all chi in a
/// continuous piecewise-polynomial space; then ||R||^2 = <R, psi>.
/// The matrix depends only on the mesh and degree and is factorized once.
class DualNorm1D {
 public:
  DualNorm1D(const Mesh1D& mesh, int degree) : mesh_(&mesh), p_(degree) {
    if (degree < 1) throw std::invalid_argument("DualNorm1D: degree must be >= 1");
    basis_ = equispaced_basis(p_ + 1);
    n_dofs_ = mesh.periodic() ? mesh.n_cells() * p_ : mesh.n_cells() * p_ + 1;

    const auto& qr = gauss_points(p_ + 2);
    const int nb = p_ + 1;
    std::vector<std::vector<double>> bv(qr.size()), bd(qr.size());
    for (int m = 0; m < qr.size(); ++m) {
      basis_->eval(qr.nodes[m], bv[m]);
      basis_->eval_deriv(qr.nodes[m], bd[m]);
    }
    const double h = mesh.h();
    std::vector<Eigen::Triplet<double>> trip;
    for (int k = 0; k < mesh.n_cells(); ++k)
      for (int i = 0; i < nb; ++i)
        for (int j = 0; j < nb; ++j) {
          double a = 0.0;
          for (int m = 0; m < qr.size(); ++m)
            a += qr.weights[m] * (bd[m][i] * bd[m][j] * (2.0 / h) * (2.0 / h) +
                                  bv[m][i] * bv[m][j]);
          trip.emplace_back(dof(k, i), dof(k, j), 0.5 * h * a);
        }
    Eigen::SparseMatrix<double> K(n_dofs_, n_dofs_);
    K.setFromTriplets(trip.begin(), trip.end());
    ldlt_.compute(K);
    if (ldlt_.info() != Eigen::Success)
      throw std::runtime_error("DualNorm1D: factorization failed");
  }

  int n_dofs() const { return n_dofs_; }
  int degree() const { return p_; }
  BasisPtr basis() const { return basis_; }

  /// Global index of local node j in cell k (endpoints shared; periodic wrap).
  int dof(int k, int j) const {
    int g = k * p_ + j;
    return mesh_->periodic() ? g % n_dofs_ : g;
  }

  Eigen::VectorXd zero_load() const { return Eigen::VectorXd::Zero(n_dofs_); }

  /// b_i += int f(x) chi_i dx with f given as (cell, xi) -> value.
  void add_volume_load(Eigen::VectorXd& b, const std::function<double(int, double)>& f,
                       int npts) const {
    const auto& qr = gauss_points(npts);
    std::vector<std::vector<double>> bv(qr.size());
    for (int m = 0; m < qr.size(); ++m) basis_->eval(qr.nodes[m], bv[m]);
    const double h = mesh_->h();
    for (int k = 0; k < mesh_->n_cells(); ++k)
      for (int m = 0; m < qr.size(); ++m) {
        double fv = 0.5 * h * qr.weights[m] * f(k, qr.nodes[m]);
        for (int j = 0; j <= p_; ++j) b[dof(k, j)] += fv * bv[m][j];
      }
  }

  /// b_i += int g(x) chi_i' dx with g given as (cell, xi) -> value.
  void add_gradient_load(Eigen::VectorXd& b, const std::function<double(int, double)>& g,
                         int npts) const {
    const auto& qr = gauss_points(npts);
    std::vector<std::vector<double>> bd(qr.size());
    for (int m = 0; m < qr.size(); ++m) basis_->eval_deriv(qr.nodes[m], bd[m]);
    for (int k = 0; k < mesh_->n_cells(); ++k)
      for (int m = 0; m < qr.size(); ++m) {
        // (h/2) dx * (2/h) d/dxi cancels: h-free
        double gv = qr.weights[m] * g(k, qr.nodes[m]);
        for (int j = 0; j <= p_; ++j) b[dof(k, j)] += gv * bd[m][j];
      }
  }

  double norm_squared(const Eigen::VectorXd& load) const {
    Eigen::VectorXd psi = ldlt_.solve(load);
    return psi.dot(load);
  }

  /// Norm with a per-cell split of the dual energy int (|psi'|^2 + psi^2).
  double norm_squared(const Eigen::VectorXd& load, std::vector<double>& cell_energy) const {
    Eigen::VectorXd psi = ldlt_.solve(load);
    cell_energy.assign(mesh_->n_cells(), 0.0);
    const auto& qr = gauss_points(p_ + 2);
    std::vector<std::vector<double>> bv(qr.size()), bd(qr.size());
    for (int m = 0; m < qr.size(); ++m) {
      basis_->eval(qr.nodes[m], bv[m]);
      basis_->eval_deriv(qr.nodes[m], bd[m]);
    }
    const double h = mesh_->h();
    for (int k = 0; k < mesh_->n_cells(); ++k) {
      double e = 0.0;
      for (int m = 0; m < qr.size(); ++m) {
        double v = 0.0, d = 0.0;
        for (int j = 0; j <= p_; ++j) {
          v += bv[m][j] * psi[dof(k, j)];
          d += bd[m][j] * psi[dof(k, j)];
        }
        d *= 2.0 / h;
        e += qr.weights[m] * (d * d + v * v);
      }
      cell_energy[k] = 0.5 * h * e;
    }
    return psi.dot(load);
  }

 private:
  const Mesh1D* mesh_;
  int p_, n_dofs_ = 0;
  BasisPtr basis_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt_;
};

/// Tensor-product analogue on a Mesh2D.
class DualNorm2D {
 public:
  DualNorm2D(const Mesh2D& mesh, int degree) : mesh_(&mesh), p_(degree) {
    if (degree < 1) throw std::invalid_argument("DualNorm2D: degree must be >= 1");
    basis_ = equispaced_basis(p_ + 1);
    ngx_ = mesh.periodic() ? mesh.nx() * p_ : mesh.nx() * p_ + 1;
    ngy_ = mesh.periodic() ? mesh.ny() * p_ : mesh.ny() * p_ + 1;
    n_dofs_ = ngx_ * ngy_;

    const auto& qr = gauss_points(p_ + 2);
    const int nb = p_ + 1, nq = qr.size();
    std::vector<std::vector<double>> bv(nq), bd(nq);
    for (int m = 0; m < nq; ++m) {
      basis_->eval(qr.nodes[m], bv[m]);
      basis_->eval_deriv(qr.nodes[m], bd[m]);
    }
    const double hx = mesh.hx(), hy = mesh.hy();
    // 1D reference blocks: mass and stiffness
    Eigen::MatrixXd Mr = Eigen::MatrixXd::Zero(nb, nb), Sr = Eigen::MatrixXd::Zero(nb, nb);
    for (int i = 0; i < nb; ++i)
      for (int j = 0; j < nb; ++j)
        for (int m = 0; m < nq; ++m) {
          Mr(i, j) += qr.weights[m] * bv[m][i] * bv[m][j];
          Sr(i, j) += qr.weights[m] * bd[m][i] * bd[m][j];
        }
    std::vector<Eigen::Triplet<double>> trip;
    for (int iy = 0; iy < mesh.ny(); ++iy)
      for (int ix = 0; ix < mesh.nx(); ++ix)
        for (int ay = 0; ay < nb; ++ay)
          for (int axn = 0; axn < nb; ++axn)
            for (int by = 0; by < nb; ++by)
              for (int bxn = 0; bxn < nb; ++bxn) {
                double val =
                    (2.0 / hx) * Sr(axn, bxn) * (0.5 * hy) * Mr(ay, by) +
                    (0.5 * hx) * Mr(axn, bxn) * (2.0 / hy) * Sr(ay, by) +
                    (0.5 * hx) * Mr(axn, bxn) * (0.5 * hy) * Mr(ay, by);
                trip.emplace_back(dof(ix, iy, axn, ay), dof(ix, iy, bxn, by), val);
              }
    Eigen::SparseMatrix<double> K(n_dofs_, n_dofs_);
    K.setFromTriplets(trip.begin(), trip.end());
    ldlt_.compute(K);
    if (ldlt_.info() != Eigen::Success)
      throw std::runtime_error("DualNorm2D: factorization failed");
  }

  int n_dofs() const { return n_dofs_; }
  BasisPtr basis() const { return basis_; }

  int dof(int ix, int iy, int jx, int jy) const {
    int gx = ix * p_ + jx;
    int gy = iy * p_ + jy;
    if (mesh_->periodic()) {
      gx %= ngx_;
      gy %= ngy_;
    }
    return gy * ngx_ + gx;
  }

  Eigen::VectorXd zero_load() const { return Eigen::VectorXd::Zero(n_dofs_); }

  /// b += int f chi with f as (cell, xi, eta) -> value.
  void add_volume_load(Eigen::VectorXd& b,
                       const std::function<double(int, double, double)>& f, int npts) const {
    const auto& qr = gauss_points(npts);
    const int nb = p_ + 1;
    std::vector<std::vector<double>> bv(qr.size());
    for (int m = 0; m < qr.size(); ++m) basis_->eval(qr.nodes[m], bv[m]);
    const double ja = 0.25 * mesh_->hx() * mesh_->hy();
    for (int iy = 0; iy < mesh_->ny(); ++iy)
      for (int ix = 0; ix < mesh_->nx(); ++ix) {
        int k = mesh_->cell_index(ix, iy);
        for (int my = 0; my < qr.size(); ++my)
          for (int mx = 0; mx < qr.size(); ++mx) {
            double fv = ja * qr.weights[mx] * qr.weights[my] * f(k, qr.nodes[mx], qr.nodes[my]);
            for (int jy = 0; jy < nb; ++jy)
              for (int jx = 0; jx < nb; ++jx)
                b[dof(ix, iy, jx, jy)] += fv * bv[mx][jx] * bv[my][jy];
          }
      }
  }

  /// b += int (g1 dchi/dx + g2 dchi/dy) with g_a as (cell, xi, eta) -> value.
  void add_gradient_load(Eigen::VectorXd& b,
                         const std::function<double(int, double, double)>& g1,
                         const std::function<double(int, double, double)>& g2,
                         int npts) const {
    const auto& qr = gauss_points(npts);
    const int nb = p_ + 1;
    std::vector<std::vector<double>> bv(qr.size()), bd(qr.size());
    for (int m = 0; m < qr.size(); ++m) {
      basis_->eval(qr.nodes[m], bv[m]);
      basis_->eval_deriv(qr.nodes[m], bd[m]);
    }
    const double hx = mesh_->hx(), hy = mesh_->hy();
    for (int iy = 0; iy < mesh_->ny(); ++iy)
      for (int ix = 0; ix < mesh_->nx(); ++ix) {
        int k = mesh_->cell_index(ix, iy);
        for (int my = 0; my < qr.size(); ++my)
          for (int mx = 0; mx < qr.size(); ++mx) {
            double wq = qr.weights[mx] * qr.weights[my];
            double v1 = wq * g1(k, qr.nodes[mx], qr.nodes[my]) * (0.5 * hy);
            double v2 = wq * g2(k, qr.nodes[mx], qr.nodes[my]) * (0.5 * hx);
            for (int jy = 0; jy < nb; ++jy)
              for (int jx = 0; jx < nb; ++jx)
                b[dof(ix, iy, jx, jy)] +=
                    v1 * bd[mx][jx] * bv[my][jy] + v2 * bv[mx][jx] * bd[my][jy];
          }
      }
  }

  double norm_squared(const Eigen::VectorXd& load) const {
    Eigen::VectorXd psi = ldlt_.solve(load);
    return psi.dot(load);
  }

  double norm_squared(const Eigen::VectorXd& load, std::vector<double>& cell_energy) const {
    Eigen::VectorXd psi = ldlt_.solve(load);
    cell_energy.assign(mesh_->n_cells(), 0.0);
    const auto& qr = gauss_points(p_ + 2);
    const int nb = p_ + 1;
    std::vector<std::vector<double>> bv(qr.size()), bd(qr.size());
    for (int m = 0; m < qr.size(); ++m) {
      basis_->eval(qr.nodes[m], bv[m]);
      basis_->eval_deriv(qr.nodes[m], bd[m]);
    }
    const double hx = mesh_->hx(), hy = mesh_->hy();
    for (int iy = 0; iy < mesh_->ny(); ++iy)
      for (int ix = 0; ix < mesh_->nx(); ++ix) {
        int k = mesh_->cell_index(ix, iy);
        double e = 0.0;
        for (int my = 0; my < qr.size(); ++my)
          for (int mx = 0; mx < qr.size(); ++mx) {
            double v = 0.0, dx = 0.0, dy = 0.0;
            for (int jy = 0; jy < nb; ++jy)
              for (int jx = 0; jx < nb; ++jx) {
                double c = psi[dof(ix, iy, jx, jy)];
                v += c * bv[mx][jx] * bv[my][jy];
                dx += c * bd[mx][jx] * bv[my][jy];
                dy += c * bv[mx][jx] * bd[my][jy];
              }
            dx *= 2.0 / hx;
            dy *= 2.0 / hy;
            e += qr.weights[mx] * qr.weights[my] * (dx * dx + dy * dy + v * v);
          }
        cell_energy[k] = 0.25 * hx * hy * e;
      }
    return psi.dot(load);
  }

 private:
  const Mesh2D* mesh_;
  int p_, ngx_ = 0, ngy_ = 0, n_dofs_ = 0;
  BasisPtr basis_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt_;
};

}  // namespace modad
