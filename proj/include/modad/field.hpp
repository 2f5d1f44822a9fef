#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

#include "modad/mesh.hpp"
#include "modad/quadrature.hpp"

namespace modad {

/// Piecewise-polynomial field on a Mesh1D in a nodal Lagrange basis.
/// Coefficients are the values at the mapped basis nodes of each cell,
/// stored cell-major: data[(k*nn + i)*ncomp + c].
class DGField1D {
 public:
  DGField1D() = default;
  DGField1D(const Mesh1D& mesh, BasisPtr basis, int ncomp = 1)
      : mesh_(&mesh), basis_(std::move(basis)), ncomp_(ncomp) {
    data_.assign(static_cast<size_t>(mesh.n_cells()) * basis_->size() * ncomp_, 0.0);
  }

  static DGField1D zero_like(const DGField1D& f) {
    return DGField1D(*f.mesh_, f.basis_, f.ncomp_);
  }

  const Mesh1D& mesh() const { return *mesh_; }
  const LagrangeBasis& basis() const { return *basis_; }
  BasisPtr basis_ptr() const { return basis_; }
  int n_nodes() const { return basis_->size(); }
  int degree() const { return basis_->degree(); }
  int ncomp() const { return ncomp_; }

  double& at(int cell, int node, int comp = 0) {
    return data_[(static_cast<size_t>(cell) * n_nodes() + node) * ncomp_ + comp];
  }
  double at(int cell, int node, int comp = 0) const {
    return data_[(static_cast<size_t>(cell) * n_nodes() + node) * ncomp_ + comp];
  }
  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  /// Value at reference coordinate xi in cell `cell`.
  double eval_ref(int cell, double xi, int comp = 0) const {
    std::vector<double> vals;
    basis_->eval(xi, vals);
    double s = 0.0;
    for (int j = 0; j < n_nodes(); ++j) s += vals[j] * at(cell, j, comp);
    return s;
  }

  /// Spatial derivative at reference coordinate xi in cell `cell`.
  double eval_dx_ref(int cell, double xi, int comp = 0) const {
    std::vector<double> ders;
    basis_->eval_deriv(xi, ders);
    double s = 0.0;
    for (int j = 0; j < n_nodes(); ++j) s += ders[j] * at(cell, j, comp);
    return s * 2.0 / mesh_->h();
  }

  double eval(double x, int comp = 0) const {
    int k = mesh_->find_cell(x);
    return eval_ref(k, mesh_->to_ref(k, x), comp);
  }

  double trace_left(int cell, int comp = 0) const { return eval_ref(cell, -1.0, comp); }
  double trace_right(int cell, int comp = 0) const { return eval_ref(cell, 1.0, comp); }

 private:
  const Mesh1D* mesh_ = nullptr;
  BasisPtr basis_;
  int ncomp_ = 1;
  std::vector<double> data_;
};

/// Tensor-product field on a Mesh2D; per-direction nodal bases may differ
/// (used by the directional flux reconstructions).
/// Layout: data[((k*nny + jy)*nnx + jx)*ncomp + c].
class DGField2D {
 public:
  DGField2D() = default;
  DGField2D(const Mesh2D& mesh, BasisPtr basis_x, BasisPtr basis_y, int ncomp = 1)
      : mesh_(&mesh), bx_(std::move(basis_x)), by_(std::move(basis_y)), ncomp_(ncomp) {
    data_.assign(static_cast<size_t>(mesh.n_cells()) * bx_->size() * by_->size() * ncomp_, 0.0);
  }

  static DGField2D zero_like(const DGField2D& f) {
    return DGField2D(*f.mesh_, f.bx_, f.by_, f.ncomp_);
  }

  const Mesh2D& mesh() const { return *mesh_; }
  const LagrangeBasis& basis_x() const { return *bx_; }
  const LagrangeBasis& basis_y() const { return *by_; }
  BasisPtr basis_x_ptr() const { return bx_; }
  BasisPtr basis_y_ptr() const { return by_; }
  int nnx() const { return bx_->size(); }
  int nny() const { return by_->size(); }
  int ncomp() const { return ncomp_; }

  double& at(int cell, int jx, int jy, int comp = 0) {
    return data_[((static_cast<size_t>(cell) * nny() + jy) * nnx() + jx) * ncomp_ + comp];
  }
  double at(int cell, int jx, int jy, int comp = 0) const {
    return data_[((static_cast<size_t>(cell) * nny() + jy) * nnx() + jx) * ncomp_ + comp];
  }
  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  double eval_ref(int cell, double xi, double eta, int comp = 0) const {
    std::vector<double> vx, vy;
    bx_->eval(xi, vx);
    by_->eval(eta, vy);
    double s = 0.0;
    for (int jy = 0; jy < nny(); ++jy) {
      double row = 0.0;
      for (int jx = 0; jx < nnx(); ++jx) row += vx[jx] * at(cell, jx, jy, comp);
      s += vy[jy] * row;
    }
    return s;
  }

  /// d/dx at reference point.
  double eval_dx_ref(int cell, double xi, double eta, int comp = 0) const {
    std::vector<double> vx, vy;
    bx_->eval_deriv(xi, vx);
    by_->eval(eta, vy);
    double s = 0.0;
    for (int jy = 0; jy < nny(); ++jy) {
      double row = 0.0;
      for (int jx = 0; jx < nnx(); ++jx) row += vx[jx] * at(cell, jx, jy, comp);
      s += vy[jy] * row;
    }
    return s * 2.0 / mesh_->hx();
  }

  /// d/dy at reference point.
  double eval_dy_ref(int cell, double xi, double eta, int comp = 0) const {
    std::vector<double> vx, vy;
    bx_->eval(xi, vx);
    by_->eval_deriv(eta, vy);
    double s = 0.0;
    for (int jy = 0; jy < nny(); ++jy) {
      double row = 0.0;
      for (int jx = 0; jx < nnx(); ++jx) row += vx[jx] * at(cell, jx, jy, comp);
      s += vy[jy] * row;
    }
    return s * 2.0 / mesh_->hy();
  }

  double eval(double x, double y, int comp = 0) const {
    int ix = mesh_->find_cell_x(x), iy = mesh_->find_cell_y(y);
    int k = mesh_->cell_index(ix, iy);
    double xi = 2.0 * (x - mesh_->cell_xmid(k)) / mesh_->hx();
    double eta = 2.0 * (y - mesh_->cell_ymid(k)) / mesh_->hy();
    return eval_ref(k, xi, eta, comp);
  }

 private:
  const Mesh2D* mesh_ = nullptr;
  BasisPtr bx_, by_;
  int ncomp_ = 1;
  std::vector<double> data_;
};

/// Piecewise-constant model selector: eps_hat in {0, eps} per cell.
class ModelField {
 public:
  ModelField() = default;
  explicit ModelField(int n_cells, double value = 0.0) : values_(n_cells, value) {}

  int n_cells() const { return static_cast<int>(values_.size()); }
  double operator[](int k) const { return values_[k]; }
  double& operator[](int k) { return values_[k]; }
  const std::vector<double>& values() const { return values_; }

  bool all_zero() const {
    for (double v : values_)
      if (v != 0.0) return false;
    return true;
  }
  double max_value() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, v);
    return m;
  }
  bool operator==(const ModelField& o) const { return values_ == o.values_; }

 private:
  std::vector<double> values_;
};

// ---------------------------------------------------------------------------
// Projection and norms
// ---------------------------------------------------------------------------

/// L2 projection of f onto the degree-q space with nodal Gauss basis.
/// Quadrature uses `extra` additional points beyond q+1.
inline DGField1D l2_project(const std::function<double(double)>& f, const Mesh1D& mesh, int q,
                            int extra = 6) {
  auto basis = gauss_basis(q + 1);
  DGField1D out(mesh, basis, 1);
  const auto& qr = gauss_points(q + 1 + extra);
  const auto& own = gauss_points(q + 1);
  std::vector<double> vals;
  std::vector<std::vector<double>> bas(qr.size());
  for (int m = 0; m < qr.size(); ++m) basis->eval(qr.nodes[m], bas[m]);
  for (int k = 0; k < mesh.n_cells(); ++k) {
    for (int i = 0; i < q + 1; ++i) {
      double mom = 0.0;
      for (int m = 0; m < qr.size(); ++m) {
        double x = mesh.cell_mid(k) + 0.5 * mesh.h() * qr.nodes[m];
        double fx = f(x);
        if (!std::isfinite(fx)) throw std::runtime_error("l2_project: non-finite evaluation");
        mom += qr.weights[m] * fx * bas[m][i];
      }
      // diagonal mass in the Gauss-nodal basis: (h/2) * w_i
      out.at(k, i) = mom / own.weights[i];
    }
  }
  return out;
}

inline DGField2D l2_project(const std::function<double(double, double)>& f, const Mesh2D& mesh,
                            int q, int extra = 6) {
  auto basis = gauss_basis(q + 1);
  DGField2D out(mesh, basis, basis, 1);
  const auto& qr = gauss_points(q + 1 + extra);
  const auto& own = gauss_points(q + 1);
  std::vector<std::vector<double>> bas(qr.size());
  for (int m = 0; m < qr.size(); ++m) basis->eval(qr.nodes[m], bas[m]);
  for (int k = 0; k < mesh.n_cells(); ++k) {
    double xm = mesh.cell_xmid(k), ym = mesh.cell_ymid(k);
    for (int jy = 0; jy < q + 1; ++jy)
      for (int jx = 0; jx < q + 1; ++jx) {
        double mom = 0.0;
        for (int my = 0; my < qr.size(); ++my)
          for (int mx = 0; mx < qr.size(); ++mx) {
            double x = xm + 0.5 * mesh.hx() * qr.nodes[mx];
            double y = ym + 0.5 * mesh.hy() * qr.nodes[my];
            mom += qr.weights[mx] * qr.weights[my] * f(x, y) * bas[mx][jx] * bas[my][jy];
          }
        out.at(k, jx, jy) = mom / (own.weights[jx] * own.weights[jy]);
      }
  }
  return out;
}

/// L2 norm over the whole domain, quadrature with npts points per cell/direction.
inline double l2_norm(const DGField1D& f, int comp = 0, int npts = 0) {
  if (npts == 0) npts = f.n_nodes() + 2;
  const auto& qr = gauss_points(npts);
  double s = 0.0;
  for (int k = 0; k < f.mesh().n_cells(); ++k) {
    double cell = 0.0;
    for (int m = 0; m < qr.size(); ++m) {
      double v = f.eval_ref(k, qr.nodes[m], comp);
      cell += qr.weights[m] * v * v;
    }
    s += 0.5 * f.mesh().h() * cell;
  }
  return std::sqrt(s);
}

inline double l2_norm(const DGField2D& f, int comp = 0, int npts = 0) {
  if (npts == 0) npts = std::max(f.nnx(), f.nny()) + 2;
  const auto& qr = gauss_points(npts);
  double s = 0.0;
  for (int k = 0; k < f.mesh().n_cells(); ++k) {
    double cell = 0.0;
    for (int my = 0; my < qr.size(); ++my)
      for (int mx = 0; mx < qr.size(); ++mx) {
        double v = f.eval_ref(k, qr.nodes[mx], qr.nodes[my], comp);
        cell += qr.weights[mx] * qr.weights[my] * v * v;
      }
    s += 0.25 * f.mesh().hx() * f.mesh().hy() * cell;
  }
  return std::sqrt(s);
}

/// Integral of a component over the domain.
inline double integral(const DGField1D& f, int comp = 0) {
  const auto& qr = gauss_points(f.n_nodes());
  double s = 0.0;
  for (int k = 0; k < f.mesh().n_cells(); ++k)
    for (int m = 0; m < qr.size(); ++m)
      s += 0.5 * f.mesh().h() * qr.weights[m] * f.eval_ref(k, qr.nodes[m], comp);
  return s;
}

inline double integral(const DGField2D& f, int comp = 0) {
  const auto& qx = gauss_points(f.nnx());
  const auto& qy = gauss_points(f.nny());
  double s = 0.0;
  for (int k = 0; k < f.mesh().n_cells(); ++k)
    for (int my = 0; my < qy.size(); ++my)
      for (int mx = 0; mx < qx.size(); ++mx)
        s += 0.25 * f.mesh().hx() * f.mesh().hy() * qx.weights[mx] * qy.weights[my] *
             f.eval_ref(k, qx.nodes[mx], qy.nodes[my], comp);
  return s;
}

}  // namespace modad
