#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "modad/flux.hpp"
#include "modad/operators.hpp"

namespace modad {

/// Dense quadrature used for all nonlinear flux integrals (volume and edge).
/// The flux reconstruction projects edge fluxes with the same rule so that the
/// reconstructed flux reproduces the scheme's edge terms exactly.
inline const QuadratureRule& flux_rule(int q) { return gauss_points(q + 3); }

struct SolverConfig {
  int q = 1;            // polynomial degree
  double tau = 0.0;     // time step
  double sigma = 10.0;  // interior penalty parameter
  double boundary_value = 0.0;
};

// ---------------------------------------------------------------------------
// Semi-discrete hyperbolic operator, 1D
// ---------------------------------------------------------------------------

/// Nodal values of H(v) defined by (H(v), phi) = int f(v) phi' - sum_e F [phi].
class Hyperbolic1D {
 public:
  Hyperbolic1D(const Mesh1D& mesh, const FluxModel& flux, const SolverConfig& cfg)
      : mesh_(&mesh), flux_(&flux), cfg_(cfg), nn_(cfg.q + 1) {
    basis_ = gauss_basis(nn_);
    const auto& qr = flux_rule(cfg.q);
    nq_ = qr.size();
    bas_.assign(nq_ * nn_, 0.0);
    dbas_.assign(nq_ * nn_, 0.0);
    std::vector<double> tmp;
    for (int m = 0; m < nq_; ++m) {
      basis_->eval(qr.nodes[m], tmp);
      for (int i = 0; i < nn_; ++i) bas_[m * nn_ + i] = tmp[i];
      basis_->eval_deriv(qr.nodes[m], tmp);
      for (int i = 0; i < nn_; ++i) dbas_[m * nn_ + i] = tmp[i];
    }
    basis_->eval(-1.0, tL_);
    basis_->eval(1.0, tR_);
    num_flux_ = RichtmyerFlux{flux_, cfg.tau / mesh.h()};
  }

  const SolverConfig& config() const { return cfg_; }
  const RichtmyerFlux& numerical_flux() const { return num_flux_; }
  BasisPtr basis() const { return basis_; }

  /// Edge traces, intermediate states and numerical fluxes for a given state;
  /// the flux reconstruction reuses these values.
  struct EdgeData {
    std::vector<double> um, up, w, F;
  };
  EdgeData edge_data(const DGField1D& v) const {
    EdgeData ed;
    const int ne = mesh_->n_edges();
    ed.um.resize(ne);
    ed.up.resize(ne);
    ed.w.resize(ne);
    ed.F.resize(ne);
    for (int e = 0; e < ne; ++e) {
      int kl = mesh_->left_cell(e), kr = mesh_->right_cell(e);
      double um = kl >= 0 ? trace(v, kl, tR_) : cfg_.boundary_value;
      double up = kr >= 0 ? trace(v, kr, tL_) : cfg_.boundary_value;
      if (!flux_->state_set.contains(um) || !flux_->state_set.contains(up))
        throw StateSpaceViolation("Hyperbolic1D: trace outside the state set");
      double w = num_flux_.intermediate(0, um, up);
      if (!flux_->state_set.contains(w))
        throw StateSpaceViolation("Hyperbolic1D: intermediate state outside the state set");
      ed.um[e] = um;
      ed.up[e] = up;
      ed.w[e] = w;
      ed.F[e] = flux_->eval(0, w);
    }
    return ed;
  }

  DGField1D apply(const DGField1D& v) const {
    EdgeData ed = edge_data(v);
    return apply_with_edges(v, ed);
  }

  DGField1D apply_with_edges(const DGField1D& v, const EdgeData& ed) const {
    DGField1D out = DGField1D::zero_like(v);
    const auto& qr = flux_rule(cfg_.q);
    const auto& own = gauss_points(nn_);
    const double h = mesh_->h();
    for (int k = 0; k < mesh_->n_cells(); ++k) {
      // volume term: int_K f(v) phi' dx = int f(v) d_xi phi dxi (h-free)
      for (int m = 0; m < nq_; ++m) {
        double vm = 0.0;
        for (int j = 0; j < nn_; ++j) vm += bas_[m * nn_ + j] * v.at(k, j);
        double fv = qr.weights[m] * flux_->eval(0, vm);
        for (int i = 0; i < nn_; ++i) out.at(k, i) += fv * dbas_[m * nn_ + i];
      }
      double Fl = ed.F[mesh_->left_edge_of_cell(k)];
      double Fr = ed.F[mesh_->right_edge_of_cell(k)];
      for (int i = 0; i < nn_; ++i) {
        out.at(k, i) += Fl * tL_[i] - Fr * tR_[i];
        out.at(k, i) /= 0.5 * h * own.weights[i];
      }
    }
    return out;
  }

 private:
  double trace(const DGField1D& v, int k, const std::vector<double>& t) const {
    double s = 0.0;
    for (int j = 0; j < nn_; ++j) s += t[j] * v.at(k, j);
    return s;
  }

  const Mesh1D* mesh_;
  const FluxModel* flux_;
  SolverConfig cfg_;
  BasisPtr basis_;
  int nn_, nq_;
  std::vector<double> bas_, dbas_, tL_, tR_;
  RichtmyerFlux num_flux_;
};

// ---------------------------------------------------------------------------
// Semi-discrete hyperbolic operator, 2D tensor mesh
// ---------------------------------------------------------------------------

class Hyperbolic2D {
 public:
  Hyperbolic2D(const Mesh2D& mesh, const FluxModel& flux, const SolverConfig& cfg)
      : mesh_(&mesh), flux_(&flux), cfg_(cfg), nn_(cfg.q + 1) {
    basis_ = gauss_basis(nn_);
    const auto& qr = flux_rule(cfg.q);
    nq_ = qr.size();
    bas_.assign(nq_ * nn_, 0.0);
    dbas_.assign(nq_ * nn_, 0.0);
    std::vector<double> tmp;
    for (int m = 0; m < nq_; ++m) {
      basis_->eval(qr.nodes[m], tmp);
      for (int i = 0; i < nn_; ++i) bas_[m * nn_ + i] = tmp[i];
      basis_->eval_deriv(qr.nodes[m], tmp);
      for (int i = 0; i < nn_; ++i) dbas_[m * nn_ + i] = tmp[i];
    }
    basis_->eval(-1.0, tL_);
    basis_->eval(1.0, tR_);
    num_flux_x_ = RichtmyerFlux{flux_, cfg.tau / mesh.hx()};
    num_flux_y_ = RichtmyerFlux{flux_, cfg.tau / mesh.hy()};
  }

  const SolverConfig& config() const { return cfg_; }
  const RichtmyerFlux& numerical_flux(Axis a) const {
    return a == Axis::X ? num_flux_x_ : num_flux_y_;
  }
  BasisPtr basis() const { return basis_; }

  /// Numerical flux values along one edge at the dense quadrature nodes of
  /// flux_rule(q). Rows: edges (vertical first per vedge_index ordering),
  /// evaluated lazily per apply(); the reconstruction recomputes identically.
  struct EdgeData {
    // F[e][m]: flux at transverse quadrature node m of edge e
    std::vector<std::vector<double>> Fv, Fh;  // vertical, horizontal edges
    std::vector<std::vector<double>> wv, wh;  // intermediate states
  };

  EdgeData edge_data(const DGField2D& v) const {
    EdgeData ed;
    const auto& qr = flux_rule(cfg_.q);
    ed.Fv.assign(mesh_->n_vedges(), std::vector<double>(nq_, 0.0));
    ed.wv.assign(mesh_->n_vedges(), std::vector<double>(nq_, 0.0));
    ed.Fh.assign(mesh_->n_hedges(), std::vector<double>(nq_, 0.0));
    ed.wh.assign(mesh_->n_hedges(), std::vector<double>(nq_, 0.0));
    const int nvx = mesh_->periodic() ? mesh_->nx() : mesh_->nx() + 1;
    for (int iy = 0; iy < mesh_->ny(); ++iy)
      for (int i = 0; i < nvx; ++i) {
        int e = mesh_->vedge_index(i, iy);
        int kl = mesh_->vedge_left_cell(i, iy), kr = mesh_->vedge_right_cell(i, iy);
        for (int m = 0; m < nq_; ++m) {
          double eta = qr.nodes[m];
          double um = kl >= 0 ? v.eval_ref(kl, 1.0, eta) : cfg_.boundary_value;
          double up = kr >= 0 ? v.eval_ref(kr, -1.0, eta) : cfg_.boundary_value;
          check_state(um);
          check_state(up);
          double w = num_flux_x_.intermediate(0, um, up);
          check_state(w);
          ed.wv[e][m] = w;
          ed.Fv[e][m] = flux_->eval(0, w);
        }
      }
    const int nhy = mesh_->periodic() ? mesh_->ny() : mesh_->ny() + 1;
    for (int j = 0; j < nhy; ++j)
      for (int ix = 0; ix < mesh_->nx(); ++ix) {
        int e = mesh_->hedge_index(ix, j);
        int kb = mesh_->hedge_bottom_cell(ix, j), kt = mesh_->hedge_top_cell(ix, j);
        for (int m = 0; m < nq_; ++m) {
          double xi = qr.nodes[m];
          double um = kb >= 0 ? v.eval_ref(kb, xi, 1.0) : cfg_.boundary_value;
          double up = kt >= 0 ? v.eval_ref(kt, xi, -1.0) : cfg_.boundary_value;
          check_state(um);
          check_state(up);
          double w = num_flux_y_.intermediate(1, um, up);
          check_state(w);
          ed.wh[e][m] = w;
          ed.Fh[e][m] = flux_->eval(1, w);
        }
      }
    return ed;
  }

  DGField2D apply(const DGField2D& v) const {
    EdgeData ed = edge_data(v);
    return apply_with_edges(v, ed);
  }

  DGField2D apply_with_edges(const DGField2D& v, const EdgeData& ed) const {
    DGField2D out = DGField2D::zero_like(v);
    const auto& qr = flux_rule(cfg_.q);
    const auto& own = gauss_points(nn_);
    const double hx = mesh_->hx(), hy = mesh_->hy();
    for (int iy = 0; iy < mesh_->ny(); ++iy)
      for (int ix = 0; ix < mesh_->nx(); ++ix) {
        int k = mesh_->cell_index(ix, iy);
        // volume term: int f1(v) dphi/dx + f2(v) dphi/dy over the cell
        for (int my = 0; my < nq_; ++my)
          for (int mx = 0; mx < nq_; ++mx) {
            double vm = 0.0;
            for (int jy = 0; jy < nn_; ++jy)
              for (int jx = 0; jx < nn_; ++jx)
                vm += bas_[mx * nn_ + jx] * bas_[my * nn_ + jy] * v.at(k, jx, jy);
            double wq = qr.weights[mx] * qr.weights[my];
            double f1 = wq * flux_->eval(0, vm) * (0.5 * hy) * (2.0 / hx) * (0.5 * hx);
            double f2 = wq * flux_->eval(1, vm) * (0.5 * hx) * (2.0 / hy) * (0.5 * hy);
            // phi = l_ix(xi) l_iy(eta); dphi/dx = (2/hx) l_ix' l_iy etc.
            for (int jy = 0; jy < nn_; ++jy)
              for (int jx = 0; jx < nn_; ++jx)
                out.at(k, jx, jy) += f1 * dbas_[mx * nn_ + jx] * bas_[my * nn_ + jy] +
                                     f2 * bas_[mx * nn_ + jx] * dbas_[my * nn_ + jy];
          }
        // vertical edges: left face i=ix, right face i=ix+1 (or wrap)
        int el = mesh_->vedge_index(ix, iy);
        int er = mesh_->periodic() ? mesh_->vedge_index((ix + 1) % mesh_->nx(), iy)
                                   : mesh_->vedge_index(ix + 1, iy);
        int eb = mesh_->hedge_index(ix, iy);
        int et = mesh_->periodic() ? mesh_->hedge_index(ix, (iy + 1) % mesh_->ny())
                                   : mesh_->hedge_index(ix, iy + 1);
        for (int m = 0; m < nq_; ++m) {
          double wl = qr.weights[m] * 0.5 * hy;
          for (int jy = 0; jy < nn_; ++jy) {
            double ty = bas_[m * nn_ + jy];
            for (int jx = 0; jx < nn_; ++jx) {
              out.at(k, jx, jy) += wl * ed.Fv[el][m] * tL_[jx] * ty;
              out.at(k, jx, jy) -= wl * ed.Fv[er][m] * tR_[jx] * ty;
            }
          }
          double wb = qr.weights[m] * 0.5 * hx;
          for (int jx = 0; jx < nn_; ++jx) {
            double tx = bas_[m * nn_ + jx];
            for (int jy = 0; jy < nn_; ++jy) {
              out.at(k, jx, jy) += wb * ed.Fh[eb][m] * tx * tL_[jy];
              out.at(k, jx, jy) -= wb * ed.Fh[et][m] * tx * tR_[jy];
            }
          }
        }
        for (int jy = 0; jy < nn_; ++jy)
          for (int jx = 0; jx < nn_; ++jx)
            out.at(k, jx, jy) /= 0.25 * hx * hy * own.weights[jx] * own.weights[jy];
      }
    return out;
  }

 private:
  void check_state(double u) const {
    if (!flux_->state_set.contains(u))
      throw StateSpaceViolation("Hyperbolic2D: state outside the state set");
  }

  const Mesh2D* mesh_;
  const FluxModel* flux_;
  SolverConfig cfg_;
  BasisPtr basis_;
  int nn_, nq_;
  std::vector<double> bas_, dbas_, tL_, tR_;
  RichtmyerFlux num_flux_x_, num_flux_y_;
};

// ---------------------------------------------------------------------------
// IMEX time stepping: explicit hyperbolic part, implicit IP diffusion
// ---------------------------------------------------------------------------

/// One step of (M + tau A(eps_hat)) v^{n+1} = M v^n + tau M H(v^n).
/// The sparse factorization is cached and rebuilt only when eps_hat changes.
class ImexStepper1D {
 public:
  ImexStepper1D(const Mesh1D& mesh, const FluxModel& flux, const SolverConfig& cfg)
      : mesh_(&mesh), hyp_(mesh, flux, cfg), cfg_(cfg), nn_(cfg.q + 1) {
    const auto& own = gauss_points(nn_);
    mass_.resize(mesh.n_cells() * nn_);
    for (int k = 0; k < mesh.n_cells(); ++k)
      for (int i = 0; i < nn_; ++i) mass_[k * nn_ + i] = 0.5 * mesh.h() * own.weights[i];
  }

  const Hyperbolic1D& hyperbolic() const { return hyp_; }

  DGField1D step(const DGField1D& v, const ModelField& eps_hat) {
    DGField1D H = hyp_.apply(v);
    DGField1D out = DGField1D::zero_like(v);
    const double tau = cfg_.tau;
    const int n = static_cast<int>(mass_.size());
    if (eps_hat.all_zero()) {
      for (int i = 0; i < n; ++i) out.data()[i] = v.data()[i] + tau * H.data()[i];
      return out;
    }
    refactor_if_needed(eps_hat);
    Eigen::VectorXd b(n);
    for (int i = 0; i < n; ++i) b[i] = mass_[i] * (v.data()[i] + tau * H.data()[i]);
    Eigen::VectorXd x = lu_.solve(b);
    for (int i = 0; i < n; ++i) out.data()[i] = x[i];
    return out;
  }

 private:
  void refactor_if_needed(const ModelField& eps_hat) {
    if (have_lu_ && eps_hat == cached_eps_) return;
    Eigen::SparseMatrix<double> A =
        assemble_ip_matrix(*mesh_, cfg_.q, eps_hat, cfg_.sigma);
    const int n = static_cast<int>(mass_.size());
    Eigen::SparseMatrix<double> M(n, n);
    std::vector<Eigen::Triplet<double>> trip;
    for (int i = 0; i < n; ++i) trip.emplace_back(i, i, mass_[i]);
    M.setFromTriplets(trip.begin(), trip.end());
    Eigen::SparseMatrix<double> S = M + cfg_.tau * A;
    S.makeCompressed();
    lu_.compute(S);
    if (lu_.info() != Eigen::Success)
      throw std::runtime_error("ImexStepper1D: factorization failed");
    cached_eps_ = eps_hat;
    have_lu_ = true;
  }

  const Mesh1D* mesh_;
  Hyperbolic1D hyp_;
  SolverConfig cfg_;
  int nn_;
  std::vector<double> mass_;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu_;
  ModelField cached_eps_;
  bool have_lu_ = false;
};

class ImexStepper2D {
 public:
  ImexStepper2D(const Mesh2D& mesh, const FluxModel& flux, const SolverConfig& cfg)
      : mesh_(&mesh), hyp_(mesh, flux, cfg), cfg_(cfg), nn_(cfg.q + 1) {
    const auto& own = gauss_points(nn_);
    const int nn2 = nn_ * nn_;
    mass_.resize(static_cast<size_t>(mesh.n_cells()) * nn2);
    for (int k = 0; k < mesh.n_cells(); ++k)
      for (int jy = 0; jy < nn_; ++jy)
        for (int jx = 0; jx < nn_; ++jx)
          mass_[k * nn2 + jy * nn_ + jx] =
              0.25 * mesh.hx() * mesh.hy() * own.weights[jx] * own.weights[jy];
  }

  const Hyperbolic2D& hyperbolic() const { return hyp_; }

  DGField2D step(const DGField2D& v, const ModelField& eps_hat) {
    DGField2D H = hyp_.apply(v);
    DGField2D out = DGField2D::zero_like(v);
    const double tau = cfg_.tau;
    const int n = static_cast<int>(mass_.size());
    if (eps_hat.all_zero()) {
      for (int i = 0; i < n; ++i) out.data()[i] = v.data()[i] + tau * H.data()[i];
      return out;
    }
    refactor_if_needed(eps_hat);
    Eigen::VectorXd b(n);
    for (int i = 0; i < n; ++i) b[i] = mass_[i] * (v.data()[i] + tau * H.data()[i]);
    Eigen::VectorXd x = lu_.solve(b);
    for (int i = 0; i < n; ++i) out.data()[i] = x[i];
    return out;
  }

 private:
  void refactor_if_needed(const ModelField& eps_hat) {
    if (have_lu_ && eps_hat == cached_eps_) return;
    Eigen::SparseMatrix<double> A =
        assemble_ip_matrix(*mesh_, cfg_.q, eps_hat, cfg_.sigma);
    const int n = static_cast<int>(mass_.size());
    Eigen::SparseMatrix<double> M(n, n);
    std::vector<Eigen::Triplet<double>> trip;
    for (int i = 0; i < n; ++i) trip.emplace_back(i, i, mass_[i]);
    M.setFromTriplets(trip.begin(), trip.end());
    Eigen::SparseMatrix<double> S = M + cfg_.tau * A;
    S.makeCompressed();
    lu_.compute(S);
    if (lu_.info() != Eigen::Success)
      throw std::runtime_error("ImexStepper2D: factorization failed");
    cached_eps_ = eps_hat;
    have_lu_ = true;
  }

  const Mesh2D* mesh_;
  Hyperbolic2D hyp_;
  SolverConfig cfg_;
  int nn_;
  std::vector<double> mass_;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu_;
  ModelField cached_eps_;
  bool have_lu_ = false;
};

}  // namespace modad
