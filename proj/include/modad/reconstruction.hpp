#pragma once

#include <Eigen/Dense>

#include "modad/solver.hpp"

namespace modad {

// ---------------------------------------------------------------------------
// 1D reconstructions
// ---------------------------------------------------------------------------

/// Computes the degree-(q+1) flux reconstruction and the continuous
/// degree-(q+1) solution reconstruction of a dG state. The flux
/// reconstruction satisfies, cell by cell,
///   int dx(fhat) phi = -int f(v) phi' + F_r phi(1) - F_l phi(-1),  phi in V_q,
///   fhat(-1) = F_l,
/// which makes  dt v_h + dx fhat = 0  hold pointwise for the explicit part of
/// the scheme and gives a globally continuous fhat with edge values F.
class Reconstructor1D {
 public:
  Reconstructor1D(const Mesh1D& mesh, const FluxModel& flux, const SolverConfig& cfg)
      : mesh_(&mesh), flux_(&flux), cfg_(cfg), q_(cfg.q), nn_(cfg.q + 1), nr_(cfg.q + 2) {
    vq_ = gauss_basis(nn_);
    vq1_ = gauss_basis(nr_);
    const auto& qr = flux_rule(q_);
    nq_ = qr.size();

    // tables of V_q basis values/derivatives at the dense flux rule
    bas_.assign(nq_ * nn_, 0.0);
    dbas_.assign(nq_ * nn_, 0.0);
    rbas_.assign(nq_ * nr_, 0.0);
    std::vector<double> tmp;
    for (int m = 0; m < nq_; ++m) {
      vq_->eval(qr.nodes[m], tmp);
      for (int i = 0; i < nn_; ++i) bas_[m * nn_ + i] = tmp[i];
      vq_->eval_deriv(qr.nodes[m], tmp);
      for (int i = 0; i < nn_; ++i) dbas_[m * nn_ + i] = tmp[i];
      vq1_->eval(qr.nodes[m], tmp);
      for (int j = 0; j < nr_; ++j) rbas_[m * nr_ + j] = tmp[j];
    }
    vq_->eval(-1.0, tL_);
    vq_->eval(1.0, tR_);

    // flux system: rows 0..q are int psi_j' l_i, last row is psi_j(-1)
    Eigen::MatrixXd A(nr_, nr_);
    std::vector<double> pl, pd;
    for (int i = 0; i < nn_; ++i)
      for (int j = 0; j < nr_; ++j) {
        double s = 0.0;
        for (int m = 0; m < nq_; ++m) {
          vq1_->eval_deriv(qr.nodes[m], pd);
          s += qr.weights[m] * pd[j] * bas_[m * nn_ + i];
        }
        A(i, j) = s;
      }
    vq1_->eval(-1.0, pl);
    for (int j = 0; j < nr_; ++j) A(nn_, j) = pl[j];
    flux_lu_ = A.partialPivLu();

    // solution system: rows 0..q-1 are int psi_j m_i (m_i in V_{q-1}),
    // then the two endpoint values
    Eigen::MatrixXd B(nr_, nr_);
    if (q_ >= 1) {
      auto vqm1 = gauss_basis(q_);
      std::vector<double> mv;
      vqm1_tab_.assign(nq_ * q_, 0.0);
      for (int m = 0; m < nq_; ++m) {
        vqm1->eval(qr.nodes[m], mv);
        for (int i = 0; i < q_; ++i) vqm1_tab_[m * q_ + i] = mv[i];
      }
      for (int i = 0; i < q_; ++i)
        for (int j = 0; j < nr_; ++j) {
          double s = 0.0;
          for (int m = 0; m < nq_; ++m)
            s += qr.weights[m] * vqm1_tab_[m * q_ + i] * rbas_[m * nr_ + j];
          B(i, j) = s;
        }
    }
    std::vector<double> pr;
    vq1_->eval(-1.0, pl);
    vq1_->eval(1.0, pr);
    for (int j = 0; j < nr_; ++j) {
      B(q_, j) = pl[j];
      B(q_ + 1, j) = pr[j];
    }
    sol_lu_ = B.partialPivLu();
  }

  BasisPtr recon_basis() const { return vq1_; }

  /// fhat in V_{q+1}, globally continuous with edge values ed.F.
  DGField1D flux_reconstruction(const DGField1D& v, const Hyperbolic1D::EdgeData& ed) const {
    const auto& qr = flux_rule(q_);
    DGField1D out(*mesh_, vq1_, 1);
    Eigen::VectorXd rhs(nr_);
    for (int k = 0; k < mesh_->n_cells(); ++k) {
      double Fl = ed.F[mesh_->left_edge_of_cell(k)];
      double Fr = ed.F[mesh_->right_edge_of_cell(k)];
      for (int i = 0; i < nn_; ++i) {
        double vol = 0.0;
        for (int m = 0; m < nq_; ++m) {
          double vm = 0.0;
          for (int j = 0; j < nn_; ++j) vm += bas_[m * nn_ + j] * v.at(k, j);
          vol += qr.weights[m] * flux_->eval(0, vm) * dbas_[m * nn_ + i];
        }
        rhs(i) = -vol + Fr * tR_[i] - Fl * tL_[i];
      }
      rhs(nn_) = Fl;
      Eigen::VectorXd c = flux_lu_.solve(rhs);
      for (int j = 0; j < nr_; ++j) out.at(k, j) = c(j);
    }
    return out;
  }

  /// vhat in V_{q+1}: endpoint values are the intermediate states w of the
  /// numerical flux (hence continuity), interior moments against V_{q-1}
  /// match v.
  DGField1D solution_reconstruction(const DGField1D& v,
                                    const Hyperbolic1D::EdgeData& ed) const {
    const auto& qr = flux_rule(q_);
    DGField1D out(*mesh_, vq1_, 1);
    Eigen::VectorXd rhs(nr_);
    for (int k = 0; k < mesh_->n_cells(); ++k) {
      for (int i = 0; i < q_; ++i) {
        double s = 0.0;
        for (int m = 0; m < nq_; ++m) {
          double vm = 0.0;
          for (int j = 0; j < nn_; ++j) vm += bas_[m * nn_ + j] * v.at(k, j);
          s += qr.weights[m] * vm * vqm1_tab_[m * q_ + i];
        }
        rhs(i) = s;
      }
      rhs(q_) = ed.w[mesh_->left_edge_of_cell(k)];
      rhs(q_ + 1) = ed.w[mesh_->right_edge_of_cell(k)];
      Eigen::VectorXd c = sol_lu_.solve(rhs);
      for (int j = 0; j < nr_; ++j) out.at(k, j) = c(j);
    }
    return out;
  }

 private:
  const Mesh1D* mesh_;
  const FluxModel* flux_;
  SolverConfig cfg_;
  int q_, nn_, nr_, nq_;
  BasisPtr vq_, vq1_;
  std::vector<double> bas_, dbas_, rbas_, tL_, tR_;
  std::vector<double> vqm1_tab_;
  Eigen::PartialPivLU<Eigen::MatrixXd> flux_lu_, sol_lu_;
};

// ---------------------------------------------------------------------------
// 2D reconstructions on tensor meshes
// ---------------------------------------------------------------------------

/// Directional flux reconstructions fhat_1 in Q_{q+1,q} and fhat_2 in
/// Q_{q,q+1}, and a continuous solution reconstruction vhat in Q_{q+2,q+2}.
/// With Gauss-nodal bases the transverse direction diagonalizes, so each
/// flux reconstruction reduces to independent 1D solves per Gauss line, and
///   dt v_h + dx fhat_1 + dy fhat_2 = 0
/// holds pointwise for the explicit part of the scheme.
class Reconstructor2D {
 public:
  Reconstructor2D(const Mesh2D& mesh, const FluxModel& flux, const SolverConfig& cfg)
      : mesh_(&mesh), flux_(&flux), cfg_(cfg), q_(cfg.q), nn_(cfg.q + 1), nr_(cfg.q + 2) {
    vq_ = gauss_basis(nn_);
    vq1_ = gauss_basis(nr_);
    vhat_basis_ = gauss_lobatto_like_basis(q_ + 3);
    const auto& qr = flux_rule(q_);
    nq_ = qr.size();
    bas_.assign(nq_ * nn_, 0.0);
    dbas_.assign(nq_ * nn_, 0.0);
    std::vector<double> tmp;
    for (int m = 0; m < nq_; ++m) {
      vq_->eval(qr.nodes[m], tmp);
      for (int i = 0; i < nn_; ++i) bas_[m * nn_ + i] = tmp[i];
      vq_->eval_deriv(qr.nodes[m], tmp);
      for (int i = 0; i < nn_; ++i) dbas_[m * nn_ + i] = tmp[i];
    }
    vq_->eval(-1.0, tL_);
    vq_->eval(1.0, tR_);

    Eigen::MatrixXd A(nr_, nr_);
    std::vector<double> pd, pl;
    for (int i = 0; i < nn_; ++i)
      for (int j = 0; j < nr_; ++j) {
        double s = 0.0;
        for (int m = 0; m < nq_; ++m) {
          vq1_->eval_deriv(qr.nodes[m], pd);
          s += qr.weights[m] * pd[j] * bas_[m * nn_ + i];
        }
        A(i, j) = s;
      }
    vq1_->eval(-1.0, pl);
    for (int j = 0; j < nr_; ++j) A(nn_, j) = pl[j];
    flux_lu_ = A.partialPivLu();
  }

  BasisPtr flux_basis_fine() const { return vq1_; }
  BasisPtr flux_basis_coarse() const { return vq_; }
  BasisPtr solution_basis() const { return vhat_basis_; }

  /// fhat_alpha; basis is (q+2,q+1) nodes for Axis::X and (q+1,q+2) for
  /// Axis::Y. Uses the same edge data as the scheme.
  DGField2D flux_reconstruction(const DGField2D& v, const Hyperbolic2D::EdgeData& ed,
                                Axis axis) const {
    const auto& qr = flux_rule(q_);
    const auto& own = gauss_points(nn_);
    const bool ax = (axis == Axis::X);
    DGField2D out(*mesh_, ax ? vq1_ : vq_, ax ? vq_ : vq1_, 1);
    Eigen::VectorXd rhs(nr_);
    const int alpha = ax ? 0 : 1;
    for (int iy = 0; iy < mesh_->ny(); ++iy)
      for (int ix = 0; ix < mesh_->nx(); ++ix) {
        int k = mesh_->cell_index(ix, iy);
        const std::vector<double>* Fl;
        const std::vector<double>* Fr;
        if (ax) {
          int el = mesh_->vedge_index(ix, iy);
          int er = mesh_->periodic() ? mesh_->vedge_index((ix + 1) % mesh_->nx(), iy)
                                     : mesh_->vedge_index(ix + 1, iy);
          Fl = &ed.Fv[el];
          Fr = &ed.Fv[er];
        } else {
          int eb = mesh_->hedge_index(ix, iy);
          int et = mesh_->periodic() ? mesh_->hedge_index(ix, (iy + 1) % mesh_->ny())
                                     : mesh_->hedge_index(ix, iy + 1);
          Fl = &ed.Fh[eb];
          Fr = &ed.Fh[et];
        }
        for (int jt = 0; jt < nn_; ++jt) {  // transverse Gauss line index
          double wt = own.weights[jt];
          // P_q projection of the edge flux onto the transverse line basis,
          // computed with the same dense rule as the scheme's edge integrals
          double Fl_j = 0.0, Fr_j = 0.0;
          for (int m = 0; m < nq_; ++m) {
            Fl_j += qr.weights[m] * (*Fl)[m] * bas_[m * nn_ + jt];
            Fr_j += qr.weights[m] * (*Fr)[m] * bas_[m * nn_ + jt];
          }
          Fl_j /= wt;
          Fr_j /= wt;
          for (int i = 0; i < nn_; ++i) {
            // volume moment int f_a(v) d_line(l_i) l_jt over the cell,
            // dense rule in both directions
            double vol = 0.0;
            for (int mt = 0; mt < nq_; ++mt)
              for (int ml = 0; ml < nq_; ++ml) {
                double vm = 0.0;
                for (int jy = 0; jy < nn_; ++jy)
                  for (int jx = 0; jx < nn_; ++jx) {
                    double bx = ax ? bas_[ml * nn_ + jx] : bas_[mt * nn_ + jx];
                    double by = ax ? bas_[mt * nn_ + jy] : bas_[ml * nn_ + jy];
                    vm += bx * by * v.at(k, jx, jy);
                  }
                vol += qr.weights[ml] * qr.weights[mt] * flux_->eval(alpha, vm) *
                       dbas_[ml * nn_ + i] * bas_[mt * nn_ + jt];
              }
            vol /= wt;
            rhs(i) = -vol + Fr_j * tR_[i] - Fl_j * tL_[i];
          }
          rhs(nn_) = Fl_j;
          Eigen::VectorXd c = flux_lu_.solve(rhs);
          for (int j = 0; j < nr_; ++j) {
            if (ax)
              out.at(k, j, jt) = c(j);
            else
              out.at(k, jt, j) = c(j);
          }
        }
      }
    return out;
  }

  /// vhat in Q_{q+2,q+2}: tensor interpolant whose interior nodes carry v_h,
  /// edge nodes carry the intermediate states w of the numerical flux, and
  /// corner nodes the arithmetic mean of the four one-sided corner limits.
  /// Globally continuous by construction.
  DGField2D solution_reconstruction(const DGField2D& v) const {
    DGField2D out(*mesh_, vhat_basis_, vhat_basis_, 1);
    const int nv = q_ + 3;  // nodes per direction: {-1, gauss(q+1), +1}
    const auto& gnodes = gauss_points(nn_).nodes;
    const double rx = cfg_.tau / mesh_->hx();
    const double ry = cfg_.tau / mesh_->hy();
    const int nx = mesh_->nx(), ny = mesh_->ny();
    auto cell = [&](int ix, int iy) {
      int jx = mesh_->periodic() ? (ix % nx + nx) % nx : ix;
      int jy = mesh_->periodic() ? (iy % ny + ny) % ny : iy;
      if (jx < 0 || jx >= nx || jy < 0 || jy >= ny) return -1;
      return mesh_->cell_index(jx, jy);
    };
    auto val = [&](int k, double xi, double eta) {
      return k >= 0 ? v.eval_ref(k, xi, eta) : cfg_.boundary_value;
    };
    auto wstate = [&](double um, double up, int alpha, double r) {
      return 0.5 * (um + up) - r * (flux_->eval(alpha, up) - flux_->eval(alpha, um));
    };
    for (int iy = 0; iy < ny; ++iy)
      for (int ix = 0; ix < nx; ++ix) {
        int k = mesh_->cell_index(ix, iy);
        int kl = cell(ix - 1, iy), kr = cell(ix + 1, iy);
        int kb = cell(ix, iy - 1), kt = cell(ix, iy + 1);
        // interior nodes
        for (int jy = 0; jy < nn_; ++jy)
          for (int jx = 0; jx < nn_; ++jx) out.at(k, jx + 1, jy + 1) = v.at(k, jx, jy);
        // vertical edge nodes (left face jx=0, right face jx=nv-1)
        for (int jy = 0; jy < nn_; ++jy) {
          double eta = gnodes[jy];
          out.at(k, 0, jy + 1) = wstate(val(kl, 1.0, eta), val(k, -1.0, eta), 0, rx);
          out.at(k, nv - 1, jy + 1) = wstate(val(k, 1.0, eta), val(kr, -1.0, eta), 0, rx);
        }
        // horizontal edge nodes
        for (int jx = 0; jx < nn_; ++jx) {
          double xi = gnodes[jx];
          out.at(k, jx + 1, 0) = wstate(val(kb, xi, 1.0), val(k, xi, -1.0), 1, ry);
          out.at(k, jx + 1, nv - 1) = wstate(val(k, xi, 1.0), val(kt, xi, -1.0), 1, ry);
        }
        // corners: mean of the four one-sided limits (single-valued globally)
        auto corner = [&](int cx, int cy) {
          // cx,cy in {0,1}: corner at (xi,eta) = (2cx-1, 2cy-1)
          int ia = ix + (cx ? 0 : -1), ib = iy + (cy ? 0 : -1);
          double s = 0.0;
          int cnt = 0;
          for (int dy = 0; dy <= 1; ++dy)
            for (int dx = 0; dx <= 1; ++dx) {
              int kc = cell(ia + dx, ib + dy);
              double xi = dx ? -1.0 : 1.0;
              double eta = dy ? -1.0 : 1.0;
              s += val(kc, xi, eta);
              ++cnt;
            }
          return s / cnt;
        };
        out.at(k, 0, 0) = corner(0, 0);
        out.at(k, nv - 1, 0) = corner(1, 0);
        out.at(k, 0, nv - 1) = corner(0, 1);
        out.at(k, nv - 1, nv - 1) = corner(1, 1);
      }
    return out;
  }

 private:
  const Mesh2D* mesh_;
  const FluxModel* flux_;
  SolverConfig cfg_;
  int q_, nn_, nr_, nq_;
  BasisPtr vq_, vq1_, vhat_basis_;
  std::vector<double> bas_, dbas_, tL_, tR_;
  Eigen::PartialPivLU<Eigen::MatrixXd> flux_lu_;
};

}  // namespace modad
