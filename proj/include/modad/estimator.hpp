#pragma once

#include "modad/hminus1.hpp"
#include "modad/reconstruction.hpp"

namespace modad {

/// Per-step estimator output. Increments are already scaled by tau, i.e. they
/// are the quadrature contribution of one time slab to the time integrals.
struct StepEstimate {
  double em_inc = 0.0;  // modeling term: tau * int (eps - eps_hat) |grad vhat|^2
  double ed_inc = 0.0;  // discretization: tau * (||R_H||^2 + (1/eps)||R_P||^2_{-1})
  double rh_norm2 = 0.0;     // ||R_H||_{L2}^2 at this step
  double rp_norm2 = 0.0;     // ||R_P||_{H^{-1}}^2 at this step
  double grad_vhat_max = 0.0;
  std::vector<double> cell_em;  // per-cell split of em_inc
  std::vector<double> cell_ed;  // per-cell split of ed_inc
};

/// Running accumulation of the a posteriori bound
///   (init^2 + E_M + E_D) * exp((C_fbar * max||grad vhat||_inf + 1) t).
struct BoundState {
  double t = 0.0;
  double init_sq = 0.0;
  double cum_em = 0.0;
  double cum_ed = 0.0;
  double max_grad = 0.0;

  void advance(const StepEstimate& s, double tau) {
    t += tau;
    cum_em += s.em_inc;
    cum_ed += s.ed_inc;
    max_grad = std::max(max_grad, s.grad_vhat_max);
  }
  double gronwall(double cbar) const { return std::exp((cbar * max_grad + 1.0) * t); }
  double total(double cbar) const { return (init_sq + cum_em + cum_ed) * gronwall(cbar); }
};

// ---------------------------------------------------------------------------
// 1D estimator
// ---------------------------------------------------------------------------

class Estimator1D {
 public:
  Estimator1D(const Mesh1D& mesh, const FluxModel& flux, const SolverConfig& cfg,
              double eps_full)
      : mesh_(&mesh),
        flux_(&flux),
        cfg_(cfg),
        eps_(eps_full),
        hyp_(mesh, flux, cfg),
        rec_(mesh, flux, cfg),
        dual_(mesh, cfg.q + 2) {}

  const Reconstructor1D& reconstructor() const { return rec_; }
  const DualNorm1D& dual_space() const { return dual_; }

  /// Estimate the error contribution of the step v_prev -> v_new taken with
  /// model pattern eps_hat. Reconstructions of v_new are cached for the next
  /// call.
  StepEstimate evaluate(const DGField1D& v_prev, const DGField1D& v_new,
                        const ModelField& eps_hat) {
    const int nc = mesh_->n_cells();
    StepEstimate out;
    out.cell_em.assign(nc, 0.0);
    out.cell_ed.assign(nc, 0.0);

    DGField1D vhat_p, fhat_p;
    if (have_cache_ && cached_state_ == v_prev.data()) {
      vhat_p = cached_vhat_;
      fhat_p = cached_fhat_;
    } else {
      auto edp = hyp_.edge_data(v_prev);
      vhat_p = rec_.solution_reconstruction(v_prev, edp);
      fhat_p = rec_.flux_reconstruction(v_prev, edp);
    }
    auto edn = hyp_.edge_data(v_new);
    DGField1D vhat_n = rec_.solution_reconstruction(v_new, edn);
    cached_fhat_ = rec_.flux_reconstruction(v_new, edn);
    cached_vhat_ = vhat_n;
    cached_state_ = v_new.data();
    have_cache_ = true;

    const double tau = cfg_.tau;
    const double h = mesh_->h();
    const auto& qr = gauss_points(cfg_.q + 5);

    // hyperbolic residual R_H = dt(vhat - v_h) + dx(f(vhat) - fhat),
    // time derivative by backward differences, spatial part at t_{n-1}
    for (int k = 0; k < nc; ++k) {
      double cell = 0.0;
      for (int m = 0; m < qr.size(); ++m) {
        double xi = qr.nodes[m];
        double dtv = ((vhat_n.eval_ref(k, xi) - vhat_p.eval_ref(k, xi)) -
                      (v_new.eval_ref(k, xi) - v_prev.eval_ref(k, xi))) /
                     tau;
        double rh = dtv + flux_->deriv(0, vhat_p.eval_ref(k, xi)) * vhat_p.eval_dx_ref(k, xi) -
                    fhat_p.eval_dx_ref(k, xi);
        cell += qr.weights[m] * rh * rh;
      }
      cell *= 0.5 * h;
      out.rh_norm2 += cell;
      out.cell_ed[k] += tau * cell;
    }

    // parabolic residual R_P as a functional (implicit side, time n)
    if (!eps_hat.all_zero()) {
      if (eps_ == 0.0)
        throw InvalidParameter("Estimator1D: nonzero model pattern with eps = 0");
      DGField1D s = discrete_gradient(v_new, Side::Minus);
      DGField1D es = DGField1D::zero_like(s);
      for (int k = 0; k < nc; ++k)
        for (int i = 0; i < s.n_nodes(); ++i) es.at(k, i) = eps_hat[k] * s.at(k, i);
      DGField1D dps = discrete_gradient(es, Side::Plus);
      auto b = dual_.zero_load();
      dual_.add_volume_load(
          b, [&](int k, double xi) { return dps.eval_ref(k, xi); }, cfg_.q + 5);
      dual_.add_gradient_load(
          b, [&](int k, double xi) { return eps_hat[k] * vhat_n.eval_dx_ref(k, xi); },
          cfg_.q + 5);
      std::vector<double> cell_e;
      out.rp_norm2 = dual_.norm_squared(b, cell_e);
      for (int k = 0; k < nc; ++k) out.cell_ed[k] += tau / eps_ * cell_e[k];
    }
    out.ed_inc = tau * (out.rh_norm2 + (eps_ > 0.0 ? out.rp_norm2 / eps_ : 0.0));

    // modeling term and sup norm of grad vhat at time n
    for (int k = 0; k < nc; ++k) {
      double cell = 0.0;
      for (int m = 0; m < qr.size(); ++m) {
        double g = vhat_n.eval_dx_ref(k, qr.nodes[m]);
        cell += qr.weights[m] * g * g;
        out.grad_vhat_max = std::max(out.grad_vhat_max, std::abs(g));
      }
      out.grad_vhat_max = std::max({out.grad_vhat_max, std::abs(vhat_n.eval_dx_ref(k, -1.0)),
                                    std::abs(vhat_n.eval_dx_ref(k, 1.0))});
      double em_k = tau * (eps_ - eps_hat[k]) * 0.5 * h * cell;
      out.cell_em[k] = em_k;
      out.em_inc += em_k;
    }
    return out;
  }

  /// Hypothetical per-cell modeling load int_K eps |grad vhat|^2 of the cached
  /// reconstruction (no tau factor: the coarsening threshold |K| tol_c tol/eps
  /// is calibrated against the instantaneous density); used by the adaptive
  /// loop's coarsening rule.
  std::vector<double> modeling_density() const {
    std::vector<double> d(mesh_->n_cells(), 0.0);
    if (!have_cache_) return d;
    const auto& qr = gauss_points(cfg_.q + 5);
    for (int k = 0; k < mesh_->n_cells(); ++k) {
      double cell = 0.0;
      for (int m = 0; m < qr.size(); ++m) {
        double g = cached_vhat_.eval_dx_ref(k, qr.nodes[m]);
        cell += qr.weights[m] * g * g;
      }
      d[k] = eps_ * 0.5 * mesh_->h() * cell;
    }
    return d;
  }

 private:
  const Mesh1D* mesh_;
  const FluxModel* flux_;
  SolverConfig cfg_;
  double eps_;
  Hyperbolic1D hyp_;
  Reconstructor1D rec_;
  DualNorm1D dual_;
  bool have_cache_ = false;
  std::vector<double> cached_state_;
  DGField1D cached_vhat_, cached_fhat_;
};

// ---------------------------------------------------------------------------
// 2D estimator
// ---------------------------------------------------------------------------

class Estimator2D {
 public:
  Estimator2D(const Mesh2D& mesh, const FluxModel& flux, const SolverConfig& cfg,
              double eps_full)
      : mesh_(&mesh),
        flux_(&flux),
        cfg_(cfg),
        eps_(eps_full),
        hyp_(mesh, flux, cfg),
        rec_(mesh, flux, cfg),
        dual_(mesh, cfg.q + 2) {}

  StepEstimate evaluate(const DGField2D& v_prev, const DGField2D& v_new,
                        const ModelField& eps_hat) {
    const int nc = mesh_->n_cells();
    StepEstimate out;
    out.cell_em.assign(nc, 0.0);
    out.cell_ed.assign(nc, 0.0);

    DGField2D vhat_p, f1_p, f2_p;
    if (have_cache_ && cached_state_ == v_prev.data()) {
      vhat_p = cached_vhat_;
      f1_p = cached_f1_;
      f2_p = cached_f2_;
    } else {
      auto edp = hyp_.edge_data(v_prev);
      vhat_p = rec_.solution_reconstruction(v_prev);
      f1_p = rec_.flux_reconstruction(v_prev, edp, Axis::X);
      f2_p = rec_.flux_reconstruction(v_prev, edp, Axis::Y);
    }
    auto edn = hyp_.edge_data(v_new);
    DGField2D vhat_n = rec_.solution_reconstruction(v_new);
    cached_f1_ = rec_.flux_reconstruction(v_new, edn, Axis::X);
    cached_f2_ = rec_.flux_reconstruction(v_new, edn, Axis::Y);
    cached_vhat_ = vhat_n;
    cached_state_ = v_new.data();
    have_cache_ = true;

    const double tau = cfg_.tau;
    const double ja = 0.25 * mesh_->hx() * mesh_->hy();
    const auto& qr = gauss_points(cfg_.q + 4);

    for (int k = 0; k < nc; ++k) {
      double cell = 0.0;
      for (int my = 0; my < qr.size(); ++my)
        for (int mx = 0; mx < qr.size(); ++mx) {
          double xi = qr.nodes[mx], eta = qr.nodes[my];
          double dtv = ((vhat_n.eval_ref(k, xi, eta) - vhat_p.eval_ref(k, xi, eta)) -
                        (v_new.eval_ref(k, xi, eta) - v_prev.eval_ref(k, xi, eta))) /
                       tau;
          double vp = vhat_p.eval_ref(k, xi, eta);
          double rh = dtv + flux_->deriv(0, vp) * vhat_p.eval_dx_ref(k, xi, eta) +
                      flux_->deriv(1, vp) * vhat_p.eval_dy_ref(k, xi, eta) -
                      f1_p.eval_dx_ref(k, xi, eta) - f2_p.eval_dy_ref(k, xi, eta);
          cell += qr.weights[mx] * qr.weights[my] * rh * rh;
        }
      cell *= ja;
      out.rh_norm2 += cell;
      out.cell_ed[k] += tau * cell;
    }

    if (!eps_hat.all_zero()) {
      if (eps_ == 0.0)
        throw InvalidParameter("Estimator2D: nonzero model pattern with eps = 0");
      DGField2D sx = discrete_gradient(v_new, Side::Minus, Axis::X);
      DGField2D sy = discrete_gradient(v_new, Side::Minus, Axis::Y);
      DGField2D esx = DGField2D::zero_like(sx), esy = DGField2D::zero_like(sy);
      for (int k = 0; k < nc; ++k)
        for (int jy = 0; jy < sx.nny(); ++jy)
          for (int jx = 0; jx < sx.nnx(); ++jx) {
            esx.at(k, jx, jy) = eps_hat[k] * sx.at(k, jx, jy);
            esy.at(k, jx, jy) = eps_hat[k] * sy.at(k, jx, jy);
          }
      DGField2D dx = discrete_gradient(esx, Side::Plus, Axis::X);
      DGField2D dy = discrete_gradient(esy, Side::Plus, Axis::Y);
      auto b = dual_.zero_load();
      dual_.add_volume_load(
          b,
          [&](int k, double xi, double eta) {
            return dx.eval_ref(k, xi, eta) + dy.eval_ref(k, xi, eta);
          },
          cfg_.q + 4);
      dual_.add_gradient_load(
          b,
          [&](int k, double xi, double eta) {
            return eps_hat[k] * vhat_n.eval_dx_ref(k, xi, eta);
          },
          [&](int k, double xi, double eta) {
            return eps_hat[k] * vhat_n.eval_dy_ref(k, xi, eta);
          },
          cfg_.q + 4);
      std::vector<double> cell_e;
      out.rp_norm2 = dual_.norm_squared(b, cell_e);
      for (int k = 0; k < nc; ++k) out.cell_ed[k] += tau / eps_ * cell_e[k];
    }
    out.ed_inc = tau * (out.rh_norm2 + (eps_ > 0.0 ? out.rp_norm2 / eps_ : 0.0));

    for (int k = 0; k < nc; ++k) {
      double cell = 0.0;
      for (int my = 0; my < qr.size(); ++my)
        for (int mx = 0; mx < qr.size(); ++mx) {
          double gx = vhat_n.eval_dx_ref(k, qr.nodes[mx], qr.nodes[my]);
          double gy = vhat_n.eval_dy_ref(k, qr.nodes[mx], qr.nodes[my]);
          cell += qr.weights[mx] * qr.weights[my] * (gx * gx + gy * gy);
          out.grad_vhat_max =
              std::max(out.grad_vhat_max, std::sqrt(gx * gx + gy * gy));
        }
      double em_k = tau * (eps_ - eps_hat[k]) * ja * cell;
      out.cell_em[k] = em_k;
      out.em_inc += em_k;
    }
    return out;
  }

  std::vector<double> modeling_density() const {
    std::vector<double> d(mesh_->n_cells(), 0.0);
    if (!have_cache_) return d;
    const auto& qr = gauss_points(cfg_.q + 4);
    const double ja = 0.25 * mesh_->hx() * mesh_->hy();
    for (int k = 0; k < mesh_->n_cells(); ++k) {
      double cell = 0.0;
      for (int my = 0; my < qr.size(); ++my)
        for (int mx = 0; mx < qr.size(); ++mx) {
          double gx = cached_vhat_.eval_dx_ref(k, qr.nodes[mx], qr.nodes[my]);
          double gy = cached_vhat_.eval_dy_ref(k, qr.nodes[mx], qr.nodes[my]);
          cell += qr.weights[mx] * qr.weights[my] * (gx * gx + gy * gy);
        }
      d[k] = eps_ * ja * cell;
    }
    return d;
  }

 private:
  const Mesh2D* mesh_;
  const FluxModel* flux_;
  SolverConfig cfg_;
  double eps_;
  Hyperbolic2D hyp_;
  Reconstructor2D rec_;
  DualNorm2D dual_;
  bool have_cache_ = false;
  std::vector<double> cached_state_;
  DGField2D cached_vhat_, cached_f1_, cached_f2_;
};

}  // namespace modad
