#pragma once

#include <algorithm>
#include <numeric>

#include "modad/estimator.hpp"

namespace modad {

enum class CoarseningRule {
  TrueModeling,   // use the cell contributions of E_M (zero on full-model cells)
  Hypothetical,   // use tau int_K eps |grad vhat|^2 regardless of the local model
};

struct AdaptConfig {
  double tol = 1e-2;       // estimator budget triggering refinement
  double tol_c = 1e-3;     // coarsening fraction of tol
  double theta = 0.5;      // Doerfler bulk parameter
  double eps = 0.0;        // full-model viscosity
  CoarseningRule rule = CoarseningRule::Hypothetical;
};

/// Smallest set of cells whose indicator sum covers theta * total, largest
/// first; ties broken by cell index (sort is stable on equal keys).
inline std::vector<int> doerfler_mark(const std::vector<double>& indicator, double theta) {
  const int n = static_cast<int>(indicator.size());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return indicator[a] > indicator[b]; });
  double total = std::accumulate(indicator.begin(), indicator.end(), 0.0);
  std::vector<int> marked;
  double acc = 0.0;
  for (int k : order) {
    if (acc >= theta * total) break;
    marked.push_back(k);
    acc += indicator[k];
  }
  return marked;
}

/// One adaptation of the model pattern after a step:
/// refine by Doerfler marking when the accumulated estimator exceeds tol,
/// then coarsen cells with negligible modeling contribution.
inline void adapt_model(ModelField& eps_hat, const StepEstimate& est, const BoundState& bound,
                        const std::vector<double>& modeling_density, double cell_measure,
                        const AdaptConfig& cfg) {
  const int n = eps_hat.n_cells();
  if (bound.cum_em + bound.cum_ed > cfg.tol) {
    std::vector<double> indicator(n);
    for (int k = 0; k < n; ++k) indicator[k] = est.cell_em[k] + est.cell_ed[k];
    for (int k : doerfler_mark(indicator, cfg.theta)) eps_hat[k] = cfg.eps;
  }
  if (cfg.eps > 0.0) {
    double thresh = cell_measure * cfg.tol_c * cfg.tol / cfg.eps;
    for (int k = 0; k < n; ++k) {
      double m_k = cfg.rule == CoarseningRule::TrueModeling ? est.cell_em[k]
                                                            : modeling_density[k];
      if (eps_hat[k] != 0.0 && m_k < thresh) eps_hat[k] = 0.0;
    }
  }
}

// ---------------------------------------------------------------------------
// Adaptive run drivers
// ---------------------------------------------------------------------------

/// One row of the per-step trajectory.
struct StepRecord {
  double t = 0.0;
  double em_inc = 0.0, ed_inc = 0.0;
  double cum_em = 0.0, cum_ed = 0.0;
  double total_bound = 0.0;
  double err_l2 = 0.0;       // vs reference run when available, else 0
  double eps_measure = 0.0;  // measure of the full-model region
  double grad_vhat_max = 0.0;
  double gronwall = 1.0;
};

struct RunResult1D {
  DGField1D state;
  ModelField eps_hat;
  BoundState bound;
  std::vector<StepRecord> steps;
  std::vector<std::pair<double, DGField1D>> snapshots;
  std::vector<std::pair<double, ModelField>> model_snapshots;
};

struct RunResult2D {
  DGField2D state;
  ModelField eps_hat;
  BoundState bound;
  std::vector<StepRecord> steps;
  std::vector<std::pair<double, DGField2D>> snapshots;
  std::vector<std::pair<double, ModelField>> model_snapshots;
};

namespace detail {
inline bool hits_time(double t, double tau, const std::vector<double>& wanted) {
  for (double s : wanted)
    if (std::abs(t - s) < 0.5 * tau) return true;
  return false;
}
}  // namespace detail

/// Adaptive 1D run starting from the simplified model everywhere. The
/// optional reference trajectory (same stepper settings, eps_hat = eps
/// everywhere) supplies err_l2.
inline RunResult1D run_adaptive_1d(const Mesh1D& mesh, const FluxModel& flux,
                                   const SolverConfig& cfg, const AdaptConfig& acfg,
                                   const DGField1D& v0, int n_steps,
                                   const std::vector<double>& snapshot_times = {},
                                   const DGField1D* reference0 = nullptr) {
  RunResult1D res{v0, ModelField(mesh.n_cells(), 0.0), {}, {}, {}, {}};
  ImexStepper1D stepper(mesh, flux, cfg);
  Estimator1D est(mesh, flux, cfg, acfg.eps);
  ImexStepper1D ref_stepper(mesh, flux, cfg);
  DGField1D ref;
  ModelField ref_eps(mesh.n_cells(), acfg.eps);
  bool with_ref = reference0 != nullptr;
  if (with_ref) ref = *reference0;

  if (detail::hits_time(0.0, cfg.tau, snapshot_times)) {
    res.snapshots.emplace_back(0.0, res.state);
    res.model_snapshots.emplace_back(0.0, res.eps_hat);
  }
  for (int n = 1; n <= n_steps; ++n) {
    DGField1D v_new = stepper.step(res.state, res.eps_hat);
    StepEstimate se = est.evaluate(res.state, v_new, res.eps_hat);
    res.bound.advance(se, cfg.tau);
    adapt_model(res.eps_hat, se, res.bound, est.modeling_density(), mesh.h(), acfg);
    res.state = v_new;

    StepRecord r;
    r.t = n * cfg.tau;
    r.em_inc = se.em_inc;
    r.ed_inc = se.ed_inc;
    r.cum_em = res.bound.cum_em;
    r.cum_ed = res.bound.cum_ed;
    r.total_bound = res.bound.total(flux.cbar);
    r.grad_vhat_max = res.bound.max_grad;
    r.gronwall = res.bound.gronwall(flux.cbar);
    for (int k = 0; k < mesh.n_cells(); ++k)
      if (res.eps_hat[k] != 0.0) r.eps_measure += mesh.h();
    if (with_ref) {
      ref = ref_stepper.step(ref, ref_eps);
      DGField1D diff = DGField1D::zero_like(ref);
      for (size_t i = 0; i < diff.data().size(); ++i)
        diff.data()[i] = res.state.data()[i] - ref.data()[i];
      r.err_l2 = l2_norm(diff);
    }
    res.steps.push_back(r);
    if (detail::hits_time(r.t, cfg.tau, snapshot_times)) {
      res.snapshots.emplace_back(r.t, res.state);
      res.model_snapshots.emplace_back(r.t, res.eps_hat);
    }
  }
  return res;
}

inline RunResult2D run_adaptive_2d(const Mesh2D& mesh, const FluxModel& flux,
                                   const SolverConfig& cfg, const AdaptConfig& acfg,
                                   const DGField2D& v0, int n_steps,
                                   const std::vector<double>& snapshot_times = {},
                                   const DGField2D* reference0 = nullptr) {
  RunResult2D res{v0, ModelField(mesh.n_cells(), 0.0), {}, {}, {}, {}};
  ImexStepper2D stepper(mesh, flux, cfg);
  Estimator2D est(mesh, flux, cfg, acfg.eps);
  ImexStepper2D ref_stepper(mesh, flux, cfg);
  DGField2D ref;
  ModelField ref_eps(mesh.n_cells(), acfg.eps);
  bool with_ref = reference0 != nullptr;
  if (with_ref) ref = *reference0;

  if (detail::hits_time(0.0, cfg.tau, snapshot_times)) {
    res.snapshots.emplace_back(0.0, res.state);
    res.model_snapshots.emplace_back(0.0, res.eps_hat);
  }
  for (int n = 1; n <= n_steps; ++n) {
    DGField2D v_new = stepper.step(res.state, res.eps_hat);
    StepEstimate se = est.evaluate(res.state, v_new, res.eps_hat);
    res.bound.advance(se, cfg.tau);
    adapt_model(res.eps_hat, se, res.bound, est.modeling_density(),
                mesh.hx() * mesh.hy(), acfg);
    res.state = v_new;

    StepRecord r;
    r.t = n * cfg.tau;
    r.em_inc = se.em_inc;
    r.ed_inc = se.ed_inc;
    r.cum_em = res.bound.cum_em;
    r.cum_ed = res.bound.cum_ed;
    r.total_bound = res.bound.total(flux.cbar);
    r.grad_vhat_max = res.bound.max_grad;
    r.gronwall = res.bound.gronwall(flux.cbar);
    for (int k = 0; k < mesh.n_cells(); ++k)
      if (res.eps_hat[k] != 0.0) r.eps_measure += mesh.hx() * mesh.hy();
    if (with_ref) {
      ref = ref_stepper.step(ref, ref_eps);
      DGField2D diff = DGField2D::zero_like(ref);
      for (size_t i = 0; i < diff.data().size(); ++i)
        diff.data()[i] = res.state.data()[i] - ref.data()[i];
      r.err_l2 = l2_norm(diff);
    }
    res.steps.push_back(r);
    if (detail::hits_time(r.t, cfg.tau, snapshot_times)) {
      res.snapshots.emplace_back(r.t, res.state);
      res.model_snapshots.emplace_back(r.t, res.eps_hat);
    }
  }
  return res;
}

}  // namespace modad
