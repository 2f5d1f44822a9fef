#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace modad {

struct StateSpaceViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Compact convex state set for a scalar conservation law.
struct StateInterval {
  double lo = -1e100;
  double hi = 1e100;
  bool contains(double u) const { return u >= lo && u <= hi; }
};

/// Scalar flux model f: per-direction components, derivatives, and a bound on
/// |f''| over the declared state set.
struct FluxModel {
  int dim = 1;
  std::vector<std::function<double(double)>> f;   // size dim
  std::vector<std::function<double(double)>> df;  // size dim
  double cbar = 0.0;                              // sup_O |f''| (componentwise max)
  StateInterval state_set;

  double eval(int alpha, double u) const { return f[alpha](u); }
  double deriv(int alpha, double u) const { return df[alpha](u); }
  double sup_df() const {
    // |f'| is monotone-free in general; sample the state set.
    double m = 0.0;
    for (int i = 0; i <= 200; ++i) {
      double u = state_set.lo + (state_set.hi - state_set.lo) * i / 200.0;
      for (int a = 0; a < dim; ++a) m = std::max(m, std::abs(df[a](u)));
    }
    return m;
  }
};

inline FluxModel burgers_1d(StateInterval O = {-2.0, 2.0}) {
  FluxModel m;
  m.dim = 1;
  m.f = {[](double u) { return 0.5 * u * u; }};
  m.df = {[](double u) { return u; }};
  m.cbar = 1.0;  // f'' == 1
  m.state_set = O;
  return m;
}

inline FluxModel burgers_2d(StateInterval O = {-2.0, 2.0}) {
  FluxModel m;
  m.dim = 2;
  auto f = [](double u) { return 0.5 * u * u; };
  auto df = [](double u) { return u; };
  m.f = {f, f};
  m.df = {df, df};
  m.cbar = 1.0;
  m.state_set = O;
  return m;
}

inline FluxModel linear_advection_1d(double c, StateInterval O = {-1e100, 1e100}) {
  FluxModel m;
  m.dim = 1;
  m.f = {[c](double u) { return c * u; }};
  m.df = {[c](double) { return c; }};
  m.cbar = 0.0;
  m.state_set = O;
  return m;
}

/// Richtmyer-type numerical flux: F(u-,u+) = f(w) with
/// w = (u- + u+)/2 - (tau/h) (f(u+) - f(u-)).
struct RichtmyerFlux {
  const FluxModel* model = nullptr;
  double tau_over_h = 0.0;

  double intermediate(int alpha, double um, double up) const {
    return 0.5 * (um + up) - tau_over_h * (model->eval(alpha, up) - model->eval(alpha, um));
  }
  double flux(int alpha, double um, double up) const {
    return model->eval(alpha, intermediate(alpha, um, up));
  }
  /// Lipschitz constant of the intermediate-state map on the state set.
  double lipschitz() const { return 1.0 + 2.0 * tau_over_h * model->sup_df(); }
};

/// Spec-level operation: evaluate the Richtmyer flux, reporting state-set escape.
inline std::pair<double, double> richtmyer_flux(const FluxModel& f, double u_minus, double u_plus,
                                                double tau_over_h) {
  if (!f.state_set.contains(u_minus) || !f.state_set.contains(u_plus))
    throw StateSpaceViolation("richtmyer_flux: input state outside the declared state set");
  RichtmyerFlux nf{&f, tau_over_h};
  double w = nf.intermediate(0, u_minus, u_plus);
  if (!f.state_set.contains(w))
    throw StateSpaceViolation("richtmyer_flux: intermediate state " + std::to_string(w) +
                              " escapes the declared state set");
  return {f.eval(0, w), w};
}

}  // namespace modad
