#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

namespace modad::systems {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct InvalidState : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Strictly convex entropy pair (eta, q) for a first-order system.
struct EntropyPair {
  std::function<double(const Vec&)> eta;
  std::function<Vec(const Vec&)> deta;    // gradient in R^n
  std::function<Mat(const Vec&)> d2eta;   // Hessian
  std::function<Vec(const Vec&, int)> q;  // entropy flux component alpha -> scalar? see below
};

/// Evaluation-only description of a viscous system
///   dt u + div f(u) = eps div g(u, grad u),
/// with entropy structure and the dissipation functional of the relative
/// entropy framework. States are column vectors u in R^n; gradients are
/// n x d matrices (column alpha = d/dx_alpha).
struct SystemModel {
  int dim = 1;  // spatial dimension d
  int n = 2;    // state size

  std::function<bool(const Vec&)> admissible;
  std::function<double(const Vec&)> eta;
  std::function<Vec(const Vec&)> deta;
  std::function<Mat(const Vec&)> d2eta;
  std::function<Vec(const Vec&, int)> flux;          // f_alpha(u)
  std::function<double(const Vec&, int)> qflux;      // q_alpha(u)
  std::function<Vec(const Vec&, const Mat&, int)> g; // g_alpha(u, grad u)
  // dissipation D(w, grad w, wt, grad wt) >= 0; not symmetric in general
  std::function<double(const Vec&, const Mat&, const Vec&, const Mat&)> dissipation;
  double k = 1.0;  // hypothesis constant (user-calibrated)

  // sampling box for the state set, used by the calibration helpers
  Vec sample_lo, sample_hi;

  void require_admissible(const Vec& u) const {
    if (!admissible(u)) throw InvalidState("SystemModel: state outside the state set");
  }
};

// ---------------------------------------------------------------------------
// Relative entropy
// ---------------------------------------------------------------------------

inline double relative_entropy(const SystemModel& m, const Vec& u, const Vec& v) {
  m.require_admissible(u);
  m.require_admissible(v);
  return m.eta(u) - m.eta(v) - m.deta(v).dot(u - v);
}

/// Component alpha of the relative entropy flux
/// q_a(u) - q_a(v) - Deta(v) (f_a(u) - f_a(v)).
inline double relative_entropy_flux(const SystemModel& m, const Vec& u, const Vec& v,
                                    int alpha) {
  m.require_admissible(u);
  m.require_admissible(v);
  return m.qflux(u, alpha) - m.qflux(v, alpha) - m.deta(v).dot(m.flux(u, alpha) - m.flux(v, alpha));
}

// ---------------------------------------------------------------------------
// Models
// ---------------------------------------------------------------------------

/// Pressure law and its Helmholtz energy, related by p'(rho) = rho W''(rho).
struct PressureLaw {
  std::function<double(double)> p, dp;
  std::function<double(double)> W, dW, d2W;
};

inline PressureLaw isothermal_pressure() {
  PressureLaw pl;
  pl.p = [](double r) { return r; };
  pl.dp = [](double) { return 1.0; };
  pl.W = [](double r) { return r * std::log(r); };
  pl.dW = [](double r) { return std::log(r) + 1.0; };
  pl.d2W = [](double r) { return 1.0 / r; };
  return pl;
}

/// Isothermal Navier-Stokes: u = (rho, m), eta = W(rho) + |m|^2/(2 rho),
/// g_alpha = (0, d_alpha v), D = |grad v - grad vt|^2 (Frobenius).
inline SystemModel ins_model(int dim, PressureLaw pl = isothermal_pressure(),
                             double rho_min = 1e-8) {
  // Gibbs-Duhem consistency check at a few densities
  for (double r : {0.5, 1.0, 2.0, 3.7}) {
    if (std::abs(pl.dp(r) - r * pl.d2W(r)) > 1e-10 * (1.0 + std::abs(pl.dp(r))))
      throw std::invalid_argument("ins_model: pressure law violates p' = rho W''");
    if (pl.dp(r) <= 0.0)
      throw std::invalid_argument("ins_model: pressure law must be monotone");
  }
  if (rho_min <= 0.0) throw std::invalid_argument("ins_model: state set needs rho > 0");
  SystemModel m;
  m.dim = dim;
  m.n = dim + 1;
  m.admissible = [rho_min](const Vec& u) { return u[0] > rho_min; };
  m.eta = [pl](const Vec& u) {
    double rho = u[0];
    double m2 = u.tail(u.size() - 1).squaredNorm();
    return pl.W(rho) + 0.5 * m2 / rho;
  };
  m.deta = [pl](const Vec& u) {
    double rho = u[0];
    Vec mom = u.tail(u.size() - 1);
    Vec d(u.size());
    d[0] = pl.dW(rho) - 0.5 * mom.squaredNorm() / (rho * rho);
    d.tail(u.size() - 1) = mom / rho;
    return d;
  };
  m.d2eta = [pl](const Vec& u) {
    int n = static_cast<int>(u.size());
    double rho = u[0];
    Vec mom = u.tail(n - 1);
    Mat H = Mat::Zero(n, n);
    H(0, 0) = pl.d2W(rho) + mom.squaredNorm() / (rho * rho * rho);
    for (int i = 1; i < n; ++i) {
      H(0, i) = H(i, 0) = -mom[i - 1] / (rho * rho);
      H(i, i) = 1.0 / rho;
    }
    return H;
  };
  m.flux = [pl](const Vec& u, int a) {
    int n = static_cast<int>(u.size());
    double rho = u[0];
    Vec mom = u.tail(n - 1);
    Vec f(n);
    f[0] = mom[a];
    for (int i = 1; i < n; ++i)
      f[i] = mom[a] * mom[i - 1] / rho + (i - 1 == a ? pl.p(rho) : 0.0);
    return f;
  };
  m.qflux = [pl](const Vec& u, int a) {
    double rho = u[0];
    Vec mom = u.tail(u.size() - 1);
    double eta = pl.W(rho) + 0.5 * mom.squaredNorm() / rho;
    return (eta + pl.p(rho)) * mom[a] / rho;
  };
  m.g = [](const Vec& u, const Mat& grad, int a) {
    // d_alpha v_i = (d_alpha m_i - v_i d_alpha rho)/rho
    int n = static_cast<int>(u.size());
    double rho = u[0];
    Vec out = Vec::Zero(n);
    for (int i = 1; i < n; ++i)
      out[i] = (grad(i, a) - (u[i] / rho) * grad(0, a)) / rho;
    return out;
  };
  m.dissipation = [](const Vec& w, const Mat& gw, const Vec& wt, const Mat& gwt) {
    int n = static_cast<int>(w.size());
    int d = static_cast<int>(gw.cols());
    double s = 0.0;
    for (int a = 0; a < d; ++a)
      for (int i = 1; i < n; ++i) {
        double dv = (gw(i, a) - (w[i] / w[0]) * gw(0, a)) / w[0];
        double dvt = (gwt(i, a) - (wt[i] / wt[0]) * gwt(0, a)) / wt[0];
        s += (dv - dvt) * (dv - dvt);
      }
    return s;
  };
  m.k = 1.0;
  m.sample_lo = Vec::Zero(m.n);
  m.sample_hi = Vec::Zero(m.n);
  m.sample_lo[0] = 0.5;
  m.sample_hi[0] = 3.0;
  for (int i = 1; i < m.n; ++i) {
    m.sample_lo[i] = -1.5;
    m.sample_hi[i] = 1.5;
  }
  return m;
}

/// Navier-Stokes-Fourier for an ideal gas: u = (rho, m, e),
/// eta = -rho ln(p / rho^gamma), p = (gamma-1)(e - |m|^2/(2 rho)) = rho R T,
/// g_alpha = (0, d_alpha v, v . d_alpha v + (kappa/mu) d_alpha T),
/// D = |grad v - grad vt|^2 / Tt + (kappa/mu) |grad T - grad Tt|^2 / Tt^2.
inline SystemModel nsf_model(int dim, double kappa_over_mu = 1.0, double R = 287.0,
                             double gamma = 1.4) {
  if (R <= 0.0 || gamma <= 1.0) throw std::invalid_argument("nsf_model: need R > 0, gamma > 1");
  SystemModel m;
  m.dim = dim;
  m.n = dim + 2;
  const int nm = dim;  // momentum components
  auto pressure = [gamma, nm](const Vec& u) {
    double rho = u[0];
    double m2 = u.segment(1, nm).squaredNorm();
    return (gamma - 1.0) * (u[nm + 1] - 0.5 * m2 / rho);
  };
  auto temperature = [pressure, R](const Vec& u) { return pressure(u) / (u[0] * R); };
  m.admissible = [pressure](const Vec& u) { return u[0] > 1e-10 && pressure(u) > 1e-12; };
  m.eta = [pressure, gamma](const Vec& u) {
    double rho = u[0];
    return -rho * std::log(pressure(u) / std::pow(rho, gamma));
  };
  m.deta = [pressure, gamma, nm](const Vec& u) {
    double rho = u[0], p = pressure(u);
    double m2 = u.segment(1, nm).squaredNorm();
    Vec d(u.size());
    d[0] = -std::log(p / std::pow(rho, gamma)) + gamma - (gamma - 1.0) * 0.5 * m2 / (rho * p);
    for (int i = 0; i < nm; ++i) d[1 + i] = (gamma - 1.0) * u[1 + i] / p;
    d[nm + 1] = -rho * (gamma - 1.0) / p;
    return d;
  };
  m.d2eta = [pressure, gamma, nm](const Vec& u) {
    int n = static_cast<int>(u.size());
    double rho = u[0], p = pressure(u);
    double g1 = gamma - 1.0;
    double m2 = u.segment(1, nm).squaredNorm();
    Mat H = Mat::Zero(n, n);
    H(0, 0) = gamma / rho + g1 * g1 * m2 * m2 / (4.0 * rho * rho * rho * p * p);
    for (int i = 0; i < nm; ++i) {
      double mi = u[1 + i];
      H(0, 1 + i) = H(1 + i, 0) = -g1 * g1 * mi * m2 / (2.0 * rho * rho * p * p);
      H(1 + i, nm + 1) = H(nm + 1, 1 + i) = -g1 * g1 * mi / (p * p);
      for (int j = 0; j < nm; ++j)
        H(1 + i, 1 + j) = g1 * (i == j ? 1.0 : 0.0) / p + g1 * g1 * mi * u[1 + j] / (rho * p * p);
    }
    H(0, nm + 1) = H(nm + 1, 0) = -g1 / p + g1 * g1 * m2 / (2.0 * rho * p * p);
    H(nm + 1, nm + 1) = rho * g1 * g1 / (p * p);
    return H;
  };
  m.flux = [pressure, nm](const Vec& u, int a) {
    int n = static_cast<int>(u.size());
    double rho = u[0], p = pressure(u);
    Vec f(n);
    f[0] = u[1 + a];
    for (int i = 0; i < nm; ++i)
      f[1 + i] = u[1 + a] * u[1 + i] / rho + (i == a ? p : 0.0);
    f[nm + 1] = (u[nm + 1] + p) * u[1 + a] / rho;
    return f;
  };
  m.qflux = [pressure, gamma, nm](const Vec& u, int a) {
    double rho = u[0];
    double eta = -rho * std::log(pressure(u) / std::pow(rho, gamma));
    return eta * u[1 + a] / rho;
  };
  auto grad_vT = [pressure, temperature, R, gamma, nm](const Vec& u, const Mat& grad, int a,
                                                       Vec& dv, double& dT) {
    double rho = u[0], p = pressure(u);
    dv.resize(nm);
    for (int i = 0; i < nm; ++i)
      dv[i] = (grad(1 + i, a) - (u[1 + i] / rho) * grad(0, a)) / rho;
    double mdm = 0.0;
    for (int i = 0; i < nm; ++i) mdm += u[1 + i] * grad(1 + i, a);
    double m2 = u.segment(1, nm).squaredNorm();
    double dp = (gamma - 1.0) * (grad(nm + 1, a) - mdm / rho + 0.5 * m2 * grad(0, a) / (rho * rho));
    dT = (dp * rho - p * grad(0, a)) / (rho * rho * R);
  };
  m.g = [grad_vT, kappa_over_mu, nm](const Vec& u, const Mat& grad, int a) {
    int n = static_cast<int>(u.size());
    Vec dv;
    double dT;
    grad_vT(u, grad, a, dv, dT);
    Vec out = Vec::Zero(n);
    double vdv = 0.0;
    for (int i = 0; i < nm; ++i) {
      out[1 + i] = dv[i];
      vdv += (u[1 + i] / u[0]) * dv[i];
    }
    out[nm + 1] = vdv + kappa_over_mu * dT;
    return out;
  };
  m.dissipation = [grad_vT, temperature, kappa_over_mu, nm](const Vec& w, const Mat& gw,
                                                            const Vec& wt, const Mat& gwt) {
    double Tt = temperature(wt);
    int d = static_cast<int>(gw.cols());
    double sv = 0.0, sT = 0.0;
    Vec dv, dvt;
    double dT, dTt;
    for (int a = 0; a < d; ++a) {
      grad_vT(w, gw, a, dv, dT);
      grad_vT(wt, gwt, a, dvt, dTt);
      for (int i = 0; i < nm; ++i) sv += (dv[i] - dvt[i]) * (dv[i] - dvt[i]);
      sT += (dT - dTt) * (dT - dTt);
    }
    return sv / Tt + kappa_over_mu * sT / (Tt * Tt);
  };
  m.k = 1.0;
  m.sample_lo = Vec::Zero(m.n);
  m.sample_hi = Vec::Zero(m.n);
  m.sample_lo[0] = 0.5;
  m.sample_hi[0] = 2.0;
  for (int i = 0; i < nm; ++i) {
    m.sample_lo[1 + i] = -0.5;
    m.sample_hi[1 + i] = 0.5;
  }
  // energy range keeping T within about [0.5, 2]/R scaling
  m.sample_lo[m.n - 1] = 1.0;
  m.sample_hi[m.n - 1] = 4.0;
  return m;
}

/// Scalar conservation law viewed as a 1-component system with eta = u^2/2,
/// so that eta(u|v) = (u-v)^2/2.
inline SystemModel scalar_model(const std::function<double(double)>& f,
                                const std::function<double(double)>& /*df*/,
                                const std::function<double(double)>& F_entropy_flux) {
  SystemModel m;
  m.dim = 1;
  m.n = 1;
  m.admissible = [](const Vec&) { return true; };
  m.eta = [](const Vec& u) { return 0.5 * u[0] * u[0]; };
  m.deta = [](const Vec& u) { return Vec::Constant(1, u[0]); };
  m.d2eta = [](const Vec&) { return Mat::Constant(1, 1, 1.0); };
  m.flux = [f](const Vec& u, int) { return Vec::Constant(1, f(u[0])); };
  m.qflux = [F_entropy_flux](const Vec& u, int) { return F_entropy_flux(u[0]); };
  m.g = [](const Vec&, const Mat& grad, int a) { return Vec::Constant(1, grad(0, a)); };
  m.dissipation = [](const Vec&, const Mat& gw, const Vec&, const Mat& gwt) {
    return (gw - gwt).squaredNorm();
  };
  m.sample_lo = Vec::Constant(1, -2.0);
  m.sample_hi = Vec::Constant(1, 2.0);
  return m;
}

// ---------------------------------------------------------------------------
// Pointwise hypothesis machinery
// ---------------------------------------------------------------------------

/// d/dx_alpha of Deta along a field: D2eta(u) * (column alpha of grad u).
inline Vec deta_gradient(const SystemModel& m, const Vec& u, const Mat& grad, int alpha) {
  return m.d2eta(u) * grad.col(alpha);
}

/// Left side of (ca1): sum_a (g_a(w) - g_a(wt)) . d_a(Deta(w) - Deta(wt)).
inline double ca1_lhs(const SystemModel& m, const Vec& w, const Mat& gw, const Vec& wt,
                      const Mat& gwt) {
  double s = 0.0;
  for (int a = 0; a < m.dim; ++a) {
    Vec dg = m.g(w, gw, a) - m.g(wt, gwt, a);
    Vec dd = deta_gradient(m, w, gw, a) - deta_gradient(m, wt, gwt, a);
    s += dg.dot(dd);
  }
  return s;
}

/// Left side of (ca2): | sum_a d_a(Deta(w) - Deta(wt)) . g_a(wt) |.
inline double ca2_lhs(const SystemModel& m, const Vec& w, const Mat& gw, const Vec& wt,
                      const Mat& gwt) {
  double s = 0.0;
  for (int a = 0; a < m.dim; ++a) {
    Vec dd = deta_gradient(m, w, gw, a) - deta_gradient(m, wt, gwt, a);
    s += dd.dot(m.g(wt, gwt, a));
  }
  return std::abs(s);
}

/// Entropy dissipation of a single state: sum_a g_a(u) . d_a Deta(u).
inline double entropy_dissipation(const SystemModel& m, const Vec& u, const Mat& grad) {
  double s = 0.0;
  for (int a = 0; a < m.dim; ++a) s += m.g(u, grad, a).dot(deta_gradient(m, u, grad, a));
  return s;
}

struct SamplePoint {
  Vec w, wt;
  Mat gw, gwt;
  double sob_w = 1.0, sob_wt = 1.0;  // W^{1,inf} norms of the underlying fields
};

struct HypothesisReport {
  double k_ca1 = 0.0;            // smallest k making (ca1) hold on the samples
  double k_ca2 = 0.0;            // smallest grid k making (ca2) hold
  double max_ca1_identity = 0.0; // max |lhs - D| (exact identity check, INS)
  bool dissipation_nonneg = true;
};

/// Evaluates (ca1) and (ca2) on the sample set and reports the smallest
/// admissible constants. For (ca1) the per-point minimal k solves
/// S*RE*k^2 + lhs*k - D >= 0 with S = |w|^2 + |wt|^2 and RE = eta(w|wt).
inline HypothesisReport check_hypothesis_inequalities(const SystemModel& m,
                                                      const std::vector<SamplePoint>& samples) {
  HypothesisReport rep;
  double inf = std::numeric_limits<double>::infinity();
  for (const auto& s : samples) {
    double lhs1 = ca1_lhs(m, s.w, s.gw, s.wt, s.gwt);
    double D = m.dissipation(s.w, s.gw, s.wt, s.gwt);
    if (D < 0.0) rep.dissipation_nonneg = false;
    rep.max_ca1_identity = std::max(rep.max_ca1_identity, std::abs(lhs1 - D));
    double S = s.sob_w * s.sob_w + s.sob_wt * s.sob_wt;
    double RE = relative_entropy(m, s.w, s.wt);
    double k1;
    if (S * RE > 1e-300) {
      k1 = (-lhs1 + std::sqrt(lhs1 * lhs1 + 4.0 * S * RE * D)) / (2.0 * S * RE);
    } else if (D <= lhs1 * 1.0 && lhs1 > 0.0) {
      k1 = D / lhs1;
    } else {
      k1 = (D <= 1e-300) ? 0.0 : inf;
    }
    rep.k_ca1 = std::max(rep.k_ca1, k1);

    double lhs2 = ca2_lhs(m, s.w, s.gw, s.wt, s.gwt);
    double diss_t = entropy_dissipation(m, s.wt, s.gwt);
    double k2 = inf;
    for (double k = 0.125; k <= 1024.0; k *= 1.1892071150027210667) {
      double rhs = k * k * (S + 1.0) * RE + D / (2.0 * k) + k * k * diss_t;
      if (rhs >= lhs2) {
        k2 = k;
        break;
      }
    }
    rep.k_ca2 = std::max(rep.k_ca2, k2);
  }
  return rep;
}

/// Model and discretization indicators of the systems framework:
/// E_M = ||eps_hat g(vhat, grad vhat)||^2
///       + int (eps - eps_hat) k^2 sum_a g_a(vhat) . d_a Deta(vhat),
/// E_D = k^2/eps ||R_P||^2_{H^-1} + ||R_H||^2.
/// Fields are supplied as 1D sample functions on [a,b] integrated by
/// composite Gauss quadrature.
inline std::pair<double, double> indicator_terms_system(
    const SystemModel& m, const std::function<Vec(double)>& vhat,
    const std::function<Mat(double)>& grad_vhat, const std::function<double(double)>& eps,
    const std::function<double(double)>& eps_hat, double a, double b, int n_cells, int npts,
    double rh_norm2, double rp_dualnorm2, double k) {
  double em = 0.0;
  // simple composite Gauss rule
  std::vector<double> xs, ws;
  {
    // Gauss-Legendre via Newton on Legendre polynomials (small npts)
    auto legendre = [](int n, double x) {
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= n; ++j) {
        double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      double dp = n * (x * p1 - p0) / (x * x - 1.0);
      return std::pair<double, double>{p1, dp};
    };
    for (int i = 0; i < npts; ++i) {
      double x = std::cos(M_PI * (4.0 * i + 3.0) / (4.0 * npts + 2.0));
      for (int it = 0; it < 100; ++it) {
        auto [p, dp] = legendre(npts, x);
        double dx = p / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
      auto [p, dp] = legendre(npts, x);
      (void)p;
      xs.push_back(x);
      ws.push_back(2.0 / ((1.0 - x * x) * dp * dp));
    }
  }
  double h = (b - a) / n_cells;
  double eps_min = std::numeric_limits<double>::infinity();
  for (int c = 0; c < n_cells; ++c)
    for (int q = 0; q < npts; ++q) {
      double x = a + (c + 0.5) * h + 0.5 * h * xs[q];
      Vec u = vhat(x);
      Mat gr = grad_vhat(x);
      double eh = eps_hat(x), ef = eps(x);
      eps_min = std::min(eps_min, ef);
      double gn2 = 0.0, diss = 0.0;
      for (int al = 0; al < m.dim; ++al) {
        gn2 += m.g(u, gr, al).squaredNorm();
        diss += m.g(u, gr, al).dot(deta_gradient(m, u, gr, al));
      }
      em += 0.5 * h * ws[q] * (eh * eh * gn2 + (ef - eh) * k * k * diss);
    }
  if (eps_min <= 0.0 && rp_dualnorm2 != 0.0)
    throw std::invalid_argument("indicator_terms_system: eps = 0 with nonzero R_P");
  double ed = rh_norm2 + (eps_min > 0.0 ? k * k / eps_min * rp_dualnorm2 : 0.0);
  return {em, ed};
}

/// Sampled convexity bounds: extreme eigenvalues of D2eta over random
/// admissible states in the sampling box.
inline std::pair<double, double> convexity_bounds(const SystemModel& m, int n_samples,
                                                  unsigned seed = 42) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  int found = 0;
  while (found < n_samples) {
    Vec u(m.n);
    for (int i = 0; i < m.n; ++i)
      u[i] = m.sample_lo[i] + (m.sample_hi[i] - m.sample_lo[i]) * uni(rng);
    if (!m.admissible(u)) continue;
    ++found;
    Eigen::SelfAdjointEigenSolver<Mat> es(m.d2eta(u));
    lo = std::min(lo, es.eigenvalues().minCoeff());
    hi = std::max(hi, es.eigenvalues().maxCoeff());
  }
  return {lo, hi};
}

}  // namespace modad::systems
