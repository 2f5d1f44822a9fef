#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "modad/adaptivity.hpp"
#include "modad/reconstruction.hpp"

namespace modad::io {

// ---------------------------------------------------------------------------
// Locale-independent number formatting (shortest round-trip representation)
// ---------------------------------------------------------------------------

inline std::string fmt(double x) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

inline std::string fmt(int x) { return std::to_string(x); }

// ---------------------------------------------------------------------------
// Run configuration and presets
// ---------------------------------------------------------------------------

struct RunConfig {
  std::string name = "custom";
  int dim = 1;
  double xa = -M_PI, xb = M_PI;
  double ya = 0.0, yb = 0.0;
  int nx = 1000, ny = 1;
  int q = 1;
  double tau = 1e-4;
  double T = 2.5;
  double eps = 0.005;
  double sigma = 10.0;
  double tol = 1e-2;
  double tol_c = 1e-3;
  double theta = 0.5;
  bool periodic = false;
  std::string initial = "sine";  // sine | gaussian
  std::string out_dir = "out";
  std::vector<double> snapshots;
  bool reference = true;
  int steps = -1;  // override: if > 0, run exactly this many steps

  void validate() const {
    if (dim != 1 && dim != 2) throw std::invalid_argument("config: dim must be 1 or 2");
    if (nx < 2 || (dim == 2 && ny < 2)) throw std::invalid_argument("config: mesh too small");
    if (q < 0) throw std::invalid_argument("config: q must be >= 0");
    if (tau <= 0.0 || T <= 0.0) throw std::invalid_argument("config: tau and T must be positive");
    if (eps < 0.0 || sigma <= 0.0) throw std::invalid_argument("config: need eps >= 0, sigma > 0");
    if (tol <= 0.0 || tol_c <= 0.0) throw std::invalid_argument("config: tolerances must be positive");
    if (theta < 0.0 || theta > 1.0) throw std::invalid_argument("config: theta must be in [0,1]");
    if (xb <= xa || (dim == 2 && yb <= ya)) throw std::invalid_argument("config: empty domain");
    if (initial != "sine" && initial != "msine" && initial != "gaussian")
      throw std::invalid_argument("config: unknown initial condition '" + initial + "'");
    for (double s : snapshots)
      if (s < 0.0 || s > T + 0.5 * tau)
        throw std::invalid_argument("config: snapshot time outside [0, T]");
  }

  int n_steps() const {
    if (steps > 0) return steps;
    return static_cast<int>(std::llround(T / tau));
  }
};

/// 1D viscous Burgers experiment: sin initial datum, steepening layer at 0.
inline RunConfig preset_test1() {
  RunConfig c;
  c.name = "test1";
  c.dim = 1;
  c.xa = -M_PI;
  c.xb = M_PI;
  c.nx = 1000;  // h = pi/500
  c.q = 1;
  c.tau = 1e-4;
  c.T = 2.5;
  c.eps = 0.005;
  c.sigma = 10.0;
  c.tol = 1e-2;
  c.tol_c = 1e-3;
  c.theta = 0.5;
  c.periodic = false;  // Dirichlet
  // sin on [0, 2pi] shifted to the symmetric interval: the steepening layer
  // forms at the centre x = 0 instead of at the boundary
  c.initial = "msine";
  c.snapshots = {0.0, 0.5375, 1.1625, 1.3, 1.55, 2.5};
  return c;
}

/// 2D viscous Burgers experiment: Gaussian bump on the periodic square.
inline RunConfig preset_test2() {
  RunConfig c;
  c.name = "test2";
  c.dim = 2;
  c.xa = -1.0;
  c.xb = 1.0;
  c.ya = -1.0;
  c.yb = 1.0;
  c.nx = 70;
  c.ny = 70;
  c.q = 1;
  c.tau = std::sqrt(2.0) / 400.0;
  c.T = 1.5;
  c.eps = 0.01;
  c.sigma = 10.0;
  c.tol = 1e-2;
  c.tol_c = 1e-3;
  c.theta = 0.5;
  c.periodic = true;
  c.initial = "gaussian";
  c.snapshots = {0.0025, 0.25, 0.5, 1.0, 1.25, 1.5};
  return c;
}

// ---------------------------------------------------------------------------
// Flat key=value config files ('#' starts a comment; keys mirror RunConfig)
// ---------------------------------------------------------------------------

inline RunConfig parse_config(std::istream& in) {
  RunConfig c;
  c.snapshots.clear();
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
    auto trim = [](std::string s) {
      size_t a = s.find_first_not_of(" \t\r");
      if (a == std::string::npos) return std::string{};
      size_t b = s.find_last_not_of(" \t\r");
      return s.substr(a, b - a + 1);
    };
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key=value");
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    auto as_double = [&] { return std::stod(val); };
    auto as_int = [&] { return std::stoi(val); };
    auto as_bool = [&] {
      if (val == "on" || val == "true" || val == "1") return true;
      if (val == "off" || val == "false" || val == "0") return false;
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": bad boolean '" + val + "'");
    };
    if (key == "name") c.name = val;
    else if (key == "dim") c.dim = as_int();
    else if (key == "xa") c.xa = as_double();
    else if (key == "xb") c.xb = as_double();
    else if (key == "ya") c.ya = as_double();
    else if (key == "yb") c.yb = as_double();
    else if (key == "nx") c.nx = as_int();
    else if (key == "ny") c.ny = as_int();
    else if (key == "q") c.q = as_int();
    else if (key == "tau") c.tau = as_double();
    else if (key == "T") c.T = as_double();
    else if (key == "eps") c.eps = as_double();
    else if (key == "sigma") c.sigma = as_double();
    else if (key == "tol") c.tol = as_double();
    else if (key == "tol_c") c.tol_c = as_double();
    else if (key == "theta") c.theta = as_double();
    else if (key == "periodic") c.periodic = as_bool();
    else if (key == "initial") c.initial = val;
    else if (key == "out_dir") c.out_dir = val;
    else if (key == "reference") c.reference = as_bool();
    else if (key == "steps") c.steps = as_int();
    else if (key == "snapshots") {
      std::istringstream ss(val);
      std::string tok;
      while (std::getline(ss, tok, ',')) c.snapshots.push_back(std::stod(trim(tok)));
    } else {
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }
  return c;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file '" + path + "'");
  return parse_config(in);
}

// ---------------------------------------------------------------------------
// CSV and field dumps
// ---------------------------------------------------------------------------

inline constexpr const char* csv_header =
    "t,E_M_inc,E_D_inc,cum_E_M,cum_E_D,total_bound,err_l2,eps_measure,"
    "grad_vhat_max,gronwall";

inline void write_csv(std::ostream& os, const std::vector<StepRecord>& steps, bool with_error) {
  os << csv_header << '\n';
  for (const auto& r : steps) {
    os << fmt(r.t) << ',' << fmt(r.em_inc) << ',' << fmt(r.ed_inc) << ',' << fmt(r.cum_em) << ','
       << fmt(r.cum_ed) << ',' << fmt(r.total_bound) << ','
       << (with_error ? fmt(r.err_l2) : std::string{}) << ',' << fmt(r.eps_measure) << ','
       << fmt(r.grad_vhat_max) << ',' << fmt(r.gronwall) << '\n';
  }
}

/// Plain-text snapshot: one row per quadrature node, columns x, v_h, v̂, ε̂.
inline void write_fields(std::ostream& os, const Mesh1D& mesh, const DGField1D& vh,
                         const DGField1D& vhat, const ModelField& eps_hat) {
  os << "# x v_h v_hat eps_hat\n";
  const auto& nodes = vh.basis().nodes();
  for (int k = 0; k < mesh.n_cells(); ++k)
    for (size_t i = 0; i < nodes.size(); ++i) {
      double xi = nodes[i];
      double x = mesh.cell_mid(k) + 0.5 * mesh.h() * xi;
      os << fmt(x) << ' ' << fmt(vh.at(k, static_cast<int>(i))) << ' '
         << fmt(vhat.eval_ref(k, xi)) << ' ' << fmt(eps_hat[k]) << '\n';
    }
}

/// 2D snapshot: rows x, y, v_h, v̂, ε̂ at the tensor quadrature nodes.
inline void write_fields(std::ostream& os, const Mesh2D& mesh, const DGField2D& vh,
                         const DGField2D& vhat, const ModelField& eps_hat) {
  os << "# x y v_h v_hat eps_hat\n";
  const auto& nx_nodes = vh.basis_x().nodes();
  const auto& ny_nodes = vh.basis_y().nodes();
  for (int k = 0; k < mesh.n_cells(); ++k) {
    double xc = mesh.xmin() + (mesh.cell_ix(k) + 0.5) * mesh.hx();
    double yc = mesh.ymin() + (mesh.cell_iy(k) + 0.5) * mesh.hy();
    for (size_t jy = 0; jy < ny_nodes.size(); ++jy)
      for (size_t jx = 0; jx < nx_nodes.size(); ++jx) {
        double x = xc + 0.5 * mesh.hx() * nx_nodes[jx];
        double y = yc + 0.5 * mesh.hy() * ny_nodes[jy];
        os << fmt(x) << ' ' << fmt(y) << ' '
           << fmt(vh.at(k, static_cast<int>(jx), static_cast<int>(jy))) << ' '
           << fmt(vhat.eval_ref(k, nx_nodes[jx], ny_nodes[jy])) << ' ' << fmt(eps_hat[k]) << '\n';
      }
  }
}

/// Reads a 1D dump back into nodal values (round-trip check support).
inline std::vector<std::array<double, 4>> read_fields_1d(std::istream& is) {
  std::vector<std::array<double, 4>> rows;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::array<double, 4> r{};
    ss >> r[0] >> r[1] >> r[2] >> r[3];
    rows.push_back(r);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Run orchestration
// ---------------------------------------------------------------------------

inline std::string snapshot_filename(double t) { return "fields_t" + fmt(t) + ".dat"; }

/// Runs the configured adaptive experiment (and, if enabled, the full-model
/// reference used for the error column), then writes estimators.csv, one
/// fields_t<time>.dat per snapshot, and summary.txt into the output
/// directory. MODAD_OUT overrides the configured directory.
inline int run(RunConfig cfg, std::ostream& log) {
  if (const char* env = std::getenv("MODAD_OUT")) cfg.out_dir = env;
  cfg.validate();
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(cfg.out_dir, ec);
  {
    std::ofstream probe(fs::path(cfg.out_dir) / ".write_probe");
    if (!probe) {
      log << "error: output directory '" << cfg.out_dir << "' is not writable\n";
      return 1;
    }
  }
  fs::remove(fs::path(cfg.out_dir) / ".write_probe", ec);

  SolverConfig scfg;
  scfg.q = cfg.q;
  scfg.tau = cfg.tau;
  scfg.sigma = cfg.sigma;
  AdaptConfig acfg;
  acfg.tol = cfg.tol;
  acfg.tol_c = cfg.tol_c;
  acfg.theta = cfg.theta;
  acfg.eps = cfg.eps;
  int n_steps = cfg.n_steps();

  double final_bound = 0.0, final_err = 0.0, peak_measure = 0.0;
  std::ofstream csv(fs::path(cfg.out_dir) / "estimators.csv");

  if (cfg.dim == 1) {
    Mesh1D mesh = build_mesh_1d(cfg.xa, cfg.xb, cfg.nx, cfg.periodic);
    std::function<double(double)> u0;
    if (cfg.initial == "sine") u0 = [](double x) { return std::sin(x); };
    else if (cfg.initial == "msine") u0 = [](double x) { return -std::sin(x); };
    else u0 = [](double x) { return std::exp(-10.0 * x * x); };
    DGField1D v0 = l2_project(u0, mesh, cfg.q);
    FluxModel flux = burgers_1d();
    RunResult1D res = run_adaptive_1d(mesh, flux, scfg, acfg, v0, n_steps, cfg.snapshots,
                                      cfg.reference ? &v0 : nullptr);
    write_csv(csv, res.steps, cfg.reference);
    Hyperbolic1D hyp(mesh, flux, scfg);
    Reconstructor1D rec(mesh, flux, scfg);
    for (size_t s = 0; s < res.snapshots.size(); ++s) {
      auto& [t, vh] = res.snapshots[s];
      DGField1D vhat = rec.solution_reconstruction(vh, hyp.edge_data(vh));
      std::ofstream fd(fs::path(cfg.out_dir) / snapshot_filename(t));
      write_fields(fd, mesh, vh, vhat, res.model_snapshots[s].second);
    }
    if (!res.steps.empty()) {
      final_bound = res.steps.back().total_bound;
      final_err = res.steps.back().err_l2;
      for (const auto& r : res.steps) peak_measure = std::max(peak_measure, r.eps_measure);
    }
  } else {
    Mesh2D mesh = build_mesh_2d(cfg.xa, cfg.xb, cfg.ya, cfg.yb, cfg.nx, cfg.ny, cfg.periodic);
    auto u0 = cfg.initial == "gaussian"
                  ? std::function<double(double, double)>(
                        [](double x, double y) { return std::exp(-10.0 * (x * x + y * y)); })
                  : std::function<double(double, double)>(
                        [](double x, double y) { return std::sin(x) * std::sin(y); });
    DGField2D v0 = l2_project(u0, mesh, cfg.q);
    FluxModel flux = burgers_2d();
    RunResult2D res = run_adaptive_2d(mesh, flux, scfg, acfg, v0, n_steps, cfg.snapshots,
                                      cfg.reference ? &v0 : nullptr);
    write_csv(csv, res.steps, cfg.reference);
    Reconstructor2D rec(mesh, flux, scfg);
    for (size_t s = 0; s < res.snapshots.size(); ++s) {
      auto& [t, vh] = res.snapshots[s];
      DGField2D vhat = rec.solution_reconstruction(vh);
      std::ofstream fd(fs::path(cfg.out_dir) / snapshot_filename(t));
      write_fields(fd, mesh, vh, vhat, res.model_snapshots[s].second);
    }
    if (!res.steps.empty()) {
      final_bound = res.steps.back().total_bound;
      final_err = res.steps.back().err_l2;
      for (const auto& r : res.steps) peak_measure = std::max(peak_measure, r.eps_measure);
    }
  }

  std::ofstream sum(fs::path(cfg.out_dir) / "summary.txt");
  sum << "experiment " << cfg.name << '\n'
      << "steps " << n_steps << '\n'
      << "final_total_bound " << fmt(final_bound) << '\n'
      << "final_err_l2 " << (cfg.reference ? fmt(final_err) : std::string("n/a")) << '\n'
      << "peak_eps_measure " << fmt(peak_measure) << '\n';
  log << "wrote " << cfg.out_dir << "/estimators.csv (" << n_steps << " steps), summary.txt\n";
  return 0;
}

}  // namespace modad::io
