#pragma once

#include <Eigen/Sparse>
#include <stdexcept>
#include <vector>

#include "modad/field.hpp"

namespace modad {

struct InvalidParameter : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Side { Minus, Plus };
enum class Axis { X, Y };

// ---------------------------------------------------------------------------
// Diagonal mass (Gauss-nodal basis)
// ---------------------------------------------------------------------------

inline double mass_diag(const Mesh1D& mesh, const QuadratureRule& own, int node) {
  return 0.5 * mesh.h() * own.weights[node];
}

// ---------------------------------------------------------------------------
// Traces and jumps
// ---------------------------------------------------------------------------

/// One-sided traces of a broken 1D field at edge e. Outside the domain
/// (Dirichlet mode) the ghost value is used.
inline std::pair<double, double> edge_traces(const DGField1D& y, int e, int comp = 0,
                                             double ghost = 0.0) {
  const Mesh1D& mesh = y.mesh();
  int kl = mesh.left_cell(e), kr = mesh.right_cell(e);
  double wm = kl >= 0 ? y.trace_right(kl, comp) : ghost;
  double wp = kr >= 0 ? y.trace_left(kr, comp) : ghost;
  return {wm, wp};
}

inline double edge_jump(const DGField1D& y, int e, int comp = 0, double ghost = 0.0) {
  auto [wm, wp] = edge_traces(y, e, comp, ghost);
  return wm - wp;
}

inline double edge_average(const DGField1D& y, int e, int comp = 0, double ghost = 0.0) {
  auto [wm, wp] = edge_traces(y, e, comp, ghost);
  return 0.5 * (wm + wp);
}

// ---------------------------------------------------------------------------
// Discrete gradient operators (local dG lifting)
// ---------------------------------------------------------------------------

/// Discrete gradient into V_q defined by
///   int (d^pm y) phi = -int_T y phi' + sum_E y^pm [phi]   for all phi in V_q.
/// `q` defaults to the degree of y. Ghost traces are zero in Dirichlet mode.
inline DGField1D discrete_gradient(const DGField1D& y, Side side, int q = -1) {
  const Mesh1D& mesh = y.mesh();
  if (q < 0) q = y.degree();
  auto basis = gauss_basis(q + 1);
  const auto& own = gauss_points(q + 1);
  DGField1D out(mesh, basis, y.ncomp());

  const int npts = std::max(y.n_nodes(), q + 1) + 1;
  const auto& qr = gauss_points(npts);
  std::vector<std::vector<double>> dphi(qr.size());
  for (int m = 0; m < qr.size(); ++m) basis->eval_deriv(qr.nodes[m], dphi[m]);
  std::vector<double> phiL, phiR;
  basis->eval(-1.0, phiL);
  basis->eval(1.0, phiR);

  const int N = mesh.n_cells();
  for (int c = 0; c < y.ncomp(); ++c) {
    for (int k = 0; k < N; ++k) {
      int el = mesh.left_edge_of_cell(k), er = mesh.right_edge_of_cell(k);
      // trace of y taken from the requested side of each edge
      double y_er, y_el;
      if (side == Side::Minus) {
        y_er = y.trace_right(k, c);
        int kl = mesh.left_cell(el);
        y_el = kl >= 0 ? y.trace_right(kl, c) : 0.0;
      } else {
        int kr = mesh.right_cell(er);
        y_er = kr >= 0 ? y.trace_left(kr, c) : 0.0;
        y_el = y.trace_left(k, c);
      }
      for (int i = 0; i <= q; ++i) {
        double vol = 0.0;
        for (int m = 0; m < qr.size(); ++m)
          vol += qr.weights[m] * y.eval_ref(k, qr.nodes[m], c) * dphi[m][i];
        // [phi] = +phi(1) at the right edge, -phi(-1) at the left edge
        double val = -vol + y_er * phiR[i] - y_el * phiL[i];
        out.at(k, i, c) = val / mass_diag(mesh, own, i);
      }
    }
  }
  return out;
}

/// Directional discrete gradient on a tensor mesh. Assumes Gauss-nodal bases,
/// so the transverse direction diagonalizes and the operator reduces to the
/// 1D lifting along each Gauss line.
inline DGField2D discrete_gradient(const DGField2D& y, Side side, Axis axis) {
  const Mesh2D& mesh = y.mesh();
  DGField2D out = DGField2D::zero_like(y);
  const int nx = y.nnx(), ny = y.nny();
  const bool ax_x = (axis == Axis::X);
  const int n_line = ax_x ? nx : ny;  // nodes along the derivative direction
  const auto& own = gauss_points(n_line);
  const LagrangeBasis& lb = ax_x ? y.basis_x() : y.basis_y();
  const double h = ax_x ? mesh.hx() : mesh.hy();

  std::vector<double> phiL, phiR;
  lb.eval(-1.0, phiL);
  lb.eval(1.0, phiR);

  auto node_val = [&](int cell, int i_line, int j_trans, int c) {
    return ax_x ? y.at(cell, i_line, j_trans, c) : y.at(cell, j_trans, i_line, c);
  };

  for (int c = 0; c < y.ncomp(); ++c) {
    for (int iy = 0; iy < mesh.ny(); ++iy)
      for (int ix = 0; ix < mesh.nx(); ++ix) {
        int k = mesh.cell_index(ix, iy);
        int k_prev, k_next;
        if (ax_x) {
          k_prev = mesh.periodic() ? mesh.cell_index((ix + mesh.nx() - 1) % mesh.nx(), iy)
                                   : (ix > 0 ? mesh.cell_index(ix - 1, iy) : -1);
          k_next = mesh.periodic() ? mesh.cell_index((ix + 1) % mesh.nx(), iy)
                                   : (ix + 1 < mesh.nx() ? mesh.cell_index(ix + 1, iy) : -1);
        } else {
          k_prev = mesh.periodic() ? mesh.cell_index(ix, (iy + mesh.ny() - 1) % mesh.ny())
                                   : (iy > 0 ? mesh.cell_index(ix, iy - 1) : -1);
          k_next = mesh.periodic() ? mesh.cell_index(ix, (iy + 1) % mesh.ny())
                                   : (iy + 1 < mesh.ny() ? mesh.cell_index(ix, iy + 1) : -1);
        }
        const int n_trans = ax_x ? ny : nx;
        for (int jt = 0; jt < n_trans; ++jt) {
          // trace values along this Gauss line
          double line_r_own = 0.0, line_l_own = 0.0, line_r_nb = 0.0, line_l_nb = 0.0;
          for (int j = 0; j < n_line; ++j) {
            line_r_own += phiR[j] * node_val(k, j, jt, c);
            line_l_own += phiL[j] * node_val(k, j, jt, c);
            if (k_next >= 0) line_r_nb += phiL[j] * node_val(k_next, j, jt, c);
            if (k_prev >= 0) line_l_nb += phiR[j] * node_val(k_prev, j, jt, c);
          }
          double y_er = (side == Side::Minus) ? line_r_own : line_r_nb;
          double y_el = (side == Side::Minus) ? line_l_nb : line_l_own;
          for (int i = 0; i < n_line; ++i) {
            double vol = 0.0;
            for (int j = 0; j < n_line; ++j) {
              // int l_j l_i' dxi via the differentiation matrix and exactness:
              // int l_j l_i' = sum_m w_m l_j(x_m) l_i'(x_m) = w_j * D(j,i)
              vol += node_val(k, j, jt, c) * own.weights[j] * lb.diff_matrix(j, i);
            }
            double val = -vol + y_er * phiR[i] - y_el * phiL[i];
            double m = 0.5 * h * own.weights[i];
            if (ax_x)
              out.at(k, i, jt, c) = val / m;
            else
              out.at(k, jt, i, c) = val / m;
          }
        }
      }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Interior-penalty bilinear form
// ---------------------------------------------------------------------------

/// Edge weight for a variable model field: max of the adjacent cell values,
/// which keeps the form inactive where both neighbours run the simple model.
inline double ip_edge_weight(const Mesh1D& mesh, const ModelField& eps_hat, int e) {
  int kl = mesh.left_cell(e), kr = mesh.right_cell(e);
  double a = kl >= 0 ? eps_hat[kl] : 0.0;
  double b = kr >= 0 ? eps_hat[kr] : 0.0;
  if (kl < 0) a = b;  // boundary edge: use the interior cell value
  if (kr < 0) b = a;
  return std::max(a, b);
}

/// b_h(eps_hat w, phi) = sum_K eps_K int w' phi'
///   - sum_e eps_e ( [w]{phi'} + [phi]{w'} - (sigma/h)[w][phi] ).
/// Dirichlet mode uses zero ghost states (value and derivative).
inline double ip_form(const DGField1D& w, const DGField1D& phi, const ModelField& eps_hat,
                      double sigma, int comp = 0) {
  if (sigma <= 0.0) throw InvalidParameter("ip_form: penalty must be positive");
  const Mesh1D& mesh = w.mesh();
  const int npts = w.n_nodes() + 1;
  const auto& qr = gauss_points(npts);
  double s = 0.0;
  for (int k = 0; k < mesh.n_cells(); ++k) {
    if (eps_hat[k] == 0.0) continue;
    double cell = 0.0;
    for (int m = 0; m < qr.size(); ++m)
      cell += qr.weights[m] * w.eval_dx_ref(k, qr.nodes[m], comp) *
              phi.eval_dx_ref(k, qr.nodes[m], comp);
    s += eps_hat[k] * 0.5 * mesh.h() * cell;
  }
  auto dtrace = [&](const DGField1D& f, int cell, double xi) {
    return cell >= 0 ? f.eval_dx_ref(cell, xi, comp) : 0.0;
  };
  for (int e = 0; e < mesh.n_edges(); ++e) {
    double eps_e = ip_edge_weight(mesh, eps_hat, e);
    if (eps_e == 0.0) continue;
    int kl = mesh.left_cell(e), kr = mesh.right_cell(e);
    double jw = edge_jump(w, e, comp), jphi = edge_jump(phi, e, comp);
    double adw = 0.5 * (dtrace(w, kl, 1.0) + dtrace(w, kr, -1.0));
    double adphi = 0.5 * (dtrace(phi, kl, 1.0) + dtrace(phi, kr, -1.0));
    s -= eps_e * (jw * adphi + jphi * adw - sigma / mesh.h() * jw * jphi);
  }
  return s;
}

/// Sparse assembly of the scalar IP operator; entry (i,j) = b_h applied to
/// (basis_j, basis_i). Dof layout: cell-major, cell*nn + node.
inline Eigen::SparseMatrix<double> assemble_ip_matrix(const Mesh1D& mesh, int q,
                                                      const ModelField& eps_hat, double sigma) {
  if (sigma <= 0.0) throw InvalidParameter("assemble_ip_matrix: penalty must be positive");
  const int nn = q + 1;
  auto basis = gauss_basis(nn);
  const auto& own = gauss_points(nn);
  const double h = mesh.h();

  // reference stiffness int l_i' l_j' dxi (exact with nn points)
  std::vector<double> S(nn * nn, 0.0);
  for (int i = 0; i < nn; ++i)
    for (int j = 0; j < nn; ++j) {
      double s = 0.0;
      for (int m = 0; m < nn; ++m)
        s += own.weights[m] * basis->diff_matrix(m, i) * basis->diff_matrix(m, j);
      S[i * nn + j] = s;
    }
  std::vector<double> tL, tR, dL, dR;
  basis->eval(-1.0, tL);
  basis->eval(1.0, tR);
  basis->eval_deriv(-1.0, dL);
  basis->eval_deriv(1.0, dR);
  for (int i = 0; i < nn; ++i) {
    dL[i] *= 2.0 / h;
    dR[i] *= 2.0 / h;
  }

  std::vector<Eigen::Triplet<double>> trip;
  const int N = mesh.n_cells();
  for (int k = 0; k < N; ++k) {
    if (eps_hat[k] == 0.0) continue;
    for (int i = 0; i < nn; ++i)
      for (int j = 0; j < nn; ++j)
        trip.emplace_back(k * nn + i, k * nn + j, eps_hat[k] * (2.0 / h) * S[i * nn + j]);
  }
  for (int e = 0; e < mesh.n_edges(); ++e) {
    double eps_e = ip_edge_weight(mesh, eps_hat, e);
    if (eps_e == 0.0) continue;
    int kl = mesh.left_cell(e), kr = mesh.right_cell(e);
    // trace/deriv vectors for (cell, factor) pairs contributing to [.] and {.}
    // jump: +1 for left-cell trace, -1 for right-cell trace
    struct Dof {
      int cell;
      double jump_sign;
      const std::vector<double>* tr;
      const std::vector<double>* dtr;
    };
    std::vector<Dof> dofs;
    if (kl >= 0) dofs.push_back({kl, +1.0, &tR, &dR});
    if (kr >= 0) dofs.push_back({kr, -1.0, &tL, &dL});
    double avg_w = dofs.size() == 2 ? 0.5 : 0.5;  // ghost derivative is zero
    for (const auto& a : dofs)
      for (const auto& b : dofs)
        for (int i = 0; i < nn; ++i)
          for (int j = 0; j < nn; ++j) {
            double jw = b.jump_sign * (*b.tr)[j];      // trial jump
            double jphi = a.jump_sign * (*a.tr)[i];    // test jump
            double adw = avg_w * (*b.dtr)[j];
            double adphi = avg_w * (*a.dtr)[i];
            double val = -eps_e * (jw * adphi + jphi * adw - sigma / h * jw * jphi);
            trip.emplace_back(a.cell * nn + i, b.cell * nn + j, val);
          }
  }
  Eigen::SparseMatrix<double> A(N * nn, N * nn);
  A.setFromTriplets(trip.begin(), trip.end());
  return A;
}

/// 2D IP operator on a tensor mesh: volume gradients plus directional edge
/// terms with per-direction penalty sigma/h_alpha. Dof layout:
/// cell*(nn*nn) + jy*nn + jx.
inline Eigen::SparseMatrix<double> assemble_ip_matrix(const Mesh2D& mesh, int q,
                                                      const ModelField& eps_hat, double sigma) {
  if (sigma <= 0.0) throw InvalidParameter("assemble_ip_matrix: penalty must be positive");
  const int nn = q + 1;
  const int nn2 = nn * nn;
  auto basis = gauss_basis(nn);
  const auto& own = gauss_points(nn);
  const double hx = mesh.hx(), hy = mesh.hy();

  std::vector<double> S(nn * nn, 0.0);
  for (int i = 0; i < nn; ++i)
    for (int j = 0; j < nn; ++j) {
      double s = 0.0;
      for (int m = 0; m < nn; ++m)
        s += own.weights[m] * basis->diff_matrix(m, i) * basis->diff_matrix(m, j);
      S[i * nn + j] = s;
    }
  std::vector<double> tL, tR, dL, dR;
  basis->eval(-1.0, tL);
  basis->eval(1.0, tR);
  basis->eval_deriv(-1.0, dL);
  basis->eval_deriv(1.0, dR);

  std::vector<Eigen::Triplet<double>> trip;
  auto dof = [&](int k, int jx, int jy) { return k * nn2 + jy * nn + jx; };

  // volume terms
  for (int k = 0; k < mesh.n_cells(); ++k) {
    double eps = eps_hat[k];
    if (eps == 0.0) continue;
    for (int ay = 0; ay < nn; ++ay)
      for (int ax = 0; ax < nn; ++ax)
        for (int bx = 0; bx < nn; ++bx) {
          // d/dx part: delta in y
          double v = eps * (2.0 / hx) * (0.5 * hy * own.weights[ay]) * S[ax * nn + bx];
          trip.emplace_back(dof(k, ax, ay), dof(k, bx, ay), v);
        }
    for (int ay = 0; ay < nn; ++ay)
      for (int ax = 0; ax < nn; ++ax)
        for (int by = 0; by < nn; ++by) {
          double v = eps * (2.0 / hy) * (0.5 * hx * own.weights[ax]) * S[ay * nn + by];
          trip.emplace_back(dof(k, ax, ay), dof(k, ax, by), v);
        }
  }

  // edge terms; vertical edges (x-direction jumps) then horizontal
  auto add_edges = [&](bool vertical) {
    const int ni = vertical ? (mesh.periodic() ? mesh.nx() : mesh.nx() + 1) : mesh.nx();
    const int nj = vertical ? mesh.ny() : (mesh.periodic() ? mesh.ny() : mesh.ny() + 1);
    const double h = vertical ? hx : hy;
    const double ht = vertical ? hy : hx;  // transverse width
    for (int jj = 0; jj < nj; ++jj)
      for (int ii = 0; ii < ni; ++ii) {
        int kl, kr;
        if (vertical) {
          kl = mesh.vedge_left_cell(ii, jj);
          kr = mesh.vedge_right_cell(ii, jj);
        } else {
          kl = mesh.hedge_bottom_cell(ii, jj);
          kr = mesh.hedge_top_cell(ii, jj);
        }
        double ea = kl >= 0 ? eps_hat[kl] : (kr >= 0 ? eps_hat[kr] : 0.0);
        double eb = kr >= 0 ? eps_hat[kr] : ea;
        double eps_e = std::max(ea, eb);
        if (eps_e == 0.0) continue;
        struct Dof {
          int cell;
          double jump_sign;
          const std::vector<double>* tr;
          const std::vector<double>* dtr;
        };
        std::vector<Dof> sides;
        if (kl >= 0) sides.push_back({kl, +1.0, &tR, &dR});
        if (kr >= 0) sides.push_back({kr, -1.0, &tL, &dL});
        for (int g = 0; g < nn; ++g) {  // transverse Gauss line
          double line_w = 0.5 * ht * own.weights[g];
          for (const auto& a : sides)
            for (const auto& b : sides)
              for (int i = 0; i < nn; ++i)
                for (int j = 0; j < nn; ++j) {
                  double jphi = a.jump_sign * (*a.tr)[i];
                  double jw = b.jump_sign * (*b.tr)[j];
                  double adphi = 0.5 * (*a.dtr)[i] * 2.0 / h;
                  double adw = 0.5 * (*b.dtr)[j] * 2.0 / h;
                  double val =
                      line_w * (-eps_e) * (jw * adphi + jphi * adw - sigma / h * jw * jphi);
                  int ra = vertical ? dof(a.cell, i, g) : dof(a.cell, g, i);
                  int cb = vertical ? dof(b.cell, j, g) : dof(b.cell, g, j);
                  trip.emplace_back(ra, cb, val);
                }
        }
      }
  };
  add_edges(true);
  add_edges(false);

  Eigen::SparseMatrix<double> A(mesh.n_cells() * nn2, mesh.n_cells() * nn2);
  A.setFromTriplets(trip.begin(), trip.end());
  return A;
}

}  // namespace modad
