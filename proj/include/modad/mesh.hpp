#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace modad {

struct InvalidMesh : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class BoundaryMode { Periodic, Dirichlet };

/// Uniform partition of an interval, periodic or with boundary edges.
/// Immutable after construction.
class Mesh1D {
 public:
  Mesh1D(double a, double b, int n_cells, BoundaryMode bc)
      : a_(a), b_(b), n_(n_cells), bc_(bc) {
    if (n_cells < 2) throw InvalidMesh("Mesh1D: need at least 2 cells");
    if (!(b > a)) throw InvalidMesh("Mesh1D: degenerate domain");
    h_ = (b - a) / n_cells;
  }

  int n_cells() const { return n_; }
  int n_edges() const { return bc_ == BoundaryMode::Periodic ? n_ : n_ + 1; }
  bool periodic() const { return bc_ == BoundaryMode::Periodic; }
  BoundaryMode boundary_mode() const { return bc_; }

  double xmin() const { return a_; }
  double xmax() const { return b_; }
  double length() const { return b_ - a_; }
  double cell_width(int) const { return h_; }
  double h() const { return h_; }

  double node(int i) const { return a_ + i * h_; }
  double cell_left(int k) const { return a_ + k * h_; }
  double cell_right(int k) const { return a_ + (k + 1) * h_; }
  double cell_mid(int k) const { return a_ + (k + 0.5) * h_; }

  /// Edge e sits at node position edge_node(e). In periodic mode edge e is the
  /// left face of cell e; in boundary mode edges run 0..n (node indices).
  double edge_pos(int e) const { return periodic() ? node(e) : node(e); }

  /// Cell to the left of edge e, -1 if outside (Dirichlet ghost).
  int left_cell(int e) const {
    if (periodic()) return (e + n_ - 1) % n_;
    return e - 1 >= 0 ? e - 1 : -1;
  }
  /// Cell to the right of edge e, -1 if outside.
  int right_cell(int e) const {
    if (periodic()) return e;
    return e < n_ ? e : -1;
  }

  int left_edge_of_cell(int k) const { return k; }
  int right_edge_of_cell(int k) const { return periodic() ? (k + 1) % n_ : k + 1; }

  /// Locate the cell containing x (clamped to the domain).
  int find_cell(double x) const {
    int k = static_cast<int>(std::floor((x - a_) / h_));
    if (k < 0) k = 0;
    if (k >= n_) k = n_ - 1;
    return k;
  }
  double to_ref(int k, double x) const { return 2.0 * (x - cell_mid(k)) / h_; }

 private:
  double a_, b_, h_;
  int n_;
  BoundaryMode bc_;
};

inline Mesh1D build_mesh_1d(double a, double b, int n_cells, bool periodic) {
  return Mesh1D(a, b, n_cells, periodic ? BoundaryMode::Periodic : BoundaryMode::Dirichlet);
}

/// Cartesian tensor mesh of a rectangle. Cells are ordered lexicographically:
/// cell index k = ix + nx*iy.
class Mesh2D {
 public:
  Mesh2D(double ax, double bx, double ay, double by, int nx, int ny, BoundaryMode bc)
      : ax_(ax), bx_(bx), ay_(ay), by_(by), nx_(nx), ny_(ny), bc_(bc) {
    if (nx < 2 || ny < 2) throw InvalidMesh("Mesh2D: need at least 2 cells per direction");
    if (!(bx > ax) || !(by > ay)) throw InvalidMesh("Mesh2D: degenerate rectangle");
    hx_ = (bx - ax) / nx;
    hy_ = (by - ay) / ny;
  }

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  int n_cells() const { return nx_ * ny_; }
  bool periodic() const { return bc_ == BoundaryMode::Periodic; }
  BoundaryMode boundary_mode() const { return bc_; }

  double hx() const { return hx_; }
  double hy() const { return hy_; }
  double xmin() const { return ax_; }
  double ymin() const { return ay_; }
  double xmax() const { return bx_; }
  double ymax() const { return by_; }
  double area() const { return (bx_ - ax_) * (by_ - ay_); }
  double cell_area(int) const { return hx_ * hy_; }

  int cell_index(int ix, int iy) const { return ix + nx_ * iy; }
  int cell_ix(int k) const { return k % nx_; }
  int cell_iy(int k) const { return k / nx_; }

  double cell_xmid(int k) const { return ax_ + (cell_ix(k) + 0.5) * hx_; }
  double cell_ymid(int k) const { return ay_ + (cell_iy(k) + 0.5) * hy_; }
  double x_node(int i) const { return ax_ + i * hx_; }
  double y_node(int j) const { return ay_ + j * hy_; }

  /// Vertical edges: |E^v| = nx*ny periodic, (nx+1)*ny otherwise. Edge (i,iy)
  /// sits at x = x_node(i) and spans the y-range of row iy.
  int n_vedges() const { return (periodic() ? nx_ : nx_ + 1) * ny_; }
  int n_hedges() const { return nx_ * (periodic() ? ny_ : ny_ + 1); }

  int vedge_index(int i, int iy) const { return i + (periodic() ? nx_ : nx_ + 1) * iy; }
  int hedge_index(int ix, int j) const { return ix + nx_ * j; }

  /// Cells adjacent to vertical edge (i, iy): left has larger x index i-1.
  int vedge_left_cell(int i, int iy) const {
    if (periodic()) return cell_index((i + nx_ - 1) % nx_, iy);
    return i - 1 >= 0 ? cell_index(i - 1, iy) : -1;
  }
  int vedge_right_cell(int i, int iy) const {
    if (periodic()) return cell_index(i % nx_, iy);
    return i < nx_ ? cell_index(i, iy) : -1;
  }
  int hedge_bottom_cell(int ix, int j) const {
    if (periodic()) return cell_index(ix, (j + ny_ - 1) % ny_);
    return j - 1 >= 0 ? cell_index(ix, j - 1) : -1;
  }
  int hedge_top_cell(int ix, int j) const {
    if (periodic()) return cell_index(ix, j % ny_);
    return j < ny_ ? cell_index(ix, j) : -1;
  }

  int find_cell_x(double x) const {
    int i = static_cast<int>(std::floor((x - ax_) / hx_));
    if (i < 0) i = 0;
    if (i >= nx_) i = nx_ - 1;
    return i;
  }
  int find_cell_y(double y) const {
    int j = static_cast<int>(std::floor((y - ay_) / hy_));
    if (j < 0) j = 0;
    if (j >= ny_) j = ny_ - 1;
    return j;
  }

 private:
  double ax_, bx_, ay_, by_, hx_, hy_;
  int nx_, ny_;
  BoundaryMode bc_;
};

inline Mesh2D build_mesh_2d(double ax, double bx, double ay, double by, int nx, int ny,
                            bool periodic) {
  return Mesh2D(ax, bx, ay, by, nx, ny,
                periodic ? BoundaryMode::Periodic : BoundaryMode::Dirichlet);
}

}  // namespace modad
