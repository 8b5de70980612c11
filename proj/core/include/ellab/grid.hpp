#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "ellab/system_model.hpp"

namespace ellab {

enum class GridKind { radial, box };

/// Finite-difference mesh. Radial meshes carry nodes r_i = i h, i = 0..N,
/// with the symmetry condition at r = 0 and the Dirichlet node at r = R.
/// Box meshes carry (nx+1)(ny+1) nodes on [0,Lx] x [0,Ly], row-major in x.
class Grid {
 public:
  static Grid radial(int n, double R, int intervals);
  static Grid box(double Lx, double Ly, double h);
  /// Mesh for a bounded domain descriptor at spacing h (n used by balls).
  static Grid for_domain(const Domain& dom, int n, double h);

  GridKind kind() const { return kind_; }
  int dim() const { return dim_; }
  double h() const { return h_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double radius() const { return R_; }
  double Lx() const { return Lx_; }
  double Ly() const { return Ly_; }
  std::size_t size() const;

  bool is_boundary(std::size_t k) const;
  /// Interior node adjacent to a boundary node.
  bool on_boundary_ring(std::size_t k) const;
  /// Coordinates of node k in R^dim (radial nodes sit on the first axis).
  std::vector<double> point(std::size_t k) const;
  /// Distance from the mesh's natural center (origin for radial meshes,
  /// box midpoint for boxes).
  double radial_coordinate(std::size_t k) const;
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * (nx_ + 1) + i; }

  /// Second-order Laplacian stencil (column, weight) for an interior node.
  std::vector<std::pair<std::size_t, double>> stencil(std::size_t k) const;
  /// Delta_h w at interior nodes, zero on boundary nodes.
  std::vector<double> apply_laplacian(const std::vector<double>& w) const;

  bool same_shape(const Grid& other) const;

 private:
  GridKind kind_ = GridKind::radial;
  int dim_ = 1;
  double h_ = 1.0;
  int nx_ = 1, ny_ = 0;
  double R_ = 1.0, Lx_ = 1.0, Ly_ = 1.0;
};

/// Pair (u, v) on a mesh; boundary nodes carry the Dirichlet value 0.
struct GridField {
  Grid grid;
  std::vector<double> u;
  std::vector<double> v;

  static GridField zeros(const Grid& g);
  void check_shape() const;
};

}  // namespace ellab
