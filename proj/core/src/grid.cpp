#include "ellab/grid.hpp"

#include <cmath>

#include "ellab/errors.hpp"

namespace ellab {

Grid Grid::radial(int n, double R, int intervals) {
  if (n < 1) throw PreconditionError("dimension n must be >= 1");
  if (!(R > 0.0)) throw PreconditionError("ball radius must be positive");
  if (intervals < 2) throw PreconditionError("radial mesh needs at least 2 intervals");
  Grid g;
  g.kind_ = GridKind::radial;
  g.dim_ = n;
  g.R_ = R;
  g.nx_ = intervals;
  g.h_ = R / intervals;
  return g;
}

Grid Grid::box(double Lx, double Ly, double h) {
  if (!(Lx > 0.0 && Ly > 0.0 && h > 0.0)) throw PreconditionError("box sides and h must be positive");
  const long nx = std::lround(Lx / h);
  const long ny = std::lround(Ly / h);
  if (nx < 2 || ny < 2) throw PreconditionError("box mesh needs at least 2 intervals per side");
  if (std::abs(nx * h - Lx) > 1e-9 * Lx || std::abs(ny * h - Ly) > 1e-9 * Ly)
    throw PreconditionError("box sides must be integer multiples of h");
  Grid g;
  g.kind_ = GridKind::box;
  g.dim_ = 2;
  g.h_ = h;
  g.nx_ = static_cast<int>(nx);
  g.ny_ = static_cast<int>(ny);
  g.Lx_ = Lx;
  g.Ly_ = Ly;
  return g;
}

Grid Grid::for_domain(const Domain& dom, int n, double h) {
  if (!(h > 0.0)) throw PreconditionError("mesh spacing h must be positive");
  if (dom.kind == DomainKind::ball) {
    const long N = std::lround(dom.radius / h);
    if (N < 2 || std::abs(N * h - dom.radius) > 1e-9 * dom.radius)
      throw PreconditionError("ball radius must be an integer multiple of h");
    return radial(n, dom.radius, static_cast<int>(N));
  }
  if (dom.kind == DomainKind::box) {
    if (n != 2) throw PreconditionError("box meshes are two-dimensional");
    if (dom.sides.size() != 2) throw PreconditionError("box needs two side lengths");
    return box(dom.sides[0], dom.sides[1], h);
  }
  throw PreconditionError("finite-difference meshes need a ball or a box");
}

std::size_t Grid::size() const {
  if (kind_ == GridKind::radial) return static_cast<std::size_t>(nx_) + 1;
  return static_cast<std::size_t>(nx_ + 1) * static_cast<std::size_t>(ny_ + 1);
}

bool Grid::is_boundary(std::size_t k) const {
  if (kind_ == GridKind::radial) return k == static_cast<std::size_t>(nx_);
  const int i = static_cast<int>(k % (nx_ + 1));
  const int j = static_cast<int>(k / (nx_ + 1));
  return i == 0 || j == 0 || i == nx_ || j == ny_;
}

bool Grid::on_boundary_ring(std::size_t k) const {
  if (is_boundary(k)) return false;
  if (kind_ == GridKind::radial) return k + 1 == static_cast<std::size_t>(nx_);
  const int i = static_cast<int>(k % (nx_ + 1));
  const int j = static_cast<int>(k / (nx_ + 1));
  return i == 1 || j == 1 || i == nx_ - 1 || j == ny_ - 1;
}

std::vector<double> Grid::point(std::size_t k) const {
  if (kind_ == GridKind::radial) {
    std::vector<double> x(dim_, 0.0);
    x[0] = k * h_;
    return x;
  }
  return {static_cast<double>(k % (nx_ + 1)) * h_, static_cast<double>(k / (nx_ + 1)) * h_};
}

double Grid::radial_coordinate(std::size_t k) const {
  if (kind_ == GridKind::radial) return k * h_;
  const auto x = point(k);
  return std::hypot(x[0] - 0.5 * Lx_, x[1] - 0.5 * Ly_);
}

std::vector<std::pair<std::size_t, double>> Grid::stencil(std::size_t k) const {
  const double h2 = h_ * h_;
  if (kind_ == GridKind::radial) {
    if (k == 0) return {{0, -2.0 * dim_ / h2}, {1, 2.0 * dim_ / h2}};
    const double r = k * h_;
    const double c = (dim_ - 1) / (2.0 * h_ * r);
    return {{k - 1, 1.0 / h2 - c}, {k, -2.0 / h2}, {k + 1, 1.0 / h2 + c}};
  }
  const std::size_t row = static_cast<std::size_t>(nx_) + 1;
  return {{k - row, 1.0 / h2}, {k - 1, 1.0 / h2}, {k, -4.0 / h2}, {k + 1, 1.0 / h2}, {k + row, 1.0 / h2}};
}

std::vector<double> Grid::apply_laplacian(const std::vector<double>& w) const {
  if (w.size() != size()) throw PreconditionError("field size does not match the mesh");
  std::vector<double> out(w.size(), 0.0);
  for (std::size_t k = 0; k < w.size(); ++k) {
    if (is_boundary(k)) continue;
    double s = 0.0;
    for (const auto& [col, wt] : stencil(k)) s += wt * w[col];
    out[k] = s;
  }
  return out;
}

bool Grid::same_shape(const Grid& o) const {
  return kind_ == o.kind_ && dim_ == o.dim_ && nx_ == o.nx_ && ny_ == o.ny_ && h_ == o.h_;
}

GridField GridField::zeros(const Grid& g) {
  return {g, std::vector<double>(g.size(), 0.0), std::vector<double>(g.size(), 0.0)};
}

void GridField::check_shape() const {
  if (u.size() != grid.size() || v.size() != grid.size())
    throw PreconditionError("field arrays do not match the mesh size");
}

}  // namespace ellab
