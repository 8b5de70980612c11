#include "doctest.h"

#include <cmath>
#include <numbers>

#include "ellab/dirichlet_solver.hpp"
#include "ellab/eigen_solver.hpp"
#include "ellab/errors.hpp"
#include "ellab/grid.hpp"
#include "ellab/proportionality.hpp"

using namespace ellab;
using std::numbers::pi;

namespace {

double norm(PointView x) {
  double s = 0.0;
  for (double xi : x) s += xi * xi;
  return std::sqrt(s);
}

// w = cos(pi r / 2) on the unit ball of R^3 and its Laplacian
double w_exact(double r) { return std::cos(0.5 * pi * r); }
double lap_w(double r) {
  const double k = 0.5 * pi;
  if (r == 0.0) return -3.0 * k * k;
  return -k * k * std::cos(k * r) - 2.0 * k * std::sin(k * r) / r;
}

ProblemInstance manufactured(double h) {
  ProblemInstance inst;
  inst.n = 3;
  inst.exps = {0, 2, 1};
  inst.coeffs = {2, 2, 1, 1};
  inst.domain = Domain::ball(1.0);
  inst.grid_h = h;
  // forcing so that (w, w) solves Delta u + F = 0 exactly
  auto force = [exps = inst.exps, k = inst.coeffs](PointView x, double, double) {
    const double r = norm(x), w = w_exact(r);
    return -lap_w(r) - power_f(w, w, exps, k);
  };
  auto force_g = [exps = inst.exps, k = inst.coeffs](PointView x, double, double) {
    const double r = norm(x), w = w_exact(r);
    return -lap_w(r) - power_g(w, w, exps, k);
  };
  inst.lot = GeneralLowerOrder{force, force_g, 0.0};
  return inst;
}

GridField sampled(const Grid& g) {
  auto f = GridField::zeros(g);
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (g.is_boundary(k)) continue;
    f.u[k] = f.v[k] = w_exact(g.radial_coordinate(k));
  }
  return f;
}

ProblemInstance be_instance(double h) {
  ProblemInstance inst;
  inst.n = 3;
  inst.exps = {0, 2, 1};
  inst.coeffs = {2, 2, 1, 1};
  inst.domain = Domain::ball(1.0);
  inst.grid_h = h;
  return inst;
}

}  // namespace

TEST_CASE("radial grid layout") {
  const auto g = Grid::radial(3, 1.0, 8);
  CHECK(g.size() == 9);
  CHECK(g.is_boundary(8));
  CHECK_FALSE(g.is_boundary(0));
  CHECK(g.on_boundary_ring(7));
  CHECK(g.radial_coordinate(4) == doctest::Approx(0.5));
}

TEST_CASE("discrete Laplacian is exact on quadratics") {
  const auto g = Grid::radial(3, 1.0, 16);
  std::vector<double> w(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) w[k] = std::pow(g.radial_coordinate(k), 2);
  const auto lap = g.apply_laplacian(w);
  for (std::size_t k = 0; k + 1 < g.size(); ++k) CHECK(lap[k] == doctest::Approx(6.0));

  const auto b = Grid::box(1.0, 1.0, 1.0 / 8);
  std::vector<double> q(b.size());
  for (std::size_t k = 0; k < b.size(); ++k) {
    const auto x = b.point(k);
    q[k] = x[0] * x[0] + 3.0 * x[1] * x[1];
  }
  const auto lb = b.apply_laplacian(q);
  for (std::size_t k = 0; k < b.size(); ++k)
    if (!b.is_boundary(k)) CHECK(lb[k] == doctest::Approx(8.0));
}

TEST_CASE("zero field has zero residual") {
  const auto inst = be_instance(1.0 / 16);
  const auto g = Grid::for_domain(inst.domain, 3, inst.grid_h);
  const auto r = assemble_residual(GridField::zeros(g), inst);
  CHECK(r.max_abs == 0.0);
}

TEST_CASE("semitrivial constant is incompatible with the boundary") {
  ProblemInstance inst = be_instance(1.0 / 32);
  inst.exps = {1, 1, 1};
  const auto g = Grid::for_domain(inst.domain, 3, inst.grid_h);
  auto f = GridField::zeros(g);
  for (std::size_t k = 0; k < g.size(); ++k)
    if (!g.is_boundary(k)) f.u[k] = 2.0;
  const auto r = assemble_residual(f, inst);
  CHECK(r.max_abs > 0.0);
  CHECK(r.on_boundary_ring);
  CHECK(g.on_boundary_ring(r.argmax));
}

TEST_CASE("shape mismatch is rejected") {
  const auto inst = be_instance(1.0 / 16);
  auto f = GridField::zeros(Grid::for_domain(inst.domain, 3, inst.grid_h));
  f.v.pop_back();
  CHECK_THROWS(assemble_residual(f, inst));
}

TEST_CASE("manufactured solution residual is second order") {
  double prev = 0.0;
  for (int N : {16, 32, 64}) {
    const auto inst = manufactured(1.0 / N);
    const auto g = Grid::for_domain(inst.domain, 3, inst.grid_h);
    const double res = assemble_residual(sampled(g), inst).max_abs;
    if (prev > 0.0) CHECK(prev / res == doctest::Approx(4.0).epsilon(0.3));
    prev = res;
  }
}

TEST_CASE("Newton from the trivial field stays put") {
  const auto inst = be_instance(1.0 / 16);
  const auto sol = newton_solve(GridField::zeros(Grid::for_domain(inst.domain, 3, inst.grid_h)), inst);
  CHECK(sol.report.converged);
  CHECK(sol.report.iterations == 0);
  CHECK(sol.report.sup_u == 0.0);
}

TEST_CASE("Newton recovers the manufactured solution to O(h^2)") {
  const auto inst = manufactured(1.0 / 32);
  const auto g = Grid::for_domain(inst.domain, 3, inst.grid_h);
  auto init = sampled(g);
  for (auto& x : init.u) x *= 0.9;
  const auto sol = newton_solve(init, inst);
  REQUIRE(sol.report.converged);
  double err = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) err = std::max(err, std::abs(sol.field.u[k] - w_exact(g.radial_coordinate(k))));
  CHECK(err <= 10.0 * g.h() * g.h());
}

TEST_CASE("proportional solution from the scalar reduction") {
  const auto inst = be_instance(1.0 / 64);
  const auto g = Grid::for_domain(inst.domain, 3, inst.grid_h);
  auto init = scalar_reduction_initializer(inst, g);
  for (std::size_t k = 0; k < g.size(); ++k) init.u[k] *= 1.2;
  const auto sol = newton_solve(init, inst);
  REQUIRE(sol.report.converged);
  CHECK(sol.report.nonnegative);
  CHECK(sol.report.K == doctest::Approx(1.0));
  CHECK(sol.report.proportionality_defect <= 1e-3 * sol.report.sup_u);
  CHECK(sol.report.min_interior_u > 0.0);
}

TEST_CASE("balanced reaction collapses small data") {
  ProblemInstance inst = be_instance(1.0 / 32);
  inst.coeffs = {1, 1, 1, 1};
  inst.exps = {1, 1, 1};
  const auto g = Grid::for_domain(inst.domain, 3, inst.grid_h);
  auto init = GridField::zeros(g);
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (g.is_boundary(k)) continue;
    const double r = g.radial_coordinate(k);
    init.u[k] = 0.1 * (1 - r * r);
    init.v[k] = 0.05 * (1 - r * r);
  }
  const auto sol = newton_solve(init, inst);
  CHECK(sol.report.converged);
  CHECK(sol.report.sup_u <= 1e-8);
  CHECK(sol.report.sup_v <= 1e-8);
}

TEST_CASE("constant path reproduces the same solution") {
  const auto inst = be_instance(1.0 / 32);
  const auto g = Grid::for_domain(inst.domain, 3, inst.grid_h);
  const auto anchor = scalar_reduction_initializer(inst, g);
  const auto cr = continuation_solve([&](double) { return inst; }, {0.0, 0.5, 1.0}, anchor);
  REQUIRE(cr.steps.size() == 3);
  CHECK_FALSE(cr.failure_index.has_value());
  for (const auto& st : cr.steps)
    for (std::size_t k = 0; k < g.size(); ++k) CHECK(st.field.u[k] == doctest::Approx(cr.steps[0].field.u[k]).epsilon(1e-9));
}

TEST_CASE("continuation past ab = cd lands on the trivial solution") {
  auto path = [](double s) {
    ProblemInstance inst = be_instance(1.0 / 32);
    inst.coeffs = {1.0 + s, 1, 1, 1};
    inst.exps = {1, 1, 1};
    return inst;
  };
  const auto g = Grid::for_domain(Domain::ball(1.0), 3, 1.0 / 32);
  auto init = GridField::zeros(g);
  for (std::size_t k = 0; k < g.size(); ++k)
    if (!g.is_boundary(k)) init.u[k] = init.v[k] = 0.1 * (1 - std::pow(g.radial_coordinate(k), 2));
  const auto cr = continuation_solve(path, {-0.125, -0.25, -0.5}, init);
  CHECK_FALSE(cr.failure_index.has_value());
  for (const auto& st : cr.steps) CHECK(st.report.sup_u <= 1e-8);
}

TEST_CASE("continuation in epsilon keeps positive solutions") {
  auto path = [](double eps) {
    ProblemInstance inst = be_instance(1.0 / 32);
    inst.coeffs = {1.0 + eps, 1, 1, 1};
    inst.exps = {1, 1, 1};
    return inst;
  };
  const auto g = Grid::for_domain(Domain::ball(1.0), 3, 1.0 / 32);
  const auto cr = continuation_solve(path, {0.5, 0.25, 0.125}, scalar_reduction_initializer(path(0.5), g));
  REQUIRE_FALSE(cr.failure_index.has_value());
  for (const auto& st : cr.steps) {
    CHECK(st.report.converged);
    CHECK(st.report.min_interior_u > 0.0);
    CHECK(st.report.sup_u <= cr.sup_bound);
  }
}

TEST_CASE("blow-up rescaling bounds") {
  const auto inst = be_instance(1.0 / 32);
  const auto g = Grid::for_domain(inst.domain, 3, inst.grid_h);
  auto f = scalar_reduction_initializer(inst, g);
  for (auto& x : f.u) x *= 3.0;
  const auto r = blowup_rescale(f, inst, 0);
  CHECK(r.bound_ok);
  CHECK(r.center_ok);
  CHECK(r.max_scaled <= 1.0);
  CHECK(r.center_value >= std::pow(2.0, -r.alpha));
  CHECK_THROWS_AS(blowup_rescale(f, inst, 10), PreconditionError);
}

TEST_CASE("unit sup with vanishing partner rescales by one") {
  const auto inst = be_instance(1.0 / 16);
  const auto g = Grid::for_domain(inst.domain, 3, inst.grid_h);
  auto f = GridField::zeros(g);
  for (std::size_t k = 0; k < g.size(); ++k)
    if (!g.is_boundary(k)) f.u[k] = 1.0 - std::pow(g.radial_coordinate(k), 2);
  const auto r = blowup_rescale(f, inst, 0);
  CHECK(r.lambda == 1.0);
  for (std::size_t k = 0; k < g.size(); ++k) CHECK(r.u[k] == f.u[k]);
}

TEST_CASE("principal eigenvalues") {
  const auto box = compute_lambda1(Domain::box({1.0, 1.0}), 2, 1.0 / 64);
  CHECK(box.lambda1 == doctest::Approx(2 * pi * pi).epsilon(0.005));
  CHECK(std::abs(box.richardson - 2 * pi * pi) < std::abs(box.lambda1 - 2 * pi * pi));
  const auto ball = compute_lambda1(Domain::ball(1.0), 3, 1.0 / 128);
  CHECK(ball.lambda1 == doctest::Approx(pi * pi).epsilon(0.005));
  CHECK_THROWS_AS(compute_lambda1(Domain::whole_space(), 3, 0.1), PreconditionError);
}
