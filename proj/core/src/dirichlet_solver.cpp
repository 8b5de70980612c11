#include "ellab/dirichlet_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "ellab/errors.hpp"
#include "ellab/proportionality.hpp"
#include "ellab/radial_shooting.hpp"

namespace ellab {

namespace {

struct LocalTerms {
  double F = 0.0, G = 0.0;
  Jacobian J{};
};

LocalTerms local_terms(double u, double v, const ProblemInstance& inst, PointView x,
                       const HomotopyConfig* hc, bool with_jacobian) {
  const double up = std::max(u, 0.0), vp = std::max(v, 0.0);
  Coefficients k = inst.coefficients_at(x);
  const double tA = hc ? hc->t * hc->A : 0.0;
  k.a += tA;
  k.b += tA;
  LocalTerms out;
  const auto lot = lower_order_values(inst, x, up, vp);
  out.F = power_f(up, vp, inst.exps, k) + lot[0] + tA * (1.0 + up);
  out.G = power_g(up, vp, inst.exps, k) + lot[1] + tA * (1.0 + vp);
  if (with_jacobian) {
    out.J = power_jacobian(up, vp, inst.exps, k);
    const Jacobian L = lower_order_jacobian(inst, x, up, vp);
    for (int i = 0; i < 4; ++i) out.J[i] += L[i];
    out.J[0] += tA;
    out.J[3] += tA;
    if (u < 0.0) out.J[0] = out.J[2] = 0.0;
    if (v < 0.0) out.J[1] = out.J[3] = 0.0;
  }
  return out;
}

void check_field_against(const GridField& field, const ProblemInstance& inst) {
  field.check_shape();
  const Grid& g = field.grid;
  const Domain& d = inst.domain;
  if (g.kind() == GridKind::radial) {
    if (d.kind != DomainKind::ball || std::abs(d.radius - g.radius()) > 1e-12 * d.radius || g.dim() != inst.n)
      throw PreconditionError("radial field does not match the instance's ball domain");
  } else {
    if (d.kind != DomainKind::box || d.sides.size() != 2 || std::abs(d.sides[0] - g.Lx()) > 1e-12 * g.Lx() ||
        std::abs(d.sides[1] - g.Ly()) > 1e-12 * g.Ly() || inst.n != 2)
      throw PreconditionError("box field does not match the instance's box domain");
  }
  if (inst.grid_h > 0.0 && std::abs(inst.grid_h - g.h()) > 1e-12 * g.h())
    throw PreconditionError("field spacing differs from the instance's grid.h");
}

Residual residual_impl(const GridField& field, const ProblemInstance& inst, const HomotopyConfig* hc) {
  const Grid& g = field.grid;
  const std::size_t N = g.size();
  Residual r;
  r.ru.assign(N, 0.0);
  r.rv.assign(N, 0.0);
  const auto Lu = g.apply_laplacian(field.u);
  const auto Lv = g.apply_laplacian(field.v);
  for (std::size_t k = 0; k < N; ++k) {
    if (g.is_boundary(k)) {
      r.ru[k] = field.u[k];
      r.rv[k] = field.v[k];
    } else {
      const auto x = g.point(k);
      const auto t = local_terms(field.u[k], field.v[k], inst, PointView(x), hc, false);
      r.ru[k] = Lu[k] + t.F;
      r.rv[k] = Lv[k] + t.G;
      r.reaction_scale = std::max({r.reaction_scale, std::abs(t.F), std::abs(t.G)});
    }
    for (int c = 0; c < 2; ++c) {
      const double val = std::abs(c == 0 ? r.ru[k] : r.rv[k]);
      if (val > r.max_abs) {
        r.max_abs = val;
        r.argmax = k;
        r.component = c;
      }
    }
  }
  r.on_boundary_ring = g.on_boundary_ring(r.argmax);
  return r;
}

}  // namespace

double HomotopyConfig::required_A(double sup_c, double sup_d) const {
  return std::max({C1 + lambda1_omega, sup_c, sup_d});
}

Residual assemble_residual(const GridField& field, const ProblemInstance& inst, const HomotopyConfig* hcfg) {
  check_field_against(field, inst);
  if (hcfg && !(hcfg->t >= 0.0 && hcfg->t <= 1.0)) throw PreconditionError("homotopy parameter t must lie in [0,1]");
  return residual_impl(field, inst, hcfg);
}

void fill_report_diagnostics(const GridField& field, const ProblemInstance& inst, SolveReport& rep,
                             double negativity_slack) {
  const Grid& g = field.grid;
  rep.h = g.h();
  rep.sup_u = rep.sup_v = 0.0;
  rep.min_interior_u = rep.min_interior_v = std::numeric_limits<double>::infinity();
  double min_all = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < g.size(); ++k) {
    rep.sup_u = std::max(rep.sup_u, std::abs(field.u[k]));
    rep.sup_v = std::max(rep.sup_v, std::abs(field.v[k]));
    min_all = std::min({min_all, field.u[k], field.v[k]});
    if (!g.is_boundary(k)) {
      rep.min_interior_u = std::min(rep.min_interior_u, field.u[k]);
      rep.min_interior_v = std::min(rep.min_interior_v, field.v[k]);
    }
  }
  rep.nonnegative = min_all >= -negativity_slack;
  rep.K = 0.0;
  rep.proportionality_defect = std::numeric_limits<double>::quiet_NaN();
  if (!inst.has_spatial_coefficients() && inst.exps.admissible() && inst.coeffs.signs_ok() &&
      inst.coeffs.D() >= 0.0) {
    rep.K = compute_K(inst.coeffs, inst.exps).K;
    double defect = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) defect = std::max(defect, std::abs(field.u[k] - rep.K * field.v[k]));
    rep.proportionality_defect = defect;
  }
}

SolveResult newton_solve(const GridField& init, const ProblemInstance& inst, const HomotopyConfig* hcfg,
                         const NewtonOptions& opts) {
  check_field_against(init, inst);
  const Grid& g = init.grid;
  const std::size_t N = g.size();
  SolveResult out{init, {}};
  GridField& x = out.field;
  SolveReport& rep = out.report;

  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  bool analysed = false;
  Residual R = residual_impl(x, inst, hcfg);
  int it = 0;
  try {
    for (;; ++it) {
      if (R.normalized() <= opts.tol) {
        rep.converged = true;
        break;
      }
      if (it >= opts.max_iterations) {
        rep.message = "iteration limit reached";
        break;
      }
      std::vector<Eigen::Triplet<double>> trip;
      trip.reserve(N * 12);
      Eigen::VectorXd rhs(2 * N);
      for (std::size_t k = 0; k < N; ++k) {
        const auto ku = static_cast<long>(k), kv = static_cast<long>(k + N);
        rhs[ku] = -R.ru[k];
        rhs[kv] = -R.rv[k];
        if (g.is_boundary(k)) {
          trip.emplace_back(ku, ku, 1.0);
          trip.emplace_back(kv, kv, 1.0);
          continue;
        }
        for (const auto& [col, w] : g.stencil(k)) {
          trip.emplace_back(ku, static_cast<long>(col), w);
          trip.emplace_back(kv, static_cast<long>(col + N), w);
        }
        const auto pt = g.point(k);
        const auto t = local_terms(x.u[k], x.v[k], inst, PointView(pt), hcfg, true);
        trip.emplace_back(ku, ku, t.J[0]);
        trip.emplace_back(ku, kv, t.J[1]);
        trip.emplace_back(kv, ku, t.J[2]);
        trip.emplace_back(kv, kv, t.J[3]);
      }
      Eigen::SparseMatrix<double> J(2 * N, 2 * N);
      J.setFromTriplets(trip.begin(), trip.end());
      if (!analysed) {
        lu.analyzePattern(J);
        analysed = true;
      }
      lu.factorize(J);
      if (lu.info() != Eigen::Success) {
        rep.message = "singular Jacobian";
        break;
      }
      Eigen::VectorXd delta = lu.solve(rhs);
      for (std::size_t k = 0; k < N; ++k)
        if (g.is_boundary(k)) {
          delta[static_cast<long>(k)] = -x.u[k];
          delta[static_cast<long>(k + N)] = -x.v[k];
        }
      if (!delta.allFinite()) {
        rep.message = "non-finite Newton step";
        break;
      }

      double step = 1.0;
      bool accepted = false;
      GridField trial = x;
      for (int b = 0; b <= opts.max_backtracks; ++b, step *= 0.5) {
        for (std::size_t k = 0; k < N; ++k) {
          trial.u[k] = x.u[k] + step * delta[static_cast<long>(k)];
          trial.v[k] = x.v[k] + step * delta[static_cast<long>(k + N)];
        }
        Residual Rt = residual_impl(trial, inst, hcfg);
        if (std::isfinite(Rt.max_abs) && Rt.max_abs < (1.0 - 1e-4 * step) * R.max_abs) {
          x = trial;
          R = std::move(Rt);
          accepted = true;
          break;
        }
      }
      if (!accepted) {
        rep.message = "line search stalled";
        break;
      }
    }
  } catch (const DomainError& e) {
    rep.converged = false;
    rep.message = std::string("Jacobian unavailable: ") + e.what();
  }

  rep.iterations = it;
  rep.residual_inf = R.normalized();
  rep.residual_abs = R.max_abs;
  fill_report_diagnostics(x, inst, rep, opts.negativity_slack);
  if (rep.converged) {
    for (std::size_t k = 0; k < N; ++k)
      if (g.is_boundary(k) && (x.u[k] != 0.0 || x.v[k] != 0.0)) {
        rep.converged = false;
        rep.message = "boundary values not exact";
        break;
      }
  }
  if (rep.converged && rep.message.empty()) rep.message = rep.nonnegative ? "converged" : "converged with negative values";
  return out;
}

GridField scalar_reduction_initializer(const ProblemInstance& inst, const Grid& grid) {
  if (inst.has_spatial_coefficients()) throw PreconditionError("scalar reduction needs constant coefficients");
  if (!(inst.coeffs.D() > 0.0)) throw PreconditionError("scalar reduction needs ab > cd");
  const auto cert = compute_K(inst.coeffs, inst.exps);
  const double K = cert.K;
  const double c1 = std::pow(K, inst.exps.p) * (inst.coeffs.b * std::pow(K, inst.exps.q) - inst.coeffs.d);
  const double sigma = inst.exps.sigma();
  GridField field = GridField::zeros(grid);
  std::vector<double> radii(grid.size());
  double R;
  int n;
  if (grid.kind() == GridKind::radial) {
    R = grid.radius();
    n = grid.dim();
  } else {
    R = 0.5 * std::min(grid.Lx(), grid.Ly());
    n = 2;
  }
  for (std::size_t k = 0; k < grid.size(); ++k) radii[k] = grid.radial_coordinate(k);
  const auto gs = scalar_ground_state_on_ball(n, sigma, c1, R);
  const auto V = gs.sample(radii);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (grid.is_boundary(k)) continue;
    field.v[k] = V[k];
    field.u[k] = K * V[k];
  }
  return field;
}

ContinuationResult continuation_solve(const InstancePath& path, const std::vector<double>& stations,
                                      const GridField& anchor_init, const NewtonOptions& opts) {
  if (stations.empty()) throw PreconditionError("continuation needs at least one station");
  ContinuationResult res;
  const double length = std::abs(stations.back() - stations.front());
  const double floor = 1e-4 * length;
  res.min_step = length;

  auto first = newton_solve(anchor_init, path(stations.front()), nullptr, opts);
  if (!first.report.converged) {
    res.failure_index = 0;
    return res;
  }
  res.steps.push_back({stations.front(), first.field, first.report});

  double s = stations.front();
  GridField x = first.field;
  std::optional<std::pair<double, GridField>> prev;
  double ds_max = length > 0.0 ? length : 1.0;

  for (std::size_t k = 1; k < stations.size(); ++k) {
    const double target = stations[k];
    SolveResult sol{x, first.report};
    if (target == s) {
      sol = newton_solve(x, path(s), nullptr, opts);
      if (!sol.report.converged) {
        res.failure_index = k;
        break;
      }
    }
    while (s != target) {
      const double remaining = target - s;
      const double mag = std::min(std::abs(remaining), ds_max);
      const double ds = remaining > 0 ? mag : -mag;
      const double s_next = (mag == std::abs(remaining)) ? target : s + ds;
      GridField pred = x;
      if (prev && prev->first != s) {
        const double w = (s_next - s) / (s - prev->first);
        for (std::size_t i = 0; i < x.u.size(); ++i) {
          if (x.grid.is_boundary(i)) continue;
          pred.u[i] = x.u[i] + w * (x.u[i] - prev->second.u[i]);
          pred.v[i] = x.v[i] + w * (x.v[i] - prev->second.v[i]);
        }
      }
      sol = newton_solve(pred, path(s_next), nullptr, opts);
      if (!sol.report.converged && prev) sol = newton_solve(x, path(s_next), nullptr, opts);
      if (sol.report.converged) {
        res.min_step = std::min(res.min_step, mag);
        prev = std::make_pair(s, x);
        s = s_next;
        x = sol.field;
        ds_max = std::min(2.0 * ds_max, length > 0.0 ? length : 1.0);
      } else {
        ds_max = 0.5 * mag;
        if (ds_max < floor) break;
      }
    }
    if (s != target) {
      res.failure_index = k;
      break;
    }
    res.steps.push_back({target, x, sol.report});
  }

  bool decreasing = res.steps.size() >= 2;
  for (std::size_t i = 0; i < res.steps.size(); ++i) {
    const double sup = std::max(res.steps[i].report.sup_u, res.steps[i].report.sup_v);
    res.sup_bound = std::max(res.sup_bound, sup);
    if (i > 0) {
      const double before = std::max(res.steps[i - 1].report.sup_u, res.steps[i - 1].report.sup_v);
      if (!(sup < before)) decreasing = false;
    }
  }
  res.sup_decreasing = decreasing;
  return res;
}

double RescaleResult::u_at(double yr) const {
  if (y.empty()) return 0.0;
  std::vector<std::pair<double, double>> pts;
  for (std::size_t k = 0; k < y.size(); ++k) pts.emplace_back(std::abs(y[k][0]), u[k]);
  std::sort(pts.begin(), pts.end());
  if (yr <= pts.front().first) return pts.front().second;
  if (yr >= pts.back().first) return pts.back().second;
  const auto it = std::upper_bound(pts.begin(), pts.end(), std::make_pair(yr, -std::numeric_limits<double>::infinity()));
  const auto& hi = *it;
  const auto& lo = *(it - 1);
  const double w = (yr - lo.first) / (hi.first - lo.first);
  return lo.second + w * (hi.second - lo.second);
}

RescaleResult blowup_rescale(const GridField& field, const ProblemInstance& inst, std::size_t center,
                             bool check_center) {
  field.check_shape();
  const double sigma = inst.exps.sigma();
  if (!(sigma > 1.0)) throw PreconditionError("rescaling needs sigma > 1");
  if (center >= field.grid.size()) throw PreconditionError("center node out of range");
  RescaleResult res;
  res.alpha = 2.0 / (sigma - 1.0);
  res.center = center;
  double su = 0.0, sv = 0.0;
  for (std::size_t k = 0; k < field.grid.size(); ++k) {
    su = std::max(su, std::abs(field.u[k]));
    sv = std::max(sv, std::abs(field.v[k]));
  }
  const double denom = std::pow(su, 1.0 / res.alpha) + std::pow(sv, 1.0 / res.alpha);
  if (!(denom > 0.0)) throw PreconditionError("rescaling needs a nonzero field");
  res.lambda = 1.0 / denom;
  const bool u_dominant = su >= sv;
  const double dom_center = u_dominant ? field.u[center] : field.v[center];
  if (check_center && dom_center < (u_dominant ? su : sv))
    throw PreconditionError("center node is not the argmax of the dominant component");

  const double scale = std::pow(res.lambda, res.alpha);
  res.h_scaled = field.grid.h() / res.lambda;
  const auto x0 = field.grid.point(center);
  for (std::size_t k = 0; k < field.grid.size(); ++k) {
    auto x = field.grid.point(k);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = (x[i] - x0[i]) / res.lambda;
    res.y.push_back(std::move(x));
    res.u.push_back(scale * field.u[k]);
    res.v.push_back(scale * field.v[k]);
    res.max_scaled = std::max({res.max_scaled, res.u.back(), res.v.back()});
  }
  res.center_value = scale * dom_center;
  res.bound_ok = res.max_scaled <= 1.0 + 1e-12;
  res.center_ok = res.center_value >= std::pow(2.0, -res.alpha) * (1.0 - 1e-12);
  return res;
}

}  // namespace ellab
