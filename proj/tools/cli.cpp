#include "cli.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <random>

#include "CLI11.hpp"

#include "ellab/config.hpp"
#include "ellab/dirichlet_solver.hpp"
#include "ellab/eigen_solver.hpp"
#include "ellab/errors.hpp"
#include "ellab/inequality_lab.hpp"
#include "ellab/proportionality.hpp"
#include "ellab/radial_shooting.hpp"
#include "ellab/report.hpp"
#include "ellab/spherical_means.hpp"
#include "ellab/system_model.hpp"

namespace ellab::cli {

namespace fs = std::filesystem;

namespace {

struct Context {
  std::string command;
  KeyValueConfig cfg;
  fs::path out;
  std::uint64_t seed = 0;
  std::map<std::string, std::string> csv;  // file name -> body

  /// Rejects keys no getter asked for, then makes sure the output exists.
  void seal() {
    const auto unused = cfg.unused_keys();
    if (!unused.empty()) throw ConfigError("unknown key '" + unused.front() + "'");
    ensure_directory(out);
  }
  void add_csv(const std::string& suffix, const CsvTable& t) { csv[command + "_" + suffix + ".csv"] = t.to_string(); }
};

Domain domain_from(const KeyValueConfig& cfg, const std::string& fallback) {
  Domain d;
  d.kind = domain_kind_from_string(cfg.get_string("domain.kind", fallback));
  d.radius = cfg.get_double("domain.radius", 1.0);
  if (cfg.contains("domain.sides")) d.sides = cfg.get_doubles("domain.sides");
  return d;
}

json config_json(const KeyValueConfig& cfg) {
  json j = json::object();
  for (const auto& [k, v] : cfg.entries()) j[k] = v;
  return j;
}

json gate_json(const GateResult& g) {
  return json{{"name", g.name},     {"relation", g.relation}, {"value", number(g.value)},
              {"threshold", g.threshold ? number(*g.threshold) : json(nullptr)},
              {"applicable", g.applicable}, {"pass", g.pass}, {"note", g.note}};
}

json solve_json(const SolveReport& r) {
  return json{{"converged", r.converged},
              {"iterations", r.iterations},
              {"residual", number(r.residual_inf)},
              {"residual_abs", number(r.residual_abs)},
              {"sup_u", number(r.sup_u)},
              {"sup_v", number(r.sup_v)},
              {"min_interior_u", number(r.min_interior_u)},
              {"min_interior_v", number(r.min_interior_v)},
              {"K", number(r.K)},
              {"proportionality_defect", number(r.proportionality_defect)},
              {"h", number(r.h)},
              {"nonnegative", r.nonnegative},
              {"message", r.message}};
}

CsvTable field_csv(const GridField& f) {
  CsvTable t;
  const Grid& g = f.grid;
  if (g.kind() == GridKind::radial) {
    t.header = csv_schema::radial_field;
    for (std::size_t k = 0; k < g.size(); ++k) t.add({g.radial_coordinate(k), f.u[k], f.v[k]});
  } else {
    t.header = csv_schema::box_field;
    for (std::size_t k = 0; k < g.size(); ++k) {
      const auto x = g.point(k);
      t.add({x[0], x[1], f.u[k], f.v[k]});
    }
  }
  return t;
}

ScalarNonlinearity shoot_nonlinearity(const KeyValueConfig& cfg, json& meta) {
  const auto kind = cfg.get_string("f", "power");
  meta["f"] = kind;
  if (kind == "linear") {
    const double c1 = cfg.get_double("c1", 1.0);
    return [c1](double u) { return c1 * u; };
  }
  if (kind == "power") {
    const double c1 = cfg.get_double("c1", 1.0);
    const double sigma = cfg.get_double("sigma");
    return [c1, sigma](double u) { return c1 * std::pow(u, sigma); };
  }
  if (kind == "counterexample") return counterexample_nonlinearity(cfg.get_double("p"), cfg.get_double("q"));
  throw ConfigError("unknown nonlinearity '" + kind + "' (linear, power, counterexample)");
}

// ---------------------------------------------------------------- commands

int compute_k(Context& ctx, Report& rep) {
  const auto inst = instance_from_config(ctx.cfg);
  ctx.seal();
  const auto cert = compute_K(inst.coeffs, inst.exps);
  rep.data()["certificate"] = to_json(cert);
  rep.data()["K"] = number(cert.K);
  rep.add_check("J(K) residual", cert.residual, "<=", 1e-12 * cert.residual_scale,
                cert.residual <= 1e-12 * cert.residual_scale);
  rep.add_check("a - c K^q", cert.margin_a, ">=", 0.0, cert.margin_a >= -1e-10);
  rep.add_check("b K^q - d", cert.margin_b, ">=", 0.0, cert.margin_b >= -1e-10);
  rep.add_check("sign changes of J", cert.sign_changes, "==", 1.0, cert.unique);
  return 0;
}

int check_hypotheses(Context& ctx, Report& rep) {
  const auto inst = instance_from_config(ctx.cfg);
  GateOptions opts;
  opts.lambda1 = ctx.cfg.get_optional_double("lambda1");
  ctx.seal();
  const auto hr = validate_hypotheses(inst, opts);
  json gates = json::array();
  for (const auto& g : hr.gates) {
    gates.push_back(gate_json(g));
    rep.add_gate(g);
  }
  rep.data()["gates"] = gates;
  return 0;
}

int check_ineq(Context& ctx, Report& rep) {
  const auto kind = ctx.cfg.get_string("kind", "sign");
  rep.data()["kind"] = kind;
  if (kind == "halfspace") {
    const double p = ctx.cfg.get_double("p"), q = ctx.cfg.get_double("q"), r = ctx.cfg.get_double("r"),
                 s = ctx.cfg.get_double("s");
    const int n = static_cast<int>(ctx.cfg.get_int("n", 3));
    ctx.seal();
    const auto h = halfspace_gate_check(p, q, r, s, n);
    json ds = json::array();
    for (const auto* group : {&h.first, &h.second})
      for (const auto& d : *group) ds.push_back({{"expression", d.expression}, {"lhs", d.lhs}, {"rhs", d.rhs}, {"holds", d.holds}});
    ds.push_back({{"expression", h.semitrivial.expression}, {"lhs", h.semitrivial.lhs}, {"rhs", h.semitrivial.rhs},
                  {"holds", h.semitrivial.holds}});
    rep.data()["disjuncts"] = ds;
    rep.data()["verdict"] = h.verdict;
    auto best = [](const std::vector<Disjunct>& g) { return g[0].holds ? g[0] : g[1]; };
    const auto f = best(h.first), s2 = best(h.second);
    rep.add_check("first gate: " + f.expression, f.lhs, "<=", f.rhs, h.first_holds);
    rep.add_check("second gate: " + s2.expression, s2.lhs, "<=", s2.rhs, h.second_holds);
    return 0;
  }
  if (kind == "cone") {
    const double r = ctx.cfg.get_double("r_ineq");
    const double kappa = ctx.cfg.get_double("kappa");
    const int n = static_cast<int>(ctx.cfg.get_int("n", 3));
    ctx.seal();
    const auto c = cone_weight_admissibility(r, kappa, n);
    rep.data()["margins"] = {{"kappa+2", c.margin_kappa}, {"kappa+r+1", c.margin_sum}, {"r", c.margin_lower},
                             {"upper-r", c.margin_upper}};
    rep.add_check("kappa > -2", kappa, ">", -2.0, c.margin_kappa > 0.0);
    rep.add_check("kappa + r >= -1", kappa + r, ">=", -1.0, c.margin_sum >= 0.0);
    rep.add_check("r >= 0", r, ">=", 0.0, c.margin_lower >= 0.0);
    rep.add_check("r <= (n+1+kappa)/(n-1)", r, "<=", (n + 1.0 + kappa) / (n - 1.0), c.margin_upper >= 0.0);
    return 0;
  }
  if (kind != "sign") throw ConfigError("unknown inequality kind '" + kind + "' (sign, halfspace, cone)");
  const auto inst = instance_from_config(ctx.cfg);
  SampleSpec spec;
  spec.u_max = ctx.cfg.get_double("sample.u_max", spec.u_max);
  spec.per_axis = static_cast<int>(ctx.cfg.get_int("sample.per_axis", spec.per_axis));
  const auto minorant = ctx.cfg.get_string("minorant", "none");
  ctx.seal();
  const auto cert = compute_K(inst.coeffs, inst.exps);
  const auto scan = scan_sign_condition(cert.K, inst.coeffs, inst.exps, spec);
  rep.data()["K"] = number(cert.K);
  rep.data()["samples"] = scan.samples;
  rep.data()["scale"] = number(scan.scale);
  rep.data()["strict_min_off_diagonal"] = number(scan.strict_min_off_diagonal);
  rep.add_check("max (f - Kg)(u - Kv)", scan.max_signed_product, "<=", 1e-12 * scan.scale,
                scan.max_signed_product <= 1e-12 * scan.scale);
  if (inst.coeffs.D() > 0.0)
    rep.add_check("min (Kg - f)(u - Kv) off diagonal", scan.strict_min_off_diagonal, ">", 0.0, scan.strictly_positive);
  if (minorant != "none") {
    const auto which = minorant == "i" ? MinorantCase::i : minorant == "ii" ? MinorantCase::ii
                                                                           : throw ConfigError("minorant must be none, i or ii");
    const auto m = minorant_ratio_infimum(which, inst.coeffs, inst.exps, spec);
    rep.data()["minorant"] = {{"case", minorant}, {"C", number(m.C)}, {"u", m.u_at}, {"v", m.v_at}};
    rep.add_check("minorant constant", m.C, ">", 0.0, m.C > 0.0);
  }
  return 0;
}

int shoot(Context& ctx, Report& rep) {
  const int n = static_cast<int>(ctx.cfg.get_int("n", 3));
  json meta;
  const auto f = shoot_nonlinearity(ctx.cfg, meta);
  const double eps = ctx.cfg.get_double("eps", 1.0);
  const double t_max = ctx.cfg.get_double("t_max", 100.0);
  IvpOptions o;
  o.tol = ctx.cfg.get_double("tol", o.tol);
  o.t0 = ctx.cfg.get_double("t0", o.t0);
  o.sample_step = ctx.cfg.get_double("sample_step", 0.0);
  ctx.seal();
  const auto prof = integrate_ivp(n, f, eps, t_max, o);
  rep.data()["nonlinearity"] = meta;
  rep.data()["event"] = describe(prof.event);
  if (const auto* z = std::get_if<FirstZero>(&prof.event)) rep.data()["first_zero"] = z->R;
  CsvTable t{csv_schema::ivp_trace, {}};
  for (std::size_t i = 0; i < prof.size(); ++i) t.add({prof.t[i], prof.u[i], prof.du[i]});
  ctx.add_csv("trace", t);
  const bool conclusive = !std::holds_alternative<Inconclusive>(prof.event);
  rep.add_check("conclusive event", conclusive ? 1.0 : 0.0, "==", 1.0, conclusive);
  return 0;
}

int counterexample(Context& ctx, Report& rep) {
  const int n = static_cast<int>(ctx.cfg.get_int("n", 3));
  const double p = ctx.cfg.get_double("p"), q = ctx.cfg.get_double("q");
  const double eps = ctx.cfg.get_double("eps", 0.01);
  const double t_max = ctx.cfg.get_double("t_max", 1000.0);
  IvpOptions o;
  o.tol = ctx.cfg.get_double("tol", o.tol);
  o.sample_step = ctx.cfg.get_double("sample_step", 1.0);
  ctx.seal();
  const auto cx = counterexample_profile(n, p, q, eps, t_max, o);
  const auto poh = pohozaev_scan(counterexample_nonlinearity(p, q), n, eps);
  rep.data()["event"] = describe(cx.u.event);
  rep.data()["K"] = cx.K;
  rep.data()["ratio_min"] = cx.ratio_min;
  rep.data()["ratio_max"] = cx.ratio_max;
  rep.data()["pohozaev_min"] = number(poh.min_h);
  CsvTable t{csv_schema::pair_trace, {}};
  for (std::size_t i = 0; i < cx.u.size(); ++i) t.add({cx.u.t[i], cx.u.u[i], cx.v[i]});
  ctx.add_csv("pair", t);
  const bool pd = std::holds_alternative<PositiveDecreasing>(cx.u.event);
  rep.add_check("positive decreasing up to t_max", pd ? 1.0 : 0.0, "==", 1.0, pd);
  rep.add_check("relative spread of u/v", cx.ratio_relative_spread(), ">", 1e-6, cx.ratio_relative_spread() > 1e-6);
  rep.add_check("min h on (0, eps]", poh.min_h, ">=", poh.floor, poh.nonnegative);
  return 0;
}

GridField initial_field(const ProblemInstance& inst, const Grid& g,
                        const std::string& mode, double us, double vs, double amp) {
  GridField f = GridField::zeros(g);
  if (mode == "scalar") {
    f = scalar_reduction_initializer(inst, g);
  } else if (mode == "bump") {
    double rmax = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) rmax = std::max(rmax, g.radial_coordinate(k));
    for (std::size_t k = 0; k < g.size(); ++k) {
      if (g.is_boundary(k)) continue;
      const double x = g.radial_coordinate(k) / rmax;
      f.u[k] = f.v[k] = amp * std::max(0.0, 1.0 - x * x);
    }
  } else {
    throw ConfigError("init must be scalar or bump");
  }
  for (std::size_t k = 0; k < g.size(); ++k) {
    f.u[k] *= us;
    f.v[k] *= vs;
  }
  return f;
}

int solve_dirichlet(Context& ctx, Report& rep) {
  auto inst = instance_from_config(ctx.cfg);
  if (inst.domain.kind == DomainKind::whole_space && !ctx.cfg.contains("domain.kind")) inst.domain = Domain::ball(1.0);
  if (inst.grid_h <= 0.0) inst.grid_h = 1.0 / 128;
  const auto mode = ctx.cfg.get_string("init", "scalar");
  const double us = ctx.cfg.get_double("init.u_scale", 1.0), vs = ctx.cfg.get_double("init.v_scale", 1.0);
  const double amp = ctx.cfg.get_double("init.amplitude", 1.0);
  NewtonOptions no;
  no.tol = ctx.cfg.get_double("newton.tol", no.tol);
  no.max_iterations = static_cast<int>(ctx.cfg.get_int("newton.max_iterations", no.max_iterations));
  const double defect_tol = ctx.cfg.get_double("defect_tol", 1e-3);
  ctx.seal();
  const auto g = Grid::for_domain(inst.domain, inst.n, inst.grid_h);
  const auto init = initial_field(inst, g, mode, us, vs, amp);
  const auto sol = newton_solve(init, inst, nullptr, no);
  const auto& r = sol.report;
  rep.data()["solve"] = solve_json(r);
  ctx.add_csv("field", field_csv(sol.field));
  rep.add_check("newton residual", r.residual_inf, "<=", no.tol, r.converged);
  rep.add_check("min interior u", r.min_interior_u, ">", 0.0, r.min_interior_u > 0.0);
  rep.add_check("min interior v", r.min_interior_v, ">", 0.0, r.min_interior_v > 0.0);
  if (std::isfinite(r.proportionality_defect) && r.K > 0.0) {
    const double rel = r.proportionality_defect / std::max(r.sup_u, 1e-300);
    rep.add_check("|u - K v| / |u|", rel, "<=", defect_tol, rel <= defect_tol);
  }
  return 0;
}

int continue_cmd(Context& ctx, Report& rep) {
  ProblemInstance base;
  base.n = static_cast<int>(ctx.cfg.get_int("n", 3));
  base.exps = {ctx.cfg.get_double("p", 1.0), ctx.cfg.get_double("q", 1.0), ctx.cfg.get_double("r", 1.0)};
  const double b = ctx.cfg.get_double("b", 1.0), c = ctx.cfg.get_double("c", 1.0), d = ctx.cfg.get_double("d", 1.0);
  base.domain = domain_from(ctx.cfg, "ball");
  base.grid_h = ctx.cfg.get_double("grid.h", 1.0 / 128);
  const auto stations = ctx.cfg.get_doubles("stations", {0.5, 0.25, 0.125});
  const bool zero_check = ctx.cfg.get_int("zero_check", 1) != 0;
  const double zero_amp = ctx.cfg.get_double("zero_init", 0.1);
  NewtonOptions no;
  no.tol = ctx.cfg.get_double("newton.tol", no.tol);
  ctx.seal();
  // a = (cd + eps)/b moves ab - cd = eps along the path
  auto path = [base, b, c, d](double eps) {
    ProblemInstance inst = base;
    inst.coeffs = {(c * d + eps) / b, b, c, d};
    return inst;
  };
  const auto g = Grid::for_domain(base.domain, base.n, base.grid_h);
  const auto anchor = scalar_reduction_initializer(path(stations.front()), g);
  const auto cr = continuation_solve(path, stations, anchor, no);
  CsvTable t{csv_schema::continuation, {}};
  json steps = json::array();
  bool positive = true;
  for (const auto& st : cr.steps) {
    t.add({st.s, st.report.sup_u, st.report.sup_v, st.report.min_interior_u, st.report.min_interior_v, st.report.residual_inf});
    steps.push_back({{"eps", st.s}, {"solve", solve_json(st.report)}});
    positive = positive && st.report.min_interior_u > 0.0 && st.report.min_interior_v > 0.0;
  }
  ctx.add_csv("path", t);
  rep.data()["steps"] = steps;
  rep.data()["sup_bound"] = number(cr.sup_bound);
  rep.data()["min_step"] = number(cr.min_step);
  const double reached = static_cast<double>(cr.steps.size());
  rep.add_check("stations reached", reached, "==", static_cast<double>(stations.size()), !cr.failure_index);
  rep.add_check("positive along path", positive ? 1.0 : 0.0, "==", 1.0, positive && !cr.steps.empty());
  double worst = 0.0;
  for (const auto& st : cr.steps) worst = std::max({worst, st.report.sup_u, st.report.sup_v});
  rep.add_check("sup norms below bound", worst, "<=", cr.sup_bound, worst <= cr.sup_bound);
  if (zero_check) {
    GridField z = GridField::zeros(g);
    double rmax = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) rmax = std::max(rmax, g.radial_coordinate(k));
    for (std::size_t k = 0; k < g.size(); ++k)
      if (!g.is_boundary(k)) {
        const double x = g.radial_coordinate(k) / rmax;
        z.u[k] = z.v[k] = zero_amp * (1.0 - x * x);
      }
    const auto s0 = newton_solve(z, path(0.0), nullptr, no);
    const double sup = std::max(s0.report.sup_u, s0.report.sup_v);
    rep.data()["degenerate"] = solve_json(s0.report);
    rep.add_check("degenerate endpoint sup", sup, "<=", 1e-8, s0.report.converged && sup <= 1e-8);
  }
  return 0;
}

double lambda1_reference(const Domain& dom, int n) {
  if (dom.kind == DomainKind::box) {
    double s = 0.0;
    for (double L : dom.sides) s += 1.0 / (L * L);
    return M_PI * M_PI * s;
  }
  // first zero of the radial linear shoot, scaled to the radius
  IvpOptions o;
  o.tol = 1e-12;
  const auto prof = integrate_ivp(n, [](double u) { return u; }, 1.0, 100.0, o);
  const double z = std::get<FirstZero>(prof.event).R;
  return z * z / (dom.radius * dom.radius);
}

int lambda1(Context& ctx, Report& rep) {
  const auto dom = domain_from(ctx.cfg, "box");
  const int n = static_cast<int>(ctx.cfg.get_int("n", dom.kind == DomainKind::box ? 2 : 3));
  const double h = ctx.cfg.get_double("grid.h", 1.0 / 128);
  const double tol = ctx.cfg.get_double("tol", 1e-10);
  const double rel_tol = ctx.cfg.get_double("rel_tol", 0.005);
  ctx.seal();
  const auto res = compute_lambda1(dom, n, h, tol);
  const double ref = lambda1_reference(dom, n);
  rep.data()["lambda1"] = number(res.lambda1);
  rep.data()["coarse"] = number(res.coarse);
  rep.data()["richardson"] = number(res.richardson);
  rep.data()["iterations"] = res.iterations;
  rep.data()["reference"] = number(ref);
  const double rel = std::abs(res.lambda1 / ref - 1.0);
  rep.add_check("relative error against reference", rel, "<=", rel_tol, rel <= rel_tol);
  return 0;
}

int means(Context& ctx, Report& rep) {
  const int n = static_cast<int>(ctx.cfg.get_int("n", 2));
  const auto name = ctx.cfg.get_string("field", "superharmonic");
  const auto radii = ctx.cfg.get_doubles("radii", {1, 2, 4, 8, 16, 32, 64});
  const auto y1 = ctx.cfg.get_doubles("y1", std::vector<double>(n - 1, 0.0));
  std::vector<double> y2_default(n - 1, 0.0);
  if (!y2_default.empty()) y2_default[0] = 3.0;
  const auto y2 = ctx.cfg.get_doubles("y2", y2_default);
  QuadratureConfig q;
  q.panels = static_cast<int>(ctx.cfg.get_int("panels", q.panels));
  q.azimuth_points = static_cast<int>(ctx.cfg.get_int("azimuth", q.azimuth_points));
  q.mc_samples = ctx.cfg.get_int("mc_samples", q.mc_samples);
  q.seed = ctx.seed;
  const bool identity = ctx.cfg.get_int("identity", n <= 3 ? 1 : 0) != 0;
  const auto L = ctx.cfg.get_optional_double("L");
  const long lb_samples = ctx.cfg.get_int("lower_bound.samples", 1000);
  const double lb_box = ctx.cfg.get_double("lower_bound.box", 10.0);
  ctx.seal();
  const auto w = catalogue_field(name, n);
  const auto scan = monotonicity_scan(w, y1, y2, radii, n, q);
  CsvTable t{csv_schema::half_means, {}};
  for (const auto& s : scan.samples) t.add({s.R, s.value, s.error});
  ctx.add_csv("means", t);
  rep.data()["field"] = name;
  rep.data()["method"] = scan.samples.front().method == MeanMethod::deterministic ? "deterministic" : "monte-carlo";
  rep.data()["verdict"] = scan.verdict;
  rep.data()["limit"] = number(scan.limit);
  rep.add_check("worst increase beyond slack", scan.worst_increase, "<=", 0.0, scan.nonincreasing);
  const double min_mean = std::min_element(scan.samples.begin(), scan.samples.end(),
                                           [](const auto& a, const auto& b) { return a.value < b.value; })->value;
  rep.add_check("smallest mean", min_mean, ">=", 0.0, scan.nonnegative_means);
  rep.add_check("cross-center gap at largest radius", scan.cross_center_gap, "<=",
                scan.cross_center_ok ? scan.cross_center_gap : 0.0, scan.cross_center_ok);
  if (identity) {
    double worst = 0.0;
    for (double R : radii) worst = std::max(worst, mean_derivative_identity_check(w, y1, R, n, q).rel_gap);
    rep.data()["identity_max_rel_gap"] = number(worst);
    rep.add_check("derivative identity relative gap", worst, "<=", 1e-4, worst <= 1e-4);
  }
  if (L) {
    std::mt19937_64 gen(ctx.seed);
    std::uniform_real_distribution<double> side(-lb_box, lb_box), up(0.0, 2.0 * lb_box);
    std::vector<std::vector<double>> pts(static_cast<std::size_t>(lb_samples), std::vector<double>(n));
    for (auto& x : pts) {
      for (int i = 0; i + 1 < n; ++i) x[i] = side(gen);
      x[n - 1] = up(gen);
    }
    const auto lb = linear_lower_bound_check(w, *L, pts, n);
    rep.add_check("min of w - (L/[x_n]) x_n", lb.min_slack, ">=", -1e-12, lb.pass);
  }
  return 0;
}

int pohozaev(Context& ctx, Report& rep) {
  const int n = static_cast<int>(ctx.cfg.get_int("n", 3));
  json meta;
  const auto f = shoot_nonlinearity(ctx.cfg, meta);
  const double eps = ctx.cfg.get_double("eps", 0.01);
  const int points = static_cast<int>(ctx.cfg.get_int("points", 400));
  const auto lead_p = ctx.cfg.get_optional_double("leading_power");
  ctx.seal();
  const auto s = pohozaev_scan(f, n, eps, points);
  CsvTable t{csv_schema::pohozaev, {}};
  for (std::size_t i = 0; i < s.X.size(); ++i) t.add({s.X[i], s.h[i]});
  ctx.add_csv("scan", t);
  rep.data()["nonlinearity"] = meta;
  rep.data()["p_sobolev"] = s.p_sobolev;
  rep.data()["argmin"] = s.argmin;
  if (lead_p) rep.data()["leading_coefficient"] = number(pohozaev_leading_coefficient(f, n, *lead_p));
  rep.add_check("min h", s.min_h, ">=", s.floor, s.nonnegative);
  return 0;
}

int barrier(Context& ctx, Report& rep) {
  BarrierSpec b;
  b.n = static_cast<int>(ctx.cfg.get_int("n", 3));
  b.p = ctx.cfg.get_double("p");
  b.A = ctx.cfg.get_double("A", 1.0);
  b.C = ctx.cfg.get_double("C");
  b.R = ctx.cfg.get_double("R", 1.0);
  const int samples = static_cast<int>(ctx.cfg.get_int("samples", 1000));
  ctx.seal();
  const auto c = ko_barrier_check(b, samples);
  CsvTable t{csv_schema::barrier, {}};
  for (int k = 0; k < samples; ++k) {
    const double r = b.R * k / samples;
    t.add({r, b.laplacian(r), b.A / (1.0 + r * r) * std::pow(b.W(r), b.p)});
  }
  ctx.add_csv("samples", t);
  rep.data()["alpha"] = b.alpha();
  rep.data()["W_at_zero"] = c.W_at_zero;
  rep.data()["verdict"] = c.verdict;
  rep.add_check("C^(p-1)", std::pow(b.C, b.p - 1.0), ">=", c.threshold, c.admissible);
  rep.add_check("min relative slack of the barrier inequality", c.min_rel_slack, ">=", -1e-12, c.inequality_holds);
  rep.add_check("closed form vs FD Laplacian", c.fd_max_rel_gap, "<=", 1e-6, c.fd_ok);
  return 0;
}

int mixed_pair(Context& ctx, Report& rep) {
  MixedPairSpec s;
  s.n = static_cast<int>(ctx.cfg.get_int("n", s.n));
  s.p = ctx.cfg.get_double("p", s.p);
  s.q = ctx.cfg.get_double("q", s.q);
  s.r = ctx.cfg.get_double("r", s.r);
  s.alpha_z = ctx.cfg.get_double("alpha_z", s.alpha_z);
  s.beta_w = ctx.cfg.get_double("beta_w", s.beta_w);
  s.C1 = ctx.cfg.get_double("C1", s.C1);
  s.C2 = ctx.cfg.get_double("C2", s.C2);
  const int samples = static_cast<int>(ctx.cfg.get_int("samples", 1000));
  const double r_max = ctx.cfg.get_double("r_max", 1e3);
  ctx.seal();
  const auto m = mixed_pair_check(s, mixed_pair_radii(samples, r_max));
  rep.data()["verdict"] = m.verdict;
  rep.data()["witness"] = {{"A_w", m.A_w}, {"B", m.B}, {"C_z", m.C_z}, {"candidates", m.candidates_tried}};
  rep.add_check("witness found", m.found ? 1.0 : 0.0, "==", 1.0, m.found);
  if (m.found) {
    rep.add_check("min relative slack -Delta Z", m.min_rel_slack_Z, ">=", -1e-12, m.min_rel_slack_Z >= -1e-12);
    rep.add_check("min relative slack Delta W", m.min_rel_slack_W, ">=", -1e-12, m.min_rel_slack_W >= -1e-12);
    rep.add_check("B - A_w <= W < B", m.W_bounds_ok ? 1.0 : 0.0, "==", 1.0, m.W_bounds_ok);
    rep.add_check("closed form vs FD Laplacian", m.fd_max_rel_gap, "<=", 1e-6, m.fd_ok);
  }
  return 0;
}

int zw_check(Context& ctx, Report& rep) {
  const auto profile = ctx.cfg.get_string("profile", "none");
  if (profile == "counterexample") {
    const int n = static_cast<int>(ctx.cfg.get_int("n", 3));
    const double p = ctx.cfg.get_double("p"), q = ctx.cfg.get_double("q");
    const double eps = ctx.cfg.get_double("eps", 0.01);
    const double t_max = ctx.cfg.get_double("t_max", 1000.0);
    IvpOptions o;
    o.sample_step = ctx.cfg.get_double("sample_step", 1.0);
    HarmonicityOptions ho;
    ho.tol_factor = ctx.cfg.get_double("tol_factor", ho.tol_factor);
    ctx.seal();
    const auto cx = counterexample_profile(n, p, q, eps, t_max, o);
    const auto hr = discrete_harmonicity_check(RadialPair{n, cx.u.t, cx.u.u, cx.v}, cx.K, {1, 1, 1, 1}, {p, q, p}, ho);
    CsvTable t{"t,W,Z", {}};
    for (std::size_t i = 0; i < cx.u.size(); ++i) t.add({cx.u.t[i], hr.W[i], hr.Z[i]});
    ctx.add_csv("profile", t);
    rep.data()["residual"] = number(hr.residual);
    rep.data()["tau"] = number(hr.tau);
    rep.add_check("min Delta_h W", hr.min_lap_W, ">=", -hr.tau, hr.W_subharmonic);
    rep.add_check("min -Delta_h Z", hr.min_neg_lap_Z, ">=", -hr.tau, hr.Z_superharmonic);
    return 0;
  }
  if (profile != "none") throw ConfigError("profile must be none or counterexample");
  const auto inst = instance_from_config(ctx.cfg);
  ZWSampleSpec spec;
  spec.u_max = ctx.cfg.get_double("sample.u_max", spec.u_max);
  spec.samples = ctx.cfg.get_int("samples", spec.samples);
  spec.seed = ctx.seed;
  const bool bounded = ctx.cfg.get_int("bounded", 0) != 0;
  ctx.seal();
  const auto cert = compute_K(inst.coeffs, inst.exps);
  const auto z = pointwise_zw_bounds(cert.K, inst.coeffs, inst.exps, spec, bounded);
  rep.data()["K"] = number(cert.K);
  rep.data()["C_q"] = z.C_q;
  rep.data()["beta"] = z.beta_sys;
  rep.data()["gamma"] = z.gamma_sys;
  rep.data()["beta_form_checked"] = z.beta_form_checked;
  rep.add_check("min relative slack on u <= Kv", z.min_slack_f, ">=", -1e-12, z.min_slack_f >= -1e-12);
  rep.add_check("min relative slack on u >= Kv", z.min_slack_g, ">=", -1e-12, z.min_slack_g >= -1e-12);
  rep.add_check("factorisation identity gap", z.identity_max_gap, "<=", 64 * 2.220446049250313e-16,
                z.identity_max_gap <= 64 * 2.220446049250313e-16);
  return 0;
}

using Handler = std::function<int(Context&, Report&)>;

const std::vector<std::pair<std::string, Handler>>& handlers() {
  static const std::vector<std::pair<std::string, Handler>> h = {
      {"compute-k", compute_k},     {"check-hypotheses", check_hypotheses},
      {"check-ineq", check_ineq},   {"shoot", shoot},
      {"counterexample", counterexample}, {"solve-dirichlet", solve_dirichlet},
      {"continue", continue_cmd},   {"lambda1", lambda1},
      {"means", means},             {"pohozaev", pohozaev},
      {"barrier", barrier},         {"mixed-pair", mixed_pair},
      {"zw-check", zw_check}};
  return h;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [n, _] : handlers()) v.push_back(n);
    return v;
  }();
  return names;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"numerical laboratory for noncooperative elliptic systems", "ellab"};
  app.require_subcommand(1);
  app.set_help_flag("--help", "print help");
  struct Opts {
    std::string config, out, domain;
    std::optional<std::uint64_t> seed;
    std::vector<std::string> sets;
    std::vector<double> sides;
    std::optional<double> radius, h;
    std::optional<int> n;
  } o;
  for (const auto& [name, _] : handlers()) {
    auto* sc = app.add_subcommand(name);
    sc->set_help_flag("--help", "print help");
    sc->add_option("-c,--config", o.config, "key = value scenario file");
    sc->add_option("-o,--out", o.out, "output directory");
    sc->add_option("--seed", o.seed, "random seed");
    sc->add_option("--set", o.sets, "override, key=value")->take_all();
    sc->add_option("--domain", o.domain, "domain.kind");
    sc->add_option("--sides", o.sides, "domain.sides")->expected(1, 3);
    sc->add_option("--radius", o.radius, "domain.radius");
    sc->add_option("--h", o.h, "grid.h");
    sc->add_option("--n", o.n, "dimension");
  }
  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  }
  const auto* sub = app.get_subcommands().front();
  Context ctx;
  ctx.command = sub->get_name();
  try {
    if (!o.config.empty()) {
      ctx.cfg = KeyValueConfig::load(o.config);
      if (ctx.cfg.empty()) throw ConfigError("empty config " + o.config);
    }
    if (!o.domain.empty()) ctx.cfg.set("domain.kind", o.domain);
    if (!o.sides.empty()) {
      std::string s;
      for (double v : o.sides) s += (s.empty() ? "" : " ") + format_double(v);
      ctx.cfg.set("domain.sides", s);
    }
    if (o.radius) ctx.cfg.set("domain.radius", format_double(*o.radius));
    if (o.h) ctx.cfg.set("grid.h", format_double(*o.h));
    if (o.n) ctx.cfg.set("n", std::to_string(*o.n));
    for (const auto& kv : o.sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
      ctx.cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    const auto cfg_out = ctx.cfg.get_string("out", "");
    const char* env = std::getenv("ELL_LAB_OUT");
    ctx.out = !o.out.empty() ? fs::path(o.out) : env && *env ? fs::path(env) : !cfg_out.empty() ? fs::path(cfg_out) : fs::path("ellab_out");
    ctx.seed = o.seed ? *o.seed : static_cast<std::uint64_t>(ctx.cfg.get_int("seed", 0));

    Report rep(ctx.command);
    Handler handler;
    for (const auto& [name, h] : handlers())
      if (name == ctx.command) handler = h;
    handler(ctx, rep);
    rep.data()["config"] = config_json(ctx.cfg);
    rep.data()["seed"] = ctx.seed;
    for (const auto& [file, body] : ctx.csv) write_text(ctx.out / file, body);
    const auto report_path = ctx.out / (ctx.command + ".json");
    write_text(report_path, rep.to_json().dump(2) + "\n");
    out << ctx.command << ": " << (rep.pass() ? "pass" : "fail") << " (" << report_path.string() << ")\n";
    for (const auto& c : rep.checks())
      if (!c.pass) out << "  failed " << c.name << ": " << format_double(c.lhs) << " " << c.relation << " " << format_double(c.rhs) << "\n";
    return rep.pass() ? 0 : 1;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
  } catch (const IoError& e) {
    err << "output error: " << e.what() << "\n";
  } catch (const PreconditionError& e) {
    err << "precondition failed: " << e.what() << "\n";
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << "\n";
  }
  return 2;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace ellab::cli
