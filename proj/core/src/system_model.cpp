#include "ellab/system_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ellab/errors.hpp"

namespace ellab {

namespace {

void check_densities(double u, double v) {
  if (!(u >= 0.0) || !(v >= 0.0))
    throw DomainError("densities must be nonnegative (u=" + format_double(u) +
                      ", v=" + format_double(v) + ")");
}

// d/dx x^e, with the one-sided value at x = 0 where it exists.
double dpow(double x, double e) {
  if (e == 0.0) return 0.0;
  if (x > 0.0) return e * std::pow(x, e - 1.0);
  if (e > 1.0) return 0.0;
  if (e == 1.0) return 1.0;
  throw DomainError("derivative of x^" + format_double(e) + " does not exist at x=0");
}

// coef * x^ex * y^ey differentiated in x.
double dterm(double coef, double x, double ex, double y, double ey) {
  if (coef == 0.0) return 0.0;
  const double other = std::pow(y, ey);
  if (other == 0.0) return 0.0;
  return coef * dpow(x, ex) * other;
}

double lot_value(const ProblemInstance& inst, PointView x, double u, double v, bool first) {
  if (const auto* lin = std::get_if<LinearLowerOrder>(&inst.lot))
    return first ? lin->mu * u : lin->nu * v;
  const auto& gen = std::get<GeneralLowerOrder>(inst.lot);
  const auto& h = first ? gen.h1 : gen.h2;
  return h ? h(x, u, v) : 0.0;
}

double inf_or_sup(const std::vector<Coefficients>& samples, double Coefficients::*field, bool inf) {
  double out = inf ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
  for (const auto& s : samples) out = inf ? std::min(out, s.*field) : std::max(out, s.*field);
  return out;
}

std::vector<std::vector<double>> default_samples(const ProblemInstance& inst) {
  std::vector<std::vector<double>> pts;
  const int n = std::max(inst.n, 1);
  const int k = 17;
  double hx = 1.0, hy = 1.0;
  if (inst.domain.kind == DomainKind::ball) {
    hx = hy = inst.domain.radius;
  } else if (inst.domain.kind == DomainKind::box && !inst.domain.sides.empty()) {
    hx = inst.domain.sides[0];
    hy = inst.domain.sides.size() > 1 ? inst.domain.sides[1] : hx;
  }
  const bool centered = inst.domain.kind != DomainKind::box;
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < (n > 1 ? k : 1); ++j) {
      std::vector<double> x(n, 0.0);
      const double s = static_cast<double>(i) / (k - 1);
      const double t = static_cast<double>(j) / (k - 1);
      x[0] = centered ? (2.0 * s - 1.0) * hx : s * hx;
      if (n > 1) x[1] = centered ? (2.0 * t - 1.0) * hy : t * hy;
      if (inst.domain.kind == DomainKind::ball && x[0] * x[0] + (n > 1 ? x[1] * x[1] : 0.0) > hx * hx)
        continue;
      if (inst.domain.kind == DomainKind::half_space && n > 0) x[n - 1] = std::abs(x[n - 1]);
      pts.push_back(std::move(x));
    }
  return pts;
}

GateResult make_gate(std::string name, std::string relation, double value,
                     std::optional<double> threshold, bool pass, std::string note = {}) {
  GateResult g;
  g.name = std::move(name);
  g.relation = std::move(relation);
  g.value = value;
  g.threshold = threshold;
  g.pass = pass;
  g.note = std::move(note);
  return g;
}

GateResult upper_gate(std::string name, bool strict, double value, std::optional<double> bound,
                      std::string note = {}) {
  const bool pass = !bound || (strict ? value < *bound : value <= *bound);
  return make_gate(std::move(name), strict ? "<" : "<=", value, bound, pass, std::move(note));
}

GateResult not_applicable(std::string name, std::string note) {
  GateResult g;
  g.name = std::move(name);
  g.applicable = false;
  g.pass = true;
  g.note = std::move(note);
  return g;
}

double signed_infinity(double s) {
  return s > 0 ? std::numeric_limits<double>::infinity()
               : (s < 0 ? -std::numeric_limits<double>::infinity() : 0.0);
}

}  // namespace

std::string to_string(DomainKind kind) {
  switch (kind) {
    case DomainKind::whole_space: return "whole_space";
    case DomainKind::half_space: return "half_space";
    case DomainKind::ball: return "ball";
    case DomainKind::box: return "box";
  }
  return "unknown";
}

DomainKind domain_kind_from_string(const std::string& name) {
  if (name == "whole_space" || name == "whole-space") return DomainKind::whole_space;
  if (name == "half_space" || name == "half-space") return DomainKind::half_space;
  if (name == "ball") return DomainKind::ball;
  if (name == "box") return DomainKind::box;
  throw ConfigError("unknown domain kind '" + name + "'");
}

Coefficients ProblemInstance::coefficients_at(std::optional<PointView> x) const {
  if (!spatial) return coeffs;
  if (!x) throw PreconditionError("spatial coefficients need an evaluation point");
  return spatial(*x);
}

void ProblemInstance::check_shape() const {
  if (n < 1) throw PreconditionError("dimension n must be >= 1");
  if (domain.kind == DomainKind::ball && !(domain.radius > 0.0))
    throw PreconditionError("ball radius must be positive");
  if (domain.kind == DomainKind::box) {
    if (domain.sides.empty()) throw PreconditionError("box needs side lengths");
    for (double s : domain.sides)
      if (!(s > 0.0)) throw PreconditionError("box sides must be positive");
  }
}

double power_f(double u, double v, const Exponents& e, const Coefficients& k) {
  check_densities(u, v);
  const double pre = std::pow(u, e.r) * std::pow(v, e.p);
  if (pre == 0.0) return 0.0;
  return pre * (k.a * std::pow(v, e.q) - k.c * std::pow(u, e.q));
}

double power_g(double u, double v, const Exponents& e, const Coefficients& k) {
  check_densities(u, v);
  const double pre = std::pow(v, e.r) * std::pow(u, e.p);
  if (pre == 0.0) return 0.0;
  return pre * (k.b * std::pow(u, e.q) - k.d * std::pow(v, e.q));
}

double eval_f(double u, double v, const ProblemInstance& inst, std::optional<PointView> x) {
  const double base = power_f(u, v, inst.exps, inst.coefficients_at(x));
  return x ? base + lot_value(inst, *x, u, v, true) : base;
}

double eval_g(double u, double v, const ProblemInstance& inst, std::optional<PointView> x) {
  const double base = power_g(u, v, inst.exps, inst.coefficients_at(x));
  return x ? base + lot_value(inst, *x, u, v, false) : base;
}

Jacobian power_jacobian(double u, double v, const Exponents& e, const Coefficients& k) {
  check_densities(u, v);
  const double p = e.p, q = e.q, r = e.r;
  // f = a u^r v^(p+q) - c u^(r+q) v^p ; g = b v^r u^(p+q) - d v^(r+q) u^p
  Jacobian J{};
  J[0] = dterm(k.a, u, r, v, p + q) - dterm(k.c, u, r + q, v, p);
  J[1] = dterm(k.a, v, p + q, u, r) - dterm(k.c, v, p, u, r + q);
  J[2] = dterm(k.b, u, p + q, v, r) - dterm(k.d, u, p, v, r + q);
  J[3] = dterm(k.b, v, r, u, p + q) - dterm(k.d, v, r + q, u, p);
  return J;
}

std::array<double, 2> lower_order_values(const ProblemInstance& inst, PointView x, double u, double v) {
  return {lot_value(inst, x, u, v, true), lot_value(inst, x, u, v, false)};
}

Jacobian lower_order_jacobian(const ProblemInstance& inst, PointView x, double u, double v) {
  Jacobian J{};
  if (const auto* lin = std::get_if<LinearLowerOrder>(&inst.lot)) {
    J[0] = lin->mu;
    J[3] = lin->nu;
    return J;
  }
  const auto& gen = std::get<GeneralLowerOrder>(inst.lot);
  auto diff = [&](const auto& h, bool wrt_u) {
    if (!h) return 0.0;
    const double z = wrt_u ? u : v;
    const double step = 1e-6 * std::max(1.0, std::abs(z));
    const double lo = std::max(0.0, z - step);
    const double hi = z + step;
    const double fh = wrt_u ? h(x, hi, v) : h(x, u, hi);
    const double fl = wrt_u ? h(x, lo, v) : h(x, u, lo);
    return (fh - fl) / (hi - lo);
  };
  J[0] = diff(gen.h1, true);
  J[1] = diff(gen.h1, false);
  J[2] = diff(gen.h2, true);
  J[3] = diff(gen.h2, false);
  return J;
}

Jacobian eval_jacobian(double u, double v, const ProblemInstance& inst, std::optional<PointView> x) {
  Jacobian J = power_jacobian(u, v, inst.exps, inst.coefficients_at(x));
  if (!x) return J;
  const Jacobian L = lower_order_jacobian(inst, *x, u, v);
  for (int i = 0; i < 4; ++i) J[i] += L[i];
  return J;
}

std::optional<double> over_n_minus_2(double num, int n) {
  if (n <= 2) return std::nullopt;
  return num / static_cast<double>(n - 2);
}

const GateResult& HypothesisReport::gate(const std::string& name) const {
  for (const auto& g : gates)
    if (g.name == name) return g;
  throw PreconditionError("no gate named '" + name + "'");
}

bool HypothesisReport::all_applicable_pass() const {
  return std::all_of(gates.begin(), gates.end(),
                     [](const GateResult& g) { return !g.applicable || g.pass; });
}

HypothesisReport validate_hypotheses(const ProblemInstance& inst, const GateOptions& opts) {
  HypothesisReport rep;
  const auto& e = inst.exps;
  const int n = inst.n;
  const double sigma = e.sigma();

  std::vector<Coefficients> cs;
  if (inst.has_spatial_coefficients()) {
    const auto pts = opts.sample_points.empty() ? default_samples(inst) : opts.sample_points;
    for (const auto& x : pts) cs.push_back(inst.spatial(PointView(x)));
  }
  if (cs.empty()) cs.push_back(inst.coeffs);
  const double inf_a = inf_or_sup(cs, &Coefficients::a, true);
  const double inf_b = inf_or_sup(cs, &Coefficients::b, true);
  const double inf_c = inf_or_sup(cs, &Coefficients::c, true);
  const double inf_d = inf_or_sup(cs, &Coefficients::d, true);
  double inf_D = std::numeric_limits<double>::infinity();
  for (const auto& c : cs) inf_D = std::min(inf_D, c.D());

  {
    const double worst = std::min({e.p, e.r, e.q});
    auto g = make_gate("exponent_signs", ">=", worst, 0.0, e.signs_ok(), "p,r >= 0 and q > 0");
    rep.gates.push_back(g);
  }
  rep.gates.push_back(make_gate("exponent_balance", ">=", e.q, e.m(), e.q >= e.m(), "q >= |p-r|"));
  if (e.r == 1.0) {
    const double t = std::abs(1.0 - e.p);
    rep.gates.push_back(make_gate("model_exponent_balance", ">=", e.q, t, e.q >= t, "q >= |1-p|"));
  } else {
    rep.gates.push_back(not_applicable("model_exponent_balance", "model form needs r = 1"));
  }
  {
    const double worst = std::min({inf_a, inf_b});
    const bool pass = inf_a > 0 && inf_b > 0 && inf_c >= 0 && inf_d >= 0;
    rep.gates.push_back(make_gate("coefficient_signs", ">", worst, 0.0, pass,
                                  "a,b > 0 and c,d >= 0 on samples"));
  }
  rep.gates.push_back(make_gate("reaction_dominance", ">=", inf_D, 0.0, inf_D >= 0.0, "inf (ab - cd) >= 0"));
  rep.gates.push_back(make_gate("strict_reaction_dominance", ">", inf_D, 0.0, inf_D > 0.0, "inf (ab - cd) > 0"));
  rep.gates.push_back(upper_gate("energy_subcritical", true, e.p + e.q, over_n_minus_2(4.0, n), "p+q < 4/(n-2)_+"));

  if (const auto* lin = std::get_if<LinearLowerOrder>(&inst.lot)) {
    if (opts.lambda1 && inst.domain.bounded()) {
      rep.gates.push_back(upper_gate("below_principal_eigenvalue", true, std::max(lin->mu, lin->nu),
                                     *opts.lambda1, "mu, nu < lambda1"));
    } else {
      rep.gates.push_back(not_applicable("below_principal_eigenvalue",
                                         "needs a bounded domain and a supplied lambda1"));
    }
  } else {
    rep.gates.push_back(not_applicable("below_principal_eigenvalue", "general lower-order terms"));
  }

  rep.gates.push_back(upper_gate("whole_space_r_bound", false, e.r, over_n_minus_2(static_cast<double>(n), n),
                                 "r <= n/(n-2)_+"));
  {
    auto g = upper_gate("whole_space_p_bound", false, e.p, over_n_minus_2(2.0, n), "p <= 2/(n-2)_+ and c,d > 0");
    if (!(inf_c > 0 && inf_d > 0)) {
      g.pass = false;
      g.note += " (c or d vanishes)";
    }
    rep.gates.push_back(g);
  }
  rep.gates.push_back(upper_gate("liouville_subcritical", true, sigma, over_n_minus_2(n + 2.0, n),
                                 "sigma < (n+2)/(n-2)_+"));
  {
    auto g = upper_gate("superlinear_subcritical", true, sigma, over_n_minus_2(n + 2.0, n),
                        "1 < sigma < (n+2)/(n-2)_+");
    if (!(sigma > 1.0)) {
      g.pass = false;
      g.note += " (sigma <= 1)";
    }
    rep.gates.push_back(g);
  }
  rep.gates.push_back(make_gate("strong_maximum_principle", ">=", e.q + e.r, 1.0, e.q + e.r >= 1.0, "q+r >= 1"));

  {
    const double mbar = std::min(inf_a, inf_b);
    double lim = 0.0;
    if (const auto* lin = std::get_if<LinearLowerOrder>(&inst.lot)) {
      // liminf of mu u / (u^r v^(p+q)) as v -> inf, u/v -> 0
      const double mu = std::min(lin->mu, lin->nu);
      if (mu != 0.0 && !(sigma > 1.0) && !(e.r == 1.0 && e.p + e.q > 0.0))
        lim = (e.r == 1.0 && e.p + e.q == 0.0) ? mu : signed_infinity(mu);
    }
    const bool pass = e.r <= 1.0 && mbar > 0.0 && lim > -mbar;
    auto g = make_gate("semitrivial_exclusion_ab", ">", mbar, 0.0, pass,
                       "r <= 1 and min(inf a, inf b) > 0 with lower-order liminf > -min");
    if (std::holds_alternative<GeneralLowerOrder>(inst.lot)) g.note += " (general terms: limits not evaluated)";
    rep.gates.push_back(g);
  }
  {
    const double mm = std::min(inf_c, inf_d);
    double lim = 0.0;
    if (const auto* lin = std::get_if<LinearLowerOrder>(&inst.lot)) {
      // limsup of mu u / (u^(r+q) v^p) as u -> inf, v/u -> 0
      const double mu = std::max(lin->mu, lin->nu);
      if (mu != 0.0) {
        if (e.p > 0.0) lim = signed_infinity(mu);
        else if (e.r + e.q > 1.0) lim = 0.0;
        else if (e.r + e.q == 1.0) lim = mu;
        else lim = signed_infinity(mu);
      }
    }
    const bool pass = mm > 0.0 && lim < mm;
    auto g = make_gate("semitrivial_exclusion_cd", ">", mm, 0.0, pass,
                       "min(inf c, inf d) > 0 with lower-order limsup < min");
    if (std::holds_alternative<GeneralLowerOrder>(inst.lot)) g.note += " (general terms: limits not evaluated)";
    rep.gates.push_back(g);
  }
  if (const auto* gen = std::get_if<GeneralLowerOrder>(&inst.lot)) {
    rep.gates.push_back(upper_gate("lower_order_growth", true, gen->growth, sigma, "growth < sigma"));
  } else {
    rep.gates.push_back(upper_gate("lower_order_growth", true, 1.0, sigma, "linear terms: 1 < sigma"));
  }
  return rep;
}

ProblemInstance instance_from_config(const KeyValueConfig& cfg) {
  ProblemInstance inst;
  inst.n = static_cast<int>(cfg.get_int("n", 3));
  inst.exps.p = cfg.get_double("p");
  inst.exps.q = cfg.get_double("q");
  inst.exps.r = cfg.get_double("r");
  inst.coeffs.a = cfg.get_double("a");
  inst.coeffs.b = cfg.get_double("b");
  inst.coeffs.c = cfg.get_double("c", 0.0);
  inst.coeffs.d = cfg.get_double("d", 0.0);
  inst.lot = LinearLowerOrder{cfg.get_double("mu", 0.0), cfg.get_double("nu", 0.0)};
  inst.domain.kind = domain_kind_from_string(cfg.get_string("domain.kind", "whole_space"));
  inst.domain.radius = cfg.get_double("domain.radius", 1.0);
  if (cfg.contains("domain.sides")) inst.domain.sides = cfg.get_doubles("domain.sides");
  inst.grid_h = cfg.get_double("grid.h", 0.0);
  try {
    inst.check_shape();
  } catch (const PreconditionError& e) {
    throw ConfigError(e.what());
  }
  return inst;
}

KeyValueConfig instance_to_config(const ProblemInstance& inst) {
  KeyValueConfig cfg;
  cfg.set("n", std::to_string(inst.n));
  cfg.set("p", format_double(inst.exps.p));
  cfg.set("q", format_double(inst.exps.q));
  cfg.set("r", format_double(inst.exps.r));
  cfg.set("a", format_double(inst.coeffs.a));
  cfg.set("b", format_double(inst.coeffs.b));
  cfg.set("c", format_double(inst.coeffs.c));
  cfg.set("d", format_double(inst.coeffs.d));
  if (const auto* lin = std::get_if<LinearLowerOrder>(&inst.lot)) {
    cfg.set("mu", format_double(lin->mu));
    cfg.set("nu", format_double(lin->nu));
  }
  cfg.set("domain.kind", to_string(inst.domain.kind));
  cfg.set("domain.radius", format_double(inst.domain.radius));
  if (!inst.domain.sides.empty()) {
    std::string s;
    for (std::size_t i = 0; i < inst.domain.sides.size(); ++i)
      s += (i ? " " : "") + format_double(inst.domain.sides[i]);
    cfg.set("domain.sides", s);
  }
  cfg.set("grid.h", format_double(inst.grid_h));
  return cfg;
}

}  // namespace ellab
