#include "ellab/inequality_lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "ellab/dirichlet_solver.hpp"
#include "ellab/errors.hpp"

namespace ellab {

namespace {

constexpr double eps_machine = std::numeric_limits<double>::epsilon();

// Adaptive Gauss-Kronrod, rescaled to unit interval and unit magnitude.
double integrate(const ScalarNonlinearity& f, double a, double b) {
  if (b <= a) return 0.0;
  double s = std::max({std::abs(f(a)), std::abs(f(b)), std::abs(f(0.5 * (a + b)))});
  if (!(s > 0.0) || !std::isfinite(s)) s = 1.0;
  auto g = [&](double t) { return f(a + (b - a) * t) / s; };
  return s * (b - a) * boost::math::quadrature::gauss_kronrod<double, 31>::integrate(g, 0.0, 1.0, 10, 1e-14);
}

double p_sobolev(int n) {
  if (n <= 2) throw PreconditionError("critical exponent (n+2)/(n-2) is undefined for n <= 2");
  return (n + 2.0) / (n - 2.0);
}

// Fourth-order radial Laplacian of a radial function, evaluated through its
// even extension so that r = 0 needs no special stencil.
template <class Fn>
double fd_radial_laplacian(Fn&& w, double r, int n, double d) {
  auto W = [&](double s) { return w(std::abs(s)); };
  const double wp2 = W(r + 2 * d), wp1 = W(r + d), w0 = W(r), wm1 = W(r - d), wm2 = W(r - 2 * d);
  const double d2 = (-wp2 + 16 * wp1 - 30 * w0 + 16 * wm1 - wm2) / (12 * d * d);
  if (r < 1e-12) return n * d2;
  const double d1 = (-wp2 + 8 * wp1 - 8 * wm1 + wm2) / (12 * d);
  return d2 + (n - 1) / r * d1;
}

double rel_slack(double lhs, double rhs) {
  const double s = std::max(std::abs(lhs), std::abs(rhs));
  return s > 0.0 ? (lhs - rhs) / s : 0.0;
}

}  // namespace

PohozaevScan pohozaev_scan(const ScalarNonlinearity& f, int n, double eps, int points) {
  PohozaevScan out;
  out.n = n;
  out.p_sobolev = p_sobolev(n);
  out.eps = eps;
  constexpr double lo = 1e-8;
  if (!(eps > lo)) throw PreconditionError("pohozaev scan needs eps > 1e-8");
  if (points < 2) throw PreconditionError("pohozaev scan needs at least two points");
  double F = 0.0, prev = 0.0;
  out.min_h = std::numeric_limits<double>::infinity();
  for (int k = 0; k < points; ++k) {
    const double X = k + 1 == points ? eps : lo * std::pow(eps / lo, static_cast<double>(k) / (points - 1));
    F += integrate(f, prev, X);
    prev = X;
    const double xf = X * f(X);
    const double h = xf - (out.p_sobolev + 1.0) * F;
    out.X.push_back(X);
    out.h.push_back(h);
    out.scale = std::max({out.scale, std::abs(xf), (out.p_sobolev + 1.0) * std::abs(F)});
    if (h < out.min_h) {
      out.min_h = h;
      out.argmin = X;
    }
  }
  out.floor = -1e-15 * out.scale;
  out.nonnegative = out.min_h >= out.floor;
  return out;
}

double pohozaev_leading_coefficient(const ScalarNonlinearity& f, int n, double p, double X) {
  const double ps = p_sobolev(n);
  auto h = [&](double x) { return x * f(x) - (ps + 1.0) * integrate(f, 0.0, x); };
  const double d = 1e-3 * X;
  return (h(X + d) - h(X - d)) / (2 * d) / std::pow(X, p);
}

double BarrierSpec::threshold() const {
  const double a = alpha();
  return 4.0 * a * (n + 2.0 * (a + 1.0)) / A;
}

bool BarrierSpec::admissible() const {
  return p > 1.0 && A > 0.0 && C > 0.0 && std::pow(C, p - 1.0) >= threshold();
}

double BarrierSpec::W(double r) const {
  const double gap = R * R - r * r;
  return C * std::pow(R * R / gap, alpha());
}

double BarrierSpec::laplacian(double r) const {
  const double a = alpha();
  const double gap = R * R - r * r;
  return 2.0 * a * C * std::pow(R * R / gap, a) * (n * gap + 2.0 * (a + 1.0) * r * r) / (gap * gap);
}

BarrierCheck ko_barrier_check(const BarrierSpec& spec, int samples) {
  if (!(spec.R >= 1.0)) throw PreconditionError("barrier radius must satisfy R >= 1");
  if (!(spec.p > 1.0) || !(spec.A > 0.0) || !(spec.C > 0.0))
    throw PreconditionError("barrier needs p > 1, A > 0 and C > 0");
  if (spec.n < 1 || samples < 1) throw PreconditionError("barrier needs n >= 1 and samples >= 1");
  BarrierCheck out;
  out.spec = spec;
  out.threshold = spec.threshold();
  out.admissible = spec.admissible();
  out.W_at_zero = spec.W(0.0);
  out.min_rel_slack = std::numeric_limits<double>::infinity();
  const double d = 2e-4 * spec.R;
  for (int k = 0; k < samples; ++k) {
    const double r = spec.R * k / samples;
    const double lhs = spec.laplacian(r);
    const double rhs = spec.A / (1.0 + r * r) * std::pow(spec.W(r), spec.p);
    const double s = rel_slack(rhs, lhs);
    ++out.samples;
    if (s < out.min_rel_slack) {
      out.min_rel_slack = s;
      out.worst_radius = r;
    }
    if (r <= 0.95 * spec.R) {
      const double fd = fd_radial_laplacian([&](double x) { return spec.W(x); }, r, spec.n, d);
      out.fd_max_rel_gap = std::max(out.fd_max_rel_gap, std::abs(fd - lhs) / std::abs(lhs));
    }
  }
  out.inequality_holds = out.min_rel_slack >= -1e-12;
  out.fd_ok = out.fd_max_rel_gap <= 1e-6;
  if (!out.admissible)
    out.verdict = "condition not met";
  else
    out.verdict = out.inequality_holds ? "pass" : "inequality violated";
  return out;
}

double MixedPairSpec::beta_sys() const { return std::max(p + q, 1.0); }
double MixedPairSpec::gamma_sys() const { return std::max(q + r, 1.0); }

std::vector<double> mixed_pair_radii(int samples, double r_max) {
  if (samples < 2 || !(r_max > 1e-3)) throw PreconditionError("radii need samples >= 2 and r_max > 1e-3");
  std::vector<double> radii{0.0};
  for (int k = 0; k < samples - 1; ++k)
    radii.push_back(k + 2 == samples ? r_max : 1e-3 * std::pow(r_max / 1e-3, static_cast<double>(k) / (samples - 2)));
  return radii;
}

double laplacian_inverse_power(double k, double r, int n) {
  const double s = 1.0 + r * r;
  return 2.0 * k * std::pow(s, -k - 2.0) * (-n + (2.0 * k + 2.0 - n) * r * r);
}

MixedPairCheck mixed_pair_check(const MixedPairSpec& spec, const std::vector<double>& radii) {
  if (spec.n < 3) throw PreconditionError("mixed pair needs n >= 3");
  const double lower = 2.0 / (spec.n - 2.0);
  const double upper = std::min(spec.p, spec.r - 1.0);
  if (!(lower < upper))
    throw PreconditionError("empty exponent window: need p > 2/(n-2) and r - 1 > 2/(n-2)");
  const double inv = 1.0 / spec.alpha_z;
  if (!(inv > lower && inv < upper)) throw PreconditionError("1/alpha_z must lie strictly between 2/(n-2) and min(p, r-1)");
  if (!(spec.beta_w > 0.0 && spec.beta_w < spec.p * spec.alpha_z - 1.0))
    throw PreconditionError("beta_w must lie in (0, p*alpha_z - 1)");
  if (radii.empty()) throw PreconditionError("mixed pair needs radii");

  const double a = spec.alpha_z, b = spec.beta_w;
  const double bs = spec.beta_sys(), gs = spec.gamma_sys();
  const std::size_t m = radii.size();
  std::vector<double> zs(m), ws(m), negLapZ(m), lapW(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double s = 1.0 + radii[i] * radii[i];
    zs[i] = std::pow(s, -a);
    ws[i] = std::pow(s, -b);
    negLapZ[i] = -laplacian_inverse_power(a, radii[i], spec.n);
    lapW[i] = -laplacian_inverse_power(b, radii[i], spec.n);
  }

  MixedPairCheck out;
  out.radii = static_cast<long>(m);
  auto grid = [](int i) { return std::pow(10.0, -3.0 + i / 8.0); };
  constexpr int G = 57;
  auto holds = [&](double B, double Aw, double Cz, double* sz, double* sw) {
    double mz = std::numeric_limits<double>::infinity(), mw = mz;
    for (std::size_t i = 0; i < m; ++i) {
      const double W = B - Aw * ws[i];
      const double Z = Cz * zs[i];
      const double tz = rel_slack(Cz * negLapZ[i], spec.C1 * std::pow(W, bs) * std::pow(Z, spec.r));
      const double tw = rel_slack(Aw * lapW[i], spec.C2 * std::pow(Z, spec.p) * std::pow(W, gs));
      if (!sz && (tz < -1e-12 || tw < -1e-12)) return false;
      mz = std::min(mz, tz);
      mw = std::min(mw, tw);
    }
    if (sz) *sz = mz, *sw = mw;
    return mz >= -1e-12 && mw >= -1e-12;
  };
  for (int ib = 1; ib < G && !out.found; ++ib)
    for (int ia = 0; ia < ib && !out.found; ++ia)
      for (int ic = 0; ic < G && !out.found; ++ic) {
        ++out.candidates_tried;
        if (holds(grid(ib), grid(ia), grid(ic), nullptr, nullptr)) {
          out.found = true;
          out.B = grid(ib);
          out.A_w = grid(ia);
          out.C_z = grid(ic);
        }
      }
  if (!out.found) {
    out.verdict = "no witness on the constant grid";
    return out;
  }
  holds(out.B, out.A_w, out.C_z, &out.min_rel_slack_Z, &out.min_rel_slack_W);
  out.W_bounds_ok = true;
  for (std::size_t i = 0; i < m; ++i) {
    const double W = out.B - out.A_w * ws[i];
    if (!(W >= out.B - out.A_w && W < out.B)) out.W_bounds_ok = false;
    const double d = 1e-3 * (1.0 + radii[i]);
    for (double k : {a, b}) {
      const double cf = laplacian_inverse_power(k, radii[i], spec.n);
      const double fd = fd_radial_laplacian([k](double x) { return std::pow(1.0 + x * x, -k); }, radii[i], spec.n, d);
      out.fd_max_rel_gap = std::max(out.fd_max_rel_gap, std::abs(fd - cf) / std::abs(cf));
    }
  }
  out.fd_ok = out.fd_max_rel_gap <= 1e-6;
  out.verdict = out.W_bounds_ok ? "witness found" : "witness found, W bounds violated";
  return out;
}

ZWBoundsReport pointwise_zw_bounds(double K, const Coefficients& k, const Exponents& e, const ZWSampleSpec& spec,
                                   bool bounded) {
  if (k.D() < 0.0) throw PreconditionError("pointwise Z/W bounds need ab >= cd");
  if (!(K > 0.0)) throw PreconditionError("K must be positive");
  ZWBoundsReport out;
  out.K = K;
  out.C_q = e.q >= 1.0 ? 1.0 : e.q;
  out.beta_sys = std::max(e.p + e.q, 1.0);
  out.gamma_sys = std::max(e.q + e.r, 1.0);
  out.bounded_box_used = e.p + e.q < 1.0 && bounded;
  out.beta_form_checked = e.p + e.q >= 1.0 || bounded;
  const double pq1 = e.p + e.q - 1.0;
  // constant in front of u^r (Kv-u)^beta, resp. (Kv)^r (u-Kv)^beta
  const double cf = out.bounded_box_used ? k.a * out.C_q / K * std::pow(spec.u_max, pq1)
                                         : k.a * out.C_q / K * std::pow(K, -pq1);
  const double cg = out.bounded_box_used ? k.b * out.C_q * std::pow(K, -e.r) * std::pow(spec.u_max, pq1)
                                         : k.b * out.C_q * std::pow(K, -e.r);
  const double beta = out.bounded_box_used ? 1.0 : e.p + e.q;

  std::mt19937_64 gen(spec.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double sf = std::numeric_limits<double>::infinity(), sg = sf, sbf = sf, sbg = sf;
  for (long i = 0; i < spec.samples; ++i) {
    const double u = spec.u_max * (1.0 - unif(gen));
    const double v = spec.u_max * (1.0 - unif(gen));
    const double gap = K * v - u;
    if (gap >= 0.0) {
      ++out.below;
      const double f = power_f(u, v, e, k);
      const double base = std::pow(u, e.r) * std::pow(v, e.p);
      const double scale = base * (k.a * std::pow(v, e.q) + k.c * std::pow(u, e.q));
      const double m = k.a * out.C_q / K * std::pow(u, e.r) * std::pow(v, pq1) * gap;
      const double mb = cf * std::pow(u, e.r) * std::pow(gap, beta);
      sf = std::min(sf, (f - m) / (scale + m));
      if (out.beta_form_checked) sbf = std::min(sbf, (m - mb) / (m + mb + scale));
    }
    if (gap <= 0.0) {
      ++out.above;
      const double g = power_g(u, v, e, k);
      const double base = std::pow(v, e.r) * std::pow(u, e.p);
      const double scale = base * (k.b * std::pow(u, e.q) + k.d * std::pow(v, e.q));
      const double m = k.b * out.C_q * std::pow(v, e.r) * std::pow(u, pq1) * (-gap);
      const double mb = cg * std::pow(K * v, e.r) * std::pow(-gap, beta);
      sg = std::min(sg, (g - m) / (scale + m));
      if (out.beta_form_checked) sbg = std::min(sbg, (m - mb) / (m + mb + scale));
    }
  }
  out.min_slack_f = std::min(sf, sbf);
  out.min_slack_g = std::min(sg, sbg);
  if (out.below == 0) out.min_slack_f = 0.0;
  if (out.above == 0) out.min_slack_g = 0.0;

  bool diagonal_ok = true;
  for (int i = 1; i <= 16; ++i) {
    const double v = spec.u_max * i / 16.0 / std::max(1.0, K);
    const double u = K * v;
    const double mf = k.a * out.C_q / K * std::pow(u, e.r) * std::pow(v, pq1) * (K * v - u);
    const double mg = k.b * out.C_q * std::pow(v, e.r) * std::pow(u, pq1) * (u - K * v);
    out.diagonal_gap = std::max({out.diagonal_gap, std::abs(mf), std::abs(mg)});
    const double f = power_f(u, v, e, k), g = power_g(u, v, e, k);
    const double tol = 64 * eps_machine * std::pow(u, e.r) * std::pow(v, e.p) * (k.a * std::pow(v, e.q) + k.c * std::pow(u, e.q));
    const double tolg = 64 * eps_machine * std::pow(v, e.r) * std::pow(u, e.p) * (k.b * std::pow(u, e.q) + k.d * std::pow(v, e.q));
    if (f < -tol || g < -tolg) diagonal_ok = false;
  }

  std::mt19937_64 gx(spec.seed + 1);
  for (long i = 0; i < spec.identity_samples; ++i) {
    const double X = std::pow(10.0, -3.0 + 6.0 * unif(gx));
    const double t1 = std::pow(X, e.r), t2 = std::pow(X, e.p + e.q + 1.0), t3 = std::pow(X, e.q + e.r),
                 t4 = std::pow(X, e.p + 1.0);
    const double expanded = t1 + t2 - t3 - t4;
    const double factored = std::pow(X, e.r) * (1.0 - std::pow(X, e.q)) * (1.0 - std::pow(X, e.p + 1.0 - e.r));
    const double sum = t1 + t2 + t3 + t4;
    out.identity_max_gap = std::max(out.identity_max_gap, std::abs(expanded - factored) / sum);
    if (e.r <= 1.0 && factored < -64 * eps_machine * sum) out.identity_nonnegative = false;
  }
  out.pass = out.min_slack_f >= -1e-12 && out.min_slack_g >= -1e-12 && out.diagonal_gap == 0.0 && diagonal_ok &&
             out.identity_max_gap <= 64 * eps_machine && (e.r > 1.0 || out.identity_nonnegative);
  return out;
}

ConeWeightReport cone_weight_admissibility(double r, double kappa, int n) {
  if (n < 2) throw PreconditionError("cone weights need n >= 2");
  ConeWeightReport out;
  out.r = r;
  out.kappa = kappa;
  out.n = n;
  out.margin_kappa = kappa + 2.0;
  out.margin_sum = kappa + r + 1.0;
  out.margin_lower = r;
  out.margin_upper = (n + 1.0 + kappa) / (n - 1.0) - r;
  out.admissible = out.margin_kappa > 0.0 && out.margin_sum >= 0.0 && out.margin_lower >= 0.0 && out.margin_upper >= 0.0;
  return out;
}

double halfspace_kappa(double s, double q, int n) { return s - (n - 1.0) * q; }

HalfspaceGateReport halfspace_gate_check(double p, double q, double r, double s, int n) {
  if (p < 0.0 || q < 0.0 || r < 0.0 || s < 0.0) throw PreconditionError("half-space exponents must be nonnegative");
  if (n < 2) throw PreconditionError("half-space gates need n >= 2");
  const double n1 = n - 1.0;
  auto dj = [](std::string expr, double lhs, double rhs) { return Disjunct{std::move(expr), lhs, rhs, lhs <= rhs}; };
  HalfspaceGateReport out;
  out.first = {dj("r <= (n+1+p)/(n-1)", r, (n + 1.0 + p) / n1), dj("q <= (1+s)/(n-1)", q, (1.0 + s) / n1)};
  out.second = {dj("s <= (n+1+q)/(n-1)", s, (n + 1.0 + q) / n1), dj("p <= (1+r)/(n-1)", p, (1.0 + r) / n1)};
  out.semitrivial = dj("min(p+r,q+s) <= (n+1)/(n-1)", std::min(p + r, q + s), (n + 1.0) / n1);
  out.first_holds = out.first[0].holds || out.first[1].holds;
  out.second_holds = out.second[0].holds || out.second[1].holds;
  out.dichotomy = out.first_holds && out.second_holds;
  out.semitrivial_only = out.dichotomy && out.semitrivial.holds;
  out.verdict = out.semitrivial_only ? "semitrivial"
                : out.dichotomy      ? "proportional or semitrivial"
                                     : "outside theorem scope";
  return out;
}

std::vector<double> radial_laplacian(int n, const std::vector<double>& t, const std::vector<double>& w) {
  if (t.size() != w.size() || t.size() < 3) throw PreconditionError("radial Laplacian needs matching traces of length >= 3");
  std::vector<double> out(t.size(), 0.0);
  for (std::size_t i = 1; i + 1 < t.size(); ++i) {
    const double hm = t[i] - t[i - 1], hp = t[i + 1] - t[i];
    if (!(hm > 0.0 && hp > 0.0)) throw PreconditionError("radial abscissae must increase strictly");
    const double dp = w[i + 1] - w[i], dm = w[i] - w[i - 1];
    const double d2 = 2.0 * (dp / hp - dm / hm) / (hp + hm);
    const double d1 = (hm * hm * dp + hp * hp * dm) / (hp * hm * (hp + hm));
    out[i] = d2 + (n - 1) / t[i] * d1;
  }
  return out;
}

namespace {

HarmonicityReport finish(HarmonicityReport rep, const std::vector<double>& lapW, const std::vector<double>& lapZ,
                         const std::vector<bool>& interior, double lap_scale, double tol_factor) {
  rep.tau = tol_factor * rep.h * rep.h * lap_scale;
  rep.min_lap_W = std::numeric_limits<double>::infinity();
  rep.min_neg_lap_Z = rep.min_lap_W;
  for (std::size_t i = 0; i < interior.size(); ++i) {
    if (!interior[i]) continue;
    ++rep.interior_nodes;
    rep.min_lap_W = std::min(rep.min_lap_W, lapW[i]);
    rep.min_neg_lap_Z = std::min(rep.min_neg_lap_Z, -lapZ[i]);
  }
  rep.W_subharmonic = rep.min_lap_W >= -rep.tau;
  rep.Z_superharmonic = rep.min_neg_lap_Z >= -rep.tau;
  rep.pass = rep.W_subharmonic && rep.Z_superharmonic;
  return rep;
}

}  // namespace

HarmonicityReport discrete_harmonicity_check(const RadialPair& pair, double K, const Coefficients& k,
                                             const Exponents& e, const HarmonicityOptions& opts) {
  if (k.D() < 0.0) throw PreconditionError("harmonicity check needs ab >= cd");
  if (pair.u.size() != pair.t.size() || pair.v.size() != pair.t.size())
    throw PreconditionError("radial pair traces must have equal length");
  const auto lu = radial_laplacian(pair.n, pair.t, pair.u);
  const auto lv = radial_laplacian(pair.n, pair.t, pair.v);
  HarmonicityReport rep;
  rep.K = K;
  double scale = 0.0, res = 0.0;
  for (std::size_t i = 1; i + 1 < pair.t.size(); ++i) {
    scale = std::max({scale, std::abs(lu[i]), std::abs(lv[i])});
    res = std::max({res, std::abs(lu[i] + power_f(pair.u[i], pair.v[i], e, k)),
                    std::abs(lv[i] + power_g(pair.u[i], pair.v[i], e, k))});
    rep.h = std::max(rep.h, pair.t[i + 1] - pair.t[i]);
  }
  rep.h = std::max(rep.h, pair.t[1] - pair.t[0]);
  rep.residual = scale > 0.0 ? res / scale : res;
  if (opts.check_residual && !(rep.residual <= opts.radial_residual_tol))
    throw PreconditionError("pair does not solve the system: relative residual " + format_double(rep.residual));
  for (std::size_t i = 0; i < pair.t.size(); ++i) {
    rep.W.push_back(std::abs(pair.u[i] - K * pair.v[i]));
    rep.Z.push_back(std::min(pair.u[i], K * pair.v[i]));
  }
  std::vector<bool> interior(pair.t.size(), true);
  interior.front() = interior.back() = false;
  const auto lw = radial_laplacian(pair.n, pair.t, rep.W);
  const auto lz = radial_laplacian(pair.n, pair.t, rep.Z);
  return finish(std::move(rep), lw, lz, interior, scale, opts.tol_factor);
}

HarmonicityReport discrete_harmonicity_check(const GridField& field, const ProblemInstance& inst, double K,
                                             const HarmonicityOptions& opts) {
  if (inst.has_spatial_coefficients()) throw PreconditionError("harmonicity check needs constant coefficients");
  if (inst.coeffs.D() < 0.0) throw PreconditionError("harmonicity check needs ab >= cd");
  field.check_shape();
  const Grid& g = field.grid;
  HarmonicityReport rep;
  rep.K = K;
  rep.h = g.h();
  if (opts.check_residual) {
    rep.residual = assemble_residual(field, inst).normalized();
    if (!(rep.residual <= opts.grid_residual_tol))
      throw PreconditionError("field does not solve the system: normalized residual " + format_double(rep.residual));
  }
  const auto lu = g.apply_laplacian(field.u);
  const auto lv = g.apply_laplacian(field.v);
  double scale = 0.0;
  std::vector<bool> interior(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    interior[i] = !g.is_boundary(i);
    if (interior[i]) scale = std::max({scale, std::abs(lu[i]), std::abs(lv[i])});
    rep.W.push_back(std::abs(field.u[i] - K * field.v[i]));
    rep.Z.push_back(std::min(field.u[i], K * field.v[i]));
  }
  const auto lw = g.apply_laplacian(rep.W);
  const auto lz = g.apply_laplacian(rep.Z);
  return finish(std::move(rep), lw, lz, interior, scale, opts.tol_factor);
}

}  // namespace ellab
