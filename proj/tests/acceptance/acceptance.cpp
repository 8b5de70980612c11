// Acceptance suite: one line per criterion, exit 0 only if every selected
// criterion passes.
//
//   ellab_acceptance [--criterion N] [--out DIR]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ellab/dirichlet_solver.hpp"
#include "ellab/eigen_solver.hpp"
#include "ellab/inequality_lab.hpp"
#include "ellab/proportionality.hpp"
#include "ellab/radial_shooting.hpp"
#include "ellab/report.hpp"
#include "ellab/spherical_means.hpp"
#include "ellab/system_model.hpp"

#ifdef ELLAB_HAVE_CLI
#include "cli.hpp"
#endif

using namespace ellab;
namespace fs = std::filesystem;
using std::numbers::pi;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + std::string("FAILED ") + what;
    }
  }
  void note(const std::string& s) { detail += (detail.empty() ? "" : "; ") + s; }
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

fs::path g_out = "acceptance_out";

// ---- 1
Outcome k_closed_form() {
  Outcome o;
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> C(0.1, 5.0), Q(1.0, 4.0);  // q >= |p - r| = 1
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const Coefficients k{C(gen), C(gen), C(gen), C(gen)};
    const Exponents e{0, Q(gen), 1};
    const double oracle = std::pow((k.a + k.d) / (k.b + k.c), 1.0 / e.q);
    worst = std::max(worst, std::abs(compute_K(k, e).K / oracle - 1.0));
  }
  o.require(worst <= 1e-12, "max relative error " + fmt("%.2e", worst));
  o.note("max relative error " + fmt("%.2e", worst) + " over 100 sets");
  return o;
}

// ---- 2
Outcome k_uniqueness_margins() {
  Outcome o;
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> E(0.0, 2.0), C(0.1, 3.0);
  int bad_changes = 0, bad_margin = 0, bad_equal = 0, equal_cases = 0;
  double worst_equal = 0.0;
  for (int i = 0; i < 1000; ++i) {
    Exponents e{E(gen), 0.0, E(gen)};
    e.q = e.m() + 0.05 + E(gen);
    Coefficients k{C(gen), C(gen), C(gen), C(gen)};
    const bool equal = i % 10 == 0;
    if (equal) {
      k.d = k.a * k.b / k.c;  // ab = cd
      ++equal_cases;
    } else if (k.D() < 0.0) {
      std::swap(k.a, k.c);
      std::swap(k.b, k.d);
    }
    if (!equal && k.D() == 0.0) continue;
    const auto c = compute_K(k, e);
    if (c.sign_changes != 1 || !c.unique) ++bad_changes;
    if (equal) {
      const double m = std::max(std::abs(c.margin_a), std::abs(c.margin_b));
      worst_equal = std::max(worst_equal, m);
      if (m > 1e-10) ++bad_equal;
    } else if (!(c.margin_a > 0.0 && c.margin_b > 0.0)) {
      ++bad_margin;
    }
  }
  o.require(bad_changes == 0, std::to_string(bad_changes) + " sets without exactly one sign change");
  o.require(bad_margin == 0, std::to_string(bad_margin) + " sets with nonpositive margins");
  o.require(bad_equal == 0, std::to_string(bad_equal) + " balanced sets with margins above 1e-10");
  o.note("1000 sets, " + std::to_string(equal_cases) + " with ab = cd, worst balanced margin " + fmt("%.2e", worst_equal));
  return o;
}

// ---- 3
Outcome sign_condition() {
  Outcome o;
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> E(0.0, 2.0), C(0.1, 3.0);
  double worst_ratio = -HUGE_VAL, min_strict = HUGE_VAL;
  for (int i = 0; i < 20; ++i) {
    Exponents e{E(gen), 0.0, E(gen)};
    e.q = e.m() + 0.05 + E(gen);
    Coefficients k{C(gen), C(gen), C(gen), C(gen)};
    if (k.D() < 0.0) {
      std::swap(k.a, k.c);
      std::swap(k.b, k.d);
    }
    const double K = compute_K(k, e).K;
    const auto s = scan_sign_condition(K, k, e, {10.0, 100});
    o.require(s.samples == 10000, "lattice size");
    worst_ratio = std::max(worst_ratio, s.max_signed_product / s.scale);
    min_strict = std::min(min_strict, s.strict_min_off_diagonal);
    o.require(s.max_signed_product <= 1e-12 * s.scale, "signed product at set " + std::to_string(i));
    o.require(s.strictly_positive, "strict positivity at set " + std::to_string(i));
  }
  o.note("max product/scale " + fmt("%.2e", worst_ratio) + ", min off-diagonal " + fmt("%.2e", min_strict));
  return o;
}

// ---- 4
Outcome shooting_oracle() {
  Outcome o;
  IvpOptions opts;
  opts.tol = 1e-12;
  const auto prof = integrate_ivp(3, [](double u) { return u; }, 1.0, 10.0, opts);
  const auto* z = std::get_if<FirstZero>(&prof.event);
  o.require(z != nullptr, "no first zero");
  if (!z) return o;
  const double err = std::abs(z->R - pi);
  o.require(err <= 1e-8, "zero error");
  o.note("first zero " + fmt("%.15f", z->R) + ", |R - pi| = " + fmt("%.2e", err));
  CsvTable t{csv_schema::ivp_trace, {}};
  for (std::size_t i = 0; i < prof.size(); ++i) t.add({prof.t[i], prof.u[i], prof.du[i]});
  write_text(g_out / "shoot_linear.csv", t.to_string());
  return o;
}

// ---- 5
Outcome supercritical_pair() {
  Outcome o;
  IvpOptions opts;
  opts.tol = 1e-10;
  opts.sample_step = 1.0;
  const auto cx = counterexample_profile(3, 6, 1, 0.01, 1000, opts);
  const bool pd = std::holds_alternative<PositiveDecreasing>(cx.u.event);
  o.require(pd, "event " + describe(cx.u.event));
  o.require(cx.ratio_relative_spread() > 1e-6, "u/v relative spread");
  const auto poh = pohozaev_scan(counterexample_nonlinearity(6, 1), 3, 0.01);
  o.require(poh.min_h >= -1e-15, "Pohozaev minimum");
  o.note(describe(cx.u.event) + ", u/v spread " + fmt("%.3e", cx.ratio_spread()) + " (relative " +
         fmt("%.3e", cx.ratio_relative_spread()) + "), min h " + fmt("%.2e", poh.min_h));
  CsvTable t{csv_schema::pair_trace, {}};
  for (std::size_t i = 0; i < cx.u.size(); ++i) t.add({cx.u.t[i], cx.u.u[i], cx.v[i]});
  write_text(g_out / "counterexample_pair.csv", t.to_string());
  return o;
}

// ---- 6
Outcome dirichlet_classification() {
  Outcome o;
  double err[2] = {0, 0};
  const auto gs = scalar_ground_state_on_ball(3, 3.0, 1.0, 1.0, 1e-12);
  for (int level = 0; level < 2; ++level) {
    const int N = level ? 256 : 128;
    ProblemInstance inst;
    inst.n = 3;
    inst.coeffs = {2, 2, 1, 1};
    inst.exps = {0, 2, 1};
    inst.domain = Domain::ball(1.0);
    inst.grid_h = 1.0 / N;
    const auto g = Grid::for_domain(inst.domain, 3, inst.grid_h);
    auto init = scalar_reduction_initializer(inst, g);
    for (std::size_t k = 0; k < g.size(); ++k) {
      init.u[k] *= 1.2;
      init.v[k] *= 0.8;
    }
    const auto sol = newton_solve(init, inst);
    const auto& r = sol.report;
    std::vector<double> radii(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) radii[k] = g.radial_coordinate(k);
    const auto V = gs.sample(radii);
    for (std::size_t k = 0; k < g.size(); ++k) err[level] = std::max(err[level], std::abs(sol.field.u[k] - V[k]));
    if (N == 256) {
      o.require(g.size() == 257, "node count");
      o.require(r.converged, "Newton at 257 nodes: " + r.message);
      o.require(r.min_interior_u > 0.0 && r.min_interior_v > 0.0, "positivity");
      o.require(r.proportionality_defect <= 1e-3 * r.sup_u, "proportionality defect");
      o.note("257 nodes: " + std::to_string(r.iterations) + " iterations, K " + fmt("%g", r.K) + ", defect/sup " +
             fmt("%.2e", r.proportionality_defect / r.sup_u));
    } else {
      o.require(r.converged, "Newton at 129 nodes");
    }
  }
  const double ratio = err[0] / err[1];
  o.require(std::abs(ratio - 4.0) <= 1.2, "error ratio " + fmt("%.3f", ratio));
  o.note("errors " + fmt("%.3e", err[0]) + " / " + fmt("%.3e", err[1]) + ", ratio " + fmt("%.3f", ratio));
  return o;
}

// ---- 7
Outcome degenerate_bifurcation() {
  Outcome o;
  // chemical form a = d, b = c at eps = 0; a = (cd + eps)/b
  auto path = [](double eps) {
    ProblemInstance inst;
    inst.n = 3;
    inst.exps = {1, 1, 1};
    inst.coeffs = {1.0 + eps, 1, 1, 1};
    inst.domain = Domain::ball(1.0);
    inst.grid_h = 1.0 / 128;
    return inst;
  };
  const auto g = Grid::for_domain(Domain::ball(1.0), 3, 1.0 / 128);
  const std::vector<double> stations{0.5, 0.25, 0.125};
  const auto cr = continuation_solve(path, stations, scalar_reduction_initializer(path(0.5), g));
  o.require(!cr.failure_index && cr.steps.size() == stations.size(), "continuation stalled");
  std::string sups;
  CsvTable t{csv_schema::continuation, {}};
  for (const auto& st : cr.steps) {
    const auto& r = st.report;
    o.require(r.converged, "Newton at eps " + fmt("%g", st.s));
    o.require(r.min_interior_u > 0.0 && r.min_interior_v > 0.0, "positivity at eps " + fmt("%g", st.s));
    o.require(std::max(r.sup_u, r.sup_v) <= cr.sup_bound, "sup bound at eps " + fmt("%g", st.s));
    sups += (sups.empty() ? "" : "/") + fmt("%.2f", std::max(r.sup_u, r.sup_v));
    t.add({st.s, r.sup_u, r.sup_v, r.min_interior_u, r.min_interior_v, r.residual_inf});
  }
  write_text(g_out / "continuation_path.csv", t.to_string());

  auto z = GridField::zeros(g);
  for (std::size_t k = 0; k < g.size(); ++k)
    if (!g.is_boundary(k)) {
      const double r = g.radial_coordinate(k);
      z.u[k] = 0.1 * (1 - r * r);
      z.v[k] = 0.05 * (1 - r * r);
    }
  const auto s0 = newton_solve(z, path(0.0));
  const double sup0 = std::max(s0.report.sup_u, s0.report.sup_v);
  o.require(s0.report.converged && sup0 <= 1e-8, "collapse at eps = 0");
  o.note("sups " + sups + " below bound " + fmt("%.2f", cr.sup_bound) + "; eps = 0 from sup 0.1 ends at sup " +
         fmt("%.1e", sup0));
  return o;
}

// ---- 8
Outcome eigenvalues() {
  Outcome o;
  const auto box = compute_lambda1(Domain::box({1.0, 1.0}), 2, 1.0 / 128);
  const double rb = box.lambda1 / (2 * pi * pi) - 1.0;
  const auto b3 = compute_lambda1(Domain::ball(1.0), 3, 1.0 / 256);
  const double r3 = b3.lambda1 / (pi * pi) - 1.0;
  const auto b2 = compute_lambda1(Domain::ball(1.0), 2, 1.0 / 256);
  IvpOptions opts;
  opts.tol = 1e-12;
  const auto bessel = integrate_ivp(2, [](double u) { return u; }, 1.0, 10.0, opts);
  const double j0 = std::get<FirstZero>(bessel.event).R;
  const double r2 = b2.lambda1 / (j0 * j0) - 1.0;
  o.require(std::abs(rb) <= 0.005, "box");
  o.require(std::abs(r3) <= 0.005, "ball n=3");
  o.require(std::abs(r2) <= 0.005, "ball n=2");
  o.note("relative errors box " + fmt("%.2e", rb) + ", ball3 " + fmt("%.2e", r3) + ", ball2 " + fmt("%.2e", r2) +
         " (j0^2 = " + fmt("%.8f", j0 * j0) + ")");
  return o;
}

// ---- 9
Outcome half_spherical_means() {
  Outcome o;
  double worst_xn = 0.0;
  for (int n : {2, 3})
    for (double R : {0.5, 1.0, 10.0}) {
      std::vector<double> y(n, 0.0);
      y[0] = 0.7;
      worst_xn = std::max(worst_xn, std::abs(half_sphere_mean(catalogue_field("x_n", n), y, R, n).value - 1.0 / n));
    }
  o.require(worst_xn <= 1e-8, "[x_n]");

  std::mt19937_64 gen(9);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  double worst_id = 0.0;
  for (int n : {2, 3}) {
    std::vector<std::vector<int>> basis;
    std::vector<int> a(n, 0);
    auto rec = [&](auto&& self, int i, int left) -> void {
      if (i == n) return basis.push_back(a);
      for (int k = 0; k <= left; ++k) {
        a[i] = k;
        self(self, i + 1, left - k);
      }
    };
    rec(rec, 0, 4);
    for (int trial = 0; trial < 8; ++trial) {
      std::vector<Monomial> terms;
      for (const auto& m : basis) terms.push_back({U(gen), m});
      std::vector<double> y(n, 0.0);
      y[0] = U(gen);
      const double R = 0.5 + 2.0 * (U(gen) + 1.0);
      worst_id = std::max(worst_id, mean_derivative_identity_check(polynomial_field(terms, n), y, R, n).rel_gap);
    }
  }
  o.require(worst_id <= 1e-4, "derivative identity");

  std::vector<double> radii;
  for (int R = 1; R <= 64; ++R) radii.push_back(R);
  std::string limits;
  for (int n : {2, 3}) {
    std::vector<double> y1(n, 0.0), y2(n, 0.0);
    y2[0] = 3.0;
    const auto scan = monotonicity_scan(catalogue_field("superharmonic", n), y1, y2, radii, n);
    o.require(scan.consistent, "monotone means n=" + std::to_string(n) + " (" + scan.verdict + ")");
    limits += (limits.empty() ? "" : ", ") + fmt("%.4f", scan.limit);
    CsvTable t{csv_schema::half_means, {}};
    for (const auto& s : scan.samples) t.add({s.R, s.value, s.error});
    write_text(g_out / ("half_means_n" + std::to_string(n) + ".csv"), t.to_string());
  }

  const int n = 3;
  std::mt19937_64 pg(10);
  std::uniform_real_distribution<double> side(-10.0, 10.0), up(0.0, 20.0);
  std::vector<std::vector<double>> pts(1000);
  for (auto& x : pts) x = {side(pg), side(pg), up(pg)};
  const auto lb = linear_lower_bound_check(catalogue_field("superharmonic", n), xn_mean_exact(n), pts, n);
  o.require(lb.pass && lb.samples == 1000, "lower bound");
  o.note("[x_n] error " + fmt("%.1e", worst_xn) + ", identity gap " + fmt("%.1e", worst_id) + ", limits at R=64 " +
         limits + ", lower-bound slack " + fmt("%.3e", lb.min_slack));
  return o;
}

// ---- 10
Outcome barrier_mixed_pair() {
  Outcome o;
  double fd = 0.0;
  for (double R : {1.0, 10.0}) {
    const auto c = ko_barrier_check({3, 2, 1, 72, R}, 1000);
    o.require(c.samples == 1000 && c.verdict == "pass", "barrier at R=" + fmt("%g", R) + ": " + c.verdict);
    o.require(c.W_at_zero == 72.0, "W_R(0) = C");
    fd = std::max(fd, c.fd_max_rel_gap);
  }
  const auto weak = ko_barrier_check({3, 2, 1, 1, 1.0}, 1000);
  o.require(!weak.admissible && weak.verdict == "condition not met", "C = 1 flagged");

  const auto radii = mixed_pair_radii(1000, 1e3);
  const auto m = mixed_pair_check({5, 2, 1, 2, 1.25, 0.5, 1.0, 1.0}, radii);
  o.require(m.found, "mixed-pair witness");
  o.require(m.min_rel_slack_Z >= 0.0 && m.min_rel_slack_W >= 0.0, "mixed-pair inequalities");
  o.require(m.W_bounds_ok, "W bounds");
  fd = std::max(fd, m.fd_max_rel_gap);
  o.require(fd <= 1e-6, "FD Laplacians");
  o.note("witness B " + fmt("%.4g", m.B) + ", A_w " + fmt("%.4g", m.A_w) + ", C_z " + fmt("%.4g", m.C_z) +
         " at " + std::to_string(m.radii) + " radii; max FD gap " + fmt("%.1e", fd));
  return o;
}

// ---- 11
Outcome zw_structure() {
  Outcome o;
  IvpOptions opts;
  opts.sample_step = 1.0;
  const auto cx = counterexample_profile(3, 6, 1, 0.01, 1000, opts);
  const auto r = discrete_harmonicity_check(RadialPair{3, cx.u.t, cx.u.u, cx.v}, 1.0, {1, 1, 1, 1}, {6, 1, 6});
  o.require(r.W_subharmonic, "W subharmonic");
  o.require(r.Z_superharmonic, "Z superharmonic");
  o.note(std::to_string(r.interior_nodes) + " interior nodes, min lap W " + fmt("%.2e", r.min_lap_W) +
         ", min -lap Z " + fmt("%.2e", r.min_neg_lap_Z) + ", tau " + fmt("%.2e", r.tau));
  return o;
}

// ---- 12
Outcome gate_suite() {
  Outcome o;
  auto inst = [](Exponents e, Coefficients k, int n) {
    ProblemInstance p;
    p.n = n;
    p.exps = e;
    p.coeffs = k;
    return p;
  };
  const auto lv5 = validate_hypotheses(inst({0, 1, 1}, {3, 1, 1, 1}, 5));
  o.require(lv5.all_applicable_pass(), "LV at n=5");
  o.require(!validate_hypotheses(inst({0, 1, 1}, {3, 1, 1, 1}, 6)).passes("energy_subcritical"), "LV at n=6");
  o.require(validate_hypotheses(inst({0, 2, 1}, {2, 2, 1, 1}, 3)).all_applicable_pass(), "BE at n=3");
  o.require(!validate_hypotheses(inst({0, 2, 1}, {2, 2, 1, 1}, 4)).passes("energy_subcritical"), "BE at n=4");
  const auto h = halfspace_gate_check(1, 1, 1, 1, 3);
  o.require(h.first_holds && h.second_holds, "half-space gates");
  o.note("LV n=5 pass, n=6 fail; BE n=3 pass, n=4 fail; half-space p=q=r=s=1: " + h.verdict);
  return o;
}

// ---- 13
#ifdef ELLAB_HAVE_CLI
std::map<std::string, std::string> csv_bodies(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().extension() == ".csv") {
      std::ifstream in(e.path(), std::ios::binary);
      std::ostringstream s;
      s << in.rdbuf();
      out[e.path().filename().string()] = s.str();
    }
  return out;
}
#endif

Outcome determinism() {
  Outcome o;
#ifdef ELLAB_HAVE_CLI
  const std::vector<std::vector<std::string>> scenarios = {
      {"shoot", "--set", "f=power", "sigma=3", "t_max=20"},
      {"counterexample", "--set", "p=6", "q=1"},
      {"solve-dirichlet", "--set", "p=0", "q=2", "r=1", "a=2", "b=2", "c=1", "d=1", "--h", "0.03125"},
      {"continue", "--h", "0.03125"},
      {"means", "--n", "2"},
      {"means", "--n", "4", "--seed", "7", "--set", "mc_samples=20000", "radii=1 2 4", "field=x_n"},
      {"pohozaev", "--set", "f=counterexample", "p=6", "q=1"},
      {"barrier", "--set", "p=2", "C=72"},
      {"zw-check", "--set", "profile=counterexample", "p=6", "q=1"},
  };
  std::map<std::string, std::string> runs[2];
  for (int pass = 0; pass < 2; ++pass) {
    const auto dir = g_out / ("run" + std::to_string(pass + 1));
    fs::remove_all(dir);
    for (std::size_t i = 0; i < scenarios.size(); ++i) {
      const auto sub = dir / std::to_string(i);
      auto args = scenarios[i];
      args.push_back("-o");
      args.push_back(sub.string());
      std::ostringstream out, err;
      const int code = cli::run(args, out, err);
      o.require(code == 0, args[0] + " exit code " + std::to_string(code) + " " + err.str() + out.str());
      for (auto& [name, body] : csv_bodies(sub)) runs[pass][std::to_string(i) + "/" + name] = body;
    }
  }
  o.require(!runs[0].empty() && runs[0].size() == runs[1].size(), "CSV file sets differ");
  std::size_t bytes = 0;
  for (const auto& [name, body] : runs[0]) {
    const auto it = runs[1].find(name);
    o.require(it != runs[1].end() && it->second == body, "bodies differ for " + name);
    bytes += body.size();
  }
  o.note(std::to_string(runs[0].size()) + " CSV files, " + std::to_string(bytes) + " bytes identical across two runs");
#else
  o.require(false, "built without the command-line tool");
#endif
  return o;
}

struct Criterion {
  int id;
  double budget_s;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (!std::strcmp(argv[i], "--criterion") && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else if (!std::strcmp(argv[i], "--out") && i + 1 < argc) {
      g_out = argv[++i];
    } else {
      std::fprintf(stderr, "usage: %s [--criterion N] [--out DIR]\n", argv[0]);
      return 2;
    }
  }
  const std::vector<Criterion> all = {
      {1, 1, k_closed_form},          {2, 10, k_uniqueness_margins}, {3, 10, sign_condition},
      {4, 1, shooting_oracle},        {5, 30, supercritical_pair},   {6, 30, dirichlet_classification},
      {7, 60, degenerate_bifurcation}, {8, 10, eigenvalues},         {9, 30, half_spherical_means},
      {10, 10, barrier_mixed_pair},   {11, 5, zw_structure},         {12, 1, gate_suite},
      {13, 120, determinism},
  };
  if (only != 0 && (only < 1 || only > static_cast<int>(all.size()))) {
    std::fprintf(stderr, "no criterion %d\n", only);
    return 2;
  }
  try {
    ensure_directory(g_out);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 2;
  }
  bool ok = true;
  for (const auto& c : all) {
    if (only && c.id != only) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.require(secs < c.budget_s, "runtime budget " + fmt("%g", c.budget_s) + " s");
    std::printf("criterion %d: %s %s (%.2f s)\n", c.id, out.pass ? "PASS" : "FAIL", out.detail.c_str(), secs);
    std::fflush(stdout);
    ok = ok && out.pass;
  }
  return ok ? 0 : 1;
}
