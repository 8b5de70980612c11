#include "ellab/radial_shooting.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/numeric/odeint.hpp>

#include "ellab/config.hpp"
#include "ellab/errors.hpp"
#include "ellab/proportionality.hpp"

namespace ellab {

namespace odeint = boost::numeric::odeint;

namespace {

using State = std::array<double, 2>;

struct RadialRhs {
  int n;
  const ScalarNonlinearity* f;

  double source(double u) const {
    const double y = (*f)(u);
    if (!std::isfinite(y) && u < 0.0) return -(*f)(-u);
    return y;
  }
  void operator()(const State& x, State& dx, double t) const {
    dx[0] = x[1];
    dx[1] = -(n - 1) / t * x[1] - source(x[0]);
  }
};

}  // namespace

std::string describe(const RadialEvent& ev) {
  if (const auto* z = std::get_if<FirstZero>(&ev)) return "first-zero R=" + format_double(z->R);
  if (const auto* pd = std::get_if<PositiveDecreasing>(&ev))
    return "positive-decreasing t_max=" + format_double(pd->t_max);
  return "inconclusive (" + std::get<Inconclusive>(ev).reason + ")";
}

double RadialProfile::value_at(double s) const {
  if (t.empty()) return 0.0;
  if (s <= t.front()) return u.front();
  if (s >= t.back()) return u.back();
  const auto it = std::upper_bound(t.begin(), t.end(), s);
  const std::size_t i = static_cast<std::size_t>(it - t.begin()) - 1;
  const double h = t[i + 1] - t[i];
  const double x = (s - t[i]) / h;
  const double h00 = (1 + 2 * x) * (1 - x) * (1 - x);
  const double h10 = x * (1 - x) * (1 - x);
  const double h01 = x * x * (3 - 2 * x);
  const double h11 = x * x * (x - 1);
  return h00 * u[i] + h10 * h * du[i] + h01 * u[i + 1] + h11 * h * du[i + 1];
}

RadialProfile integrate_ivp(int n, const ScalarNonlinearity& f, double eps, double t_max,
                            const IvpOptions& opts) {
  if (n < 1) throw PreconditionError("dimension n must be >= 1");
  if (!(eps > 0.0)) throw PreconditionError("initial value eps must be positive");
  if (!(t_max > opts.t0)) throw PreconditionError("t_max must exceed t0");

  RadialProfile prof;
  prof.n = n;
  const RadialRhs rhs{n, &f};
  const double t0 = opts.t0;
  const double f0 = rhs.source(eps);
  State x{eps - f0 * t0 * t0 / (2.0 * n), -f0 * t0 / n};

  auto record = [&](double t, const State& s) {
    prof.t.push_back(t);
    prof.u.push_back(s[0]);
    prof.du.push_back(s[1]);
  };
  record(t0, x);

  std::vector<double> extra;
  for (double s : opts.output_times)
    if (s > t0 && s <= t_max) extra.push_back(s);
  std::sort(extra.begin(), extra.end());
  extra.erase(std::unique(extra.begin(), extra.end()), extra.end());
  std::size_t next_extra = 0;
  long next_sample = 1;

  auto stepper = odeint::make_dense_output(opts.tol, opts.tol, odeint::runge_kutta_dopri5<State>());
  stepper.initialize(x, t0, std::min(t0, 1e-3 * t_max));

  // Emit every requested abscissa in (ta, tb] from the dense output.
  auto emit_until = [&](double tb) {
    State s;
    while (true) {
      double next = std::numeric_limits<double>::infinity();
      if (opts.sample_step > 0.0) next = next_sample * opts.sample_step;
      if (next_extra < extra.size()) next = std::min(next, extra[next_extra]);
      if (!(next <= tb)) break;
      stepper.calc_state(next, s);
      record(next, s);
      if (opts.sample_step > 0.0 && next == next_sample * opts.sample_step) ++next_sample;
      if (next_extra < extra.size() && next == extra[next_extra]) ++next_extra;
    }
  };

  bool monotone = x[1] <= opts.monotone_tol;
  const long max_steps = 20000000;
  for (long step = 0;; ++step) {
    std::pair<double, double> span;
    try {
      span = stepper.do_step(rhs);
    } catch (const odeint::step_adjustment_error&) {
      prof.event = Inconclusive{"stiffness"};
      return prof;
    }
    const auto [ta, tb] = span;
    const State xb = stepper.current_state();
    if (!std::isfinite(xb[0]) || !std::isfinite(xb[1])) {
      prof.event = Inconclusive{"blow-up"};
      return prof;
    }
    if (tb - ta < 1e-14 * tb || step > max_steps) {
      prof.event = Inconclusive{"stiffness"};
      return prof;
    }

    if (xb[0] <= 0.0) {
      double lo = ta, hi = tb;
      State s;
      while (hi - lo > 1e-12 * hi) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        stepper.calc_state(mid, s);
        (s[0] > 0.0 ? lo : hi) = mid;
      }
      const double R = hi;
      if (R <= t_max) {
        emit_until(std::nextafter(R, 0.0));
        stepper.calc_state(R, s);
        record(R, s);
        prof.event = FirstZero{R};
        return prof;
      }
    }

    const double t_end = std::min(tb, t_max);
    emit_until(t_end);
    if (opts.sample_step <= 0.0 && (prof.t.back() < t_end)) {
      State s = xb;
      if (t_end < tb) stepper.calc_state(t_end, s);
      record(t_end, s);
    }
    if (std::abs(xb[0]) > opts.blowup) {
      prof.event = Inconclusive{"blow-up"};
      return prof;
    }
    if (xb[1] > opts.monotone_tol) monotone = false;
    if (tb >= t_max) {
      if (prof.t.back() < t_max) {
        State s;
        stepper.calc_state(t_max, s);
        record(t_max, s);
      }
      if (monotone)
        prof.event = PositiveDecreasing{t_max};
      else
        prof.event = Inconclusive{"non-monotone"};
      return prof;
    }
  }
}

std::vector<EnergyCheckpoint> energy_identity_residuals(const RadialProfile& prof,
                                                        const ScalarNonlinearity& f,
                                                        int checkpoints) {
  using boost::math::quadrature::gauss;
  std::vector<EnergyCheckpoint> out;
  const std::size_t N = prof.size();
  if (N < 2 || checkpoints < 1) return out;
  const int n = prof.n;
  auto flux = [&](std::size_t i) { return std::pow(prof.t[i], n - 1) * prof.du[i]; };
  const double flux0 = flux(0);

  std::vector<std::size_t> marks;
  for (int k = 1; k <= checkpoints; ++k)
    marks.push_back(std::min(N - 1, static_cast<std::size_t>(std::llround(double(k) * (N - 1) / checkpoints))));

  double integral = 0.0;
  std::size_t next = 0;
  for (std::size_t i = 0; i + 1 < N && next < marks.size(); ++i) {
    const double a = prof.t[i], b = prof.t[i + 1];
    integral += gauss<double, 7>::integrate(
        [&](double s) {
          const double us = prof.value_at(s);
          double y = f(us);
          if (!std::isfinite(y) && us < 0.0) y = -f(-us);
          return std::pow(s, n - 1) * y;
        },
        a, b);
    while (next < marks.size() && marks[next] == i + 1) {
      EnergyCheckpoint cp;
      cp.t = prof.t[i + 1];
      cp.residual = flux(i + 1) - flux0 + integral;
      cp.scale = std::max({std::abs(flux(i + 1)), std::abs(integral), std::abs(flux0),
                           std::numeric_limits<double>::min()});
      out.push_back(cp);
      ++next;
    }
  }
  return out;
}

ScalarNonlinearity counterexample_nonlinearity(double p, double q) {
  return [p, q](double u) {
    const double w = 1.0 - u;
    return std::pow(u, p) * std::pow(w, p) * (std::pow(w, q) - std::pow(u, q));
  };
}

CounterexamplePair counterexample_profile(int n, double p, double q, double eps, double t_max,
                                          const IvpOptions& opts) {
  if (n < 3) throw PreconditionError("counterexample needs n >= 3");
  const double pS = (n + 2.0) / (n - 2.0);
  if (!(p > pS)) throw PreconditionError("counterexample needs p = r > (n+2)/(n-2)");
  if (!(q > 0.0)) throw PreconditionError("counterexample needs q > 0");
  if (!(eps > 0.0 && eps < 0.5)) throw PreconditionError("counterexample needs 0 < eps < 1/2");

  CounterexamplePair pair;
  pair.u = integrate_ivp(n, counterexample_nonlinearity(p, q), eps, t_max, opts);
  if (const auto* z = std::get_if<FirstZero>(&pair.u.event))
    throw PreconditionError("epsilon too large for counterexample: first zero at R=" +
                            format_double(z->R) + "; shrink epsilon");
  if (const auto* inc = std::get_if<Inconclusive>(&pair.u.event))
    throw PreconditionError("counterexample shoot inconclusive (" + inc->reason + ")");

  pair.K = compute_K({1.0, 1.0, 1.0, 1.0}, {p, q, p}).K;
  pair.v.resize(pair.u.size());
  pair.ratio_min = std::numeric_limits<double>::infinity();
  pair.ratio_max = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pair.u.size(); ++i) {
    const double ui = pair.u.u[i];
    if (!(ui > 0.0 && ui < 1.0)) throw PreconditionError("counterexample left (0,1) at t=" + format_double(pair.u.t[i]));
    pair.v[i] = 1.0 - ui;
    const double ratio = ui / pair.v[i];
    pair.ratio_min = std::min(pair.ratio_min, ratio);
    pair.ratio_max = std::max(pair.ratio_max, ratio);
  }
  return pair;
}

namespace {

ScalarNonlinearity odd_power(double sigma) {
  return [sigma](double w) { return std::pow(std::abs(w), sigma - 1.0) * w; };
}

}  // namespace

ScalarBVPSolution scalar_ground_state_on_ball(int n, double sigma, double c1, double R_dom, double tol) {
  if (n < 1) throw PreconditionError("dimension n must be >= 1");
  if (!(sigma > 1.0) || (n > 2 && !(sigma < (n + 2.0) / (n - 2.0))))
    throw PreconditionError("sigma must satisfy 1 < sigma < (n+2)/(n-2)_+ (superlinear subcritical gate)");
  if (!(c1 > 0.0)) throw PreconditionError("c1 must be positive");
  if (!(R_dom > 0.0)) throw PreconditionError("ball radius must be positive");

  IvpOptions opts;
  opts.tol = std::min(tol, 1e-12);
  const auto f = odd_power(sigma);
  RadialProfile unit;
  for (double t_max = 64.0;; t_max *= 4.0) {
    unit = integrate_ivp(n, f, 1.0, t_max, opts);
    if (std::holds_alternative<FirstZero>(unit.event)) break;
    if (std::holds_alternative<Inconclusive>(unit.event) || t_max > 1e7)
      throw PreconditionError("unit shoot found no zero: " + describe(unit.event));
  }

  ScalarBVPSolution sol;
  sol.n = n;
  sol.sigma = sigma;
  sol.c1 = c1;
  sol.R_dom = R_dom;
  sol.tol = tol;
  sol.R0 = std::get<FirstZero>(unit.event).R;
  sol.lambda = sol.R0 / R_dom;
  sol.amplitude = std::pow(c1, -1.0 / (sigma - 1.0)) * std::pow(sol.lambda, 2.0 / (sigma - 1.0));
  sol.profile.n = n;
  sol.profile.event = FirstZero{R_dom};
  for (std::size_t i = 0; i < unit.size(); ++i) {
    sol.profile.t.push_back(unit.t[i] / sol.lambda);
    sol.profile.u.push_back(sol.amplitude * unit.u[i]);
    sol.profile.du.push_back(sol.amplitude * sol.lambda * unit.du[i]);
  }
  sol.profile.t.back() = R_dom;
  return sol;
}

std::vector<double> ScalarBVPSolution::sample(const std::vector<double>& radii) const {
  IvpOptions opts;
  opts.tol = std::min(tol, 1e-12);
  const double t0 = opts.t0;
  for (double r : radii)
    if (lambda * r > t0 && r < R_dom) opts.output_times.push_back(lambda * r);
  const auto unit = integrate_ivp(n, odd_power(sigma), 1.0, R0 * (1.0 + 1e-9), opts);
  std::vector<double> out;
  out.reserve(radii.size());
  for (double r : radii) {
    const double s = lambda * r;
    double w;
    if (r >= R_dom) {
      w = 0.0;
    } else if (s <= t0) {
      w = 1.0 - s * s / (2.0 * n);
    } else {
      const auto it = std::lower_bound(unit.t.begin(), unit.t.end(), s);
      w = (it != unit.t.end() && *it == s) ? unit.u[static_cast<std::size_t>(it - unit.t.begin())]
                                           : unit.value_at(s);
    }
    out.push_back(amplitude * w);
  }
  return out;
}

double ScalarBVPSolution::boundary_value() const { return profile.u.empty() ? 0.0 : profile.u.back(); }

}  // namespace ellab
