#pragma once

#include <functional>
#include <string>
#include <variant>
#include <vector>

namespace ellab {

using ScalarNonlinearity = std::function<double(double)>;

struct FirstZero {
  double R = 0.0;
};
struct PositiveDecreasing {
  double t_max = 0.0;
};
struct Inconclusive {
  std::string reason;  // "blow-up", "stiffness" or "non-monotone"
};
using RadialEvent = std::variant<FirstZero, PositiveDecreasing, Inconclusive>;

std::string describe(const RadialEvent& ev);

/// Trace of u'' + (n-1)/t u' = -f(u). Abscissae start at t0 > 0.
struct RadialProfile {
  int n = 3;
  std::vector<double> t;
  std::vector<double> u;
  std::vector<double> du;
  RadialEvent event;

  std::size_t size() const { return t.size(); }
  /// Cubic Hermite interpolation between nodes; clamps outside the range.
  double value_at(double s) const;
};

struct IvpOptions {
  double t0 = 1e-4;
  double tol = 1e-10;
  double blowup = 1e8;
  double monotone_tol = 0.0;
  /// Record uniform samples k*sample_step instead of every accepted step.
  double sample_step = 0.0;
  /// Extra abscissae to include in the trace (sorted or not).
  std::vector<double> output_times;
};

/// Adaptive dopri5 integration with dense output from a second-order Taylor
/// start. The first zero is located by bisection on the dense output to a
/// width of 1e-12 R. For u < 0 (inside the step that crosses the zero) a
/// non-finite f(u) is replaced by -f(-u).
RadialProfile integrate_ivp(int n, const ScalarNonlinearity& f, double eps, double t_max,
                            const IvpOptions& opts = {});

struct EnergyCheckpoint {
  double t = 0.0;
  double residual = 0.0;  // t^{n-1}u'(t) - t0^{n-1}u'(t0) + int_{t0}^t s^{n-1} f(u) ds
  double scale = 0.0;     // magnitude of the terms being compared
};

/// Integrated form of the equation at `checkpoints` nodes spread over the trace.
std::vector<EnergyCheckpoint> energy_identity_residuals(const RadialProfile& prof,
                                                        const ScalarNonlinearity& f,
                                                        int checkpoints = 20);

/// u^p (1-u)^p [(1-u)^q - u^q]: the scalar equation satisfied by u when
/// v = 1 - u in the system with r = p and a = b = c = d = 1.
ScalarNonlinearity counterexample_nonlinearity(double p, double q);

struct CounterexamplePair {
  RadialProfile u;
  std::vector<double> v;  // 1 - u, nodewise
  double K = 1.0;
  double ratio_min = 0.0, ratio_max = 0.0;  // of u/v over the trace
  double ratio_spread() const { return ratio_max - ratio_min; }
  double ratio_relative_spread() const { return (ratio_max - ratio_min) / ratio_max; }
};

/// Positive non-proportional radial pair (u, 1-u) for p = r > (n+2)/(n-2).
/// Throws PreconditionError("epsilon too large for counterexample ...") when the
/// shoot reaches a zero before t_max.
CounterexamplePair counterexample_profile(int n, double p, double q, double eps, double t_max,
                                          const IvpOptions& opts = {});

/// Positive radial solution of -Delta V = c1 V^sigma in the ball of radius
/// R_dom with V = 0 on the boundary, obtained from the unit shoot by scaling.
struct ScalarBVPSolution {
  int n = 3;
  double sigma = 3.0;
  double c1 = 1.0;
  double R_dom = 1.0;
  double R0 = 0.0;         // first zero of the unit shoot
  double lambda = 1.0;     // R0 / R_dom
  double amplitude = 0.0;  // V(0)
  double tol = 1e-10;
  RadialProfile profile;   // V on [~0, R_dom], abscissae in the ball's units

  /// V at the given radii (re-integrates the unit shoot at lambda*r).
  std::vector<double> sample(const std::vector<double>& radii) const;
  double boundary_value() const;
};

ScalarBVPSolution scalar_ground_state_on_ball(int n, double sigma, double c1, double R_dom,
                                              double tol = 1e-10);

}  // namespace ellab
