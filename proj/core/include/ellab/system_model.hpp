#pragma once

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "ellab/config.hpp"

namespace ellab {

using PointView = std::span<const double>;

/// Exponents of the power nonlinearities. Out-of-range values are
/// constructible on purpose so that the gates can report them.
struct Exponents {
  double p = 0.0;
  double q = 1.0;
  double r = 1.0;

  double sigma() const { return p + q + r; }
  double m() const { return r > p ? r - p : p - r; }
  bool signs_ok() const { return p >= 0.0 && r >= 0.0 && q > 0.0; }
  bool admissible() const { return signs_ok() && q >= m(); }
};

struct Coefficients {
  double a = 1.0;
  double b = 1.0;
  double c = 0.0;
  double d = 0.0;

  double D() const { return a * b - c * d; }
  bool signs_ok() const { return a > 0.0 && b > 0.0 && c >= 0.0 && d >= 0.0; }
};

using CoefficientField = std::function<Coefficients(PointView)>;

/// mu*u and nu*v with constant mu, nu.
struct LinearLowerOrder {
  double mu = 0.0;
  double nu = 0.0;
};

/// h1(x,u,v), h2(x,u,v) with a declared growth exponent at infinity.
struct GeneralLowerOrder {
  std::function<double(PointView, double, double)> h1;
  std::function<double(PointView, double, double)> h2;
  double growth = 1.0;
};

using LowerOrderTerms = std::variant<LinearLowerOrder, GeneralLowerOrder>;

enum class DomainKind { whole_space, half_space, ball, box };

struct Domain {
  DomainKind kind = DomainKind::whole_space;
  double radius = 1.0;
  std::vector<double> sides;

  static Domain whole_space() { return {}; }
  static Domain half_space() { return {DomainKind::half_space, 1.0, {}}; }
  static Domain ball(double radius) { return {DomainKind::ball, radius, {}}; }
  static Domain box(std::vector<double> sides) { return {DomainKind::box, 1.0, std::move(sides)}; }
  bool bounded() const { return kind == DomainKind::ball || kind == DomainKind::box; }
};

std::string to_string(DomainKind kind);
DomainKind domain_kind_from_string(const std::string& name);

struct ProblemInstance {
  int n = 3;
  Exponents exps;
  Coefficients coeffs;
  /// When set, overrides `coeffs` pointwise; `coeffs` then serves as the
  /// value used where no point is available.
  CoefficientField spatial;
  LowerOrderTerms lot = LinearLowerOrder{};
  Domain domain;
  double grid_h = 0.0;

  bool has_spatial_coefficients() const { return static_cast<bool>(spatial); }
  Coefficients coefficients_at(std::optional<PointView> x) const;
  /// Throws PreconditionError when n < 1 or the domain descriptor is malformed.
  void check_shape() const;
};

/// f(u,v) = u^r v^p (a v^q - c u^q) plus the lower-order term when x is given.
/// Powers follow std::pow, so a zero base with exponent zero gives 1.
double eval_f(double u, double v, const ProblemInstance& inst,
              std::optional<PointView> x = std::nullopt);
/// g(u,v) = v^r u^p (b u^q - d v^q) plus the lower-order term when x is given.
double eval_g(double u, double v, const ProblemInstance& inst,
              std::optional<PointView> x = std::nullopt);

/// Pure power parts without lower-order terms, for fixed coefficients.
double power_f(double u, double v, const Exponents& e, const Coefficients& k);
double power_g(double u, double v, const Exponents& e, const Coefficients& k);

/// Row-major {df/du, df/dv, dg/du, dg/dv}.
using Jacobian = std::array<double, 4>;

/// Closed-form partial derivatives. Throws DomainError at a corner where a
/// factor with exponent in (0,1) meets a zero base and the derivative does
/// not exist.
Jacobian eval_jacobian(double u, double v, const ProblemInstance& inst,
                       std::optional<PointView> x = std::nullopt);
Jacobian power_jacobian(double u, double v, const Exponents& e, const Coefficients& k);

/// Lower-order contributions (mu u, nu v or h1, h2) at x and their partials.
std::array<double, 2> lower_order_values(const ProblemInstance& inst, PointView x, double u, double v);
Jacobian lower_order_jacobian(const ProblemInstance& inst, PointView x, double u, double v);

struct GateResult {
  std::string name;
  std::string relation;  // how value compares to threshold when the gate passes
  double value = 0.0;
  std::optional<double> threshold;  // nullopt: unbounded (n <= 2 conventions)
  bool applicable = true;
  bool pass = true;
  std::string note;
};

struct HypothesisReport {
  std::vector<GateResult> gates;

  const GateResult& gate(const std::string& name) const;
  bool passes(const std::string& name) const { return gate(name).pass; }
  bool all_applicable_pass() const;
};

struct GateOptions {
  std::optional<double> lambda1;
  std::vector<std::vector<double>> sample_points;
};

/// Evaluates every structural gate. Failing gates are verdicts, never errors.
HypothesisReport validate_hypotheses(const ProblemInstance& inst, const GateOptions& opts = {});

/// Bound of the form num / (n-2)_+; nullopt when n <= 2.
std::optional<double> over_n_minus_2(double num, int n);

ProblemInstance instance_from_config(const KeyValueConfig& cfg);
KeyValueConfig instance_to_config(const ProblemInstance& inst);

}  // namespace ellab
