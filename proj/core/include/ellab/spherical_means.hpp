#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ellab/system_model.hpp"

namespace ellab {

using ScalarField = std::function<double(PointView)>;

/// Field on the closed upper half-space, with an optional Laplacian.
struct FieldWithLaplacian {
  std::string name;
  ScalarField w;
  ScalarField laplacian;  // empty when unknown
};

/// Built-in fields: "x_n", "x_n^2", "superharmonic" (x_n + 1 - exp(-x_n)),
/// "neg_x_n", "neg_superharmonic". Throws ConfigError for unknown names.
FieldWithLaplacian catalogue_field(const std::string& name, int n);

struct Monomial {
  double coef = 1.0;
  std::vector<int> powers;  // one exponent per coordinate
};
FieldWithLaplacian polynomial_field(std::vector<Monomial> terms, int n);

enum class MeanMethod { deterministic, monte_carlo };

struct QuadratureConfig {
  int panels = 32;         // composite Gauss-Legendre panels (16 nodes each)
  int azimuth_points = 64; // trapezoid nodes in the azimuth (n = 3)
  long mc_samples = 200000;
  std::uint64_t seed = 0;
};

struct HalfMeanSample {
  std::vector<double> y;
  double R = 0.0;
  int n = 2;
  double value = 0.0;
  double error = 0.0;  // Richardson difference, or Monte Carlo standard error
  MeanMethod method = MeanMethod::deterministic;
  std::uint64_t seed = 0;
};

/// (1 / (R^2 |S_R^+|)) * integral over the half-sphere S_R^+(y) of w(x) x_n.
/// y lies on the boundary hyperplane (its last coordinate is ignored).
HalfMeanSample half_sphere_mean(const FieldWithLaplacian& w, const std::vector<double>& y, double R, int n,
                                const QuadratureConfig& cfg = {});

struct DerivativeIdentity {
  double lhs = 0.0;       // d/dR of the mean, five-point difference
  double rhs = 0.0;       // (ball term - disk term) / (R^2 |S_R^+|)
  double ball_term = 0.0; // normalised interior integral of Delta w * x_n
  double disk_term = 0.0; // normalised flat-boundary integral of w
  double abs_gap = 0.0;
  double rel_gap = 0.0;   // abs_gap / max(|lhs|, |ball_term|, |disk_term|)
};

/// Throws PreconditionError when the Laplacian is missing.
DerivativeIdentity mean_derivative_identity_check(const FieldWithLaplacian& w, const std::vector<double>& y,
                                                  double R, int n, const QuadratureConfig& cfg = {});

struct MonotonicityScan {
  std::vector<HalfMeanSample> samples;       // at the first center
  std::vector<HalfMeanSample> other_center;  // at the second center, same radii
  bool nonincreasing = true;
  double worst_increase = 0.0;   // largest increase beyond slack (<= 0 when fine)
  bool nonnegative_means = true;
  double limit = 0.0;            // last mean at the first center
  double limit_slack = 0.0;      // its error estimate
  double cross_center_gap = 0.0;
  bool cross_center_ok = true;
  bool consistent = true;        // all of the above
  std::string verdict;
};

/// Means at increasing radii; nonincreasing within quadrature slack, and the
/// largest-radius means at the two centers compared.
MonotonicityScan monotonicity_scan(const FieldWithLaplacian& w, const std::vector<double>& y1,
                                   const std::vector<double>& y2, const std::vector<double>& radii, int n,
                                   const QuadratureConfig& cfg = {});

struct LowerBoundCheck {
  bool pass = true;
  double min_slack = 0.0;  // min of w(x) - (L/[x_n]) x_n
  std::vector<double> worst_point;
  double xn_mean = 0.0;
  long samples = 0;
};

/// w(x) >= (L / [x_n]) x_n - tol at every sample point.
LowerBoundCheck linear_lower_bound_check(const FieldWithLaplacian& w, double L,
                                         const std::vector<std::vector<double>>& points, int n,
                                         double tol = 1e-12);

/// 1/n: the exact value of [x_n] (checked against quadrature in tests).
double xn_mean_exact(int n);

}  // namespace ellab
