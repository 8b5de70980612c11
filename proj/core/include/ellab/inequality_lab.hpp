#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ellab/grid.hpp"
#include "ellab/radial_shooting.hpp"
#include "ellab/system_model.hpp"

namespace ellab {

// ---- Pohozaev function h(X) = X f(X) - (p_S + 1) F(X) ----

struct PohozaevScan {
  int n = 3;
  double p_sobolev = 0.0;
  double eps = 0.0;
  std::vector<double> X, h;
  double min_h = 0.0;
  double argmin = 0.0;
  double scale = 0.0;  // max of |X f| and (p_S+1)|F| over the grid
  double floor = 0.0;  // -1e-15 * scale
  bool nonnegative = false;
};

/// F by adaptive Gauss-Kronrod from 0; h on `points` log-spaced nodes over
/// [1e-8, eps]. Throws PreconditionError for n <= 2.
PohozaevScan pohozaev_scan(const ScalarNonlinearity& f, int n, double eps, int points = 400);

/// Central difference h'(X) / X^p at X, the leading coefficient of h' near 0.
double pohozaev_leading_coefficient(const ScalarNonlinearity& f, int n, double p, double X = 1e-4);

// ---- Keller-Osserman barrier W_R = C R^{2a} / (R^2 - r^2)^a, a = 2/(p-1) ----

struct BarrierSpec {
  int n = 3;
  double p = 2.0;
  double A = 1.0;
  double C = 1.0;
  double R = 1.0;

  double alpha() const { return 2.0 / (p - 1.0); }
  /// 4a[n + 2(a+1)] / A, the lower bound for C^{p-1}.
  double threshold() const;
  bool admissible() const;

  double W(double r) const;
  double laplacian(double r) const;  // closed form
};

struct BarrierCheck {
  BarrierSpec spec;
  bool admissible = false;
  double threshold = 0.0;
  long samples = 0;
  double min_rel_slack = 0.0;  // min over samples of (rhs - lhs) / max(|lhs|, |rhs|)
  double worst_radius = 0.0;
  bool inequality_holds = false;
  double fd_max_rel_gap = 0.0;  // closed form vs finite differences for r <= 0.95 R
  bool fd_ok = false;
  double W_at_zero = 0.0;
  std::string verdict;  // "pass", "condition not met" or "inequality violated"
};

/// Samples r_k = R k / samples, k = 0..samples-1. Throws for R < 1.
BarrierCheck ko_barrier_check(const BarrierSpec& spec, int samples = 1000);

// ---- mixed pair Z = C_z (1+r^2)^{-a_z}, W = B - A_w (1+r^2)^{-b_w} ----

struct MixedPairSpec {
  int n = 5;
  double p = 2.0, q = 1.0, r = 2.0;
  double alpha_z = 1.25;
  double beta_w = 0.5;
  double C1 = 1.0;  // -Delta Z >= C1 W^beta_sys Z^r
  double C2 = 1.0;  // Delta W >= C2 Z^p W^gamma_sys

  double beta_sys() const;
  double gamma_sys() const;
};

struct MixedPairCheck {
  bool found = false;
  double A_w = 0.0, B = 0.0, C_z = 0.0;
  long candidates_tried = 0;
  long radii = 0;
  double min_rel_slack_Z = 0.0;
  double min_rel_slack_W = 0.0;
  bool W_bounds_ok = false;  // B - A_w <= W < B
  double fd_max_rel_gap = 0.0;
  bool fd_ok = false;
  std::string verdict;
};

/// Radii: 0 and samples-1 log-spaced points over [1e-3, r_max].
std::vector<double> mixed_pair_radii(int samples = 1000, double r_max = 1e3);

/// Closed-form Laplacian of s^{-k}, s = 1 + r^2.
double laplacian_inverse_power(double k, double r, int n);

/// Scans (B, A_w, C_z) over 10^-3..10^4 with 8 points per decade, B > A_w,
/// and returns the first triple satisfying both inequalities at every radius.
/// Throws PreconditionError when the exponent windows are empty.
MixedPairCheck mixed_pair_check(const MixedPairSpec& spec, const std::vector<double>& radii);

// ---- pointwise bounds for Z = min(u, Kv) and W = |u - Kv| ----

struct ZWSampleSpec {
  double u_max = 10.0;
  long samples = 100000;
  std::uint64_t seed = 0;
  long identity_samples = 1000;
};

struct ZWBoundsReport {
  double K = 0.0;
  double C_q = 0.0;
  double beta_sys = 0.0, gamma_sys = 0.0;
  long below = 0, above = 0;       // samples with u <= Kv and u >= Kv
  double min_slack_f = 0.0;        // relative, on {u <= Kv}
  double min_slack_g = 0.0;        // relative, on {u >= Kv}
  double diagonal_gap = 0.0;       // max |f|, |g| and bounds at u = Kv
  double identity_max_gap = 0.0;   // relative, over random X > 0
  bool identity_nonnegative = true;  // meaningful for r <= 1
  bool bounded_box_used = false;
  bool beta_form_checked = false;  // the |u-Kv|^beta form; needs `bounded` when p + q < 1
  bool pass = false;
};

/// Bounds on the sampled square (0, u_max]^2, plus the |u-Kv|^beta form of
/// the minorants. With p + q < 1 that form uses u_max as the bound on the
/// pair and is skipped unless `bounded` is set. Throws PreconditionError
/// when ab < cd.
ZWBoundsReport pointwise_zw_bounds(double K, const Coefficients& k, const Exponents& e,
                                   const ZWSampleSpec& spec = {}, bool bounded = false);

// ---- weighted cone and half-space gates ----

struct ConeWeightReport {
  double r = 0.0, kappa = 0.0;
  int n = 3;
  double margin_kappa = 0.0;  // kappa + 2 (> 0)
  double margin_sum = 0.0;    // kappa + r + 1 (>= 0)
  double margin_lower = 0.0;  // r (>= 0)
  double margin_upper = 0.0;  // (n+1+kappa)/(n-1) - r (>= 0)
  bool admissible = false;
};

ConeWeightReport cone_weight_admissibility(double r, double kappa, int n);
/// Weight exponent used for the half-space system: s - (n-1) q.
double halfspace_kappa(double s, double q, int n);

struct Disjunct {
  std::string expression;
  double lhs = 0.0, rhs = 0.0;
  bool holds = false;
};

struct HalfspaceGateReport {
  std::vector<Disjunct> first;   // r vs (n+1+p)/(n-1), q vs (1+s)/(n-1)
  std::vector<Disjunct> second;  // s vs (n+1+q)/(n-1), p vs (1+r)/(n-1)
  Disjunct semitrivial;          // min(p+r, q+s) vs (n+1)/(n-1)
  bool first_holds = false;
  bool second_holds = false;
  bool dichotomy = false;        // u = Kv or semitrivial
  bool semitrivial_only = false;
  std::string verdict;           // "semitrivial", "proportional or semitrivial", "outside theorem scope"
};

/// Throws PreconditionError for negative exponents or n < 2.
HalfspaceGateReport halfspace_gate_check(double p, double q, double r, double s, int n);

// ---- discrete sub/superharmonicity of W and Z ----

struct RadialPair {
  int n = 3;
  std::vector<double> t, u, v;
};

struct HarmonicityOptions {
  double tol_factor = 10.0;
  double radial_residual_tol = 1e-3;  // max |Delta_h u + f| / max |Delta_h u|
  double grid_residual_tol = 1e-8;    // Residual::normalized
  bool check_residual = true;
};

struct HarmonicityReport {
  double K = 0.0;
  double h = 0.0;
  double tau = 0.0;
  double residual = 0.0;
  double min_lap_W = 0.0;
  double min_neg_lap_Z = 0.0;
  long interior_nodes = 0;
  bool W_subharmonic = false;
  bool Z_superharmonic = false;
  bool pass = false;
  std::vector<double> W, Z;
};

/// Nonuniform three-point radial Laplacian at interior nodes 1..N-2.
std::vector<double> radial_laplacian(int n, const std::vector<double>& t, const std::vector<double>& w);

/// Throws PreconditionError when the pair is not an approximate solution of
/// the power system with coefficients k, or when ab < cd.
HarmonicityReport discrete_harmonicity_check(const RadialPair& pair, double K, const Coefficients& k,
                                             const Exponents& e, const HarmonicityOptions& opts = {});
HarmonicityReport discrete_harmonicity_check(const GridField& field, const ProblemInstance& inst, double K,
                                             const HarmonicityOptions& opts = {});

}  // namespace ellab
