#pragma once

#include <string>

#include "ellab/system_model.hpp"

namespace ellab {

enum class KSource { closed_form, root_find };

std::string to_string(KSource s);
KSource k_source_from_string(const std::string& s);

struct ProportionalityCertificate {
  double K = 0.0;
  double residual = 0.0;        // |J(K)|
  double residual_scale = 1.0;  // max(1, largest |term| of J at K)
  double margin_a = 0.0;        // a - c K^q
  double margin_b = 0.0;        // b K^q - d
  bool unique = true;
  KSource source = KSource::root_find;
  int sign_changes = 1;  // of J on the logarithmic scan grid
};

struct HKCoefficients {
  double A = 0.0, B = 0.0, C = 0.0, D = 0.0;
  double m = 0.0;
  double ell = 0.0;  // q/m, meaningful only for m > 0
};

/// Case table of the convexity argument: the r >= p branch uses
/// (A,B,C,D) = (c, Kb, a, Kd), the other branch (Kb, c, Kd, a).
HKCoefficients hk_coefficients(double K, const Coefficients& k, const Exponents& e);

double eval_HK(double K, double X, const Coefficients& k, const Exponents& e);
/// Throws PreconditionError when m = 0 (ell undefined).
double eval_hK(double K, double t, const Coefficients& k, const Exponents& e);
double eval_J(double K, const Coefficients& k, const Exponents& e);
double eval_J_derivative(double K, const Coefficients& k, const Exponents& e);
/// Largest absolute term of J at K, the natural scale of its rounding error.
double J_term_scale(double K, const Coefficients& k, const Exponents& e);

/// Number of strict sign changes of J on `points` log-spaced nodes over [lo, hi].
int count_J_sign_changes(const Coefficients& k, const Exponents& e, double lo, double hi,
                         int points = 10000);

/// Root of J with residual certificate. Uses closed forms for (p,r) = (0,1)
/// and for the degenerate branch c = d = 0, q = r - p; otherwise brackets
/// geometrically from K = 1, bisects, then polishes with Newton.
ProportionalityCertificate compute_K(const Coefficients& k, const Exponents& e);

/// Deterministic lattice {u_max*i/per_axis : i = 1..per_axis}^2.
struct SampleSpec {
  double u_max = 10.0;
  int per_axis = 100;
};

struct SignConditionScan {
  double max_signed_product = 0.0;        // max of (f - Kg)(u - Kv)
  double strict_min_off_diagonal = 0.0;   // min of (Kg - f)(u - Kv) with |u-Kv| > cutoff
  double scale = 0.0;                     // max of (|f| + K|g|)(u + Kv)
  double cutoff = 0.0;
  long samples = 0;
  long off_diagonal = 0;
  bool strictly_positive = false;
};

SignConditionScan scan_sign_condition(double K, const Coefficients& k, const Exponents& e,
                                      const SampleSpec& spec = {});

enum class MinorantCase { i, ii };

struct MinorantEstimate {
  double C = 0.0;  // infimum of the ratio over samples
  double u_at = 0.0, v_at = 0.0;
  long samples = 0;
};

/// Infimum of (Kg - f)(u - Kv) over the lower-bound minorant on the lattice.
/// Case i needs r > p and c, d > 0; case ii needs d = 0 and c > 0.
MinorantEstimate minorant_ratio_infimum(MinorantCase which, const Coefficients& k,
                                        const Exponents& e, const SampleSpec& spec = {});

}  // namespace ellab
