#include "ellab/proportionality.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ellab/errors.hpp"

namespace ellab {

namespace {

void check_inputs(const Coefficients& k, const Exponents& e) {
  if (!e.signs_ok()) throw PreconditionError("exponents need p, r >= 0 and q > 0");
  if (!(e.q >= e.m())) throw PreconditionError("exponents violate q >= |p - r|");
  if (!k.signs_ok()) throw PreconditionError("coefficients need a, b > 0 and c, d >= 0");
}

bool degenerate_branch(const Coefficients& k, const Exponents& e) {
  return k.c == 0.0 && k.d == 0.0 && e.q == e.r - e.p;
}

// m * K^(m-1), vanishing when m = 0.
double mpow(double m, double K, double e) { return m == 0.0 ? 0.0 : m * std::pow(K, e); }

int sgn(double x) { return (x > 0) - (x < 0); }

double bisect_J(const Coefficients& k, const Exponents& e, double lo, double hi) {
  double jlo = eval_J(lo, k, e);
  while (hi - lo > 1e-14 * hi) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double jm = eval_J(mid, k, e);
    if (jm == 0.0) return mid;
    if (sgn(jm) == sgn(jlo)) {
      lo = mid;
      jlo = jm;
    } else {
      hi = mid;
    }
  }
  // Newton polish, kept only while it stays bracketed and improves |J|.
  double K = 0.5 * (lo + hi);
  double jk = std::abs(eval_J(K, k, e));
  for (int it = 0; it < 4 && jk > 0.0; ++it) {
    const double d = eval_J_derivative(K, k, e);
    if (!(d != 0.0) || !std::isfinite(d)) break;
    const double next = K - eval_J(K, k, e) / d;
    if (!(next >= lo && next <= hi)) break;
    const double jn = std::abs(eval_J(next, k, e));
    if (!(jn < jk)) break;
    K = next;
    jk = jn;
  }
  return K;
}

}  // namespace

std::string to_string(KSource s) { return s == KSource::closed_form ? "closed-form" : "root-find"; }

KSource k_source_from_string(const std::string& s) {
  if (s == "closed-form") return KSource::closed_form;
  if (s == "root-find") return KSource::root_find;
  throw ConfigError("unknown K source '" + s + "'");
}

HKCoefficients hk_coefficients(double K, const Coefficients& k, const Exponents& e) {
  HKCoefficients h;
  h.m = e.m();
  h.ell = h.m > 0.0 ? e.q / h.m : std::numeric_limits<double>::quiet_NaN();
  if (e.r >= e.p) {
    h.A = k.c;
    h.B = K * k.b;
    h.C = k.a;
    h.D = K * k.d;
  } else {
    h.A = K * k.b;
    h.B = k.c;
    h.C = K * k.d;
    h.D = k.a;
  }
  return h;
}

double eval_HK(double K, double X, const Coefficients& k, const Exponents& e) {
  if (!(K > 0.0) || !(X > 0.0)) throw DomainError("H_K needs K > 0 and X > 0");
  const auto h = hk_coefficients(K, k, e);
  return h.A * std::pow(X, e.q + h.m) + h.B * std::pow(X, e.q) - h.C * std::pow(X, h.m) - h.D;
}

double eval_hK(double K, double t, const Coefficients& k, const Exponents& e) {
  if (!(K > 0.0) || !(t > 0.0)) throw DomainError("h_K needs K > 0 and t > 0");
  const auto h = hk_coefficients(K, k, e);
  if (h.m == 0.0) throw PreconditionError("h_K is undefined when r = p (m = 0)");
  return h.A * std::pow(t, h.ell + 1.0) + h.B * std::pow(t, h.ell) - h.C * t - h.D;
}

double eval_J(double K, const Coefficients& k, const Exponents& e) {
  if (!(K > 0.0)) throw DomainError("J needs K > 0");
  const double q = e.q, m = e.m();
  if (e.r >= e.p)
    return k.c * std::pow(K, q + m) + k.b * std::pow(K, q + 1.0) - k.a * std::pow(K, m) - k.d * K;
  return k.b * std::pow(K, q + m + 1.0) + k.c * std::pow(K, q) - k.d * std::pow(K, m + 1.0) - k.a;
}

double eval_J_derivative(double K, const Coefficients& k, const Exponents& e) {
  const double q = e.q, m = e.m();
  if (e.r >= e.p)
    return k.c * (q + m) * std::pow(K, q + m - 1.0) + k.b * (q + 1.0) * std::pow(K, q) -
           k.a * mpow(m, K, m - 1.0) - k.d;
  return k.b * (q + m + 1.0) * std::pow(K, q + m) + k.c * q * std::pow(K, q - 1.0) -
         k.d * (m + 1.0) * std::pow(K, m);
}

double J_term_scale(double K, const Coefficients& k, const Exponents& e) {
  const double q = e.q, m = e.m();
  double t[4];
  if (e.r >= e.p) {
    t[0] = k.c * std::pow(K, q + m);
    t[1] = k.b * std::pow(K, q + 1.0);
    t[2] = k.a * std::pow(K, m);
    t[3] = k.d * K;
  } else {
    t[0] = k.b * std::pow(K, q + m + 1.0);
    t[1] = k.c * std::pow(K, q);
    t[2] = k.d * std::pow(K, m + 1.0);
    t[3] = k.a;
  }
  return std::max({1.0, std::abs(t[0]), std::abs(t[1]), std::abs(t[2]), std::abs(t[3])});
}

int count_J_sign_changes(const Coefficients& k, const Exponents& e, double lo, double hi, int points) {
  const double llo = std::log(lo), lhi = std::log(hi);
  int changes = 0;
  int last = 0;
  for (int i = 0; i < points; ++i) {
    const double K = std::exp(llo + (lhi - llo) * i / (points - 1));
    const int s = sgn(eval_J(K, k, e));
    if (s == 0) continue;
    if (last != 0 && s != last) ++changes;
    last = s;
  }
  return changes;
}

ProportionalityCertificate compute_K(const Coefficients& k, const Exponents& e) {
  check_inputs(k, e);
  ProportionalityCertificate cert;
  if (degenerate_branch(k, e)) {
    cert.K = k.a / k.b;
    cert.source = KSource::closed_form;
  } else if (e.p == 0.0 && e.r == 1.0) {
    cert.K = std::pow((k.a + k.d) / (k.b + k.c), 1.0 / e.q);
    cert.source = KSource::closed_form;
  } else {
    double lo = 1.0, hi = 1.0;
    const double j1 = eval_J(1.0, k, e);
    if (j1 == 0.0) {
      cert.K = 1.0;
    } else {
      int it = 0;
      if (j1 < 0.0) {
        while (eval_J(hi, k, e) < 0.0) {
          lo = hi;
          hi *= 2.0;
          if (++it > 200) throw PreconditionError("J has no sign change below 2^200");
        }
      } else {
        while (eval_J(lo, k, e) > 0.0) {
          hi = lo;
          lo *= 0.5;
          if (++it > 200) throw PreconditionError("J has no sign change above 2^-200");
        }
      }
      cert.K = eval_J(lo, k, e) == 0.0 ? lo : (eval_J(hi, k, e) == 0.0 ? hi : bisect_J(k, e, lo, hi));
    }
    cert.source = KSource::root_find;
  }

  const double lo = std::min(1e-6, cert.K / 10.0);
  const double hi = std::max(1e6, cert.K * 10.0);
  cert.sign_changes = count_J_sign_changes(k, e, lo, hi);
  cert.unique = cert.sign_changes <= 1;
  if (!cert.unique && cert.source == KSource::root_find) {
    // smallest root: first sign change on the scan grid
    const double llo = std::log(lo), lhi = std::log(hi);
    const int points = 10000;
    double prevK = lo;
    int last = sgn(eval_J(lo, k, e));
    for (int i = 1; i < points; ++i) {
      const double K = std::exp(llo + (lhi - llo) * i / (points - 1));
      const int s = sgn(eval_J(K, k, e));
      if (s != 0 && last != 0 && s != last) {
        cert.K = bisect_J(k, e, prevK, K);
        break;
      }
      if (s != 0) {
        last = s;
        prevK = K;
      }
    }
  }
  cert.residual = std::abs(eval_J(cert.K, k, e));
  cert.residual_scale = J_term_scale(cert.K, k, e);
  const double Kq = std::pow(cert.K, e.q);
  cert.margin_a = k.a - k.c * Kq;
  cert.margin_b = k.b * Kq - k.d;
  return cert;
}

SignConditionScan scan_sign_condition(double K, const Coefficients& k, const Exponents& e,
                                      const SampleSpec& spec) {
  SignConditionScan out;
  out.max_signed_product = -std::numeric_limits<double>::infinity();
  out.strict_min_off_diagonal = std::numeric_limits<double>::infinity();
  out.cutoff = 1e-8 * spec.u_max;
  for (int i = 1; i <= spec.per_axis; ++i) {
    const double u = spec.u_max * i / spec.per_axis;
    for (int j = 1; j <= spec.per_axis; ++j) {
      const double v = spec.u_max * j / spec.per_axis;
      const double f = power_f(u, v, e, k);
      const double g = power_g(u, v, e, k);
      const double diff = u - K * v;
      const double prod = (f - K * g) * diff;
      out.max_signed_product = std::max(out.max_signed_product, prod);
      out.scale = std::max(out.scale, (std::abs(f) + K * std::abs(g)) * (u + K * v));
      ++out.samples;
      if (std::abs(diff) > out.cutoff) {
        out.strict_min_off_diagonal = std::min(out.strict_min_off_diagonal, -prod);
        ++out.off_diagonal;
      }
    }
  }
  out.strictly_positive = out.off_diagonal > 0 && out.strict_min_off_diagonal > 0.0;
  return out;
}

MinorantEstimate minorant_ratio_infimum(MinorantCase which, const Coefficients& k,
                                        const Exponents& e, const SampleSpec& spec) {
  if (which == MinorantCase::i) {
    if (!(e.r > e.p)) throw PreconditionError("minorant case i requires r > p");
    if (!(k.c > 0.0 && k.d > 0.0)) throw PreconditionError("minorant case i requires c, d > 0");
  } else {
    if (k.d != 0.0) throw PreconditionError("minorant case ii requires d = 0");
    if (!(k.c > 0.0)) throw PreconditionError("minorant case ii requires c > 0");
  }
  const double K = compute_K(k, e).K;
  const double p = e.p, q = e.q, r = e.r;
  MinorantEstimate out;
  out.C = std::numeric_limits<double>::infinity();
  for (int i = 1; i <= spec.per_axis; ++i) {
    const double u = spec.u_max * i / spec.per_axis;
    for (int j = 1; j <= spec.per_axis; ++j) {
      const double v = spec.u_max * j / spec.per_axis;
      const double diff = u - K * v;
      if (std::abs(diff) < 1e-8) continue;
      const double lhs = (K * power_g(u, v, e, k) - power_f(u, v, e, k)) * diff;
      double minorant;
      if (which == MinorantCase::i) {
        minorant = std::pow(u, p) * std::pow(v, p) * std::pow(u + K * v, q + r - p - 1.0) * diff * diff;
      } else {
        minorant = std::pow(u, r) * std::pow(v, std::min(p, r)) *
                   std::pow(u + K * v, q - 1.0 + std::max(p - r, 0.0)) * diff * diff;
      }
      const double ratio = lhs / minorant;
      ++out.samples;
      if (ratio < out.C) {
        out.C = ratio;
        out.u_at = u;
        out.v_at = v;
      }
    }
  }
  return out;
}

}  // namespace ellab
