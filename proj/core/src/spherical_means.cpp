#include "ellab/spherical_means.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <boost/math/quadrature/gauss.hpp>

#include "ellab/errors.hpp"

namespace ellab {

namespace {

using boost::math::quadrature::gauss;
constexpr double pi = std::numbers::pi;

template <class F>
double composite_gauss(F&& f, double a, double b, int panels) {
  double sum = 0.0;
  const double w = (b - a) / panels;
  for (int k = 0; k < panels; ++k) sum += gauss<double, 16>::integrate(f, a + k * w, a + (k + 1) * w);
  return sum;
}

double half_sphere_area(int n) { return std::pow(pi, 0.5 * n) / std::tgamma(0.5 * n); }

// Integral over the unit half-sphere {|z| = 1, z_n > 0} of g(z), n = 2 or 3.
template <class G>
double hemisphere_integral(G&& g, int n, int panels, int azimuth) {
  std::vector<double> z(static_cast<std::size_t>(n), 0.0);
  if (n == 2) {
    return composite_gauss(
        [&](double th) {
          z[0] = std::cos(th);
          z[1] = std::sin(th);
          return g(z);
        },
        0.0, pi, panels);
  }
  // n = 3: z_n = s uniform in [0,1] carries the area element ds dpsi
  return composite_gauss(
      [&](double s) {
        const double rho = std::sqrt(std::max(0.0, 1.0 - s * s));
        double acc = 0.0;
        for (int j = 0; j < azimuth; ++j) {
          const double psi = 2.0 * pi * j / azimuth;
          z[0] = rho * std::cos(psi);
          z[1] = rho * std::sin(psi);
          z[2] = s;
          acc += g(z);
        }
        return acc * 2.0 * pi / azimuth;
      },
      0.0, 1.0, panels);
}

// Uniform points on the unit half-sphere, shared by every radius and center.
std::vector<std::vector<double>> hemisphere_samples(int n, long count, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<std::vector<double>> pts(static_cast<std::size_t>(count), std::vector<double>(n));
  for (auto& z : pts) {
    double norm = 0.0;
    for (auto& c : z) {
      c = normal(gen);
      norm += c * c;
    }
    norm = std::sqrt(norm);
    for (auto& c : z) c /= norm;
    z[n - 1] = std::abs(z[n - 1]);
  }
  return pts;
}

std::vector<double> shifted(const std::vector<double>& y, const std::vector<double>& z, double R, int n) {
  std::vector<double> x(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n - 1; ++i) x[i] = (i < static_cast<int>(y.size()) ? y[i] : 0.0) + R * z[i];
  x[n - 1] = R * z[n - 1];
  return x;
}

void check_dimension(int n) {
  if (n < 2) throw PreconditionError("half-spherical means need n >= 2");
}

double mean_value(const FieldWithLaplacian& w, const std::vector<double>& y, double R, int n,
                  const QuadratureConfig& cfg) {
  return half_sphere_mean(w, y, R, n, cfg).value;
}

}  // namespace

double xn_mean_exact(int n) { return 1.0 / n; }

FieldWithLaplacian catalogue_field(const std::string& name, int n) {
  check_dimension(n);
  const int last = n - 1;
  FieldWithLaplacian f;
  f.name = name;
  if (name == "x_n") {
    f.w = [last](PointView x) { return x[last]; };
    f.laplacian = [](PointView) { return 0.0; };
  } else if (name == "x_n^2") {
    f.w = [last](PointView x) { return x[last] * x[last]; };
    f.laplacian = [](PointView) { return 2.0; };
  } else if (name == "superharmonic") {
    f.w = [last](PointView x) { return x[last] + 1.0 - std::exp(-x[last]); };
    f.laplacian = [last](PointView x) { return -std::exp(-x[last]); };
  } else if (name == "neg_x_n") {
    f.w = [last](PointView x) { return -x[last]; };
    f.laplacian = [](PointView) { return 0.0; };
  } else if (name == "neg_superharmonic") {
    f.w = [last](PointView x) { return -(x[last] + 1.0 - std::exp(-x[last])); };
    f.laplacian = [last](PointView x) { return std::exp(-x[last]); };
  } else {
    throw ConfigError("unknown catalogue field '" + name + "'");
  }
  return f;
}

FieldWithLaplacian polynomial_field(std::vector<Monomial> terms, int n) {
  check_dimension(n);
  for (const auto& t : terms)
    if (static_cast<int>(t.powers.size()) != n) throw ConfigError("monomial exponent count must equal n");
  int top = 0;
  for (const auto& t : terms)
    for (int k : t.powers) {
      if (k < 0) throw ConfigError("monomial exponents must be nonnegative");
      top = std::max(top, k);
    }
  // powers x_i^k for k <= top by repeated multiplication, then the sum
  auto eval = [n, top](const std::vector<Monomial>& ts, PointView x) {
    std::vector<double> pw(static_cast<std::size_t>(n) * (top + 1));
    for (int i = 0; i < n; ++i) {
      double* row = &pw[static_cast<std::size_t>(i) * (top + 1)];
      row[0] = 1.0;
      for (int k = 1; k <= top; ++k) row[k] = row[k - 1] * x[i];
    }
    double s = 0.0;
    for (const auto& t : ts) {
      double m = t.coef;
      for (int i = 0; i < n; ++i) m *= pw[static_cast<std::size_t>(i) * (top + 1) + t.powers[i]];
      s += m;
    }
    return s;
  };
  std::vector<Monomial> lap;
  for (const auto& t : terms)
    for (std::size_t i = 0; i < t.powers.size(); ++i)
      if (t.powers[i] >= 2) {
        Monomial d = t;
        d.coef *= t.powers[i] * (t.powers[i] - 1);
        d.powers[i] -= 2;
        lap.push_back(d);
      }
  FieldWithLaplacian f;
  f.name = "polynomial";
  f.w = [terms, eval](PointView x) { return eval(terms, x); };
  f.laplacian = [lap, eval](PointView x) { return eval(lap, x); };
  return f;
}

HalfMeanSample half_sphere_mean(const FieldWithLaplacian& w, const std::vector<double>& y, double R, int n,
                                const QuadratureConfig& cfg) {
  check_dimension(n);
  if (!(R > 0.0)) throw PreconditionError("radius must be positive");
  HalfMeanSample s;
  s.y = y;
  s.R = R;
  s.n = n;
  auto integrand = [&](const std::vector<double>& z) {
    const auto x = shifted(y, z, R, n);
    return w.w(PointView(x)) * z[n - 1];
  };
  if (n <= 3) {
    const double area = half_sphere_area(n);
    const double coarse = hemisphere_integral(integrand, n, cfg.panels, cfg.azimuth_points) / (R * area);
    const double fine = hemisphere_integral(integrand, n, 2 * cfg.panels, 2 * cfg.azimuth_points) / (R * area);
    s.value = fine;
    s.error = std::abs(fine - coarse);
    s.method = MeanMethod::deterministic;
    return s;
  }
  const auto pts = hemisphere_samples(n, cfg.mc_samples, cfg.seed);
  double sum = 0.0, sum2 = 0.0;
  for (const auto& z : pts) {
    const double val = integrand(z);
    sum += val;
    sum2 += val * val;
  }
  const double N = static_cast<double>(pts.size());
  const double mean = sum / N;
  const double var = std::max(0.0, sum2 / N - mean * mean);
  s.value = mean / R;
  s.error = std::sqrt(var / N) / R;
  s.method = MeanMethod::monte_carlo;
  s.seed = cfg.seed;
  return s;
}

DerivativeIdentity mean_derivative_identity_check(const FieldWithLaplacian& w, const std::vector<double>& y,
                                                  double R, int n, const QuadratureConfig& cfg) {
  check_dimension(n);
  if (!w.laplacian) throw PreconditionError("derivative identity needs the field's Laplacian");
  if (!(R > 0.0)) throw PreconditionError("radius must be positive");
  DerivativeIdentity out;
  const double d = 1e-3 * R;
  out.lhs = (-mean_value(w, y, R + 2 * d, n, cfg) + 8 * mean_value(w, y, R + d, n, cfg) -
             8 * mean_value(w, y, R - d, n, cfg) + mean_value(w, y, R - 2 * d, n, cfg)) /
            (12 * d);

  const double norm = R * R * std::pow(R, n - 1) * half_sphere_area(n);
  double ball = 0.0, disk = 0.0;
  std::vector<double> x(static_cast<std::size_t>(n), 0.0);
  auto base = [&](int i) { return i < static_cast<int>(y.size()) ? y[i] : 0.0; };
  if (n <= 3) {
    const int rp = std::max(4, cfg.panels / 4);
    const int sp = std::max(4, cfg.panels / 4);
    const int az = std::max(8, cfg.azimuth_points / 2);
    ball = composite_gauss(
        [&](double rho) {
          auto g = [&](const std::vector<double>& z) {
            const auto pt = shifted(y, z, rho, n);
            return w.laplacian(PointView(pt)) * rho * z[n - 1];
          };
          return std::pow(rho, n - 1) * hemisphere_integral(g, n, sp, az);
        },
        0.0, R, rp);
    if (n == 2) {
      disk = composite_gauss(
          [&](double t) {
            x[0] = base(0) + t;
            x[1] = 0.0;
            return w.w(PointView(x));
          },
          -R, R, 2 * rp);
    } else {
      disk = composite_gauss(
          [&](double rho) {
            double acc = 0.0;
            for (int j = 0; j < az; ++j) {
              const double psi = 2.0 * pi * j / az;
              x[0] = base(0) + rho * std::cos(psi);
              x[1] = base(1) + rho * std::sin(psi);
              x[2] = 0.0;
              acc += w.w(PointView(x));
            }
            return rho * acc * 2.0 * pi / az;
          },
          0.0, R, rp);
    }
  } else {
    std::mt19937_64 gen(cfg.seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const auto dirs = hemisphere_samples(n, cfg.mc_samples, cfg.seed + 1);
    double acc = 0.0;
    for (const auto& z : dirs) {
      const double rho = R * std::pow(unif(gen), 1.0 / n);
      const auto pt = shifted(y, z, rho, n);
      acc += w.laplacian(PointView(pt)) * rho * z[n - 1];
    }
    ball = acc / static_cast<double>(dirs.size()) * half_sphere_area(n) * std::pow(R, n) / n;
    const auto flat = hemisphere_samples(n - 1, cfg.mc_samples, cfg.seed + 2);
    acc = 0.0;
    for (const auto& z : flat) {
      // full sphere in the hyperplane: undo the folding of the last coordinate
      const double rho = R * std::pow(unif(gen), 1.0 / (n - 1));
      const double sign = unif(gen) < 0.5 ? -1.0 : 1.0;
      for (int i = 0; i < n - 1; ++i) x[i] = base(i) + rho * z[i] * (i == n - 2 ? sign : 1.0);
      x[n - 1] = 0.0;
      acc += w.w(PointView(x));
    }
    const double vol = std::pow(pi, 0.5 * (n - 1)) / std::tgamma(0.5 * (n - 1) + 1.0) * std::pow(R, n - 1);
    disk = acc / static_cast<double>(flat.size()) * vol;
  }
  out.ball_term = ball / norm;
  out.disk_term = disk / norm;
  out.rhs = out.ball_term - out.disk_term;
  out.abs_gap = std::abs(out.lhs - out.rhs);
  const double scale = std::max({std::abs(out.lhs), std::abs(out.ball_term), std::abs(out.disk_term)});
  out.rel_gap = scale > 0.0 ? out.abs_gap / scale : out.abs_gap;
  return out;
}

MonotonicityScan monotonicity_scan(const FieldWithLaplacian& w, const std::vector<double>& y1,
                                   const std::vector<double>& y2, const std::vector<double>& radii, int n,
                                   const QuadratureConfig& cfg) {
  if (radii.empty()) throw PreconditionError("monotonicity scan needs radii");
  for (std::size_t k = 1; k < radii.size(); ++k)
    if (!(radii[k] > radii[k - 1])) throw PreconditionError("radii must be strictly increasing");
  MonotonicityScan out;
  constexpr double eps = std::numeric_limits<double>::epsilon();
  for (double R : radii) {
    out.samples.push_back(half_sphere_mean(w, y1, R, n, cfg));
    out.other_center.push_back(half_sphere_mean(w, y2, R, n, cfg));
  }
  out.worst_increase = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < out.samples.size(); ++k) {
    const auto& s = out.samples[k];
    if (s.value < -(s.error + 64 * eps)) out.nonnegative_means = false;
    if (k == 0) continue;
    const auto& p = out.samples[k - 1];
    const double slack = s.error + p.error + 64 * eps * std::max(std::abs(s.value), std::abs(p.value));
    const double excess = s.value - p.value - slack;
    out.worst_increase = std::max(out.worst_increase, excess);
    if (excess > 0.0) out.nonincreasing = false;
  }
  if (out.samples.size() < 2) out.worst_increase = 0.0;
  const auto& a = out.samples.back();
  const auto& b = out.other_center.back();
  out.limit = a.value;
  out.limit_slack = a.error;
  out.cross_center_gap = std::abs(a.value - b.value);
  double tail = 0.0;
  if (out.samples.size() >= 2) {
    tail = std::max(std::abs(a.value - out.samples[out.samples.size() - 2].value),
                    std::abs(b.value - out.other_center[out.other_center.size() - 2].value));
  }
  out.cross_center_ok = out.cross_center_gap <= a.error + b.error + tail + 64 * eps * std::abs(a.value);
  out.consistent = out.nonincreasing && out.nonnegative_means && out.cross_center_ok;
  out.verdict = out.consistent ? "superharmonic-consistent" : "not superharmonic-consistent";
  return out;
}

LowerBoundCheck linear_lower_bound_check(const FieldWithLaplacian& w, double L,
                                         const std::vector<std::vector<double>>& points, int n, double tol) {
  check_dimension(n);
  LowerBoundCheck out;
  out.xn_mean = n <= 3 ? half_sphere_mean(catalogue_field("x_n", n), {}, 1.0, n).value : xn_mean_exact(n);
  out.min_slack = std::numeric_limits<double>::infinity();
  for (const auto& x : points) {
    if (static_cast<int>(x.size()) != n) throw PreconditionError("sample point dimension must equal n");
    const double slack = w.w(PointView(x)) - L / out.xn_mean * x[n - 1];
    ++out.samples;
    if (slack < out.min_slack) {
      out.min_slack = slack;
      out.worst_point = x;
    }
  }
  out.pass = out.min_slack >= -tol;
  return out;
}

}  // namespace ellab
