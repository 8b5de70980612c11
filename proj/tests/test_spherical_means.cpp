#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "ellab/errors.hpp"
#include "ellab/spherical_means.hpp"

using namespace ellab;
using std::numbers::pi;

namespace {

// integral over the unit sphere S^{n-1} of prod |z_i|^{a_i}
double abs_moment(const std::vector<int>& a) {
  double num = 1.0, s = 0.0;
  for (int ai : a) {
    num *= std::tgamma((ai + 1) / 2.0);
    s += (ai + 1) / 2.0;
  }
  return 2.0 * num / std::tgamma(s);
}

// mean of the monomial z^a over the upper unit half-sphere, weighted by z_n
double half_mean_oracle(const std::vector<int>& a) {
  const int n = static_cast<int>(a.size());
  for (int i = 0; i + 1 < n; ++i)
    if (a[i] % 2) return 0.0;
  auto b = a;
  b.back() += 1;
  const double half_area = std::pow(pi, n / 2.0) / std::tgamma(n / 2.0);
  return 0.5 * abs_moment(b) / half_area;
}

std::vector<std::vector<int>> monomials_up_to(int n, int degree) {
  std::vector<std::vector<int>> out;
  std::vector<int> a(n, 0);
  auto rec = [&](auto&& self, int i, int left) -> void {
    if (i == n) {
      out.push_back(a);
      return;
    }
    for (int k = 0; k <= left; ++k) {
      a[i] = k;
      self(self, i + 1, left - k);
    }
  };
  rec(rec, 0, degree);
  return out;
}

}  // namespace

TEST_CASE("zero field has zero mean") {
  auto zero = polynomial_field({{0.0, {0, 0}}}, 2);
  CHECK(half_sphere_mean(zero, {0.3, 0.0}, 2.0, 2).value == 0.0);
}

TEST_CASE("quadrature is exact on low-degree monomials") {
  for (int n : {2, 3})
    for (const auto& a : monomials_up_to(n, 6)) {
      const auto w = polynomial_field({{1.0, a}}, n);
      const double got = half_sphere_mean(w, std::vector<double>(n, 0.0), 1.0, n).value;
      CHECK(std::abs(got - half_mean_oracle(a)) <= 1e-12);
    }
}

TEST_CASE("the mean is linear in the field") {
  const int n = 3;
  const std::vector<double> y{0.4, -0.2, 0.0};
  const auto w1 = polynomial_field({{1.0, {2, 0, 1}}}, n);
  const auto w2 = polynomial_field({{1.0, {0, 1, 3}}}, n);
  const auto mix = polynomial_field({{2.0, {2, 0, 1}}, {-3.0, {0, 1, 3}}}, n);
  const double m1 = half_sphere_mean(w1, y, 1.7, n).value;
  const double m2 = half_sphere_mean(w2, y, 1.7, n).value;
  CHECK(half_sphere_mean(mix, y, 1.7, n).value == doctest::Approx(2 * m1 - 3 * m2).epsilon(1e-13));
}

TEST_CASE("mean of x_n is 1/n at every radius") {
  for (int n : {2, 3}) {
    CHECK(xn_mean_exact(n) == doctest::Approx(half_mean_oracle(n == 2 ? std::vector<int>{0, 1} : std::vector<int>{0, 0, 1})));
    for (double R : {0.5, 1.0, 10.0}) {
      const auto s = half_sphere_mean(catalogue_field("x_n", n), std::vector<double>(n, 0.25), R, n);
      CHECK(std::abs(s.value - 1.0 / n) <= 1e-8);
    }
  }
}

TEST_CASE("derivative identity for x_n^2 in the plane") {
  const auto w = catalogue_field("x_n^2", 2);
  for (double R : {0.5, 2.0}) {
    CHECK(half_sphere_mean(w, {0.0, 0.0}, R, 2).value == doctest::Approx(4.0 * R / (3.0 * pi)).epsilon(1e-12));
    const auto d = mean_derivative_identity_check(w, {0.0, 0.0}, R, 2);
    CHECK(d.lhs == doctest::Approx(4.0 / (3.0 * pi)).epsilon(1e-8));
    CHECK(d.rhs == doctest::Approx(4.0 / (3.0 * pi)).epsilon(1e-8));
  }
}

TEST_CASE("derivative identity vanishes for x_n") {
  const auto d = mean_derivative_identity_check(catalogue_field("x_n", 3), {0.1, 0.2, 0.0}, 1.3, 3);
  CHECK(std::abs(d.lhs) <= 1e-9);
  CHECK(std::abs(d.rhs) <= 1e-12);
}

TEST_CASE("derivative identity on random quartics") {
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int n : {2, 3}) {
    const auto basis = monomials_up_to(n, 4);
    for (int trial = 0; trial < 5; ++trial) {
      std::vector<Monomial> terms;
      for (const auto& a : basis) terms.push_back({U(gen), a});
      const auto w = polynomial_field(terms, n);
      std::vector<double> y(n, 0.0);
      y[0] = U(gen);
      const auto d = mean_derivative_identity_check(w, y, 1.0 + 0.5 * trial, n);
      CHECK(d.rel_gap <= 1e-4);
    }
  }
}

TEST_CASE("missing Laplacian is a precondition error") {
  FieldWithLaplacian w{"bare", [](PointView x) { return x.back(); }, {}};
  CHECK_THROWS_AS(mean_derivative_identity_check(w, {0, 0}, 1.0, 2), PreconditionError);
}

TEST_CASE("monotonicity verdicts") {
  const std::vector<double> radii{1, 2, 4, 8, 16, 32, 64};
  for (int n : {2, 3}) {
    const std::vector<double> y1(n, 0.0);
    std::vector<double> y2(n, 0.0);
    y2[0] = 3.0;
    const auto flat = monotonicity_scan(catalogue_field("x_n", n), y1, y2, radii, n);
    CHECK(flat.consistent);
    for (const auto& s : flat.samples) CHECK(std::abs(s.value - 1.0 / n) <= 1e-8);

    const auto sup = monotonicity_scan(catalogue_field("superharmonic", n), y1, y2, radii, n);
    CHECK(sup.consistent);
    CHECK(sup.verdict == "superharmonic-consistent");
    CHECK(sup.limit > 1.0 / n);
    CHECK(sup.limit - 1.0 / n < 0.02);
    for (std::size_t k = 1; k < sup.samples.size(); ++k) CHECK(sup.samples[k].value <= sup.samples[k - 1].value);

    const auto neg = monotonicity_scan(catalogue_field("neg_x_n", n), y1, y2, radii, n);
    CHECK_FALSE(neg.consistent);
    CHECK(neg.verdict == "not superharmonic-consistent");
    CHECK_FALSE(monotonicity_scan(catalogue_field("neg_superharmonic", n), y1, y2, radii, n).consistent);
  }
}

TEST_CASE("linear lower bound") {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> U(0.0, 5.0);
  const int n = 3;
  std::vector<std::vector<double>> pts;
  for (int i = 0; i < 1000; ++i) pts.push_back({U(gen) - 2.5, U(gen) - 2.5, U(gen)});
  const double L = xn_mean_exact(n);
  CHECK(linear_lower_bound_check(catalogue_field("x_n", n), L, pts, n).pass);
  CHECK(linear_lower_bound_check(catalogue_field("superharmonic", n), L, pts, n).pass);
  CHECK(linear_lower_bound_check(polynomial_field({{2.0, {0, 0, 1}}}, n), 2 * L, pts, n).pass);
  CHECK_FALSE(linear_lower_bound_check(catalogue_field("x_n", n), 2 * L, pts, n).pass);
}

TEST_CASE("Monte Carlo means in four dimensions") {
  QuadratureConfig cfg;
  cfg.mc_samples = 100000;
  cfg.seed = 42;
  const auto w = catalogue_field("x_n", 4);
  const std::vector<double> y(4, 0.0);
  const auto a = half_sphere_mean(w, y, 2.0, 4, cfg);
  CHECK(a.method == MeanMethod::monte_carlo);
  CHECK(std::abs(a.value - 0.25) <= 5.0 * a.error);
  CHECK(half_sphere_mean(w, y, 2.0, 4, cfg).value == a.value);
  cfg.seed = 43;
  CHECK(half_sphere_mean(w, y, 2.0, 4, cfg).value != a.value);
}

TEST_CASE("unknown catalogue name") {
  CHECK_THROWS_AS(catalogue_field("nope", 2), ConfigError);
}
