#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <stdexcept>

#include "cslink/error.hpp"
#include "cslink/kernel.hpp"
#include "cslink/quadrature.hpp"

using namespace cslink;

namespace {

constexpr double kPi = std::numbers::pi;

// Restores CSLINK_THREADS on scope exit.
class ThreadEnv {
 public:
  explicit ThreadEnv(const char* value) {
    if (const char* old = std::getenv("CSLINK_THREADS")) saved_ = old;
    setenv("CSLINK_THREADS", value, 1);
  }
  ~ThreadEnv() {
    if (saved_.empty())
      unsetenv("CSLINK_THREADS");
    else
      setenv("CSLINK_THREADS", saved_.c_str(), 1);
  }

 private:
  std::string saved_;
};

double circle_line_integrand(std::span<const double> s, std::span<const double> t, double y) {
  const double y3 = std::tan(t[0]);
  return (1.0 - y * std::sin(s[0])) * (1.0 + y3 * y3) /
         std::pow(1.0 - 2.0 * y * std::sin(s[0]) + y * y + y3 * y3, 1.5) / (4.0 * kPi);
}

// Golden-section minimum of a unimodal function on [a, b].
template <class F>
double golden_min(F f, double a, double b) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - r * (b - a), d = a + r * (b - a);
  for (int i = 0; i < 200; ++i) {
    if (f(c) < f(d))
      b = d;
    else
      a = c;
    c = b - r * (b - a);
    d = a + r * (b - a);
  }
  return f(0.5 * (a + b));
}

}  // namespace

TEST_CASE("spec validation") {
  QuadratureSpec spec;
  CHECK_NOTHROW(spec.validate());
  spec.points_per_dim = 3;
  CHECK_THROWS_AS(spec.validate(), InputError);
  spec = {};
  spec.sample_budget = 9999;
  CHECK_NOTHROW(spec.validate());  // budget only matters for Monte Carlo
  spec.method = QuadratureSpec::Method::monte_carlo;
  CHECK_THROWS_AS(spec.validate(), InputError);
  spec = {};
  spec.target_rel_error = 0.5;
  CHECK_THROWS_AS(spec.validate(), InputError);
  spec.target_rel_error = 0.0;
  CHECK_THROWS_AS(spec.validate(), InputError);
  CHECK(QuadratureSpec::defaults_for(0).points_per_dim == 256);
  CHECK(QuadratureSpec::defaults_for(1).points_per_dim == 24);
  CHECK(method_from_string(to_string(QuadratureSpec::Method::monte_carlo)) ==
        QuadratureSpec::Method::monte_carlo);
  CHECK_THROWS_AS(method_from_string("simpson"), InputError);
}

TEST_CASE("torus examples") {
  const auto T = ChartDomain::torus(1);
  QuadratureSpec spec;
  spec.points_per_dim = 32;
  const auto cc = integrate_product(
      [](std::span<const double> s, std::span<const double> t) { return std::cos(s[0]) * std::cos(t[0]); },
      T, T, spec);
  CHECK(std::abs(cc.value) < 1e-12);
  for (int n : {4, 7, 16, 33}) {
    spec.points_per_dim = n;
    const auto one = integrate_product([](auto, auto) { return 1.0; }, T, T, spec);
    CHECK(one.value == doctest::Approx(4.0 * kPi * kPi).epsilon(1e-15));
  }
}

TEST_CASE("compactified line integral") {
  QuadratureSpec spec;
  const auto r = integrate(
      [](std::span<const double> th) {
        const double y = std::tan(th[0]);
        return (1.0 + y * y) / std::pow(1.0 + y * y, 1.5);
      },
      ChartDomain::compactified_plane(1), spec);
  CHECK(std::abs(0.5 * r.value - 1.0) < 1e-10);
  CHECK(r.converged);
}

TEST_CASE("grids never touch chart boundaries") {
  for (const auto& d : {ChartDomain::compactified_plane(2), ChartDomain::box({0.0, 0.0}, {kPi, 1.0})}) {
    const auto g = tensor_grid(d, 16);
    CHECK(g.size() == 256);
    double wsum = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      wsum += g.weights[i];
      for (int a = 0; a < 2; ++a) {
        CHECK(g.node(i)[a] > d.lower_bound(a));
        CHECK(g.node(i)[a] < d.upper_bound(a));
      }
    }
    CHECK(wsum == doctest::Approx(d.volume()).epsilon(1e-13));
  }
  const auto g0 = tensor_grid(ChartDomain::box({}, {}), 10);
  CHECK(g0.size() == 1);
  CHECK(g0.weights[0] == 1.0);
}

TEST_CASE("tensor result is independent of the thread count") {
  const auto T = ChartDomain::torus(1), P = ChartDomain::compactified_plane(1);
  QuadratureSpec spec;
  auto f = [](std::span<const double> s, std::span<const double> t) {
    return circle_line_integrand(s, t, 0.5);
  };
  double v1, v4, v7;
  {
    ThreadEnv env("1");
    v1 = integrate_product(f, T, P, spec).value;
  }
  {
    ThreadEnv env("4");
    v4 = integrate_product(f, T, P, spec).value;
  }
  {
    ThreadEnv env("7");
    v7 = integrate_product(f, T, P, spec).value;
  }
  CHECK(v1 == v4);
  CHECK(v1 == v7);
  CHECK(std::abs(v1 - 1.0) < 1e-10);
}

TEST_CASE("Monte Carlo is reproducible and honest about its error") {
  const auto T = ChartDomain::torus(1), P = ChartDomain::compactified_plane(1);
  QuadratureSpec spec;
  spec.method = QuadratureSpec::Method::monte_carlo;
  spec.sample_budget = 200'000;
  auto f = [](std::span<const double> s, std::span<const double> t) {
    return circle_line_integrand(s, t, 0.5);
  };
  IntegralEstimate a, b;
  {
    ThreadEnv env("1");
    a = integrate_product(f, T, P, spec);
  }
  {
    ThreadEnv env("3");
    b = integrate_product(f, T, P, spec);
  }
  CHECK(a.value == b.value);
  CHECK(a.error_estimate == b.error_estimate);
  CHECK(a.evaluations == 200'000);
  CHECK(a.error_estimate > 0.0);
  CHECK(std::abs(a.value - 1.0) < 4.0 * a.error_estimate);
  spec.seed += 1;
  CHECK(integrate_product(f, T, P, spec).value != a.value);

  spec.sample_budget = 50'000;
  const auto c = integrate_product([](auto, auto) { return 2.0; }, T, T, spec);
  CHECK(c.value == doctest::Approx(8.0 * kPi * kPi).epsilon(1e-14));
  CHECK(c.error_estimate == 0.0);
}

TEST_CASE("error estimate shrinks with refinement") {
  const auto T = ChartDomain::torus(1), P = ChartDomain::compactified_plane(1);
  QuadratureSpec spec;
  spec.points_per_dim = 128;
  spec.refinement_levels = 5;
  const auto est = integrate_product(
      [](std::span<const double> s, std::span<const double> t) { return circle_line_integrand(s, t, 0.5); },
      T, P, spec);
  REQUIRE(est.level_values.size() == 5);
  double prev = INFINITY;
  for (std::size_t k = 1; k < est.level_values.size(); ++k) {
    const double diff = std::abs(est.level_values[k] - est.level_values[k - 1]);
    CHECK(diff < prev);
    prev = diff;
  }
  CHECK(est.error_estimate == prev);
}

TEST_CASE("non-convergence is reported, not thrown") {
  const auto T = ChartDomain::torus(1), P = ChartDomain::compactified_plane(1);
  QuadratureSpec spec;
  spec.points_per_dim = 4;
  spec.target_rel_error = 1e-6;
  const auto est = integrate_product(
      [](std::span<const double> s, std::span<const double> t) { return circle_line_integrand(s, t, 0.5); },
      T, P, spec);
  CHECK_FALSE(est.converged);
  CHECK(est.error_estimate > spec.target_rel_error);
}

TEST_CASE("integrand exceptions propagate") {
  const auto T = ChartDomain::torus(1);
  QuadratureSpec spec;
  spec.points_per_dim = 16;
  CHECK_THROWS_AS(integrate_product(
                      [](std::span<const double> s, std::span<const double>) -> double {
                        if (s[0] > 3.0) throw SingularityError(0.0);
                        return 1.0;
                      },
                      T, T, spec),
                  SingularityError);
}

TEST_CASE("min pair distance examples") {
  const auto circle = unit_circle_xy(1.0);
  // Distance from circle to the line {(0, 0.5, z)} is min_s |(cos s, sin s - 0.5)|.
  const double oracle = golden_min(
      [](double s) { return std::hypot(std::cos(s), std::sin(s) - 0.5); }, 0.5, 2.5);
  CHECK(oracle == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(std::abs(min_pair_distance(circle, vertical_line_z(0.5)) - oracle) < 1e-6);
  CHECK(min_pair_distance(circle, circle) < 1e-9);
  const auto lifted = unit_circle_xy(1.0, {0.0, 0.0, 5.0});
  CHECK(min_pair_distance(circle, lifted) >= 5.0 - 1e-12);
  CHECK(min_pair_distance(circle, lifted) == doctest::Approx(5.0).epsilon(1e-9));
  CHECK_THROWS_AS(min_pair_distance(circle, circle, 99), InputError);
  CHECK_THROWS_AS(min_pair_distance(circle, round_sphere(1, 1.0)), InputError);
}

TEST_CASE("deterministic sum") {
  const double s = deterministic_sum(1000, [](std::size_t i) { return 1.0 / (1.0 + static_cast<double>(i)); });
  double ref = 0.0;
  for (int i = 1000; i >= 1; --i) ref += 1.0 / i;
  CHECK(s == doctest::Approx(ref).epsilon(1e-15));
  CHECK(deterministic_sum(0, [](std::size_t) { return 1.0; }) == 0.0);
}
