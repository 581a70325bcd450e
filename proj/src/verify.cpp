#include "cslink/verify.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

#include "cslink/csinvariant.hpp"
#include "cslink/kernel.hpp"
#include "cslink/linking.hpp"

namespace cslink {

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", x);
  return buf;
}

VerifyCheck numeric(std::string name, double expected, double computed, double tol,
                    bool relative) {
  const double err = relative ? std::abs(computed - expected) / std::abs(expected)
                              : std::abs(computed - expected);
  return {std::move(name), fmt(expected), fmt(computed), tol, err <= tol};
}

VerifyCheck exact(std::string name, const std::string& expected, const std::string& computed) {
  return {std::move(name), expected, computed, 0.0, expected == computed};
}

std::string phase_string(const ExpectationValue& v) {
  if (v.is_zero()) return "zero";
  return v.phase->numerator().str() + "/" + v.phase->denominator().str();
}

}  // namespace

std::vector<VerifyCheck> run_verification(const VerifyOptions& options) {
  std::vector<VerifyCheck> checks;
  const double corruption = options.corrupt_constants ? 1.0 + 1e-3 : 1.0;

  const auto k0 = normalization(0);
  checks.push_back(numeric("N_0 = 1/(4 pi)", 1.0 / (4.0 * kPi),
                           corruption * k0.linking_normalization, 1e-13, true));
  checks.push_back(numeric("S_2 = 4 pi", 4.0 * kPi, corruption * sphere_surface(2), 1e-13, true));
  checks.push_back(numeric("S_6 = 16 pi^3 / 15", 16.0 * std::pow(kPi, 3) / 15.0,
                           corruption * sphere_surface(6), 1e-13, true));
  checks.push_back(numeric("propagator constant l=0 = 1/(4 pi)", 1.0 / (4.0 * kPi),
                           corruption * propagator_constant(0), 1e-13, true));

  for (int l = 0; l <= 2; ++l) {
    const auto r = radial_integral_check(l, QuadratureSpec::defaults_for(0));
    checks.push_back(numeric("radial integral l=" + std::to_string(l), r.exact, r.numeric, 1e-10,
                             false));
  }

  const auto spec0 = QuadratureSpec::defaults_for(0);
  const auto circle = unit_circle_xy(1.0);
  for (double y : {0.5, 2.0}) {
    const auto line = vertical_line_z(y);
    const double expected = y < 1.0 ? 1.0 : 0.0;
    const auto g = gauss_linking(circle, line, spec0);
    const auto f = field_theory_linking(circle, line, spec0);
    const std::string tag = "circle+line(" + fmt(y) + ")";
    checks.push_back(numeric("gauss linking " + tag, expected, g.raw.value, 1e-6, false));
    checks.push_back(numeric("field theory vs gauss " + tag, g.raw.value, f.raw.value, 1e-8, false));
    checks.push_back(exact("intersection oracle " + tag, std::to_string(static_cast<int>(expected)),
                           std::to_string(intersection_oracle_3d(circle, line))));
    const auto zod = zodiacus_boundary_scan(circle, line, 64, 1e-3);
    checks.push_back(exact("zodiacus boundary " + tag, y < 1.0 ? "empty" : "nonempty",
                           zod.empty() ? "empty" : "nonempty"));
  }

  const Level k1(1);
  const auto hopf = LinkingMatrix(2, {0, 1, 1, 0});
  const auto sphere = ManifoldDescriptor::sphere();
  checks.push_back(exact("wilson phase q=(1,1), Hopf, k=1", "1/2",
                         phase_string(expectation_value({{1, 1}}, hopf, k1, sphere, {}))));
  checks.push_back(exact("wilson phase q=(2,2), Hopf, k=1", "0/1",
                         phase_string(expectation_value({{2, 2}}, hopf, k1, sphere, {}))));
  checks.push_back(exact("wilson product manifold v=(3), k=2", "zero",
                         phase_string(expectation_value({{1}}, LinkingMatrix::zero(1), Level(2),
                                                        ManifoldDescriptor::product(), {{3}}))));

  if (options.level == VerifyOptions::Level::full) {
    const auto spec1 = QuadratureSpec::defaults_for(1);
    const auto s3 = round_sphere(1, 1.0);
    const auto plane = orthogonal_hyperplane(1);
    const auto g = gauss_linking(s3, plane, spec1);
    const auto f = field_theory_linking(s3, plane, spec1);
    checks.push_back(exact("sphere+hyperplane l=1 rounded", "1", std::to_string(g.rounded)));
    checks.push_back(numeric("sphere+hyperplane l=1 residual", 0.0, g.residual, 1e-3, false));
    checks.push_back(
        numeric("sphere+hyperplane field theory vs gauss", g.raw.value, f.raw.value, 1e-8, false));
  }
  return checks;
}

}  // namespace cslink
