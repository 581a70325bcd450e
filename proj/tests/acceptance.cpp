// Acceptance run: one PASS/FAIL line per criterion, tolerances pinned below.
// Exit status is nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "cslink/csinvariant.hpp"
#include "cslink/error.hpp"
#include "cslink/kernel.hpp"
#include "cslink/linking.hpp"
#include "test_support.hpp"

using namespace cslink;

namespace {

constexpr double kPi = std::numbers::pi;

constexpr double kTolLinked = 1e-6;        // criteria 1, 2
constexpr double kTolRuntime1 = 1.0;       // seconds, criterion 1
constexpr double kTolResidual = 1e-3;      // criterion 3
constexpr double kTolRuntime3 = 600.0;     // seconds, criterion 3
constexpr double kMcSigmas = 3.0;          // criterion 3
constexpr std::int64_t kMcBudget = 10'000'000;
constexpr double kTolN0 = 1e-13;           // criterion 4
constexpr double kTolRadial = 1e-10;       // criterion 4
constexpr double kTolTwoPath = 1e-8;       // criterion 5
constexpr double kTolInvariance = 1e-6;    // criterion 7
constexpr int kTransforms = 10;            // criterion 7
constexpr double kTolZodiacus = 2e-2;      // criterion 9

int failures = 0;

void report(int id, bool pass, const std::string& what, const std::string& detail) {
  std::printf("%s  criterion %d: %s | %s\n", pass ? "PASS" : "FAIL", id, what.c_str(),
              detail.c_str());
  std::fflush(stdout);
  failures += pass ? 0 : 1;
}

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Relative difference, measured against 1 for values that should vanish.
double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1.0); }

ParamCycle hopf_partner() {
  Isometry iso = Isometry::identity(3);
  iso.rotation = {1, 0, 0, 0, 0, -1, 0, 1, 0};
  iso.translation = {1.0, 0.0, 0.0};
  return transform(unit_circle_xy(1.0), iso);
}

struct Canonical {
  LinkingResult gauss_linked, gauss_unlinked, gauss_l1;
};

Canonical criteria_1_to_3() {
  Canonical out;
  const auto spec0 = QuadratureSpec::defaults_for(0);
  const auto circle = unit_circle_xy(1.0);

  auto t0 = std::chrono::steady_clock::now();
  out.gauss_linked = gauss_linking(circle, vertical_line_z(0.5), spec0);
  const double t1 = seconds_since(t0);
  const double e1 = std::abs(out.gauss_linked.raw.value - 1.0);
  report(1, e1 < kTolLinked && t1 < kTolRuntime1 && spec0.points_per_dim == 256,
         "circle + line(0.5) -> 1 at 256 points/dim, < 1 s",
         "raw=" + fmt("%.15g", out.gauss_linked.raw.value) + " |err|=" + fmt("%.2e", e1) +
             " tol=" + fmt("%.0e", kTolLinked) + " time=" + fmt("%.3f", t1) + "s");

  out.gauss_unlinked = gauss_linking(circle, vertical_line_z(2.0), spec0);
  const double e2 = std::abs(out.gauss_unlinked.raw.value);
  report(2, e2 < kTolLinked, "circle + line(2.0) -> 0",
         "raw=" + fmt("%.3e", out.gauss_unlinked.raw.value) + " tol=" + fmt("%.0e", kTolLinked));

  const auto spec1 = QuadratureSpec::defaults_for(1);
  const auto sphere = round_sphere(1, 1.0);
  const auto plane = orthogonal_hyperplane(1);
  t0 = std::chrono::steady_clock::now();
  out.gauss_l1 = gauss_linking(sphere, plane, spec1);
  const double t3 = seconds_since(t0);
  QuadratureSpec mc = spec1;
  mc.method = QuadratureSpec::Method::monte_carlo;
  mc.sample_budget = kMcBudget;
  const auto mc_result = gauss_linking(sphere, plane, mc);
  const double gap = std::abs(mc_result.raw.value - out.gauss_l1.raw.value);
  const bool mc_ok = gap <= kMcSigmas * mc_result.raw.error_estimate;
  const bool pass = out.gauss_l1.rounded == 1 && out.gauss_l1.residual < kTolResidual &&
                    spec1.points_per_dim == 24 && t3 < kTolRuntime3 && mc_ok;
  report(3, pass, "S^3 + orthogonal 3-plane in R^7 -> 1 at 24 points/dim, MC cross-check",
         "raw=" + fmt("%.12g", out.gauss_l1.raw.value) + " residual=" +
             fmt("%.3e", out.gauss_l1.residual) + " tol=" + fmt("%.0e", kTolResidual) +
             " evals=" + fmt("%.3e", static_cast<double>(out.gauss_l1.raw.evaluations)) +
             " time=" + fmt("%.1f", t3) + "s on " + std::to_string(worker_count()) +
             " worker(s) (limit " + fmt("%.0f", kTolRuntime3) + "s)" + " MC(1e7)=" +
             fmt("%.6f", mc_result.raw.value) + " SE=" + fmt("%.2e", mc_result.raw.error_estimate) +
             " |gap|/SE=" + fmt("%.2f", gap / mc_result.raw.error_estimate) + " (limit 3)");
  return out;
}

void criterion_4() {
  const double n0 = normalization(0).linking_normalization;
  const double e_n0 = std::abs(n0 * 4.0 * kPi - 1.0);
  const double e_s2 = std::abs(sphere_surface(2) / (4.0 * kPi) - 1.0);
  double worst = 0.0;
  std::string radial;
  for (int l = 0; l <= 2; ++l) {
    const auto r = radial_integral_check(l, QuadratureSpec::defaults_for(0));
    worst = std::max(worst, std::abs(r.numeric - r.exact));
    radial += " l=" + std::to_string(l) + ":" + fmt("%.2e", std::abs(r.numeric - r.exact));
  }
  report(4, e_n0 < kTolN0 && e_s2 < kTolN0 && worst < kTolRadial,
         "N_0 = 1/(4 pi), S_2 = 4 pi, radial integral identity l = 0,1,2",
         "N_0 rel=" + fmt("%.1e", e_n0) + " S_2 rel=" + fmt("%.1e", e_s2) + " tol=" +
             fmt("%.0e", kTolN0) + "; radial |err|" + radial + " tol=" + fmt("%.0e", kTolRadial));
}

void criterion_5(const Canonical& c) {
  const auto circle = unit_circle_xy(1.0);
  const auto spec0 = QuadratureSpec::defaults_for(0);
  const double d1 =
      std::abs(field_theory_linking(circle, vertical_line_z(0.5), spec0).raw.value - c.gauss_linked.raw.value);
  const double d2 = std::abs(field_theory_linking(circle, vertical_line_z(2.0), spec0).raw.value -
                             c.gauss_unlinked.raw.value);
  const double d3 = std::abs(
      field_theory_linking(round_sphere(1, 1.0), orthogonal_hyperplane(1), QuadratureSpec::defaults_for(1))
          .raw.value -
      c.gauss_l1.raw.value);
  report(5, d1 < kTolTwoPath && d2 < kTolTwoPath && d3 < kTolTwoPath,
         "field theory vs gauss on criteria 1/2/3 configurations",
         "|diff| = " + fmt("%.2e", d1) + ", " + fmt("%.2e", d2) + ", " + fmt("%.2e", d3) +
             " tol=" + fmt("%.0e", kTolTwoPath));
}

void criterion_6() {
  const auto circle = unit_circle_xy(1.0);
  const auto spec0 = QuadratureSpec::defaults_for(0);
  int agree = 0, total = 0;
  std::string mismatches;
  for (int i = 0; i < 10; ++i) {
    const double y = 0.1 + 0.2 * i;
    for (bool reversed : {false, true}) {
      auto line = vertical_line_z(y);
      if (reversed) line = reverse_orientation(line);
      const int oracle = intersection_oracle_3d(circle, line);
      const auto g = gauss_linking(circle, line, spec0);
      ++total;
      if (g.rounded == oracle && g.accepted)
        ++agree;
      else
        mismatches += " y=" + fmt("%.1f", y) + (reversed ? "(rev)" : "");
    }
  }
  report(6, agree == total && total == 20, "intersection oracle = rounded gauss linking",
         std::to_string(agree) + "/" + std::to_string(total) +
             " configurations agree (|y| = 0.1..1.9 step 0.2, both orientations)" + mismatches);
}

void criterion_7() {
  std::mt19937_64 rng(0xacce55);
  struct Config {
    std::string name;
    ParamCycle a, b;
    QuadratureSpec spec;
  };
  QuadratureSpec coarse1 = QuadratureSpec::defaults_for(1);
  coarse1.points_per_dim = 12;
  const std::vector<Config> configs = {
      {"circle+line(0.5)", unit_circle_xy(1.0), vertical_line_z(0.5), QuadratureSpec::defaults_for(0)},
      {"circle+line(2.0)", unit_circle_xy(1.0), vertical_line_z(2.0), QuadratureSpec::defaults_for(0)},
      {"hopf circles", unit_circle_xy(1.0), hopf_partner(), QuadratureSpec::defaults_for(0)},
      {"S^3+plane (12 pts/dim)", round_sphere(1, 1.0), orthogonal_hyperplane(1), coarse1}};
  double worst_sym = 0.0, worst_orient = 0.0, worst_rigid = 0.0, worst_scale = 0.0;
  int transforms = 0;
  for (const auto& c : configs) {
    const int n = c.a.dims().ambient_dim();
    const double base = gauss_linking(c.a, c.b, c.spec).raw.value;
    worst_sym = std::max(worst_sym, rel(gauss_linking(c.b, c.a, c.spec).raw.value, base));
    worst_orient = std::max(
        worst_orient, rel(gauss_linking(reverse_orientation(c.a), c.b, c.spec).raw.value, -base));
    worst_orient = std::max(
        worst_orient, rel(gauss_linking(c.a, reverse_orientation(c.b), c.spec).raw.value, -base));
    for (int k = 0; k < kTransforms; ++k) {
      const auto iso = testing::random_isometry(n, rng);
      const double v = gauss_linking(transform(c.a, iso), transform(c.b, iso), c.spec).raw.value;
      worst_rigid = std::max(worst_rigid, rel(v, base));
      ++transforms;
    }
    for (double lambda : {0.5, 2.0, 10.0}) {
      // Scaling about a common centre: conjugate the scale by a random rigid motion.
      const auto iso = testing::random_isometry(n, rng);
      const double v =
          gauss_linking(transform(c.a, iso, lambda), transform(c.b, iso, lambda), c.spec).raw.value;
      const double w = gauss_linking(transform(c.a, Isometry::identity(n), lambda),
                                     transform(c.b, Isometry::identity(n), lambda), c.spec)
                           .raw.value;
      worst_scale = std::max({worst_scale, rel(v, base), rel(w, base)});
    }
  }
  const bool pass = worst_sym < kTolInvariance && worst_orient < kTolInvariance &&
                    worst_rigid < kTolInvariance && worst_scale < kTolInvariance;
  report(7, pass, "symmetry, orientation, rigid-motion and scale invariance",
         "max rel dev: symmetry=" + fmt("%.1e", worst_sym) + " orientation=" +
             fmt("%.1e", worst_orient) + " rigid=" + fmt("%.1e", worst_rigid) + " scale=" +
             fmt("%.1e", worst_scale) + " tol=" + fmt("%.0e", kTolInvariance) + " over " +
             std::to_string(configs.size()) + " configs, " + std::to_string(kTransforms) +
             " rigid + 3 scales each");
}

void criterion_8() {
  bool a = true;
  auto rejects = [](const std::function<void()>& f) {
    try {
      f();
    } catch (const QuantizationError&) {
      return true;
    }
    return false;
  };
  a = a && rejects([] { validate_level(BigRational(1, 2)); });
  a = a && rejects([] { validate_level(BigRational(0)); });
  a = a && rejects([] { validate_charges({BigRational(3, 2)}); });
  a = a && !rejects([] { validate_level(BigRational(3)); });

  std::mt19937_64 rng(0x2c);
  std::uniform_int_distribution<int> dim(1, 4);
  std::uniform_int_distribution<long> charge(-20, 20), link(-10, 10), level(-5, 5);
  const auto sphere = ManifoldDescriptor::sphere();
  int nil_ok = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = static_cast<std::size_t>(dim(rng));
    std::vector<BigInt> L(n * n, 0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) L[i * n + j] = L[j * n + i] = link(rng);
    long k;
    do k = level(rng); while (k == 0);
    ChargeVector q;
    for (std::size_t i = 0; i < n; ++i) q.q.emplace_back(charge(rng));
    const LinkingMatrix M(n, L);
    const auto base = expectation_value(q, M, Level(k), sphere, {});
    bool ok = nilpotency_invariance_check(q, M, Level(k), sphere, {});
    for (std::size_t i = 0; i < n; ++i) {
      ChargeVector shifted = q;
      shifted.q[i] += 2 * k;
      ok = ok && expectation_value(shifted, M, Level(k), sphere, {}) == base;
    }
    nil_ok += ok;
  }

  int sel_ok = 0;
  for (int trial = 0; trial < 200; ++trial) {
    long k;
    do k = level(rng); while (k == 0);
    const int betti = dim(rng);
    HomologyVector v;
    bool divisible = true;
    for (int i = 0; i < betti; ++i) {
      const long x = (trial % 2 ? 2 * k * charge(rng) / 4 : charge(rng));
      v.v.emplace_back(x);
      divisible = divisible && x % (2 * k) == 0;
    }
    const auto value = expectation_value(ChargeVector{{1}}, LinkingMatrix::zero(1), Level(k),
                                         ManifoldDescriptor::generic(betti), v);
    sel_ok += value.is_zero() == !divisible;
  }

  const LinkingMatrix hopf(2, {0, 1, 1, 0});
  const auto p11 = expectation_value(ChargeVector{{1, 1}}, hopf, Level(1), sphere, {});
  const auto p22 = expectation_value(ChargeVector{{2, 2}}, hopf, Level(1), sphere, {});
  const bool d = !p11.is_zero() && *p11.phase == RationalPhase(1, 2) && !p22.is_zero() &&
                 *p22.phase == RationalPhase(0, 1);

  report(8, a && nil_ok == 200 && sel_ok == 200 && d, "exact Chern-Simons invariants",
         std::string("(a) quantization rejections ") + (a ? "ok" : "FAILED") +
             "; (b) 2k-nilpotency " + std::to_string(nil_ok) + "/200; (c) selection rule " +
             std::to_string(sel_ok) + "/200; (d) phase(1,1)=" + p11.phase->numerator().str() + "/" +
             p11.phase->denominator().str() + " phase(2,2)=" + p22.phase->numerator().str() + "/" +
             p22.phase->denominator().str() + " (exact)");
}

void criterion_9() {
  const auto circle = unit_circle_xy(1.0);
  const int grid = 64;
  const double tol = 1e-3;
  const auto linked = zodiacus_boundary_scan(circle, vertical_line_z(0.5), grid, tol);
  const double y = 2.0;
  const auto apart = zodiacus_boundary_scan(circle, vertical_line_z(y), grid, tol);
  double worst = 0.0;
  for (const auto& p : apart) worst = std::max(worst, std::abs(1.0 - y * std::sin(p.s[0])));
  report(9, linked.empty() && !apart.empty() && worst < kTolZodiacus,
         "zodiacus boundary: empty when linked, on 1 - y sin s = 0 otherwise",
         "grid=" + std::to_string(grid) + " tol=" + fmt("%.0e", tol) + "; y=0.5: " +
             std::to_string(linked.size()) + " points; y=2.0: " + std::to_string(apart.size()) +
             " points, max |1 - y sin s| = " + fmt("%.2e", worst) + " (limit " +
             fmt("%.0e", kTolZodiacus) + ")");
}

}  // namespace

int main() {
  std::printf("cslink acceptance (%u hardware threads, %u workers)\n",
              std::thread::hardware_concurrency(), worker_count());
  try {
    const auto canonical = criteria_1_to_3();
    criterion_4();
    criterion_5(canonical);
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
  } catch (const std::exception& e) {
    std::printf("FAIL  acceptance aborted: %s\n", e.what());
    return 1;
  }
  std::printf("%s: %d criteria failed\n", failures ? "FAILED" : "ALL PASSED", failures);
  return failures ? 1 : 0;
}
