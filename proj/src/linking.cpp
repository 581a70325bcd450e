#include "cslink/linking.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>

#include "cslink/detail/dense.hpp"
#include "cslink/error.hpp"

namespace cslink {

namespace {

constexpr double kPi = std::numbers::pi;

enum class KernelPath { determinant, levi_civita };

// Kernel of the double integral between one chart of each cycle.
class CycleIntegrand final : public PairIntegrand {
 public:
  CycleIntegrand(const ParamCycle& c1, std::size_t chart1, const ParamCycle& c2,
                 std::size_t chart2, KernelPath path, double floor)
      : c1_(c1),
        c2_(c2),
        chart1_(chart1),
        chart2_(chart2),
        path_(path),
        floor_(floor),
        orientation_(c1.orientation() * c2.orientation()),
        eps_(c1.dims().l) {}

  double evaluate(std::span<const double> s, std::span<const double> t) const override {
    thread_local CycleSample x, y;
    thread_local std::vector<double> scratch;
    x.evaluate(c1_, s, chart1_);
    y.evaluate(c2_, t, chart2_);
    if (path_ == KernelPath::levi_civita) return propagator_kernel(x, y, orientation_, eps_, floor_);
    scratch.resize(x.point.size() * x.point.size());
    return gauss_kernel(x, y, orientation_, floor_, scratch);
  }

  std::unique_ptr<Bound> bind(const ProductGrid& g1, const ProductGrid& g2) const override {
    return std::make_unique<GridBound>(*this, g1, g2);
  }

 private:
  class GridBound final : public Bound {
   public:
    GridBound(const CycleIntegrand& owner, const ProductGrid& g1, const ProductGrid& g2)
        : owner_(owner), xs_(g1.size()), ys_(g2.size()) {
      for (std::size_t i = 0; i < g1.size(); ++i) xs_[i].evaluate(owner.c1_, g1.node(i), owner.chart1_);
      for (std::size_t j = 0; j < g2.size(); ++j) ys_[j].evaluate(owner.c2_, g2.node(j), owner.chart2_);
      if (owner.path_ == KernelPath::levi_civita) {
        const std::size_t m = owner.eps_.subset_count();
        minors_x_.resize(g1.size() * m);
        minors_y_.resize(g2.size() * m);
        for (std::size_t i = 0; i < g1.size(); ++i)
          owner.eps_.minors(xs_[i].tangents, std::span(minors_x_).subspan(i * m, m));
        for (std::size_t j = 0; j < g2.size(); ++j)
          owner.eps_.minors(ys_[j].tangents, std::span(minors_y_).subspan(j * m, m));
        constant_ = propagator_constant(owner.eps_.l());
      }
    }

    double operator()(std::size_t i, std::size_t j) const override {
      const CycleSample& x = xs_[i];
      const CycleSample& y = ys_[j];
      if (owner_.path_ == KernelPath::determinant) {
        thread_local std::vector<double> scratch;
        scratch.resize(x.point.size() * x.point.size());
        return gauss_kernel(x, y, owner_.orientation_, owner_.floor_, scratch);
      }
      const std::size_t n = x.point.size();
      double diff[64];
      double r2 = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        diff[k] = x.point[k] - y.point[k];
        r2 += diff[k] * diff[k];
      }
      const double r = std::sqrt(r2);
      if (!(r >= owner_.floor_)) throw SingularityError(r);
      const std::size_t m = owner_.eps_.subset_count();
      const double c = owner_.eps_.contract(std::span(minors_x_).subspan(i * m, m),
                                            std::span(minors_y_).subspan(j * m, m),
                                            std::span<const double>(diff, n));
      return owner_.orientation_ * constant_ * c / std::pow(r, static_cast<double>(n));
    }

   private:
    const CycleIntegrand& owner_;
    std::vector<CycleSample> xs_;
    std::vector<CycleSample> ys_;
    std::vector<double> minors_x_;
    std::vector<double> minors_y_;
    double constant_ = 0.0;
  };

  const ParamCycle& c1_;
  const ParamCycle& c2_;
  std::size_t chart1_;
  std::size_t chart2_;
  KernelPath path_;
  double floor_;
  int orientation_;
  LeviCivitaContraction eps_;
};

void check_pair(const ParamCycle& c1, const ParamCycle& c2) {
  if (c1.dims() != c2.dims())
    throw InputError("cycles must have equal l (got " + std::to_string(c1.dims().l) + " and " +
                     std::to_string(c2.dims().l) + ")");
  if (c1.dims().ambient_dim() > 64) throw InputError("ambient dimension above 64 is unsupported");
}

LinkingResult finish(IntegralEstimate raw, double factor, const QuadratureSpec& spec,
                     const LinkingOptions& options, std::string method) {
  raw.value *= factor;
  raw.error_estimate *= std::abs(factor);
  for (double& v : raw.level_values) v *= factor;
  raw.converged = raw.error_estimate <= spec.target_rel_error * std::max(std::abs(raw.value), 1e-3);

  LinkingResult result;
  result.rounded = std::llround(raw.value);
  result.residual = std::abs(raw.value - static_cast<double>(result.rounded));
  result.accepted = result.residual <= options.rounding_tolerance;
  result.raw = std::move(raw);
  result.method = std::move(method);
  return result;
}

LinkingResult linking_integral(const ParamCycle& c1, const ParamCycle& c2,
                               const QuadratureSpec& spec, const LinkingOptions& options,
                               KernelPath path) {
  check_pair(c1, c2);
  spec.validate();

  std::vector<std::string> warnings;
  const double distance = min_pair_distance(c1, c2, options.probe_points);
  if (distance < options.singularity_floor) throw SingularityError(distance);
  const double scale = std::min(cycle_scale(c1), cycle_scale(c2));
  if (distance < 0.05 * scale)
    warnings.push_back("cycles are close: min distance " + std::to_string(distance) +
                       " is below 5% of the cycle scale " + std::to_string(scale));

  IntegralEstimate total;
  bool first = true;
  for (std::size_t a = 0; a < c1.charts().size(); ++a)
    for (std::size_t b = 0; b < c2.charts().size(); ++b) {
      const CycleIntegrand integrand(c1, a, c2, b, path, options.singularity_floor);
      const auto est = integrate_product(integrand, c1.chart(a).domain, c2.chart(b).domain, spec);
      if (first) {
        total = est;
        first = false;
        continue;
      }
      total.value += est.value;
      total.error_estimate += est.error_estimate;
      total.evaluations += est.evaluations;
      for (std::size_t k = 0; k < std::min(total.level_values.size(), est.level_values.size()); ++k)
        total.level_values[k] += est.level_values[k];
    }

  const double factor =
      path == KernelPath::determinant ? 1.0 / sphere_surface(4 * c1.dims().l + 2) : 1.0;
  auto result = finish(std::move(total), factor, spec, options,
                       path == KernelPath::determinant ? "gauss" : "field_theory");
  result.warnings = std::move(warnings);
  return result;
}

}  // namespace

LinkingResult gauss_linking(const ParamCycle& c1, const ParamCycle& c2, const QuadratureSpec& spec,
                            const LinkingOptions& options) {
  return linking_integral(c1, c2, spec, options, KernelPath::determinant);
}

LinkingResult field_theory_linking(const ParamCycle& c1, const ParamCycle& c2,
                                   const QuadratureSpec& spec, const LinkingOptions& options) {
  return linking_integral(c1, c2, spec, options, KernelPath::levi_civita);
}

NormalField radial_normal(const ParamCycle& circle) {
  const auto& geom = circle.planar_circle();
  if (!geom) throw InputError("radial normal needs a planar circle");
  const auto center = geom->center;
  const double radius = geom->radius;
  const ParamCycle c = circle;
  NormalField f;
  f.value = [c, center, radius](std::span<const double> s, std::span<double> out) {
    c.chart().map(s, out);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = (out[k] - center[k]) / radius;
  };
  f.derivative = [c, radius](std::span<const double> s, std::span<double> out) {
    c.chart().jacobian(s, out);
    for (double& v : out) v /= radius;
  };
  return f;
}

NormalField constant_normal(std::vector<double> v) {
  NormalField f;
  f.value = [v](std::span<const double>, std::span<double> out) {
    std::copy(v.begin(), v.end(), out.begin());
  };
  f.derivative = [](std::span<const double>, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
  };
  return f;
}

ParamCycle pushoff(const ParamCycle& c, const Framing& f) {
  if (f.kind != Framing::Kind::pushoff || !f.normal)
    throw InputError("pushoff needs a push-off framing with a normal field");
  if (!(f.epsilon > 0.0)) throw InputError("push-off epsilon must be positive");
  const int n = c.dims().ambient_dim();
  const int d = c.dims().cycle_dim();
  const NormalField nu = *f.normal;

  // Probe the normal field on each chart.
  for (std::size_t ci = 0; ci < c.charts().size(); ++ci) {
    const ProductGrid probe = tensor_grid(c.chart(ci).domain, d == 1 ? 64 : 6);
    std::vector<double> v(n);
    for (std::size_t k = 0; k < probe.size(); ++k) {
      nu.value(probe.node(k), v);
      if (std::abs(detail::norm(v) - 1.0) > 1e-8)
        throw InputError("normal field is not unit length");
      const auto t = c.tangents(probe.node(k), ci);
      for (int i = 0; i < d; ++i) {
        const auto ti = std::span<const double>(t).subspan(static_cast<std::size_t>(i) * n, n);
        const double tn = detail::norm(ti);
        if (tn > 0.0 && std::abs(detail::dot(ti, v)) > 1e-8 * tn)
          throw InputError("normal field is not orthogonal to the tangents");
      }
    }
  }

  const double eps = f.epsilon;
  std::vector<Chart> charts;
  for (const Chart& base : c.charts()) {
    Chart ch;
    ch.domain = base.domain;
    ch.map = [base_map = base.map, nu, eps, n](std::span<const double> s, std::span<double> x) {
      base_map(s, x);
      std::vector<double> v(n);
      nu.value(s, v);
      for (int k = 0; k < n; ++k) x[k] += eps * v[k];
    };
    ch.jacobian = [base_jac = base.jacobian, nu, eps](std::span<const double> s,
                                                      std::span<double> t) {
      base_jac(s, t);
      std::vector<double> dv(t.size());
      nu.derivative(s, dv);
      for (std::size_t k = 0; k < t.size(); ++k) t[k] += eps * dv[k];
    };
    charts.push_back(std::move(ch));
  }
  ParamCycle out(c.dims(), std::move(charts), c.label() + "+pushoff");
  return c.orientation() < 0 ? out.reversed() : out;
}

std::int64_t self_linking(const ParamCycle& c, const Framing& f, const QuadratureSpec& spec,
                          const LinkingOptions& options) {
  if (f.kind == Framing::Kind::zero_regularization) return 0;
  Framing half = f;
  half.epsilon = 0.5 * f.epsilon;
  const auto a = gauss_linking(c, pushoff(c, f), spec, options);
  const auto b = gauss_linking(c, pushoff(c, half), spec, options);
  if (!a.accepted || !b.accepted)
    throw FramingInstabilityError("push-off linking is not close to an integer (residuals " +
                                  std::to_string(a.residual) + ", " + std::to_string(b.residual) +
                                  ")");
  if (a.rounded != b.rounded)
    throw FramingInstabilityError("self-linking changed from " + std::to_string(a.rounded) +
                                  " to " + std::to_string(b.rounded) +
                                  " when halving epsilon; choose a smaller push-off");
  return a.rounded;
}

namespace {

std::vector<double> scan_axis_nodes(const ChartDomain& dom, int axis, int n) {
  std::vector<double> nodes(n);
  const double a = dom.lower_bound(axis), b = dom.upper_bound(axis);
  for (int j = 0; j < n; ++j)
    nodes[j] = dom.periodic(axis) ? a + j * (b - a) / n : a + (j + 0.5) * (b - a) / n;
  return nodes;
}

double normalized_element(const ParamCycle& c1, const ParamCycle& c2, std::span<const double> s,
                          std::span<const double> t) {
  const int n = c1.dims().ambient_dim();
  const int d = c1.dims().cycle_dim();
  const auto x = c1.point(s);
  const auto y = c2.point(t);
  const auto tx = c1.tangents(s);
  const auto ty = c2.tangents(t);
  std::vector<double> e(n);
  for (int k = 0; k < n; ++k) e[k] = x[k] - y[k];
  const double r = detail::norm(e);
  if (!(r >= kDefaultSingularityFloor)) throw SingularityError(r);
  for (double& v : e) v /= r;
  double scale = 1.0;
  for (int i = 0; i < d; ++i) {
    scale *= detail::norm(std::span<const double>(tx).subspan(static_cast<std::size_t>(i) * n, n));
    scale *= detail::norm(std::span<const double>(ty).subspan(static_cast<std::size_t>(i) * n, n));
  }
  if (scale == 0.0) return 0.0;
  return c1.orientation() * c2.orientation() * solid_angle_element(tx, ty, e) / scale;
}

}  // namespace

std::vector<ZodiacusPoint> zodiacus_boundary_scan(const ParamCycle& c1, const ParamCycle& c2,
                                                  int grid, double tol) {
  check_pair(c1, c2);
  if (grid < 2) throw InputError("zodiacus grid needs at least 2 nodes per axis");
  if (!(tol > 0.0)) throw InputError("zodiacus tolerance must be positive");
  const ChartDomain& d1 = c1.chart().domain;
  const ChartDomain& d2 = c2.chart().domain;
  const int dims = d1.dim + d2.dim;

  std::vector<std::vector<double>> axes;
  std::vector<const ChartDomain*> owner;
  std::vector<int> local;
  for (int a = 0; a < d1.dim; ++a) {
    axes.push_back(scan_axis_nodes(d1, a, grid));
    owner.push_back(&d1);
    local.push_back(a);
  }
  for (int a = 0; a < d2.dim; ++a) {
    axes.push_back(scan_axis_nodes(d2, a, grid));
    owner.push_back(&d2);
    local.push_back(a);
  }

  std::size_t total = 1;
  for (int a = 0; a < dims; ++a) total *= static_cast<std::size_t>(grid);

  auto params_of = [&](std::size_t flat) {
    std::vector<double> p(dims);
    for (int a = dims - 1; a >= 0; --a) {
      p[a] = axes[a][flat % grid];
      flat /= grid;
    }
    return p;
  };
  auto eval = [&](const std::vector<double>& p) {
    return normalized_element(c1, c2, std::span<const double>(p).first(d1.dim),
                              std::span<const double>(p).subspan(d1.dim));
  };
  auto to_point = [&](const std::vector<double>& p, double value) {
    ZodiacusPoint z;
    z.s.assign(p.begin(), p.begin() + d1.dim);
    z.t.assign(p.begin() + d1.dim, p.end());
    z.value = value;
    return z;
  };

  std::vector<double> values(total);
  for (std::size_t k = 0; k < total; ++k) values[k] = eval(params_of(k));

  std::vector<ZodiacusPoint> out;
  std::size_t stride = 1;
  std::vector<std::size_t> strides(dims);
  for (int a = dims - 1; a >= 0; --a) {
    strides[a] = stride;
    stride *= static_cast<std::size_t>(grid);
  }

  for (std::size_t k = 0; k < total; ++k) {
    const double v0 = values[k];
    if (std::abs(v0) < tol) {
      out.push_back(to_point(params_of(k), v0));
      continue;
    }
    for (int a = 0; a < dims; ++a) {
      const std::size_t idx = (k / strides[a]) % grid;
      const bool periodic = owner[a]->periodic(local[a]);
      if (idx + 1 == static_cast<std::size_t>(grid) && !periodic) continue;
      const std::size_t nb =
          idx + 1 == static_cast<std::size_t>(grid) ? k - idx * strides[a] : k + strides[a];
      const double v1 = values[nb];
      if (std::abs(v1) < tol || (v0 > 0.0) == (v1 > 0.0)) continue;
      // Bisection along axis a.
      auto p = params_of(k);
      double lo = p[a];
      double hi = idx + 1 == static_cast<std::size_t>(grid)
                      ? axes[a][0] + (owner[a]->upper_bound(local[a]) - owner[a]->lower_bound(local[a]))
                      : axes[a][idx + 1];
      double flo = v0;
      double fmid = v0;
      for (int it = 0; it < 80; ++it) {
        p[a] = 0.5 * (lo + hi);
        fmid = eval(p);
        if (std::abs(fmid) < 1e-6 * tol) break;
        if ((fmid > 0.0) == (flo > 0.0)) {
          lo = p[a];
          flo = fmid;
        } else {
          hi = p[a];
        }
      }
      if (owner[a]->periodic(local[a])) {
        const double lo_b = owner[a]->lower_bound(local[a]);
        const double period = owner[a]->upper_bound(local[a]) - lo_b;
        p[a] = lo_b + std::fmod(p[a] - lo_b, period);
      }
      out.push_back(to_point(p, fmid));
    }
  }
  return out;
}

int intersection_oracle_3d(const ParamCycle& disk_circle, const ParamCycle& other, int samples) {
  if (disk_circle.dims().l != 0 || other.dims().l != 0)
    throw InputError("the intersection oracle is limited to l = 0");
  const auto& geom = disk_circle.planar_circle();
  if (!geom) throw InputError("the spanning cycle must be a planar circle");
  if (samples < 16) throw InputError("intersection oracle needs at least 16 samples");
  const auto& c = geom->center;
  const auto& nrm = geom->normal;

  int count = 0;
  for (std::size_t ci = 0; ci < other.charts().size(); ++ci) {
    const ChartDomain& dom = other.chart(ci).domain;
    const auto nodes = scan_axis_nodes(dom, 0, samples);
    auto height = [&](double t) {
      const auto p = other.point(std::span<const double>(&t, 1), ci);
      double h = 0.0;
      for (int k = 0; k < 3; ++k) h += nrm[k] * (p[k] - c[k]);
      return h;
    };
    const bool periodic = dom.periodic(0);
    const double period = dom.upper_bound(0) - dom.lower_bound(0);
    const int segments = periodic ? samples : samples - 1;
    for (int j = 0; j < segments; ++j) {
      double a = nodes[j];
      double b = j + 1 < samples ? nodes[j + 1] : nodes[0] + period;
      double ha = height(a), hb = height(b);
      if ((ha > 0.0) == (hb > 0.0)) continue;
      for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, std::abs(a)); ++it) {
        const double m = 0.5 * (a + b);
        const double hm = height(m);
        if ((hm > 0.0) == (ha > 0.0)) {
          a = m;
          ha = hm;
        } else {
          b = m;
        }
      }
      const double t = 0.5 * (a + b);
      const auto p = other.point(std::span<const double>(&t, 1), ci);
      const auto tan = other.tangents(std::span<const double>(&t, 1), ci);
      const double tn = detail::norm(tan);
      const double along = detail::dot(std::span<const double>(nrm), std::span<const double>(tan));
      if (tn == 0.0 || std::asin(std::min(1.0, std::abs(along) / tn)) < 1e-4)
        throw DegenerateConfigurationError("tangential crossing of the spanning disk");
      std::vector<double> rel(3);
      double h = 0.0;
      for (int k = 0; k < 3; ++k) {
        rel[k] = p[k] - c[k];
        h += nrm[k] * rel[k];
      }
      for (int k = 0; k < 3; ++k) rel[k] -= h * nrm[k];
      const double rho = detail::norm(rel);
      if (std::abs(rho - geom->radius) <= 1e-9 * geom->radius)
        throw DegenerateConfigurationError("crossing lies on the circle itself");
      if (rho < geom->radius) count += (along > 0.0 ? 1 : -1) * other.orientation();
    }
  }
  return count;
}

}  // namespace cslink
