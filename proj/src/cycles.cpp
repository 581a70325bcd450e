#include "cslink/cycles.hpp"

#include <cmath>
#include <numbers>
#include <utility>

#include "cslink/detail/dense.hpp"
#include "cslink/error.hpp"

namespace cslink {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kGramTolerance = 1e-10;

}  // namespace

Dimensions Dimensions::of(int l) {
  if (l < 0) throw InputError("l must be non-negative, got " + std::to_string(l));
  return Dimensions{l};
}

ChartDomain ChartDomain::torus(int d) {
  return ChartDomain{Kind::torus, d, std::vector<double>(d, 0.0),
                     std::vector<double>(d, 2.0 * kPi)};
}

ChartDomain ChartDomain::box(std::vector<double> lower, std::vector<double> upper) {
  if (lower.size() != upper.size()) throw InputError("box bounds differ in length");
  for (std::size_t i = 0; i < lower.size(); ++i)
    if (!(lower[i] < upper[i])) throw InputError("box chart needs lower < upper");
  const int d = static_cast<int>(lower.size());
  return ChartDomain{Kind::box, d, std::move(lower), std::move(upper)};
}

ChartDomain ChartDomain::compactified_plane(int d) {
  return ChartDomain{Kind::compactified_plane, d, std::vector<double>(d, -0.5 * kPi),
                     std::vector<double>(d, 0.5 * kPi)};
}

double ChartDomain::lower_bound(int i) const { return lower.at(i); }
double ChartDomain::upper_bound(int i) const { return upper.at(i); }

double ChartDomain::volume() const {
  double v = 1.0;
  for (int i = 0; i < dim; ++i) v *= upper[i] - lower[i];
  return v;
}

ParamCycle::ParamCycle(Dimensions dims, std::vector<Chart> charts, std::string label)
    : dims_(dims), charts_(std::move(charts)), label_(std::move(label)) {
  if (charts_.empty()) throw InputError("a cycle needs at least one chart");
  for (const auto& c : charts_) {
    if (c.domain.dim != dims_.cycle_dim())
      throw InputError("chart dimension does not match cycle dimension 2l+1");
    if (!c.map || !c.jacobian) throw InputError("chart evaluators must be set");
  }
}

std::vector<double> ParamCycle::point(std::span<const double> param, std::size_t chart) const {
  std::vector<double> out(dims_.ambient_dim());
  charts_.at(chart).map(param, out);
  return out;
}

std::vector<double> ParamCycle::tangents(std::span<const double> param,
                                         std::size_t chart) const {
  std::vector<double> out(static_cast<std::size_t>(dims_.ambient_dim()) * dims_.cycle_dim());
  charts_.at(chart).jacobian(param, out);
  return out;
}

ParamCycle ParamCycle::reversed() const {
  ParamCycle copy = *this;
  copy.orientation_ = -orientation_;
  if (copy.circle_)
    for (double& v : copy.circle_->normal) v = -v;
  return copy;
}

ParamCycle unit_circle_xy(double radius, std::array<double, 3> offset) {
  if (!(radius > 0.0)) throw InputError("circle radius must be positive");
  Chart chart;
  chart.domain = ChartDomain::torus(1);
  chart.map = [radius, offset](std::span<const double> s, std::span<double> x) {
    x[0] = offset[0] + radius * std::cos(s[0]);
    x[1] = offset[1] + radius * std::sin(s[0]);
    x[2] = offset[2];
  };
  chart.jacobian = [radius](std::span<const double> s, std::span<double> t) {
    t[0] = -radius * std::sin(s[0]);
    t[1] = radius * std::cos(s[0]);
    t[2] = 0.0;
  };
  ParamCycle c(Dimensions{0}, {std::move(chart)}, "circle");
  c.set_planar_circle(PlanarCircle{{offset[0], offset[1], offset[2]}, {0.0, 0.0, 1.0}, radius});
  return c;
}

ParamCycle vertical_line_z(double y_offset) {
  Chart chart;
  chart.domain = ChartDomain::compactified_plane(1);
  chart.map = [y_offset](std::span<const double> th, std::span<double> x) {
    x[0] = 0.0;
    x[1] = y_offset;
    x[2] = std::tan(th[0]);
  };
  chart.jacobian = [](std::span<const double> th, std::span<double> t) {
    const double y = std::tan(th[0]);
    t[0] = 0.0;
    t[1] = 0.0;
    t[2] = 1.0 + y * y;
  };
  return ParamCycle(Dimensions{0}, {std::move(chart)}, "line");
}

ParamCycle round_sphere(int l, double radius) {
  const Dimensions dims = Dimensions::of(l);
  if (!(radius > 0.0)) throw InputError("sphere radius must be positive");
  const int n = 2 * l + 2;  // embedding coordinates
  const int m = n - 1;      // angles
  const int ambient = dims.ambient_dim();

  std::vector<double> lower(m, 0.0), upper(m, kPi);
  upper[m - 1] = 2.0 * kPi;

  Chart chart;
  chart.domain = ChartDomain::box(std::move(lower), std::move(upper));
  chart.map = [n, radius](std::span<const double> phi, std::span<double> x) {
    std::fill(x.begin(), x.end(), 0.0);
    double prefix = radius;
    for (int k = 0; k < n - 1; ++k) {
      x[k] = prefix * std::cos(phi[k]);
      prefix *= std::sin(phi[k]);
    }
    x[n - 1] = prefix;
  };
  chart.jacobian = [n, m, ambient, radius](std::span<const double> phi, std::span<double> t) {
    std::fill(t.begin(), t.end(), 0.0);
    for (int i = 0; i < m; ++i) {
      auto col = t.subspan(static_cast<std::size_t>(i) * ambient, ambient);
      for (int k = i; k < n; ++k) {
        // d x_k / d phi_i; zero for k < i.
        double v = radius;
        for (int j = 0; j < std::min(k, n - 1); ++j)
          v *= (j == i) ? std::cos(phi[j]) : std::sin(phi[j]);
        if (k < n - 1) v *= (k == i) ? -std::sin(phi[k]) : std::cos(phi[k]);
        col[k] = v;
      }
    }
  };
  return ParamCycle(dims, {std::move(chart)}, "sphere");
}

ParamCycle orthogonal_hyperplane(int l) {
  const Dimensions dims = Dimensions::of(l);
  const int d = dims.cycle_dim();
  const int first = 2 * l + 2;
  const int ambient = dims.ambient_dim();

  Chart chart;
  chart.domain = ChartDomain::compactified_plane(d);
  chart.map = [d, first](std::span<const double> th, std::span<double> x) {
    std::fill(x.begin(), x.end(), 0.0);
    for (int i = 0; i < d; ++i) x[first + i] = std::tan(th[i]);
  };
  chart.jacobian = [d, first, ambient](std::span<const double> th, std::span<double> t) {
    std::fill(t.begin(), t.end(), 0.0);
    for (int i = 0; i < d; ++i) {
      const double y = std::tan(th[i]);
      t[static_cast<std::size_t>(i) * ambient + first + i] = 1.0 + y * y;
    }
  };
  return ParamCycle(dims, {std::move(chart)}, "hyperplane");
}

Isometry Isometry::identity(int n) {
  Isometry iso;
  iso.rotation.assign(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) iso.rotation[static_cast<std::size_t>(i) * n + i] = 1.0;
  iso.translation.assign(n, 0.0);
  return iso;
}

Isometry Isometry::translation_only(std::vector<double> shift) {
  Isometry iso = identity(static_cast<int>(shift.size()));
  iso.translation = std::move(shift);
  return iso;
}

namespace {

void check_rotation(const Isometry& iso, int n) {
  const auto nn = static_cast<std::size_t>(n);
  if (iso.rotation.size() != nn * nn || iso.translation.size() != nn)
    throw InputError("isometry size does not match ambient dimension " + std::to_string(n));
  double residual = 0.0;
  for (std::size_t i = 0; i < nn; ++i)
    for (std::size_t j = 0; j < nn; ++j) {
      double g = 0.0;
      for (std::size_t k = 0; k < nn; ++k) g += iso.rotation[k * nn + i] * iso.rotation[k * nn + j];
      residual = std::max(residual, std::abs(g - (i == j ? 1.0 : 0.0)));
    }
  if (residual > kGramTolerance)
    throw InputError("rotation is not orthogonal (Gram residual " + std::to_string(residual) + ")");
  // Row-major R read as column-major gives R^T; same determinant.
  std::vector<double> scratch = iso.rotation;
  if (detail::lu_determinant(scratch, nn) < 0.0)
    throw InputError("rotation must have determinant +1");
}

}  // namespace

ParamCycle transform(const ParamCycle& c, const Isometry& iso, double scale) {
  const int n = c.dims().ambient_dim();
  const int d = c.dims().cycle_dim();
  if (!(scale > 0.0)) throw InputError("scale must be positive");
  check_rotation(iso, n);

  auto apply = [n](const std::vector<double>& r, std::span<const double> v, std::span<double> out) {
    for (int i = 0; i < n; ++i) {
      double s = 0.0;
      for (int k = 0; k < n; ++k) s += r[static_cast<std::size_t>(i) * n + k] * v[k];
      out[i] = s;
    }
  };

  std::vector<Chart> charts;
  for (const Chart& base : c.charts()) {
    Chart ch;
    ch.domain = base.domain;
    ch.map = [base_map = base.map, rot = iso.rotation, shift = iso.translation, scale, n,
              apply](std::span<const double> s, std::span<double> x) {
      std::vector<double> tmp(n);
      base_map(s, tmp);
      apply(rot, tmp, x);
      for (int i = 0; i < n; ++i) x[i] = scale * x[i] + shift[i];
    };
    ch.jacobian = [base_jac = base.jacobian, rot = iso.rotation, scale, n, d,
                   apply](std::span<const double> s, std::span<double> t) {
      std::vector<double> tmp(static_cast<std::size_t>(n) * d);
      base_jac(s, tmp);
      for (int i = 0; i < d; ++i) {
        const auto off = static_cast<std::size_t>(i) * n;
        apply(rot, std::span<const double>(tmp).subspan(off, n), t.subspan(off, n));
        for (int k = 0; k < n; ++k) t[off + k] *= scale;
      }
    };
    charts.push_back(std::move(ch));
  }

  ParamCycle out(c.dims(), std::move(charts), c.label());
  if (c.orientation() < 0) out = out.reversed();
  if (const auto& circle = c.planar_circle()) {
    PlanarCircle moved;
    moved.center.resize(n);
    moved.normal.resize(n);
    apply(iso.rotation, circle->center, moved.center);
    for (int i = 0; i < n; ++i) moved.center[i] = scale * moved.center[i] + iso.translation[i];
    apply(iso.rotation, circle->normal, moved.normal);
    moved.radius = scale * circle->radius;
    out.set_planar_circle(std::move(moved));
  }
  return out;
}

ParamCycle reverse_orientation(const ParamCycle& c) { return c.reversed(); }

}  // namespace cslink
