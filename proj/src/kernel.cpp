#include "cslink/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cslink/detail/dense.hpp"
#include "cslink/error.hpp"

namespace cslink {

namespace {

constexpr double kPi = std::numbers::pi;

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// Parity of a permutation given as a sequence of distinct integers.
double permutation_sign(const std::vector<int>& perm) {
  std::vector<bool> seen(perm.size(), false);
  int transpositions = 0;
  for (std::size_t i = 0; i < perm.size(); ++i) {
    if (seen[i]) continue;
    std::size_t len = 0;
    for (std::size_t j = i; !seen[j]; j = static_cast<std::size_t>(perm[j])) {
      seen[j] = true;
      ++len;
    }
    transpositions += static_cast<int>(len) - 1;
  }
  return transpositions % 2 == 0 ? 1.0 : -1.0;
}

void enumerate_subsets(int n, int k, int start, std::vector<int>& cur,
                       std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == k) {
    out.push_back(cur);
    return;
  }
  for (int i = start; i < n; ++i) {
    cur.push_back(i);
    enumerate_subsets(n, k, i + 1, cur, out);
    cur.pop_back();
  }
}

// Cofactor expansion along the first column of the square matrix formed by
// `rows` of the p tangent columns (columns [col, p)).
double cofactor_det(std::span<const double> tangents, int n, const int* rows, int p, int col) {
  const int size = p - col;
  if (size == 1) return tangents[static_cast<std::size_t>(col) * n + rows[0]];
  if (size == 2) {
    const auto c0 = static_cast<std::size_t>(col) * n;
    const auto c1 = c0 + n;
    return tangents[c0 + rows[0]] * tangents[c1 + rows[1]] -
           tangents[c0 + rows[1]] * tangents[c1 + rows[0]];
  }
  int sub[32];
  double det = 0.0;
  for (int r = 0; r < size; ++r) {
    const double a = tangents[static_cast<std::size_t>(col) * n + rows[r]];
    if (a == 0.0) continue;
    int m = 0;
    for (int q = 0; q < size; ++q)
      if (q != r) sub[m++] = rows[q];
    const double minor = cofactor_det(tangents, n, sub, p, col + 1);
    det += (r % 2 == 0 ? a : -a) * minor;
  }
  return det;
}

}  // namespace

double sphere_surface(int n) {
  if (n < 0) throw InputError("sphere dimension must be non-negative");
  const double h = 0.5 * (n + 1);
  return 2.0 * std::pow(kPi, h) / std::tgamma(h);
}

double propagator_constant(int l) {
  if (l < 0) throw InputError("l must be non-negative");
  const double h = 0.5 * (4 * l + 3);
  return std::tgamma(h) / (2.0 * std::pow(kPi, h));
}

KernelConstants normalization(int l) {
  if (l < 0) throw InputError("l must be non-negative");
  KernelConstants k;
  k.l = l;
  k.total_solid_angle = sphere_surface(4 * l + 2);
  const double h = 0.5 * (4 * l + 3);
  const double f = factorial(2 * l + 1);
  k.linking_normalization = std::tgamma(h) / ((8.0 * l + 2.0) * std::pow(kPi, h) * f * f);
  k.propagator = propagator_constant(l);
  return k;
}

double solid_angle_element(std::span<const double> tangents_x,
                           std::span<const double> tangents_y, std::span<const double> e) {
  const std::size_t n = e.size();
  if (n < 3 || n % 4 != 3) throw InputError("ambient dimension must be 4l+3");
  const std::size_t p = (n - 1) / 2;
  if (tangents_x.size() != p * n || tangents_y.size() != p * n)
    throw InputError("expected 2l+1 tangent vectors of length 4l+3 per cycle");
  if (std::abs(detail::norm(e) - 1.0) > 1e-9) throw InputError("e_xy must be a unit vector");
  std::vector<double> m(n * n);
  std::copy(tangents_x.begin(), tangents_x.end(), m.begin());
  std::copy(tangents_y.begin(), tangents_y.end(), m.begin() + static_cast<std::ptrdiff_t>(p * n));
  std::copy(e.begin(), e.end(), m.begin() + static_cast<std::ptrdiff_t>(2 * p * n));
  return detail::lu_determinant(m, n);
}

LeviCivitaContraction::LeviCivitaContraction(int l) : l_(l), p_(2 * l + 1), n_(4 * l + 3) {
  if (l < 0) throw InputError("l must be non-negative");
  if (p_ > 31) throw InputError("l too large for the minor expansion");
  std::vector<int> cur;
  enumerate_subsets(n_, p_, 0, cur, subsets_);

  auto find_subset = [&](const std::vector<int>& s) {
    const auto it = std::lower_bound(subsets_.begin(), subsets_.end(), s);
    return static_cast<std::size_t>(it - subsets_.begin());
  };
  for (std::size_t a = 0; a < subsets_.size(); ++a) {
    const auto& xs = subsets_[a];
    std::vector<int> rest;
    for (int r = 0; r < n_; ++r)
      if (!std::binary_search(xs.begin(), xs.end(), r)) rest.push_back(r);
    // Choose which row of the complement is left for v.
    for (std::size_t drop = 0; drop < rest.size(); ++drop) {
      std::vector<int> ys;
      for (std::size_t q = 0; q < rest.size(); ++q)
        if (q != drop) ys.push_back(rest[q]);
      std::vector<int> perm = xs;
      perm.insert(perm.end(), ys.begin(), ys.end());
      perm.push_back(rest[drop]);
      terms_.push_back({a, find_subset(ys), rest[drop], permutation_sign(perm)});
    }
  }
}

void LeviCivitaContraction::minors(std::span<const double> tangents, std::span<double> out) const {
  for (std::size_t a = 0; a < subsets_.size(); ++a)
    out[a] = cofactor_det(tangents, n_, subsets_[a].data(), p_, 0);
}

double LeviCivitaContraction::contract(std::span<const double> minors_x,
                                       std::span<const double> minors_y,
                                       std::span<const double> v) const {
  double sum = 0.0;
  for (const Term& t : terms_)
    sum += t.sign * minors_x[t.x_subset] * minors_y[t.y_subset] * v[t.leftover_row];
  return sum;
}

double LeviCivitaContraction::operator()(std::span<const double> tangents_x,
                                         std::span<const double> tangents_y,
                                         std::span<const double> v) const {
  std::vector<double> mx(subsets_.size()), my(subsets_.size());
  minors(tangents_x, mx);
  minors(tangents_y, my);
  return contract(mx, my, v);
}

void CycleSample::evaluate(const ParamCycle& c, std::span<const double> param, std::size_t chart) {
  const auto n = static_cast<std::size_t>(c.dims().ambient_dim());
  const auto d = static_cast<std::size_t>(c.dims().cycle_dim());
  point.resize(n);
  tangents.resize(n * d);
  c.chart(chart).map(param, point);
  c.chart(chart).jacobian(param, tangents);
}

double gauss_kernel(const CycleSample& x, const CycleSample& y, int orientation, double floor,
                    std::span<double> scratch) {
  const std::size_t n = x.point.size();
  const std::size_t half = x.tangents.size();
  double r2 = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double d = x.point[k] - y.point[k];
    scratch[2 * half + k] = d;
    r2 += d * d;
  }
  const double r = std::sqrt(r2);
  if (!(r >= floor)) throw SingularityError(r);
  for (std::size_t k = 0; k < n; ++k) scratch[2 * half + k] /= r;
  std::copy(x.tangents.begin(), x.tangents.end(), scratch.begin());
  std::copy(y.tangents.begin(), y.tangents.end(), scratch.begin() + static_cast<std::ptrdiff_t>(half));
  const double det = detail::lu_determinant(scratch.first(n * n), n);
  // |x-y|^{4l+2} = |x-y|^{n-1}
  return orientation * det / std::pow(r, static_cast<double>(n - 1));
}

double propagator_kernel(const CycleSample& x, const CycleSample& y, int orientation,
                         const LeviCivitaContraction& eps, double floor) {
  const std::size_t n = x.point.size();
  double diff[64];
  std::vector<double> heap;
  std::span<double> v(diff, n);
  if (n > 64) {
    heap.resize(n);
    v = heap;
  }
  double r2 = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    v[k] = x.point[k] - y.point[k];
    r2 += v[k] * v[k];
  }
  const double r = std::sqrt(r2);
  if (!(r >= floor)) throw SingularityError(r);
  const double c = propagator_constant(eps.l());
  return orientation * c * eps(x.tangents, y.tangents, v) / std::pow(r, static_cast<double>(n));
}

double gauss_integrand(const ParamCycle& c1, const ParamCycle& c2, std::span<const double> s,
                       std::span<const double> t, double floor) {
  if (c1.dims() != c2.dims()) throw InputError("cycles live in different dimensions");
  CycleSample x, y;
  x.evaluate(c1, s);
  y.evaluate(c2, t);
  const auto n = static_cast<std::size_t>(c1.dims().ambient_dim());
  std::vector<double> scratch(n * n);
  return gauss_kernel(x, y, c1.orientation() * c2.orientation(), floor, scratch);
}

double propagator_integrand(const ParamCycle& c1, const ParamCycle& c2,
                            std::span<const double> s, std::span<const double> t, double floor) {
  if (c1.dims() != c2.dims()) throw InputError("cycles live in different dimensions");
  CycleSample x, y;
  x.evaluate(c1, s);
  y.evaluate(c2, t);
  const LeviCivitaContraction eps(c1.dims().l);
  return propagator_kernel(x, y, c1.orientation() * c2.orientation(), eps, floor);
}

RadialCheck radial_integral_check(int l, const QuadratureSpec& spec) {
  if (l < 0) throw InputError("l must be non-negative");
  const double power = 0.5 * (4 * l + 3);
  // Even integrand over the whole line, in the chart y = tan(theta).
  const auto est = integrate(
      [l, power](std::span<const double> th) {
        const double y = std::tan(th[0]);
        const double jac = 1.0 + y * y;
        return std::pow(y, 2 * l) / std::pow(jac, power) * jac;
      },
      ChartDomain::compactified_plane(1), spec);
  RadialCheck out;
  out.numeric = 0.5 * est.value;
  out.exact = std::tgamma(l + 0.5) * std::tgamma(l + 1.0) / (2.0 * std::tgamma(2.0 * l + 1.5));
  return out;
}

}  // namespace cslink
