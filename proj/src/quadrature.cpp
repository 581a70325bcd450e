#include "cslink/quadrature.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <random>
#include <thread>

#include "cslink/detail/dense.hpp"
#include "cslink/error.hpp"

namespace cslink {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::size_t kMonteCarloChunk = 1 << 16;

// Runs body(i) for i in [0, n) on the worker pool. The first exception thrown
// by any worker is rethrown on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(worker_count(), n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto run = [&] {
    for (;;) {
      if (failed.load(std::memory_order_relaxed)) return;
      const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= n) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        failed = true;
      }
    }
  };
  std::vector<std::jthread> pool;
  pool.reserve(workers - 1);
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(run);
  run();
  pool.clear();
  if (error) std::rethrow_exception(error);
}

double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    detail::CompensatedSum s;
    for (double x : v) s.add(x);
    return s.value();
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

struct AxisRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

AxisRule axis_rule(const ChartDomain& dom, int axis, int n) {
  AxisRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double a = dom.lower_bound(axis);
  const double b = dom.upper_bound(axis);
  if (dom.periodic(axis)) {
    const double h = (b - a) / n;
    for (int j = 0; j < n; ++j) {
      rule.nodes[j] = a + j * h;
      rule.weights[j] = h;
    }
    return rule;
  }
  for (int j = 0; j < n; ++j) {
    const double u = (j + 0.5) / n;
    const double psi = u - std::sin(2.0 * kPi * u) / (2.0 * kPi);
    const double dpsi = 1.0 - std::cos(2.0 * kPi * u);
    rule.nodes[j] = a + (b - a) * psi;
    rule.weights[j] = (b - a) * dpsi / n;
  }
  return rule;
}

class DefaultBound final : public PairIntegrand::Bound {
 public:
  DefaultBound(const PairIntegrand& f, const ProductGrid& g1, const ProductGrid& g2)
      : f_(f), g1_(g1), g2_(g2) {}
  double operator()(std::size_t i, std::size_t j) const override {
    return f_.evaluate(g1_.node(i), g2_.node(j));
  }

 private:
  const PairIntegrand& f_;
  const ProductGrid& g1_;
  const ProductGrid& g2_;
};

bool within_target(double value, double error, double target) {
  return error <= target * std::max(std::abs(value), 1e-3);
}

IntegralEstimate integrate_tensor(const PairIntegrand& integrand, const ChartDomain& dom1,
                                  const ChartDomain& dom2, const QuadratureSpec& spec) {
  IntegralEstimate est;
  std::vector<int> resolutions;
  for (int k = spec.refinement_levels - 1; k >= 0; --k) {
    const int n = spec.points_per_dim >> k;
    if (n >= 2) resolutions.push_back(n);
  }
  for (int n : resolutions) {
    const ProductGrid g1 = tensor_grid(dom1, n);
    const ProductGrid g2 = tensor_grid(dom2, n);
    const auto bound = integrand.bind(g1, g2);
    const double value = deterministic_sum(g1.size(), [&](std::size_t i) {
      detail::CompensatedSum row;
      for (std::size_t j = 0; j < g2.size(); ++j) row.add(g2.weights[j] * (*bound)(i, j));
      return g1.weights[i] * row.value();
    });
    est.level_values.push_back(value);
    est.evaluations += static_cast<std::int64_t>(g1.size() * g2.size());
  }
  est.value = est.level_values.back();
  if (est.level_values.size() >= 2) {
    est.error_estimate = std::abs(est.value - est.level_values[est.level_values.size() - 2]);
    est.converged = within_target(est.value, est.error_estimate, spec.target_rel_error);
  } else {
    est.error_estimate = std::abs(est.value);
    est.converged = false;
  }
  return est;
}

struct ChunkMoments {
  std::size_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;
};

IntegralEstimate integrate_monte_carlo(const PairIntegrand& integrand, const ChartDomain& dom1,
                                       const ChartDomain& dom2, const QuadratureSpec& spec) {
  const auto total = static_cast<std::size_t>(spec.sample_budget);
  const std::size_t chunks = (total + kMonteCarloChunk - 1) / kMonteCarloChunk;
  std::vector<ChunkMoments> moments(chunks);

  parallel_for(chunks, [&](std::size_t c) {
    std::mt19937_64 rng(splitmix64(spec.seed ^ splitmix64(c)));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> s(dom1.dim), t(dom2.dim);
    const std::size_t begin = c * kMonteCarloChunk;
    const std::size_t end = std::min(total, begin + kMonteCarloChunk);
    ChunkMoments m;
    for (std::size_t k = begin; k < end; ++k) {
      for (int i = 0; i < dom1.dim; ++i) {
        const double lo = dom1.lower_bound(i), hi = dom1.upper_bound(i);
        // Open interval: resample the (measure-zero) endpoint.
        double u;
        do u = unit(rng); while (u == 0.0);
        s[i] = lo + (hi - lo) * u;
      }
      for (int i = 0; i < dom2.dim; ++i) {
        const double lo = dom2.lower_bound(i), hi = dom2.upper_bound(i);
        double u;
        do u = unit(rng); while (u == 0.0);
        t[i] = lo + (hi - lo) * u;
      }
      const double f = integrand.evaluate(s, t);
      ++m.count;
      const double delta = f - m.mean;
      m.mean += delta / static_cast<double>(m.count);
      m.m2 += delta * (f - m.mean);
    }
    moments[c] = m;
  });

  ChunkMoments all;
  for (const auto& m : moments) {
    if (m.count == 0) continue;
    const double n = static_cast<double>(all.count + m.count);
    const double delta = m.mean - all.mean;
    all.mean += delta * static_cast<double>(m.count) / n;
    all.m2 += m.m2 + delta * delta * static_cast<double>(all.count) *
                         static_cast<double>(m.count) / n;
    all.count += m.count;
  }
  const double volume = dom1.volume() * dom2.volume();
  const double n = static_cast<double>(all.count);
  const double variance = all.count > 1 ? all.m2 / (n - 1.0) : 0.0;

  IntegralEstimate est;
  est.value = volume * all.mean;
  est.error_estimate = volume * std::sqrt(variance / n);
  est.evaluations = static_cast<std::int64_t>(all.count);
  est.converged = within_target(est.value, est.error_estimate, spec.target_rel_error);
  est.level_values = {est.value};
  return est;
}

}  // namespace

QuadratureSpec QuadratureSpec::defaults_for(int l) {
  QuadratureSpec spec;
  spec.points_per_dim = l == 0 ? 256 : (l == 1 ? 24 : 12);
  return spec;
}

void QuadratureSpec::validate() const {
  if (method == Method::tensor_trapezoid) {
    if (points_per_dim < 4) throw InputError("points_per_dim must be at least 4");
    if (refinement_levels < 2)
      throw InputError("refinement_levels must be at least 2 for an error estimate");
  } else if (sample_budget < 10'000) {
    throw InputError("sample_budget must be at least 10^4");
  }
  if (!(target_rel_error > 0.0 && target_rel_error < 0.5))
    throw InputError("target_rel_error must lie in (0, 0.5)");
}

std::string to_string(QuadratureSpec::Method m) {
  return m == QuadratureSpec::Method::tensor_trapezoid ? "tensor_trapezoid" : "monte_carlo";
}

QuadratureSpec::Method method_from_string(const std::string& name) {
  if (name == "tensor_trapezoid" || name == "tensor") return QuadratureSpec::Method::tensor_trapezoid;
  if (name == "monte_carlo" || name == "mc") return QuadratureSpec::Method::monte_carlo;
  throw InputError("unknown quadrature method '" + name + "'");
}

ProductGrid tensor_grid(const ChartDomain& domain, int points_per_dim) {
  ProductGrid grid;
  grid.dim = domain.dim;
  std::vector<AxisRule> axes;
  std::size_t total = 1;
  for (int a = 0; a < domain.dim; ++a) {
    axes.push_back(axis_rule(domain, a, points_per_dim));
    total *= static_cast<std::size_t>(points_per_dim);
  }
  grid.params.resize(total * domain.dim);
  grid.weights.resize(total);
  std::vector<int> idx(domain.dim, 0);
  for (std::size_t k = 0; k < total; ++k) {
    double w = 1.0;
    for (int a = 0; a < domain.dim; ++a) {
      grid.params[k * domain.dim + a] = axes[a].nodes[idx[a]];
      w *= axes[a].weights[idx[a]];
    }
    grid.weights[k] = w;
    for (int a = domain.dim - 1; a >= 0; --a) {
      if (++idx[a] < points_per_dim) break;
      idx[a] = 0;
    }
  }
  return grid;
}

std::unique_ptr<PairIntegrand::Bound> PairIntegrand::bind(const ProductGrid& g1,
                                                          const ProductGrid& g2) const {
  return std::make_unique<DefaultBound>(*this, g1, g2);
}

IntegralEstimate integrate_product(const PairIntegrand& integrand, const ChartDomain& dom1,
                                   const ChartDomain& dom2, const QuadratureSpec& spec) {
  spec.validate();
  if (spec.method == QuadratureSpec::Method::tensor_trapezoid)
    return integrate_tensor(integrand, dom1, dom2, spec);
  return integrate_monte_carlo(integrand, dom1, dom2, spec);
}

IntegralEstimate integrate_product(const PairFunction& integrand, const ChartDomain& dom1,
                                   const ChartDomain& dom2, const QuadratureSpec& spec) {
  return integrate_product(FunctionPairIntegrand(integrand), dom1, dom2, spec);
}

IntegralEstimate integrate(const std::function<double(std::span<const double>)>& integrand,
                           const ChartDomain& domain, const QuadratureSpec& spec) {
  const ChartDomain point = ChartDomain::box({}, {});
  return integrate_product(
      [&](std::span<const double> s, std::span<const double>) { return integrand(s); }, domain,
      point, spec);
}

double deterministic_sum(std::size_t n, const std::function<double(std::size_t)>& term) {
  std::vector<double> terms(n);
  parallel_for(n, [&](std::size_t i) { terms[i] = term(i); });
  return pairwise_sum(terms);
}

unsigned worker_count() {
  if (const char* env = std::getenv("CSLINK_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v >= 1) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

struct ProbeSet {
  std::vector<std::size_t> chart;
  std::vector<std::vector<double>> params;
  std::vector<std::vector<double>> points;
};

ProbeSet probe(const ParamCycle& c, int probe_points, double clip_plane) {
  ProbeSet out;
  for (std::size_t ci = 0; ci < c.charts().size(); ++ci) {
    const ChartDomain& dom = c.chart(ci).domain;
    const int n = std::max(
        2, static_cast<int>(std::ceil(std::pow(static_cast<double>(probe_points), 1.0 / dom.dim))));
    std::size_t total = 1;
    for (int a = 0; a < dom.dim; ++a) total *= static_cast<std::size_t>(n);
    std::vector<int> idx(dom.dim, 0);
    for (std::size_t k = 0; k < total; ++k) {
      std::vector<double> p(dom.dim);
      for (int a = 0; a < dom.dim; ++a) {
        double lo = dom.lower_bound(a), hi = dom.upper_bound(a);
        if (dom.kind == ChartDomain::Kind::compactified_plane) {
          lo = -clip_plane;
          hi = clip_plane;
        }
        p[a] = dom.periodic(a) ? lo + idx[a] * (hi - lo) / n : lo + (idx[a] + 0.5) * (hi - lo) / n;
      }
      out.points.push_back(c.point(p, ci));
      out.params.push_back(std::move(p));
      out.chart.push_back(ci);
      for (int a = dom.dim - 1; a >= 0; --a) {
        if (++idx[a] < n) break;
        idx[a] = 0;
      }
    }
  }
  return out;
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

void keep_inside(const ChartDomain& dom, std::vector<double>& p) {
  for (int a = 0; a < dom.dim; ++a) {
    const double lo = dom.lower_bound(a), hi = dom.upper_bound(a);
    if (dom.periodic(a)) {
      p[a] = lo + std::fmod(std::fmod(p[a] - lo, hi - lo) + (hi - lo), hi - lo);
    } else {
      const double margin = 1e-9 * (hi - lo);
      p[a] = std::clamp(p[a], lo + margin, hi - margin);
    }
  }
}

// Backtracking gradient descent on |x(s) - y(t)|^2 from a starting pair.
double descend(const ParamCycle& c1, std::size_t ch1, std::vector<double> s, const ParamCycle& c2,
               std::size_t ch2, std::vector<double> t) {
  const int n = c1.dims().ambient_dim();
  const auto& d1 = c1.chart(ch1).domain;
  const auto& d2 = c2.chart(ch2).domain;
  double f = squared_distance(c1.point(s, ch1), c2.point(t, ch2));
  double step = 0.1;
  for (int iter = 0; iter < 200 && f > 0.0; ++iter) {
    const auto x = c1.point(s, ch1);
    const auto y = c2.point(t, ch2);
    const auto jx = c1.tangents(s, ch1);
    const auto jy = c2.tangents(t, ch2);
    std::vector<double> gs(d1.dim), gt(d2.dim);
    double gnorm2 = 0.0;
    for (int i = 0; i < d1.dim; ++i) {
      double g = 0.0;
      for (int k = 0; k < n; ++k) g += 2.0 * (x[k] - y[k]) * jx[static_cast<std::size_t>(i) * n + k];
      gs[i] = g;
      gnorm2 += g * g;
    }
    for (int j = 0; j < d2.dim; ++j) {
      double g = 0.0;
      for (int k = 0; k < n; ++k) g -= 2.0 * (x[k] - y[k]) * jy[static_cast<std::size_t>(j) * n + k];
      gt[j] = g;
      gnorm2 += g * g;
    }
    if (gnorm2 < 1e-30) break;
    const double gnorm = std::sqrt(gnorm2);
    bool improved = false;
    for (int tries = 0; tries < 40; ++tries) {
      auto s2 = s;
      auto t2 = t;
      for (int i = 0; i < d1.dim; ++i) s2[i] -= step * gs[i] / gnorm;
      for (int j = 0; j < d2.dim; ++j) t2[j] -= step * gt[j] / gnorm;
      keep_inside(d1, s2);
      keep_inside(d2, t2);
      const double f2 = squared_distance(c1.point(s2, ch1), c2.point(t2, ch2));
      if (f2 < f) {
        f = f2;
        s = std::move(s2);
        t = std::move(t2);
        step *= 1.5;
        improved = true;
        break;
      }
      step *= 0.5;
    }
    if (!improved || step < 1e-14) break;
  }
  return std::sqrt(f);
}

}  // namespace

double min_pair_distance(const ParamCycle& c1, const ParamCycle& c2, int probe_points) {
  if (probe_points < 100) throw InputError("min_pair_distance needs at least 100 probe points");
  if (c1.dims() != c2.dims()) throw InputError("cycles live in different dimensions");
  const double clip = 0.5 * kPi * (1.0 - 1e-3);
  const ProbeSet p1 = probe(c1, probe_points, clip);
  const ProbeSet p2 = probe(c2, probe_points, clip);

  struct Candidate {
    double d2;
    std::size_t i, j;
  };
  std::vector<Candidate> best;
  constexpr std::size_t kStarts = 4;
  for (std::size_t i = 0; i < p1.points.size(); ++i)
    for (std::size_t j = 0; j < p2.points.size(); ++j) {
      const double d2 = squared_distance(p1.points[i], p2.points[j]);
      if (best.size() < kStarts || d2 < best.back().d2) {
        if (best.size() == kStarts) best.pop_back();
        best.push_back({d2, i, j});
        std::sort(best.begin(), best.end(),
                  [](const Candidate& a, const Candidate& b) { return a.d2 < b.d2; });
      }
    }
  double result = std::sqrt(best.front().d2);
  for (const auto& cand : best) {
    const double d = descend(c1, p1.chart[cand.i], p1.params[cand.i], c2, p2.chart[cand.j],
                             p2.params[cand.j]);
    result = std::min(result, d);
  }
  return result;
}

double cycle_scale(const ParamCycle& c, int probe_points) {
  const ProbeSet p = probe(c, probe_points, 0.25 * kPi);
  double d2 = 0.0;
  for (std::size_t i = 0; i < p.points.size(); ++i)
    for (std::size_t j = i + 1; j < p.points.size(); ++j)
      d2 = std::max(d2, squared_distance(p.points[i], p.points[j]));
  return std::sqrt(d2);
}

IntegralEstimate cycle_volume(const ParamCycle& c, const QuadratureSpec& spec) {
  const auto n = static_cast<std::size_t>(c.dims().ambient_dim());
  const auto d = static_cast<std::size_t>(c.dims().cycle_dim());
  IntegralEstimate total;
  bool first = true;
  for (std::size_t ci = 0; ci < c.charts().size(); ++ci) {
    const auto est = integrate(
        [&](std::span<const double> s) {
          const auto t = c.tangents(s, ci);
          std::vector<double> gram(d * d);
          for (std::size_t a = 0; a < d; ++a)
            for (std::size_t b = 0; b < d; ++b)
              gram[a * d + b] = detail::dot(std::span(t).subspan(a * n, n),
                                            std::span(t).subspan(b * n, n));
          return std::sqrt(std::max(0.0, detail::lu_determinant(gram, d)));
        },
        c.chart(ci).domain, spec);
    total.value += est.value;
    total.error_estimate += est.error_estimate;
    total.evaluations += est.evaluations;
    total.converged = first ? est.converged : (total.converged && est.converged);
    first = false;
  }
  return total;
}

}  // namespace cslink
