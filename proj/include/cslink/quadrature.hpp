#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "cslink/cycles.hpp"

namespace cslink {

struct QuadratureSpec {
  enum class Method { tensor_trapezoid, monte_carlo };

  Method method = Method::tensor_trapezoid;
  int points_per_dim = 256;
  std::int64_t sample_budget = 10'000'000;
  int refinement_levels = 2;
  double target_rel_error = 1e-3;
  std::uint64_t seed = 0x5eed;

  /// Resolution defaults per l: 256 points/dim for l = 0, 24 for l = 1,
  /// and 12 beyond.
  static QuadratureSpec defaults_for(int l);

  /// Throws InputError on out-of-range fields.
  void validate() const;
};

std::string to_string(QuadratureSpec::Method m);
QuadratureSpec::Method method_from_string(const std::string& name);

struct IntegralEstimate {
  double value = 0.0;
  double error_estimate = 0.0;
  std::int64_t evaluations = 0;
  bool converged = false;
  /// Tensor method: value at each refinement level, coarsest first.
  std::vector<double> level_values;
};

/// Flattened tensor grid over one chart domain.
struct ProductGrid {
  int dim = 0;
  std::vector<double> params;   // size() * dim, node-major
  std::vector<double> weights;  // one per node

  std::size_t size() const noexcept { return weights.size(); }
  std::span<const double> node(std::size_t i) const {
    return std::span<const double>(params).subspan(i * dim, dim);
  }
};

/// Tensor grid with points_per_dim nodes per axis.
///
/// Torus axes use the uniform periodic trapezoid rule. Box and compactified
/// axes use midpoint nodes pushed through the periodizing map
/// u -> u - sin(2 pi u) / (2 pi), whose derivative vanishes to second order
/// at both ends; no node ever lands on the boundary. A zero-dimensional
/// domain yields a single node of weight 1.
ProductGrid tensor_grid(const ChartDomain& domain, int points_per_dim);

/// Pair integrand over the product of two chart domains.
class PairIntegrand {
 public:
  /// Integrand restricted to the nodes of a fixed tensor grid pair.
  class Bound {
   public:
    virtual ~Bound() = default;
    virtual double operator()(std::size_t i, std::size_t j) const = 0;
  };

  virtual ~PairIntegrand() = default;
  virtual double evaluate(std::span<const double> s, std::span<const double> t) const = 0;
  /// Default forwards to evaluate(); overrides may cache per-node data.
  virtual std::unique_ptr<Bound> bind(const ProductGrid& g1, const ProductGrid& g2) const;
};

using PairFunction = std::function<double(std::span<const double>, std::span<const double>)>;

/// Wraps a plain function as a PairIntegrand.
class FunctionPairIntegrand final : public PairIntegrand {
 public:
  explicit FunctionPairIntegrand(PairFunction f) : f_(std::move(f)) {}
  double evaluate(std::span<const double> s, std::span<const double> t) const override {
    return f_(s, t);
  }

 private:
  PairFunction f_;
};

IntegralEstimate integrate_product(const PairIntegrand& integrand, const ChartDomain& dom1,
                                   const ChartDomain& dom2, const QuadratureSpec& spec);

IntegralEstimate integrate_product(const PairFunction& integrand, const ChartDomain& dom1,
                                   const ChartDomain& dom2, const QuadratureSpec& spec);

/// Single-domain convenience wrapper.
IntegralEstimate integrate(const std::function<double(std::span<const double>)>& integrand,
                           const ChartDomain& domain, const QuadratureSpec& spec);

/// Sum of term(0..n-1), evaluated on the worker pool. Terms are combined by
/// fixed-order pairwise summation, so the result does not depend on the
/// number of threads.
double deterministic_sum(std::size_t n, const std::function<double(std::size_t)>& term);

/// Worker count: CSLINK_THREADS if set, else hardware concurrency.
unsigned worker_count();

/// Estimated minimum of |x(s) - y(t)| over both cycles: dense grid probe
/// followed by local descent from the best probe pair.
double min_pair_distance(const ParamCycle& c1, const ParamCycle& c2, int probe_points = 400);

/// Rough extent of a cycle (diameter of probe samples, unbounded charts
/// clipped to |theta| < pi/4).
double cycle_scale(const ParamCycle& c, int probe_points = 400);

/// (2l+1)-volume of a cycle: integral of sqrt(det Gram(tangents)).
IntegralEstimate cycle_volume(const ParamCycle& c, const QuadratureSpec& spec);

}  // namespace cslink
