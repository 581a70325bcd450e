#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace cslink {

/// Dimension bookkeeping for a (2l+1)-cycle embedded in R^{4l+3}.
struct Dimensions {
  int l = 0;

  constexpr int cycle_dim() const noexcept { return 2 * l + 1; }
  constexpr int ambient_dim() const noexcept { return 4 * l + 3; }
  /// Only l <= 2 is exercised by the test suite.
  constexpr bool untested() const noexcept { return l > 2; }

  /// Throws InputError for negative l.
  static Dimensions of(int l);

  friend bool operator==(const Dimensions&, const Dimensions&) = default;
};

/// Parameter domain of one chart.
///
/// torus: every coordinate periodic on [0, 2pi).
/// box: coordinate i ranges over the open interval (lower[i], upper[i]).
/// compactified_plane: coordinate i is an angle in (-pi/2, pi/2) standing
///   for y_i = tan(theta_i), so the chart covers all of R^d.
struct ChartDomain {
  enum class Kind { torus, box, compactified_plane };

  Kind kind = Kind::torus;
  int dim = 0;
  std::vector<double> lower;
  std::vector<double> upper;

  static ChartDomain torus(int d);
  static ChartDomain box(std::vector<double> lower, std::vector<double> upper);
  static ChartDomain compactified_plane(int d);

  double lower_bound(int i) const;
  double upper_bound(int i) const;
  bool periodic(int /*axis*/) const noexcept { return kind == Kind::torus; }
  /// Lebesgue measure of the parameter box.
  double volume() const;
};

/// Point evaluator: parameters (dim) -> point (ambient_dim).
using MapFn = std::function<void(std::span<const double>, std::span<double>)>;
/// Tangent evaluator: parameters -> cycle_dim tangent vectors, stored
/// column after column (tangent i occupies [i*ambient, (i+1)*ambient)).
/// Derivatives are taken with respect to the chart parameters, so chart
/// Jacobians such as d tan(theta)/d theta are already folded in.
using JacobianFn = std::function<void(std::span<const double>, std::span<double>)>;

struct Chart {
  ChartDomain domain;
  MapFn map;
  JacobianFn jacobian;
};

/// Analytic spanning-disk data carried by planar circles.
struct PlanarCircle {
  std::vector<double> center;
  std::vector<double> normal;  // unit, right-handed w.r.t. the traversal
  double radius = 0.0;
};

/// A smooth closed (2l+1)-cycle in R^{4l+3}.
///
/// When several charts are present they are assumed to partition the cycle
/// up to measure zero. Evaluators are pure and safe to call concurrently.
class ParamCycle {
 public:
  ParamCycle(Dimensions dims, std::vector<Chart> charts, std::string label);

  const Dimensions& dims() const noexcept { return dims_; }
  const std::vector<Chart>& charts() const noexcept { return charts_; }
  const Chart& chart(std::size_t i = 0) const { return charts_.at(i); }
  int orientation() const noexcept { return orientation_; }
  const std::string& label() const noexcept { return label_; }

  const std::optional<PlanarCircle>& planar_circle() const noexcept { return circle_; }
  void set_planar_circle(PlanarCircle c) { circle_ = std::move(c); }

  std::vector<double> point(std::span<const double> param, std::size_t chart = 0) const;
  std::vector<double> tangents(std::span<const double> param, std::size_t chart = 0) const;

  /// Returns a copy carrying the opposite orientation flag.
  ParamCycle reversed() const;

 private:
  Dimensions dims_;
  std::vector<Chart> charts_;
  int orientation_ = 1;
  std::string label_;
  std::optional<PlanarCircle> circle_;
};

/// Circle of the given radius in the plane z = offset[2], centred at
/// (offset[0], offset[1]), traversed counter-clockwise.
ParamCycle unit_circle_xy(double radius, std::array<double, 3> offset = {0.0, 0.0, 0.0});

/// The line {(0, y_offset, z) : z in R}, oriented towards +z.
ParamCycle vertical_line_z(double y_offset);

/// Round (2l+1)-sphere of the given radius in the first 2l+2 coordinates,
/// parametrized by hyperspherical angles.
ParamCycle round_sphere(int l, double radius);

/// The (2l+1)-plane spanned by the last 2l+1 coordinate axes.
ParamCycle orthogonal_hyperplane(int l);

/// Rotation plus translation in R^n. The rotation is row-major n x n.
struct Isometry {
  std::vector<double> rotation;
  std::vector<double> translation;

  static Isometry identity(int n);
  static Isometry translation_only(std::vector<double> shift);
};

/// x -> scale * R x + b. Throws InputError unless R is a proper rotation
/// (Gram residual <= 1e-10, det = +1) and scale > 0.
ParamCycle transform(const ParamCycle& c, const Isometry& iso, double scale = 1.0);

ParamCycle reverse_orientation(const ParamCycle& c);

}  // namespace cslink
