#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cslink/cycles.hpp"
#include "cslink/kernel.hpp"
#include "cslink/quadrature.hpp"

namespace cslink {

inline constexpr double kDefaultRoundingTolerance = 1e-3;

struct LinkingOptions {
  double rounding_tolerance = kDefaultRoundingTolerance;
  double singularity_floor = kDefaultSingularityFloor;
  int probe_points = 400;
};

struct LinkingResult {
  IntegralEstimate raw;
  std::int64_t rounded = 0;
  double residual = 0.0;
  std::string method;
  /// True when residual <= the rounding tolerance used.
  bool accepted = false;
  /// Non-fatal diagnostics, e.g. cycles closer than 5% of their scale.
  std::vector<std::string> warnings;
};

/// Generalized Gauss integral through the determinant solid-angle kernel,
/// normalized by 1/S_{4l+2}.
///
/// Throws InputError for mismatched dimensions and SingularityError when the
/// cycles touch. Non-convergence is reported through raw.converged.
LinkingResult gauss_linking(const ParamCycle& c1, const ParamCycle& c2, const QuadratureSpec& spec,
                            const LinkingOptions& options = {});

/// Same linking number through the propagator kernel and the Levi-Civita
/// contraction path.
LinkingResult field_theory_linking(const ParamCycle& c1, const ParamCycle& c2,
                                   const QuadratureSpec& spec, const LinkingOptions& options = {});

/// Vector field along a cycle together with its parameter derivatives.
struct NormalField {
  /// param -> vector in R^{4l+3}
  MapFn value;
  /// param -> cycle_dim derivative vectors, laid out like tangents
  JacobianFn derivative;
};

/// Outward radial normal of a planar circle.
NormalField radial_normal(const ParamCycle& circle);
/// Constant normal field.
NormalField constant_normal(std::vector<double> v);

struct Framing {
  enum class Kind { zero_regularization, pushoff };

  Kind kind = Kind::zero_regularization;
  std::optional<NormalField> normal;
  double epsilon = 0.0;

  static Framing zero() { return {}; }
  static Framing push_off(NormalField n, double epsilon) {
    return Framing{Kind::pushoff, std::move(n), epsilon};
  }
};

/// s -> x(s) + epsilon * nu(s). Requires epsilon > 0 and a normal field that
/// is unit and orthogonal to every tangent within 1e-8 on a probe grid.
ParamCycle pushoff(const ParamCycle& c, const Framing& f);

/// Self-linking under a framing. Zero-regularization returns 0; a push-off
/// links c with its push-off at epsilon and epsilon/2 and throws
/// FramingInstabilityError if the two integers differ.
std::int64_t self_linking(const ParamCycle& c, const Framing& f, const QuadratureSpec& spec,
                          const LinkingOptions& options = {});

struct ZodiacusPoint {
  std::vector<double> s;
  std::vector<double> t;
  /// Normalized solid-angle element at the point.
  double value = 0.0;
};

/// Necessary-condition scan for boundary points of the zodiacus.
///
/// Evaluates D = det[J_x | J_y | e_xy] / (prod |J_x,i| prod |J_y,j|) on a
/// uniform grid with `grid` nodes per parameter. Reported are grid nodes with
/// |D| < tol, and zero crossings of D between neighbouring nodes refined by
/// bisection along the crossing axis.
std::vector<ZodiacusPoint> zodiacus_boundary_scan(const ParamCycle& c1, const ParamCycle& c2,
                                                  int grid, double tol);

/// Signed number of crossings of `other` through the flat disk spanned by a
/// planar circle (l = 0 only). Throws DegenerateConfigurationError on
/// tangential crossings or crossings on the circle itself.
int intersection_oracle_3d(const ParamCycle& disk_circle, const ParamCycle& other,
                           int samples = 4096);

}  // namespace cslink
