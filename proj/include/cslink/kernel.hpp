#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cslink/cycles.hpp"
#include "cslink/quadrature.hpp"

namespace cslink {

inline constexpr double kDefaultSingularityFloor = 1e-12;

/// Surface of the unit n-sphere, 2 pi^{(n+1)/2} / Gamma((n+1)/2).
double sphere_surface(int n);

/// Prefactor Gamma((4l+3)/2) / (2 pi^{(4l+3)/2}) of the two-point function
/// of the (2l+1)-form gauge field. Equals 1/(4 pi) for l = 0.
double propagator_constant(int l);

struct KernelConstants {
  int l = 0;
  /// S_{4l+2}: total solid angle seen from a point of R^{4l+3}.
  double total_solid_angle = 0.0;
  /// N_l for the component form with the derivative of |x-y|^{-(4l+1)}.
  double linking_normalization = 0.0;
  double propagator = 0.0;
};

KernelConstants normalization(int l);

/// det[tangents_x | tangents_y | e] for a (4l+3)-dimensional ambient space.
///
/// Tangents are stored column after column. Throws InputError on size
/// mismatch or when |e| differs from 1 by more than 1e-9.
double solid_angle_element(std::span<const double> tangents_x,
                           std::span<const double> tangents_y, std::span<const double> e);

/// Levi-Civita contraction eps_{mu nu rho} dx^mu dy^nu v^rho of the pulled
/// back wedge products, divided by ((2l+1)!)^2.
///
/// Evaluated by a generalized Laplace expansion: every split of the row
/// indices into a (2l+1)-set for the x tangents, a (2l+1)-set for the y
/// tangents and one leftover row contributes sign * minor_x * minor_y * v_r.
/// The minors are computed by cofactor recursion, never by LU.
class LeviCivitaContraction {
 public:
  explicit LeviCivitaContraction(int l);

  int l() const noexcept { return l_; }
  std::size_t subset_count() const noexcept { return subsets_.size(); }

  /// All (2l+1)x(2l+1) row minors of a tangent frame, indexed by subset.
  void minors(std::span<const double> tangents, std::span<double> out) const;

  /// Contraction from precomputed minors.
  double contract(std::span<const double> minors_x, std::span<const double> minors_y,
                  std::span<const double> v) const;

  double operator()(std::span<const double> tangents_x, std::span<const double> tangents_y,
                    std::span<const double> v) const;

 private:
  struct Term {
    std::size_t x_subset;
    std::size_t y_subset;
    int leftover_row;
    double sign;
  };

  int l_;
  int p_;  // 2l+1
  int n_;  // 4l+3
  std::vector<std::vector<int>> subsets_;
  std::vector<Term> terms_;
};

/// Point and tangent frame of a cycle at one parameter value.
struct CycleSample {
  std::vector<double> point;
  std::vector<double> tangents;

  void evaluate(const ParamCycle& c, std::span<const double> param, std::size_t chart = 0);
};

/// orientation * det[J_x | J_y | e_xy] / |x-y|^{4l+2}; the 1/S_{4l+2}
/// prefactor is left to the caller. Throws SingularityError when
/// |x-y| < floor. `scratch` must hold (4l+3)^2 doubles.
double gauss_kernel(const CycleSample& x, const CycleSample& y, int orientation, double floor,
                    std::span<double> scratch);

/// orientation * C_l * contraction(J_x, J_y, x-y) / |x-y|^{4l+3}, with C_l the
/// propagator constant. Uses the Levi-Civita path only.
double propagator_kernel(const CycleSample& x, const CycleSample& y, int orientation,
                         const LeviCivitaContraction& eps, double floor);

double gauss_integrand(const ParamCycle& c1, const ParamCycle& c2, std::span<const double> s,
                       std::span<const double> t, double floor = kDefaultSingularityFloor);

double propagator_integrand(const ParamCycle& c1, const ParamCycle& c2,
                            std::span<const double> s, std::span<const double> t,
                            double floor = kDefaultSingularityFloor);

struct RadialCheck {
  double numeric = 0.0;
  double exact = 0.0;
};

/// int_0^inf y^{2l} / (1+y^2)^{(4l+3)/2} dy by quadrature on a compactified
/// chart, next to Gamma(l+1/2) Gamma(l+1) / (2 Gamma(2l+3/2)).
RadialCheck radial_integral_check(int l, const QuadratureSpec& spec);

}  // namespace cslink
