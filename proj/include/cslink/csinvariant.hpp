#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cslink/cycles.hpp"
#include "cslink/linking.hpp"
#include "cslink/quadrature.hpp"

namespace cslink {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

/// Chern-Simons level: a nonzero integer.
class Level {
 public:
  /// Throws QuantizationError for k = 0.
  explicit Level(BigInt k);

  const BigInt& value() const noexcept { return k_; }
  /// |2k|, the modulus of the charge and homology lattices.
  BigInt period() const { return 2 * abs(k_); }

  friend bool operator==(const Level&, const Level&) = default;

 private:
  BigInt k_;
};

/// Accepts integer levels; rejects fractions and zero with QuantizationError.
Level validate_level(const BigRational& x);

struct ChargeVector {
  std::vector<BigInt> q;

  std::size_t size() const noexcept { return q.size(); }
  friend bool operator==(const ChargeVector&, const ChargeVector&) = default;
};

/// Rejects non-integral charges with QuantizationError.
ChargeVector validate_charges(const std::vector<BigRational>& values);

enum class FramingPolicy { zero_regularization, pushoff };

/// Symmetric integer linking matrix. The diagonal holds self-linkings, which
/// must vanish for loops under zero-regularization.
class LinkingMatrix {
 public:
  LinkingMatrix() = default;
  /// Row-major entries. Throws InputError if not square, not symmetric, or
  /// if a zero-regularized diagonal entry is nonzero.
  LinkingMatrix(std::size_t n, std::vector<BigInt> entries,
                std::vector<FramingPolicy> diagonal_policy = {});

  static LinkingMatrix zero(std::size_t n);

  std::size_t size() const noexcept { return n_; }
  const BigInt& operator()(std::size_t i, std::size_t j) const { return entries_[i * n_ + j]; }
  FramingPolicy policy(std::size_t i) const { return policy_.at(i); }
  bool zero_regularized() const;

  friend bool operator==(const LinkingMatrix&, const LinkingMatrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<BigInt> entries_;
  std::vector<FramingPolicy> policy_;
};

/// Closed, torsion-free (4l+3)-manifold.
class ManifoldDescriptor {
 public:
  enum class Kind { sphere_4l3, product_s2l1_s2l2, generic_torsion_free };

  static ManifoldDescriptor sphere();
  static ManifoldDescriptor product();
  static ManifoldDescriptor generic(int betti);
  /// Builds from a kind name and Betti number. "torsion" kinds are rejected.
  static ManifoldDescriptor from_name(const std::string& kind, std::optional<int> betti);

  Kind kind() const noexcept { return kind_; }
  int betti() const noexcept { return betti_; }

 private:
  ManifoldDescriptor(Kind kind, int betti) : kind_(kind), betti_(betti) {}

  Kind kind_;
  int betti_;
};

std::string to_string(ManifoldDescriptor::Kind kind);

struct HomologyVector {
  std::vector<BigInt> v;

  std::size_t size() const noexcept { return v.size(); }
  bool is_zero() const;
};

/// Exact element of Q/Z, stored as num/den in lowest terms with
/// 0 <= num/den < 1.
class RationalPhase {
 public:
  RationalPhase() : num_(0), den_(1) {}
  /// Reduces num/den modulo 1. Throws InputError for den = 0.
  RationalPhase(BigInt num, BigInt den);

  const BigInt& numerator() const noexcept { return num_; }
  const BigInt& denominator() const noexcept { return den_; }

  /// Display-only projections of exp(2 i pi phase).
  double real() const;
  double imag() const;

  friend bool operator==(const RationalPhase&, const RationalPhase&) = default;

 private:
  BigInt num_;
  BigInt den_;
};

/// Either exactly zero or exp(2 i pi phase).
struct ExpectationValue {
  std::optional<RationalPhase> phase;
  /// Set when a nonzero homology class passes the selection rule on a
  /// non-spherical manifold; the phase is then computed as for v = 0.
  bool nonzero_homology_warning = false;

  bool is_zero() const noexcept { return !phase.has_value(); }
  static ExpectationValue zero() { return {}; }
  static ExpectationValue of(RationalPhase p) { return {std::move(p), false}; }

  friend bool operator==(const ExpectationValue& a, const ExpectationValue& b) {
    return a.phase == b.phase;
  }
};

/// True iff every component of v is divisible by 2k.
bool selection_rule(const HomologyVector& v, const Level& k);

/// Wilson-loop expectation value of an abelian Chern-Simons theory at level
/// k: Zero unless the selection rule holds, otherwise
/// exp(2 i pi * (-(q^T L q) / (4k) mod 1)). Throws InputError on size
/// mismatches.
ExpectationValue expectation_value(const ChargeVector& charges, const LinkingMatrix& L,
                                   const Level& k, const ManifoldDescriptor& m,
                                   const HomologyVector& v);

/// Reduces every charge into [0, 2k) for k > 0, (-2|k|, 0] for k < 0.
ChargeVector nilpotency_reduce(const ChargeVector& charges, const Level& k);

/// expectation_value(q) == expectation_value(nilpotency_reduce(q)).
/// Requires a zero-regularized linking matrix.
bool nilpotency_invariance_check(const ChargeVector& charges, const LinkingMatrix& L,
                                 const Level& k, const ManifoldDescriptor& m,
                                 const HomologyVector& v);

struct GeometricLink {
  LinkingMatrix linking;
  HomologyVector homology;
};

/// Assembles Wilson-loop data from embedded cycles in R^{4l+3}:
/// off-diagonal entries by gauss_linking, diagonal entries by self_linking
/// under the framing of each cycle, and an empty homology vector (every
/// cycle bounds in R^{4l+3}). Throws ConvergenceError when a linking
/// integral does not round to an integer within tolerance.
GeometricLink link_from_geometry(const std::vector<ParamCycle>& cycles,
                                 const ChargeVector& charges, const std::vector<Framing>& framings,
                                 const QuadratureSpec& spec, const LinkingOptions& options = {});

/// Same framing for every cycle.
GeometricLink link_from_geometry(const std::vector<ParamCycle>& cycles,
                                 const ChargeVector& charges, const Framing& framing,
                                 const QuadratureSpec& spec, const LinkingOptions& options = {});

}  // namespace cslink
