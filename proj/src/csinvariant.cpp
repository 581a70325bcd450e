#include "cslink/csinvariant.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <numbers>

#include "cslink/error.hpp"

namespace cslink {

namespace {

// Representative of a modulo |m| in [0, |m|).
BigInt floor_mod(const BigInt& a, const BigInt& m) {
  const BigInt mm = abs(m);
  BigInt r = a % mm;
  if (r < 0) r += mm;
  return r;
}

}  // namespace

Level::Level(BigInt k) : k_(std::move(k)) {
  if (k_ == 0)
    throw QuantizationError(
        "level must be a nonzero integer: k = 0 leaves no Chern-Simons action and the phase "
        "denominator 4k undefined");
}

Level validate_level(const BigRational& x) {
  if (denominator(x) != 1)
    throw QuantizationError("level must be an integer (level quantization k in Z), got " +
                            x.str());
  return Level(numerator(x));
}

ChargeVector validate_charges(const std::vector<BigRational>& values) {
  ChargeVector out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (denominator(values[i]) != 1)
      throw QuantizationError("charge " + std::to_string(i) +
                              " must be an integer (charge quantization), got " + values[i].str());
    out.q.push_back(numerator(values[i]));
  }
  return out;
}

LinkingMatrix::LinkingMatrix(std::size_t n, std::vector<BigInt> entries,
                             std::vector<FramingPolicy> diagonal_policy)
    : n_(n), entries_(std::move(entries)), policy_(std::move(diagonal_policy)) {
  if (entries_.size() != n_ * n_) throw InputError("linking matrix must be square");
  if (policy_.empty()) policy_.assign(n_, FramingPolicy::zero_regularization);
  if (policy_.size() != n_) throw InputError("one framing policy per loop is required");
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = i + 1; j < n_; ++j)
      if (entries_[i * n_ + j] != entries_[j * n_ + i])
        throw InputError("linking matrix must be symmetric (entry " + std::to_string(i) + "," +
                         std::to_string(j) + ")");
  for (std::size_t i = 0; i < n_; ++i)
    if (policy_[i] == FramingPolicy::zero_regularization && entries_[i * n_ + i] != 0)
      throw InputError("zero-regularization requires a vanishing self-linking on loop " +
                       std::to_string(i));
}

LinkingMatrix LinkingMatrix::zero(std::size_t n) {
  return LinkingMatrix(n, std::vector<BigInt>(n * n, BigInt(0)));
}

bool LinkingMatrix::zero_regularized() const {
  for (auto p : policy_)
    if (p != FramingPolicy::zero_regularization) return false;
  return true;
}

ManifoldDescriptor ManifoldDescriptor::sphere() { return {Kind::sphere_4l3, 0}; }
ManifoldDescriptor ManifoldDescriptor::product() { return {Kind::product_s2l1_s2l2, 1}; }

ManifoldDescriptor ManifoldDescriptor::generic(int betti) {
  if (betti < 0) throw InputError("Betti number must be non-negative");
  return {Kind::generic_torsion_free, betti};
}

ManifoldDescriptor ManifoldDescriptor::from_name(const std::string& kind,
                                                 std::optional<int> betti) {
  if (kind.find("torsion") != std::string::npos && kind != "generic_torsion_free")
    throw InputError("manifolds with torsion in homology are not supported");
  if (kind == "sphere" || kind == "sphere_4l3") {
    if (betti && *betti != 0) throw InputError("the sphere has Betti number 0");
    return sphere();
  }
  if (kind == "product" || kind == "product_s2l1_s2l2") {
    if (betti && *betti != 1) throw InputError("S^{2l+1} x S^{2l+2} has Betti number 1");
    return product();
  }
  if (kind == "generic" || kind == "generic_torsion_free") {
    if (!betti) throw InputError("generic manifold needs a Betti number");
    return generic(*betti);
  }
  throw InputError("unknown manifold kind '" + kind + "'");
}

std::string to_string(ManifoldDescriptor::Kind kind) {
  switch (kind) {
    case ManifoldDescriptor::Kind::sphere_4l3: return "sphere_4l3";
    case ManifoldDescriptor::Kind::product_s2l1_s2l2: return "product_s2l1_s2l2";
    case ManifoldDescriptor::Kind::generic_torsion_free: return "generic_torsion_free";
  }
  return "unknown";
}

bool HomologyVector::is_zero() const {
  for (const auto& x : v)
    if (x != 0) return false;
  return true;
}

RationalPhase::RationalPhase(BigInt num, BigInt den) {
  if (den == 0) throw InputError("phase denominator must be nonzero");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  num = floor_mod(num, den);
  const BigInt g = gcd(num, den);
  if (num == 0) {
    num_ = 0;
    den_ = 1;
    return;
  }
  num_ = num / g;
  den_ = den / g;
}

namespace {

// exp(2 i pi num/den) projected on (cos, sin); exact on the quarter lattice.
std::pair<double, double> unit_point(const BigInt& num, const BigInt& den) {
  if (den == 1) return {1.0, 0.0};
  if (den == 2) return {-1.0, 0.0};
  if (den == 4) return num == 1 ? std::pair{0.0, 1.0} : std::pair{0.0, -1.0};
  using Float = boost::multiprecision::cpp_bin_float_50;
  const Float x = Float(num) / Float(den);
  const double angle = static_cast<double>(x * 2 * boost::math::constants::pi<Float>());
  return {std::cos(angle), std::sin(angle)};
}

}  // namespace

double RationalPhase::real() const { return unit_point(num_, den_).first; }
double RationalPhase::imag() const { return unit_point(num_, den_).second; }

bool selection_rule(const HomologyVector& v, const Level& k) {
  const BigInt period = k.period();
  for (const auto& x : v.v)
    if (floor_mod(x, period) != 0) return false;
  return true;
}

ExpectationValue expectation_value(const ChargeVector& charges, const LinkingMatrix& L,
                                   const Level& k, const ManifoldDescriptor& m,
                                   const HomologyVector& v) {
  if (L.size() != charges.size())
    throw InputError("linking matrix is " + std::to_string(L.size()) + "x" +
                     std::to_string(L.size()) + " but there are " +
                     std::to_string(charges.size()) + " charges");
  if (v.size() != static_cast<std::size_t>(m.betti()))
    throw InputError("homology vector has " + std::to_string(v.size()) +
                     " components but the manifold has Betti number " +
                     std::to_string(m.betti()));
  if (!selection_rule(v, k)) return ExpectationValue::zero();

  BigInt form = 0;
  for (std::size_t i = 0; i < charges.size(); ++i)
    for (std::size_t j = 0; j < charges.size(); ++j) form += charges.q[i] * L(i, j) * charges.q[j];

  ExpectationValue out = ExpectationValue::of(RationalPhase(-form, 4 * k.value()));
  out.nonzero_homology_warning = !v.is_zero();
  return out;
}

ChargeVector nilpotency_reduce(const ChargeVector& charges, const Level& k) {
  const BigInt period = k.period();
  ChargeVector out;
  out.q.reserve(charges.size());
  for (const auto& q : charges.q) {
    BigInt r = floor_mod(q, period);
    if (k.value() < 0 && r != 0) r -= period;
    out.q.push_back(std::move(r));
  }
  return out;
}

bool nilpotency_invariance_check(const ChargeVector& charges, const LinkingMatrix& L,
                                 const Level& k, const ManifoldDescriptor& m,
                                 const HomologyVector& v) {
  if (!L.zero_regularized())
    throw InputError("2k-nilpotency holds for zero-regularized linking matrices only");
  return expectation_value(charges, L, k, m, v) ==
         expectation_value(nilpotency_reduce(charges, k), L, k, m, v);
}

GeometricLink link_from_geometry(const std::vector<ParamCycle>& cycles,
                                 const ChargeVector& charges, const std::vector<Framing>& framings,
                                 const QuadratureSpec& spec, const LinkingOptions& options) {
  const std::size_t n = cycles.size();
  if (charges.size() != n) throw InputError("one charge per cycle is required");
  if (framings.size() != n) throw InputError("one framing per cycle is required");

  std::vector<BigInt> entries(n * n, BigInt(0));
  std::vector<FramingPolicy> policy(n);
  for (std::size_t i = 0; i < n; ++i) {
    policy[i] = framings[i].kind == Framing::Kind::zero_regularization
                    ? FramingPolicy::zero_regularization
                    : FramingPolicy::pushoff;
    entries[i * n + i] = self_linking(cycles[i], framings[i], spec, options);
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto r = gauss_linking(cycles[i], cycles[j], spec, options);
      if (!r.accepted)
        throw ConvergenceError("linking of cycles " + std::to_string(i) + " and " +
                               std::to_string(j) + " is not integral (residual " +
                               std::to_string(r.residual) + ")");
      entries[i * n + j] = r.rounded;
      entries[j * n + i] = r.rounded;
    }
  }
  return GeometricLink{LinkingMatrix(n, std::move(entries), std::move(policy)), HomologyVector{}};
}

GeometricLink link_from_geometry(const std::vector<ParamCycle>& cycles,
                                 const ChargeVector& charges, const Framing& framing,
                                 const QuadratureSpec& spec, const LinkingOptions& options) {
  return link_from_geometry(cycles, charges, std::vector<Framing>(cycles.size(), framing), spec,
                            options);
}

}  // namespace cslink
