#include "cslink/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "cslink/error.hpp"

namespace cslink::json_io {

namespace {

// Display precision: 15 significant digits.
double display(double x) {
  if (!std::isfinite(x)) return x;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.15g", x);
  return std::strtod(buf, nullptr);
}

double number(const json& j, const char* key) {
  if (!j.contains(key)) throw InputError(std::string("missing field '") + key + "'");
  if (!j.at(key).is_number()) throw InputError(std::string("field '") + key + "' must be a number");
  return j.at(key).get<double>();
}

double number_or(const json& j, const char* key, double fallback) {
  return j.contains(key) ? number(j, key) : fallback;
}

int integer(const json& j, const char* key) {
  if (!j.contains(key)) throw InputError(std::string("missing field '") + key + "'");
  if (!j.at(key).is_number_integer())
    throw InputError(std::string("field '") + key + "' must be an integer");
  return j.at(key).get<int>();
}

std::vector<double> vector_of(const json& j, const char* what) {
  if (!j.is_array()) throw InputError(std::string(what) + " must be an array");
  std::vector<double> out;
  for (const auto& x : j) {
    if (!x.is_number()) throw InputError(std::string(what) + " entries must be numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

BigInt integer_from_json(const json& j, const std::string& what) {
  const BigRational r = rational_from_json(j);
  if (denominator(r) != 1)
    throw QuantizationError(what + " must be an integer, got " + r.str());
  return numerator(r);
}

}  // namespace

json parse_document(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // Recover line/column from the byte offset.
    std::size_t line = 1, column = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw InputError("malformed JSON at line " + std::to_string(line) + ", column " +
                     std::to_string(column) + ": " + e.what());
  }
}

ParamCycle cycle_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
    throw InputError("cycle description needs a string field 'kind'");
  const std::string kind = j.at("kind").get<std::string>();

  auto build = [&]() -> ParamCycle {
    if (kind == "circle") {
      std::array<double, 3> center{0.0, 0.0, 0.0};
      if (j.contains("center")) {
        const auto c = vector_of(j.at("center"), "center");
        if (c.size() != 3) throw InputError("circle center must have 3 coordinates");
        center = {c[0], c[1], c[2]};
      }
      return unit_circle_xy(number_or(j, "radius", 1.0), center);
    }
    if (kind == "line") return vertical_line_z(number_or(j, "y_offset", 0.0));
    if (kind == "sphere") return round_sphere(integer(j, "l"), number_or(j, "radius", 1.0));
    if (kind == "hyperplane") return orthogonal_hyperplane(integer(j, "l"));
    if (kind == "transformed") {
      if (!j.contains("base")) throw InputError("transformed cycle needs a 'base'");
      const ParamCycle base = cycle_from_json(j.at("base"));
      const int n = base.dims().ambient_dim();
      Isometry iso = Isometry::identity(n);
      if (j.contains("rotation")) {
        const auto& rows = j.at("rotation");
        if (!rows.is_array() || rows.size() != static_cast<std::size_t>(n))
          throw InputError("rotation must be a " + std::to_string(n) + "x" + std::to_string(n) +
                           " matrix");
        iso.rotation.clear();
        for (const auto& row : rows) {
          const auto r = vector_of(row, "rotation row");
          if (r.size() != static_cast<std::size_t>(n))
            throw InputError("rotation rows must have " + std::to_string(n) + " entries");
          iso.rotation.insert(iso.rotation.end(), r.begin(), r.end());
        }
      }
      if (j.contains("translation")) iso.translation = vector_of(j.at("translation"), "translation");
      return transform(base, iso, number_or(j, "scale", 1.0));
    }
    throw InputError("unknown cycle kind '" + kind + "'");
  };

  ParamCycle c = build();
  if (j.contains("reversed") && j.at("reversed").is_boolean() && j.at("reversed").get<bool>())
    c = reverse_orientation(c);
  return c;
}

QuadratureSpec quadrature_from_json(const json& j, QuadratureSpec base) {
  if (j.is_null()) return base;
  if (!j.is_object()) throw InputError("quadrature must be an object");
  if (j.contains("method")) base.method = method_from_string(j.at("method").get<std::string>());
  if (j.contains("points_per_dim")) base.points_per_dim = integer(j, "points_per_dim");
  if (j.contains("sample_budget")) {
    if (!j.at("sample_budget").is_number_integer())
      throw InputError("sample_budget must be an integer");
    base.sample_budget = j.at("sample_budget").get<std::int64_t>();
  }
  if (j.contains("refinement_levels")) base.refinement_levels = integer(j, "refinement_levels");
  if (j.contains("target_rel_error")) base.target_rel_error = number(j, "target_rel_error");
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_integer()) throw InputError("seed must be an integer");
    base.seed = j.at("seed").get<std::uint64_t>();
  }
  base.validate();
  return base;
}

json to_json(const QuadratureSpec& spec) {
  return json{{"method", to_string(spec.method)},
              {"points_per_dim", spec.points_per_dim},
              {"sample_budget", spec.sample_budget},
              {"refinement_levels", spec.refinement_levels},
              {"target_rel_error", spec.target_rel_error},
              {"seed", spec.seed}};
}

json to_json(const IntegralEstimate& est) {
  json levels = json::array();
  for (double v : est.level_values) levels.push_back(display(v));
  return json{{"value", display(est.value)},
              {"error", display(est.error_estimate)},
              {"evaluations", est.evaluations},
              {"converged", est.converged},
              {"level_values", levels}};
}

json to_json(const LinkingResult& result) {
  json j{{"value", display(result.raw.value)},
         {"error", display(result.raw.error_estimate)},
         {"rounded", result.rounded},
         {"residual", display(result.residual)},
         {"evaluations", result.raw.evaluations},
         {"method", result.method},
         {"converged", result.raw.converged},
         {"accepted", result.accepted}};
  if (!result.warnings.empty()) j["warnings"] = result.warnings;
  return j;
}

json to_json(const KernelConstants& c) {
  return json{{"l", c.l},
              {"S_4l2", display(c.total_solid_angle)},
              {"N_l", display(c.linking_normalization)},
              {"propagator", display(c.propagator)}};
}

BigRational rational_from_json(const json& j) {
  if (j.is_number_integer()) {
    if (j.is_number_unsigned()) return BigRational(BigInt(j.get<std::uint64_t>()));
    return BigRational(BigInt(j.get<std::int64_t>()));
  }
  if (j.is_number_float()) {
    const double x = j.get<double>();
    if (!std::isfinite(x)) throw InputError("number must be finite");
    int exp = 0;
    const double mant = std::frexp(x, &exp);
    // x = m * 2^(exp - 53) with m an exact 53-bit integer.
    const auto m = static_cast<std::int64_t>(std::ldexp(mant, 53));
    BigRational r{BigInt(m)};
    const int shift = exp - 53;
    BigInt p2 = BigInt(1) << std::abs(shift);
    return shift >= 0 ? r * BigRational(p2) : r / BigRational(p2);
  }
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    try {
      const auto slash = s.find('/');
      if (slash == std::string::npos) return BigRational(BigInt(s));
      const BigInt den(s.substr(slash + 1));
      if (den == 0) throw InputError("zero denominator in '" + s + "'");
      return BigRational(BigInt(s.substr(0, slash)), den);
    } catch (const std::runtime_error&) {
      throw InputError("cannot read '" + s + "' as a rational number");
    }
  }
  throw InputError("expected a number or a \"p/q\" string");
}

Framing framing_from_json(const json& j, const ParamCycle* cycle) {
  if (j.is_null() || (j.is_string() && j.get<std::string>() == "zero")) return Framing::zero();
  if (!j.is_object() || !j.contains("pushoff"))
    throw InputError("framing must be \"zero\" or {\"pushoff\": {...}}");
  const json& p = j.at("pushoff");
  const double eps = number(p, "epsilon");
  if (!cycle) {
    Framing f;
    f.kind = Framing::Kind::pushoff;
    f.epsilon = eps;
    return f;
  }
  const json normal = p.contains("normal") ? p.at("normal") : json("radial");
  if (normal.is_string() && normal.get<std::string>() == "radial")
    return Framing::push_off(radial_normal(*cycle), eps);
  const auto v = vector_of(normal, "normal");
  if (v.size() != static_cast<std::size_t>(cycle->dims().ambient_dim()))
    throw InputError("normal vector has the wrong dimension");
  return Framing::push_off(constant_normal(v), eps);
}

LinkDescriptor link_descriptor_from_json(const json& j) {
  if (!j.is_object()) throw InputError("link descriptor must be an object");
  LinkDescriptor d;
  d.l = j.contains("l") ? integer(j, "l") : 0;
  if (d.l < 0) throw InputError("l must be non-negative");
  if (!j.contains("k")) throw InputError("missing field 'k'");
  d.level = validate_level(rational_from_json(j.at("k")));

  if (j.contains("manifold")) {
    const json& m = j.at("manifold");
    if (m.is_string()) {
      d.manifold = ManifoldDescriptor::from_name(m.get<std::string>(), std::nullopt);
    } else {
      if (!m.contains("kind")) throw InputError("manifold needs a 'kind'");
      std::optional<int> betti;
      if (m.contains("betti")) betti = integer(m, "betti");
      d.manifold = ManifoldDescriptor::from_name(m.at("kind").get<std::string>(), betti);
    }
  }

  if (!j.contains("charges") || !j.at("charges").is_array())
    throw InputError("missing array 'charges'");
  std::vector<BigRational> charges;
  for (const auto& q : j.at("charges")) charges.push_back(rational_from_json(q));
  d.charges = validate_charges(charges);
  const std::size_t n = d.charges.size();

  FramingPolicy policy = FramingPolicy::zero_regularization;
  if (j.contains("framing")) {
    const Framing f = framing_from_json(j.at("framing"), nullptr);
    if (f.kind == Framing::Kind::pushoff) policy = FramingPolicy::pushoff;
  }

  std::vector<BigInt> entries;
  if (j.contains("linking_matrix")) {
    const json& rows = j.at("linking_matrix");
    if (!rows.is_array() || rows.size() != n)
      throw InputError("linking_matrix must have one row per charge");
    for (const auto& row : rows) {
      if (!row.is_array() || row.size() != n)
        throw InputError("linking_matrix must be square with one column per charge");
      for (const auto& x : row) entries.push_back(integer_from_json(x, "linking number"));
    }
  } else {
    entries.assign(n * n, BigInt(0));
  }
  d.linking = LinkingMatrix(n, std::move(entries), std::vector<FramingPolicy>(n, policy));

  if (j.contains("homology")) {
    if (!j.at("homology").is_array()) throw InputError("homology must be an array");
    for (const auto& x : j.at("homology"))
      d.homology.v.push_back(integer_from_json(x, "homology component"));
  }
  if (d.homology.size() != static_cast<std::size_t>(d.manifold.betti()))
    throw InputError("homology vector has " + std::to_string(d.homology.size()) +
                     " components but the manifold has Betti number " +
                     std::to_string(d.manifold.betti()));
  return d;
}

json to_json(const ExpectationValue& value) {
  if (value.is_zero()) return json{{"result", "zero"}};
  const auto& p = *value.phase;
  json j{{"result", "phase"},
         {"phase", {{"num", p.numerator().str()}, {"den", p.denominator().str()}}},
         {"value_re", display(p.real())},
         {"value_im", display(p.imag())}};
  // Small rationals print as numbers.
  if (p.denominator() <= std::numeric_limits<std::int64_t>::max()) {
    j["phase"]["num"] = static_cast<std::int64_t>(p.numerator());
    j["phase"]["den"] = static_cast<std::int64_t>(p.denominator());
  }
  if (value.nonzero_homology_warning)
    j["warning"] =
        "nonzero homology class divisible by 2k: phase computed as for a trivial class";
  return j;
}

}  // namespace cslink::json_io
