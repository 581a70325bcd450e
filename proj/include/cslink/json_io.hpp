#pragma once

#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "cslink/csinvariant.hpp"
#include "cslink/cycles.hpp"
#include "cslink/kernel.hpp"
#include "cslink/linking.hpp"
#include "cslink/quadrature.hpp"

namespace cslink::json_io {

using nlohmann::json;

/// Parses a document, turning syntax errors into InputError carrying the
/// line and column of the failure.
json parse_document(const std::string& text);

/// {"kind": "circle" | "line" | "sphere" | "hyperplane" | "transformed", ...}
/// with an optional "reversed": true on any kind.
ParamCycle cycle_from_json(const json& j);

/// Overlays the fields present in j onto `base`.
QuadratureSpec quadrature_from_json(const json& j, QuadratureSpec base);
json to_json(const QuadratureSpec& spec);

json to_json(const IntegralEstimate& est);
/// {value, error, rounded, residual, evaluations, method, converged, ...}
json to_json(const LinkingResult& result);
json to_json(const KernelConstants& constants);

/// Integer or rational from a JSON number or a "p/q" string. Floating
/// numbers convert exactly (binary fractions stay fractions).
BigRational rational_from_json(const json& j);

/// "zero" or {"pushoff": {"epsilon": e, "normal": "radial" | [..]}}.
/// `cycle` is needed to build radial normals.
Framing framing_from_json(const json& j, const ParamCycle* cycle);

struct LinkDescriptor {
  int l = 0;
  Level level{1};
  ManifoldDescriptor manifold = ManifoldDescriptor::sphere();
  ChargeVector charges;
  LinkingMatrix linking;
  HomologyVector homology;
};

/// {"l", "k", "manifold": {"kind", "betti"}, "charges", "linking_matrix",
///  "homology", "framing"}. Quantization violations raise QuantizationError.
LinkDescriptor link_descriptor_from_json(const json& j);

json to_json(const ExpectationValue& value);

}  // namespace cslink::json_io
