#include <doctest.h>

#include <string>

#include "cslink/error.hpp"
#include "cslink/json_io.hpp"

using namespace cslink;
using json_io::json;

TEST_CASE("syntax errors carry a position") {
  try {
    json_io::parse_document("{\n  \"a\": 1,\n  \"b\": ]\n}");
    FAIL("expected a parse error");
  } catch (const InputError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("line 3") != std::string::npos);
    CHECK(msg.find("column 8") != std::string::npos);
  }
  CHECK(json_io::parse_document("[1, 2]").size() == 2);
}

TEST_CASE("cycles from JSON") {
  const auto circle = json_io::cycle_from_json(
      json::parse(R"({"kind": "circle", "radius": 2.0, "center": [1, 0, 0]})"));
  const double s = 0.0;
  CHECK(circle.point({&s, 1})[0] == doctest::Approx(3.0));
  CHECK(json_io::cycle_from_json(json::parse(R"({"kind": "line", "y_offset": 0.5})")).point({&s, 1})[1] ==
        0.5);
  CHECK(json_io::cycle_from_json(json::parse(R"({"kind": "sphere", "l": 1})")).dims().l == 1);
  CHECK(json_io::cycle_from_json(json::parse(R"({"kind": "hyperplane", "l": 2})")).dims().ambient_dim() ==
        11);
  const auto rev = json_io::cycle_from_json(json::parse(R"({"kind": "line", "reversed": true})"));
  CHECK(rev.orientation() == -1);

  const auto moved = json_io::cycle_from_json(json::parse(R"({
    "kind": "transformed",
    "base": {"kind": "circle"},
    "rotation": [[1, 0, 0], [0, 0, -1], [0, 1, 0]],
    "translation": [1, 0, 0],
    "scale": 2
  })"));
  const double quarter = 1.5707963267948966;
  const auto p = moved.point({&quarter, 1});
  CHECK(p[0] == doctest::Approx(1.0));
  CHECK(std::abs(p[1]) < 1e-15);
  CHECK(p[2] == doctest::Approx(2.0));

  CHECK_THROWS_AS(json_io::cycle_from_json(json::parse(R"({"kind": "knot"})")), InputError);
  CHECK_THROWS_AS(json_io::cycle_from_json(json::parse(R"({"radius": 1})")), InputError);
  CHECK_THROWS_AS(json_io::cycle_from_json(json::parse(R"({"kind": "circle", "radius": "big"})")),
                  InputError);
  CHECK_THROWS_AS(json_io::cycle_from_json(json::parse(
                      R"({"kind": "transformed", "base": {"kind": "circle"}, "rotation": [[2,0,0],[0,1,0],[0,0,1]]})")),
                  InputError);
}

TEST_CASE("quadrature spec round trip") {
  QuadratureSpec spec;
  spec.method = QuadratureSpec::Method::monte_carlo;
  spec.sample_budget = 123456;
  spec.seed = 99;
  spec.target_rel_error = 1e-4;
  const auto back = json_io::quadrature_from_json(json_io::to_json(spec), QuadratureSpec{});
  CHECK(back.method == spec.method);
  CHECK(back.sample_budget == spec.sample_budget);
  CHECK(back.seed == spec.seed);
  CHECK(back.target_rel_error == spec.target_rel_error);
  const auto partial = json_io::quadrature_from_json(json::parse(R"({"points_per_dim": 64})"),
                                                     QuadratureSpec::defaults_for(1));
  CHECK(partial.points_per_dim == 64);
  CHECK(partial.method == QuadratureSpec::Method::tensor_trapezoid);
}

TEST_CASE("linking results serialize with the documented fields") {
  LinkingResult r;
  r.raw.value = 0.99999999999999978;
  r.raw.error_estimate = 1e-12;
  r.raw.evaluations = 81920;
  r.raw.converged = true;
  r.rounded = 1;
  r.residual = 2.2e-16;
  r.method = "gauss";
  r.accepted = true;
  const auto j = json_io::to_json(r);
  for (const char* key : {"value", "error", "rounded", "residual", "evaluations", "method"})
    CHECK(j.contains(key));
  CHECK(j.at("value").get<double>() == 1.0);  // 15 significant digits
  CHECK(j.at("rounded") == 1);
}

TEST_CASE("rationals from JSON") {
  CHECK(json_io::rational_from_json(json(3)) == BigRational(3));
  CHECK(json_io::rational_from_json(json(-7)) == BigRational(-7));
  CHECK(json_io::rational_from_json(json(0.5)) == BigRational(1, 2));
  CHECK(json_io::rational_from_json(json(2.0)) == BigRational(2));
  CHECK(json_io::rational_from_json(json("3/6")) == BigRational(1, 2));
  CHECK(json_io::rational_from_json(json("-12345678901234567890123")) ==
        BigRational(BigInt("-12345678901234567890123")));
  CHECK_THROWS_AS(json_io::rational_from_json(json("1/0")), InputError);
  CHECK_THROWS_AS(json_io::rational_from_json(json("one")), InputError);
  CHECK_THROWS_AS(json_io::rational_from_json(json::array()), InputError);
}

TEST_CASE("link descriptors") {
  const auto d = json_io::link_descriptor_from_json(json::parse(R"({
    "l": 0, "k": 1, "manifold": {"kind": "sphere"},
    "charges": [1, 1], "linking_matrix": [[0, 1], [1, 0]], "homology": [], "framing": "zero"
  })"));
  CHECK(d.level.value() == 1);
  CHECK(d.linking == LinkingMatrix(2, {0, 1, 1, 0}));
  const auto v = expectation_value(d.charges, d.linking, d.level, d.manifold, d.homology);
  const auto out = json_io::to_json(v);
  CHECK(out.at("result") == "phase");
  CHECK(out.at("phase").at("num") == 1);
  CHECK(out.at("phase").at("den") == 2);
  CHECK(out.at("value_re").get<double>() == -1.0);

  const auto zero = json_io::to_json(ExpectationValue::zero());
  CHECK(zero == json{{"result", "zero"}});

  try {
    json_io::link_descriptor_from_json(json::parse(R"({"k": 0.5, "charges": [1]})"));
    FAIL("expected a quantization error");
  } catch (const QuantizationError& e) {
    CHECK(std::string(e.what()).find("level must be an integer") != std::string::npos);
  }
  CHECK_THROWS_AS(json_io::link_descriptor_from_json(json::parse(R"({"k": 1, "charges": [1.5]})")),
                  QuantizationError);
  CHECK_THROWS_AS(json_io::link_descriptor_from_json(
                      json::parse(R"({"k": 1, "charges": [1, 1], "linking_matrix": [[0, 1], [2, 0]]})")),
                  InputError);
  CHECK_THROWS_AS(json_io::link_descriptor_from_json(
                      json::parse(R"({"k": 1, "charges": [1], "homology": [2]})")),
                  InputError);
  CHECK_THROWS_AS(json_io::link_descriptor_from_json(
                      json::parse(R"({"k": 1, "charges": [1], "manifold": {"kind": "torsion_lens"}})")),
                  InputError);

  const auto framed = json_io::link_descriptor_from_json(json::parse(R"({
    "k": 3, "charges": [1], "linking_matrix": [[1]], "framing": {"pushoff": {"epsilon": 0.05}}
  })"));
  CHECK(framed.linking.policy(0) == FramingPolicy::pushoff);
}

TEST_CASE("framings from JSON") {
  const auto circle = unit_circle_xy(1.0);
  CHECK(json_io::framing_from_json(json("zero"), &circle).kind == Framing::Kind::zero_regularization);
  const auto radial =
      json_io::framing_from_json(json::parse(R"({"pushoff": {"epsilon": 0.1}})"), &circle);
  CHECK(radial.kind == Framing::Kind::pushoff);
  CHECK(radial.epsilon == 0.1);
  const auto up = json_io::framing_from_json(
      json::parse(R"({"pushoff": {"epsilon": 0.1, "normal": [0, 0, 1]}})"), &circle);
  const double s = 0.0;
  CHECK(pushoff(circle, up).point({&s, 1})[2] == doctest::Approx(0.1));
  CHECK_THROWS_AS(json_io::framing_from_json(json::parse(R"({"pushoff": {"epsilon": 0.1, "normal": [0, 1]}})"),
                                             &circle),
                  InputError);
  CHECK_THROWS_AS(json_io::framing_from_json(json("twisted"), &circle), InputError);
}
