// Command-line front end for linking numbers and abelian Chern-Simons
// Wilson-loop expectation values.
//
//   cslink link <config.json>      linking number by both kernel paths
//   cslink selflink <config.json>  self-linking under a framing
//   cslink wilson <descriptor.json>
//   cslink zodiacus <config.json>
//   cslink verify [--level quick|full]
//
// JSON goes to stdout, diagnostics to stderr. Exit codes: 0 success,
// 1 input error, 2 numerical non-convergence.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>

#include "cslink/csinvariant.hpp"
#include "cslink/error.hpp"
#include "cslink/json_io.hpp"
#include "cslink/kernel.hpp"
#include "cslink/linking.hpp"
#include "cslink/verify.hpp"

namespace {

using cslink::json_io::json;

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitNumeric = 2;

struct QuadratureFlags {
  std::optional<std::string> method;
  std::optional<int> points;
  std::optional<std::int64_t> budget;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  std::optional<int> levels;

  void attach(CLI::App* app) {
    app->add_option("--method", method, "tensor_trapezoid | monte_carlo");
    app->add_option("--points", points, "tensor points per dimension");
    app->add_option("--budget", budget, "Monte Carlo sample budget");
    app->add_option("--seed", seed, "Monte Carlo seed");
    app->add_option("--tol", tol, "target relative error");
    app->add_option("--levels", levels, "tensor refinement levels");
  }

  cslink::QuadratureSpec apply(cslink::QuadratureSpec spec) const {
    if (method) spec.method = cslink::method_from_string(*method);
    if (points) spec.points_per_dim = *points;
    if (budget) spec.sample_budget = *budget;
    if (seed) spec.seed = *seed;
    if (tol) spec.target_rel_error = *tol;
    if (levels) spec.refinement_levels = *levels;
    spec.validate();
    return spec;
  }
};

json read_config(const std::string& path) {
  std::string text;
  if (path == "-") {
    text.assign(std::istreambuf_iterator<char>(std::cin), {});
  } else {
    std::ifstream in(path);
    if (!in) throw cslink::InputError("cannot open '" + path + "'");
    text.assign(std::istreambuf_iterator<char>(in), {});
  }
  return cslink::json_io::parse_document(text);
}

void emit(const json& j) { std::cout << j.dump(2) << '\n'; }

int fail(int code, const std::string& message) {
  std::cerr << "cslink: " << message << '\n';
  emit(json{{"error", message}});
  return code;
}

cslink::QuadratureSpec spec_for(const json& cfg, int l, const QuadratureFlags& flags) {
  auto spec = cslink::QuadratureSpec::defaults_for(l);
  if (cfg.contains("quadrature")) spec = cslink::json_io::quadrature_from_json(cfg.at("quadrature"), spec);
  return flags.apply(spec);
}

cslink::LinkingOptions options_for(const json& cfg) {
  cslink::LinkingOptions opts;
  if (cfg.contains("rounding_tolerance")) opts.rounding_tolerance = cfg.at("rounding_tolerance").get<double>();
  return opts;
}

std::vector<cslink::ParamCycle> two_cycles(const json& cfg) {
  if (!cfg.contains("cycles") || !cfg.at("cycles").is_array() || cfg.at("cycles").size() != 2)
    throw cslink::InputError("config needs an array 'cycles' of exactly two cycles");
  std::vector<cslink::ParamCycle> out;
  for (const auto& c : cfg.at("cycles")) out.push_back(cslink::json_io::cycle_from_json(c));
  if (out[0].dims() != out[1].dims()) throw cslink::InputError("cycles must have equal l");
  return out;
}

void print_warnings(const cslink::LinkingResult& r) {
  for (const auto& w : r.warnings) std::cerr << "cslink: warning: " << w << '\n';
}

int cmd_link(const std::string& path, const QuadratureFlags& flags) {
  const json cfg = read_config(path);
  const auto cycles = two_cycles(cfg);
  const int l = cycles[0].dims().l;
  if (cycles[0].dims().untested()) std::cerr << "cslink: warning: l > 2 is untested\n";
  const auto spec = spec_for(cfg, l, flags);
  const auto opts = options_for(cfg);
  const auto gauss = cslink::gauss_linking(cycles[0], cycles[1], spec, opts);
  const auto field = cslink::field_theory_linking(cycles[0], cycles[1], spec, opts);
  print_warnings(gauss);
  emit(json{{"l", l},
            {"gauss", cslink::json_io::to_json(gauss)},
            {"field_theory", cslink::json_io::to_json(field)},
            {"quadrature", cslink::json_io::to_json(spec)}});
  const bool ok = gauss.raw.converged && gauss.accepted && field.raw.converged && field.accepted;
  if (!ok) std::cerr << "cslink: linking integral did not converge to an integer\n";
  return ok ? kExitOk : kExitNumeric;
}

int cmd_selflink(const std::string& path, const QuadratureFlags& flags) {
  const json cfg = read_config(path);
  if (!cfg.contains("cycle")) throw cslink::InputError("config needs a 'cycle'");
  const auto cycle = cslink::json_io::cycle_from_json(cfg.at("cycle"));
  const auto spec = spec_for(cfg, cycle.dims().l, flags);
  const auto framing =
      cslink::json_io::framing_from_json(cfg.contains("framing") ? cfg.at("framing") : json("zero"), &cycle);
  const auto value = cslink::self_linking(cycle, framing, spec, options_for(cfg));
  emit(json{{"self_linking", value},
            {"framing", framing.kind == cslink::Framing::Kind::zero_regularization ? "zero" : "pushoff"}});
  return kExitOk;
}

int cmd_wilson(const std::string& path) {
  const json cfg = read_config(path);
  const auto d = cslink::json_io::link_descriptor_from_json(cfg);
  const auto value = cslink::expectation_value(d.charges, d.linking, d.level, d.manifold, d.homology);
  if (value.nonzero_homology_warning)
    std::cerr << "cslink: warning: nonzero homology class passes the 2k selection rule; "
                 "phase computed as for a trivial class\n";
  emit(cslink::json_io::to_json(value));
  return kExitOk;
}

int cmd_zodiacus(const std::string& path, int grid, double tol) {
  const json cfg = read_config(path);
  const auto cycles = two_cycles(cfg);
  const auto points = cslink::zodiacus_boundary_scan(cycles[0], cycles[1], grid, tol);
  json list = json::array();
  for (const auto& p : points) list.push_back(json{{"s", p.s}, {"t", p.t}, {"value", p.value}});
  emit(json{{"count", points.size()}, {"grid", grid}, {"tol", tol}, {"points", list}});
  return kExitOk;
}

int cmd_verify(const std::string& level, bool corrupt) {
  cslink::VerifyOptions opts;
  opts.level = level == "full" ? cslink::VerifyOptions::Level::full : cslink::VerifyOptions::Level::quick;
  opts.corrupt_constants = corrupt;
  const auto checks = cslink::run_verification(opts);
  json rows = json::array();
  bool all = true;
  for (const auto& c : checks) {
    all = all && c.pass;
    rows.push_back(json{{"name", c.name},
                        {"expected", c.expected},
                        {"computed", c.computed},
                        {"tolerance", c.tolerance},
                        {"pass", c.pass}});
    std::fprintf(stderr, "%-4s  %-45s expected %-22s computed %-22s tol %g\n",
                 c.pass ? "PASS" : "FAIL", c.name.c_str(), c.expected.c_str(),
                 c.computed.c_str(), c.tolerance);
  }
  json constants = json::array();
  for (int l = 0; l <= 2; ++l) constants.push_back(cslink::json_io::to_json(cslink::normalization(l)));
  emit(json{{"level", level}, {"passed", all}, {"checks", rows}, {"constants", constants}});
  return all ? kExitOk : kExitNumeric;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Linking numbers of (2l+1)-cycles in R^{4l+3} and abelian Chern-Simons Wilson loops"};
  app.require_subcommand(1);

  std::string config;
  QuadratureFlags link_flags, self_flags;

  auto* link = app.add_subcommand("link", "linking number of two cycles");
  link->add_option("config", config, "cycle pair JSON ('-' for stdin)")->required();
  link_flags.attach(link);

  auto* selflink = app.add_subcommand("selflink", "self-linking of a cycle under a framing");
  selflink->add_option("config", config, "cycle JSON ('-' for stdin)")->required();
  self_flags.attach(selflink);

  auto* wilson = app.add_subcommand("wilson", "Wilson-loop expectation value");
  wilson->add_option("config", config, "link descriptor JSON ('-' for stdin)")->required();

  int grid = 64;
  double zod_tol = 1e-3;
  auto* zodiacus = app.add_subcommand("zodiacus", "scan for zodiacus boundary points");
  zodiacus->add_option("config", config, "cycle pair JSON ('-' for stdin)")->required();
  zodiacus->add_option("--grid", grid, "grid nodes per parameter")->check(CLI::PositiveNumber);
  zodiacus->add_option("--tol", zod_tol, "relative tolerance on the solid-angle element");

  std::string level = "quick";
  bool corrupt = false;
  auto* verify = app.add_subcommand("verify", "run the built-in reference checks");
  verify->add_option("--level", level, "quick | full")->check(CLI::IsMember({"quick", "full"}));
  verify->add_flag("--corrupt-constants", corrupt, "test hook: perturb constants")->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, std::cerr, std::cerr);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*link) return cmd_link(config, link_flags);
    if (*selflink) return cmd_selflink(config, self_flags);
    if (*wilson) return cmd_wilson(config);
    if (*zodiacus) return cmd_zodiacus(config, grid, zod_tol);
    if (*verify) return cmd_verify(level, corrupt);
  } catch (const cslink::SingularityError& e) {
    return fail(kExitInput, e.what());
  } catch (const cslink::InputError& e) {
    return fail(kExitInput, e.what());
  } catch (const cslink::DegenerateConfigurationError& e) {
    return fail(kExitInput, e.what());
  } catch (const cslink::FramingInstabilityError& e) {
    return fail(kExitNumeric, e.what());
  } catch (const cslink::ConvergenceError& e) {
    return fail(kExitNumeric, e.what());
  } catch (const json::exception& e) {
    return fail(kExitInput, std::string("invalid JSON value: ") + e.what());
  }
  return kExitInput;
}
