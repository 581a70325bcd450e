#pragma once

#include <string>
#include <vector>

namespace cslink {

struct VerifyCheck {
  std::string name;
  std::string expected;
  std::string computed;
  double tolerance = 0.0;
  bool pass = false;
};

struct VerifyOptions {
  enum class Level { quick, full };

  Level level = Level::quick;
  /// Test hook: perturbs the normalization constants before checking them.
  bool corrupt_constants = false;
};

/// Reference values of the built-in self check. Quick covers l = 0 and the
/// exact Wilson-loop values; full adds the 7-dimensional sphere/plane link.
std::vector<VerifyCheck> run_verification(const VerifyOptions& options);

}  // namespace cslink
