#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

namespace owl3d::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitCheckFailed = 3;

// args excludes the program name. Reports go to `out` (or --out), diagnostics
// to `err`.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int dispatch(int argc, const char* const* argv);

struct LosscheckOptions {
  std::uint64_t seed = 0;
  std::size_t instances = 20;
  double epsilon = 1e-4;
  double tolerance = 1e-5;
};

// Finite-difference verification of every analytic loss gradient on seeded
// random instances. Deterministic in the options.
nlohmann::ordered_json run_losscheck(const LosscheckOptions& opts);

}  // namespace owl3d::cli
