#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "hartogs/verify.hpp"

namespace hartogs::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitVerdictFailure = 1;
inline constexpr int kExitUsage = 2;

struct RunConfig {
  std::string command;
  int n1 = 1;
  int n2 = 1;
  double alpha = 1.0;
  std::string p1 = "2";
  std::string p2 = "2";
  double a = 0.5;
  double b = 0.75;
  int nu_min = 1;
  int nu_max = 20;
  /// Explicit list; overrides nu_min..nu_max when non-empty.
  std::vector<int> nus;
  std::vector<double> betas{0.0, 0.5, 1.0, 2.7};
  std::uint64_t samples = 1000000;
  std::uint64_t seed = 42;
  /// Graph-norm growth is measured against sup over nu <= this.
  int growth_reference = 10;
  verify::Tolerances tol;
  std::string format = "json";
  std::string output;
};

/// The nu values a config selects.
std::vector<int> nu_values(const RunConfig& config);

/// TOML with one key per flag, readable back through --config.
std::string dump_config(const RunConfig& config);

/// Throws UsageError naming the offending field.
void validate(const RunConfig& config);

/// Parses argv, runs the subcommand and writes the report to `out` (or the
/// output path). Returns one of the exit codes above.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hartogs::cli
