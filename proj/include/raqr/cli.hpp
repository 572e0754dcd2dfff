#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "raqr/coverage_analytics.hpp"

namespace raqr {

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitNumerical = 3, kExitGap = 4 };

// Runs one CLI invocation; args excludes the program name. Results go to
// files under --out, a short summary to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Curve CSV I/O shared by the subcommands. The header comment line carries
// the tool version, config hash and seed.
std::string provenance_line(std::uint64_t config_hash, std::uint64_t seed);
void write_curves_csv(std::ostream& os, const std::vector<CoverageCurve>& curves,
                      bool with_std_error);

struct CurveRow {
  std::string x_kind;
  double x_value = 0.0;
  std::string receiver_mode;
  std::string method;
  double p_cov = 0.0;
};

std::vector<CurveRow> read_curves_csv(const std::string& path);

}  // namespace raqr
