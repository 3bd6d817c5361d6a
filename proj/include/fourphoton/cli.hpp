#pragma once

// Subcommand implementations behind the `fourphoton` executable. Each writes a
// manifest header followed by its CSV or summary block and returns an exit code.

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fourphoton/config.hpp"

namespace fourphoton::cli {

enum ExitCode : int { kOk = 0, kFailure = 1, kUsage = 2 };

/// Evenly spaced values: "start:stop:count", or a bare count `n` meaning
/// `default_start:default_stop:n`.
std::vector<double> parse_grid(const std::string& spec, double default_start,
                               double default_stop);

struct AnalyticOptions {
  /// quad, eq3, no-left (eq4), no-right (eq5), same-beam, channels
  std::string formula = "quad";
  /// Four angles in degrees; "absent" allowed. Replaces the grid.
  std::optional<std::array<std::string, 4>> theta;
  /// "left" or "right" selects the matching absent-polarizer formula.
  std::string absent;
  std::string grid = "5";
};

struct WavepacketOptions {
  /// Grid applied to both tau_s/T and tau34/T.
  std::string grid = "-1.5:1.5:7";
  std::vector<double> theta_diff_deg{0.0};
  int quadrature_order = 40;
};

struct MontecarloOptions {
  /// Histogram CSV goes here when set, otherwise after the summary.
  std::ostream* histogram = nullptr;
};

struct ChshOptions {
  bool lhv = false;
};

int cmd_analytic(const config::RunManifest& manifest, const AnalyticOptions& opt,
                 std::ostream& out);
int cmd_wavepacket(const config::RunManifest& manifest, const WavepacketOptions& opt,
                   std::ostream& out);
int cmd_montecarlo(const config::RunManifest& manifest, const MontecarloOptions& opt,
                   std::ostream& out, std::ostream& err);
int cmd_chsh(const config::RunManifest& manifest, const ChshOptions& opt, std::ostream& out,
             std::ostream& err);
/// Checks the closed forms against the operator algebra on the 5^4 angle grid.
int cmd_oracle_check(std::ostream& out);

/// Full command line entry point.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fourphoton::cli
