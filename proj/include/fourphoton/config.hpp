#pragma once

// Flat `key = value` run configuration, its conversion into the library
// parameter types, and the manifest header echoed at the top of every output.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fourphoton/bell.hpp"
#include "fourphoton/elements.hpp"
#include "fourphoton/montecarlo.hpp"
#include "fourphoton/wavepacket.hpp"

namespace fourphoton::config {

inline constexpr const char* kToolName = "fourphoton";
inline constexpr const char* kToolVersion = "1.0.0";

/// Everything a run can be configured with. Angles are kept in degrees exactly
/// as written so that a manifest re-parses to the same values.
struct RunSettings {
  /// Polarizer angles in degrees; empty means no polarizer.
  std::array<std::optional<double>, 4> theta_deg{0.0, 0.0, std::nullopt, std::nullopt};
  BeamSplitterSpec bs;
  Geometry geom;
  TimingSpec timing;
  FrequencySpec freq;

  double T = 1.0;
  double tauS = 0.0;
  double tau34 = 0.0;

  std::uint64_t n_events = 100000;
  std::uint64_t seed = 1;
  double sigma_s = 0.0;
  double window34 = montecarlo::kUnbounded;
  double window12 = montecarlo::kUnbounded;
  double efficiency = 1.0;
  int scan_angles = 8;
  unsigned threads = 0;
  std::uint64_t batch_size = 4096;

  double a = 0.0;
  double a_prime = 45.0;
  double b = 22.5;
  double b_prime = 67.5;

  ExperimentConfig experiment() const;
  wavepacket::WavePacketParams wavepacket() const;
  montecarlo::MonteCarloConfig montecarlo() const;
  bell::CHSHSettings chsh() const;

  friend bool operator==(const RunSettings&, const RunSettings&) = default;
};

/// All recognised keys, in manifest order.
const std::vector<std::string>& known_keys();

/// Assigns one key. Throws ConfigError for unknown keys or malformed values.
void set_value(RunSettings& s, const std::string& key, const std::string& value);

/// Parses `key = value` lines; `#` starts a comment. Errors name the source and line.
/// Keys that were set are appended to `keys_set` when given.
RunSettings parse_config(std::istream& in, const std::string& source = "<config>",
                         std::vector<std::string>* keys_set = nullptr);
RunSettings load_config(const std::string& path, std::vector<std::string>* keys_set = nullptr);

/// Shortest text that parses back to the same double ("inf" for infinity).
std::string format_double(double x);

/// Key/value pairs for every setting, in known_keys() order.
std::vector<std::pair<std::string, std::string>> to_pairs(const RunSettings& s);

struct RunManifest {
  std::string subcommand;
  std::string version = kToolVersion;
  std::uint64_t seed = 0;
  std::vector<std::string> outputs;
  RunSettings settings;
};

/// `#`-prefixed header block.
void write_manifest(std::ostream& out, const RunManifest& m);
/// Reads the header block back from the start of an output file.
RunManifest parse_manifest(std::istream& in);

}  // namespace fourphoton::config
