#pragma once

// Physical configuration of the two-source experiment and the detection
// operators built from it.

#include <array>
#include <optional>
#include <stdexcept>
#include <utility>

#include "fourphoton/fock.hpp"

namespace fourphoton {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSpeedOfLight = 299792458.0;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Linear polarizer in front of a detector, or none at all. Angles are stored
/// in [0, pi); a polarizer at theta + pi is the same physical element.
class PolarizerSetting {
 public:
  static PolarizerSetting absent() { return PolarizerSetting{}; }
  static PolarizerSetting at(double theta);

  bool present() const { return angle_.has_value(); }
  /// Throws ConfigError when absent.
  double angle() const;
  const std::optional<double>& value() const { return angle_; }

  friend bool operator==(const PolarizerSetting&, const PolarizerSetting&) = default;

 private:
  std::optional<double> angle_;
};

double normalize_angle(double theta);

struct BeamSplitterSpec {
  double Tx = 0.5;
  double Ty = 0.5;
  double Rx = 0.5;
  double Ry = 0.5;

  static BeamSplitterSpec balanced() { return {}; }
  /// Throws ConfigError unless every coefficient is in [0,1] and T + R = 1 per polarization.
  void validate() const;
  bool is_balanced() const;

  friend bool operator==(const BeamSplitterSpec&, const BeamSplitterSpec&) = default;
};

/// Path lengths in meters. rI, rII run from each source to the beam splitter,
/// r3, r4 from the beam splitter to D3, D4; r1, r2 from the sources to D1, D2.
struct Geometry {
  double r1 = 0.0, r2 = 0.0, r3 = 0.0, r4 = 0.0;
  double rI = 0.0, rII = 0.0;
  double c = kSpeedOfLight;

  void validate() const;
  friend bool operator==(const Geometry&, const Geometry&) = default;
};

/// Emission times of both sources and detection times at D1..D4, in seconds.
struct TimingSpec {
  double t0I = 0.0, t0II = 0.0;
  double t1 = 0.0, t2 = 0.0, t3 = 0.0, t4 = 0.0;

  double tau_s() const { return t0I - t0II; }
  double tau34() const { return t3 - t4; }
  friend bool operator==(const TimingSpec&, const TimingSpec&) = default;
};

/// Photon angular frequencies in rad/s.
struct FrequencySpec {
  std::array<double, 4> omega{1.0, 1.0, 1.0, 1.0};

  void validate() const;
  friend bool operator==(const FrequencySpec&, const FrequencySpec&) = default;
};

struct ExperimentConfig {
  std::array<PolarizerSetting, 4> polarizers{
      PolarizerSetting::at(0.0), PolarizerSetting::at(0.0), PolarizerSetting::at(0.0),
      PolarizerSetting::at(0.0)};
  BeamSplitterSpec bs;
  Geometry geom;
  TimingSpec timing;
  FrequencySpec freq;

  /// rI = rII, r3 = r4, equal frequencies, balanced beam splitter, all times zero.
  static ExperimentConfig symmetric(double theta1, double theta2, double theta3, double theta4);

  void validate() const;
  /// Copy with the four polarizers replaced by definite angles.
  ExperimentConfig with_angles(const std::array<double, 4>& theta) const;
  /// Throws ConfigError if any polarizer is absent.
  std::array<double, 4> angles() const;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

namespace elements {

/// Product of the two polarization-entangled pairs: photons (1,3) from source I,
/// (2,4) from source II.
fock::FockState initial_state();

/// phase * (a_px cos(theta) + a_py sin(theta)) for path P1 or P2.
fock::OperatorExpr polarizer_detector_op(fock::Path path, double theta, Complex phase);

/// exp(i omega (pathlen/c + t_emit - t_detect))
Complex propagation_phase(double omega, double pathlen, double t_emit, double t_detect, double c);

/// D3 and D4 detection operators acting on the beam-splitter input modes.
/// The reflected amplitude carries a factor `reflection_sign * i`; the default +i
/// keeps the output operators canonical.
std::pair<fock::OperatorExpr, fock::OperatorExpr> beamsplitter_detector_ops(
    const BeamSplitterSpec& bs, double theta3, double theta4, const Geometry& geom,
    const TimingSpec& timing, const FrequencySpec& freq, double reflection_sign = 1.0);

/// E1 and E2 for the config's left polarizer angles.
fock::OperatorExpr left_detector_op(const ExperimentConfig& config, int detector);

/// E4 E3 E2 E1. Every polarizer must be present.
fock::OperatorExpr quad_detection_expr(const ExperimentConfig& config,
                                       double reflection_sign = 1.0);

/// Output-port creation operators for each beam-splitter input mode, with the
/// same coefficients as beamsplitter_detector_ops and no propagation phases.
fock::ModeMap beamsplitter_output_map(const BeamSplitterSpec& bs);

}  // namespace elements
}  // namespace fourphoton
