#pragma once

// Event-level simulation of the two-source experiment: emission jitter,
// channel selection at the beam splitter, detection times drawn from the
// wave-packet density, detector efficiency and coincidence windows.

#include <array>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "fourphoton/bell.hpp"
#include "fourphoton/elements.hpp"

namespace fourphoton::montecarlo {

inline constexpr double kUnbounded = std::numeric_limits<double>::infinity();

struct MonteCarloConfig {
  std::uint64_t n_events = 100000;
  std::uint64_t seed = 1;
  /// Standard deviation of t0I - t0II (s).
  double sigma_s = 0.0;
  /// Coincidence windows on |t3 - t4| and |t1 - t2| (s); kUnbounded disables.
  double window34 = kUnbounded;
  double window12 = kUnbounded;
  double detector_efficiency = 1.0;
  /// Polarizers, beam splitter and geometry. Timing fields are ignored; every
  /// event draws its own emission and detection times.
  ExperimentConfig physics;
  double coherence_time = 1.0;
  std::array<double, 4> central_omega{1.0, 1.0, 1.0, 1.0};
  /// Number of theta1 - theta2 values spanning [0, pi) in run().
  int scan_angles = 8;
  std::uint64_t batch_size = 4096;
  /// 0 selects the hardware concurrency. Results do not depend on it.
  unsigned threads = 0;
  int histogram_bins = 80;
  /// Histogram covers |tau34| <= histogram_range * T.
  double histogram_range = 4.0;

  void validate() const;
};

class StatisticsUnavailable : public std::runtime_error {
 public:
  StatisticsUnavailable(const std::string& what, std::uint64_t emitted, std::uint64_t quad,
                        std::uint64_t in_window);
  std::uint64_t n_emitted;
  std::uint64_t n_quad_detected;
  std::uint64_t n_in_window;
};

enum class Channel : std::uint8_t { OneOne, TwoAtD3, TwoAtD4 };

struct DetectionRecord {
  double tau_s = 0.0;
  /// Spectral draws for the right-side photons (rad/s).
  double omega3 = 0.0;
  double omega4 = 0.0;
  /// Detection times t1..t4 (s); NaN where no photon arrives.
  std::array<double, 4> t{};
  /// Polarizer transmission per photon (true when the detector has no polarizer).
  std::array<bool, 4> passed{};
  std::array<bool, 4> fired{};
  Channel channel = Channel::OneOne;

  bool quad() const { return fired[0] && fired[1] && fired[2] && fired[3]; }
  double tau34() const { return t[2] - t[3]; }
};

using Rng = std::mt19937_64;

/// Counter-keyed stream: the same (seed, setting, batch) always yields the same engine.
Rng make_stream(std::uint64_t seed, std::uint64_t setting, std::uint64_t batch);

/// Draws one four-photon event for the polarizer settings in cfg.physics.
/// Throws wavepacket::NumericalError if the rejection envelope is ever exceeded.
DetectionRecord sample_event(const MonteCarloConfig& cfg, Rng& rng);

/// Compensated (Neumaier) running sum.
class CompensatedSum {
 public:
  void add(double x);
  void merge(const CompensatedSum& other);
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

struct SettingTally {
  double theta1 = 0.0;
  double theta2 = 0.0;
  std::uint64_t n_emitted = 0;
  std::uint64_t n_quad_detected = 0;
  std::uint64_t n_in_window = 0;
  std::uint64_t one_one = 0;
  std::uint64_t two_d3 = 0;
  std::uint64_t two_d4 = 0;
  CompensatedSum sum_abs_tau34;
  CompensatedSum sum_sq_tau34;
  /// tau34 histogram of quadruple detections inside window12 (before the tau34 window).
  std::vector<std::uint64_t> histogram;

  void merge(const SettingTally& other);
};

struct CoincidenceStats {
  std::uint64_t n_emitted = 0;
  std::uint64_t n_quad_detected = 0;
  std::uint64_t n_in_window = 0;
  std::uint64_t one_one = 0;
  std::uint64_t two_d3 = 0;
  std::uint64_t two_d4 = 0;
  double visibility_est = 0.0;
  double visibility_stderr = 0.0;
  /// Mean and rms of |t3 - t4| over accepted quadruples (s).
  double mean_abs_tau34 = 0.0;
  double rms_tau34 = 0.0;
  double postselect_fraction = 0.0;
  std::vector<SettingTally> per_angle;
  /// Bin edges in units of T; counts summed over all angles.
  std::vector<double> histogram_edges;
  std::vector<std::uint64_t> histogram;
};

/// Simulates n events at each (theta1, theta2) pair. Right polarizers, beam
/// splitter and windows come from cfg.
std::vector<SettingTally> simulate_settings(const MonteCarloConfig& cfg,
                                            const std::vector<std::array<double, 2>>& settings,
                                            const std::vector<std::uint64_t>& events_per_setting);

/// Scans theta2 - theta1 over cfg.scan_angles values in [0, pi), splitting
/// n_events evenly, and fits the sin^2 fringe of in-window quadruples.
/// Throws StatisticsUnavailable when no event survives the window.
CoincidenceStats run(const MonteCarloConfig& cfg);

struct ChshExperiment {
  bell::ChshResult chsh;
  std::vector<SettingTally> tallies;
};

/// Runs all 16 combinations of {a, a+, a', a'+} x {b, b+, b', b'+} on (theta1,
/// theta2) with n_events/16 events each and computes S from in-window quadruple
/// counts. Right polarizers must be absent.
ChshExperiment chsh_experiment(const MonteCarloConfig& cfg, const bell::CHSHSettings& settings);

/// Fringe visibility expected for the in-window quadruples, averaging the wave-packet
/// density over the tau_s distribution and the tau34 window. Right polarizers are
/// taken as absent and window12 is not applied.
double predicted_visibility(const MonteCarloConfig& cfg);

}  // namespace fourphoton::montecarlo
