#pragma once

// CHSH statistics, fringe-visibility fits and a local-hidden-variable baseline.

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace fourphoton::bell {

class UndefinedCorrelation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Analyzer angles in radians, normalized to [0, pi).
struct CHSHSettings {
  double a = 0.0;
  double a_prime = 0.0;
  double b = 0.0;
  double b_prime = 0.0;

  /// (0, pi/4, pi/8, 3pi/8): maximal violation for E = -cos 2(a - b).
  static CHSHSettings canonical();
  CHSHSettings normalized() const;
};

/// Coincidence tallies for one setting pair: (ta, tb), (ta, tb+), (ta+, tb),
/// (ta+, tb+), where + denotes the orthogonal analyzer orientation.
struct OutcomeCounts {
  std::uint64_t pp = 0;
  std::uint64_t pm = 0;
  std::uint64_t mp = 0;
  std::uint64_t mm = 0;

  std::uint64_t total() const { return pp + pm + mp + mm; }
};

struct SettingCounts {
  double theta_a = 0.0;
  double theta_b = 0.0;
  OutcomeCounts counts;
};

using ProbabilityFn = std::function<double(double, double)>;

class CorrelationSource {
 public:
  static CorrelationSource analytic(ProbabilityFn p);
  static CorrelationSource counts(std::vector<SettingCounts> tallies);

  bool is_analytic() const { return std::holds_alternative<ProbabilityFn>(data_); }
  const ProbabilityFn& probability() const { return std::get<ProbabilityFn>(data_); }
  /// Throws UndefinedCorrelation when no tally matches the setting pair.
  const OutcomeCounts& lookup(double theta_a, double theta_b) const;

 private:
  std::variant<ProbabilityFn, std::vector<SettingCounts>> data_;
};

struct Correlation {
  double value = 0.0;
  double std_error = 0.0;
};

/// E = [P(a,b) + P(a+,b+) - P(a,b+) - P(a+,b)] / (sum of all four).
Correlation correlation(const CorrelationSource& src, double theta_a, double theta_b);

struct ChshResult {
  CHSHSettings settings;
  /// E(a,b), E(a,b'), E(a',b), E(a',b')
  std::array<Correlation, 4> E{};
  double S = 0.0;
  double std_error = 0.0;
};

/// S = |E(a,b) - E(a,b') + E(a',b) + E(a',b')|
ChshResult chsh_S(const CorrelationSource& src, const CHSHSettings& settings);

std::string chsh_csv_header();
std::string chsh_csv_row(const ChshResult& r);

/// One point of a coincidence fringe: `count` events out of `trials` at `angle`.
struct FringePoint {
  double angle = 0.0;
  std::uint64_t count = 0;
  std::uint64_t trials = 0;
};

/// Least-squares fit of rate = alpha - beta cos^2(angle) with Poisson errors.
/// Visibility (max - min)/(max + min) = |beta| / |2 alpha - beta|.
struct FringeFit {
  double alpha = 0.0;
  double beta = 0.0;
  double visibility = 0.0;
  double std_error = 0.0;
};
FringeFit fit_cos2_fringe(const std::vector<FringePoint>& points);

/// The quantum left-side coincidence probability with no right polarizers and
/// equal frequencies, proportional to sin^2(ta - tb).
double quantum_left_probability(double theta_a, double theta_b);

/// Lambda-averaged Malus product for one pair, 1/4 + cos(2(ta - tb))/8.
double lhv_pair_rate(double theta_a, double theta_b);
/// Both pairs: lhv_pair_rate(t1, t3) * lhv_pair_rate(t2, t4).
double lhv_quad_rate(double theta1, double theta2, double theta3, double theta4);

struct LhvOptions {
  std::uint64_t n_events = 100000;
  std::uint64_t seed = 1;
  int scan_points = 8;
  CHSHSettings settings = CHSHSettings::canonical();
  /// Fixed hidden polarization; uniform over [0, pi) when empty.
  std::optional<double> fixed_lambda;
};

struct LhvResult {
  FringeFit fringe;
  std::vector<FringePoint> fringe_points;
  ChshResult chsh;
};

/// Each pair carries a shared hidden polarization lambda and every photon passes
/// its polarizer with probability cos^2(theta - lambda), independently. The
/// fringe is the quadruple coincidence rate scanned in theta1 - theta3 with
/// theta2 = theta4 = 0; CHSH uses two-outcome analyzers on photons 1 and 3.
/// Half the events go to the fringe scan and half to the CHSH settings.
LhvResult lhv_baseline(const LhvOptions& options);

/// Quadruple coincidence probability at theta1 = theta2 = theta3 = theta4.
double zero_coincidence_witness(double theta);

}  // namespace fourphoton::bell
