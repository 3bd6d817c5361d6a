#pragma once

// Gaussian wave-packet treatment of the quadruple coincidence: spectral
// amplitudes, numerical frequency integration, the closed-form densities with
// their damping factor F, and the visibility / Bell-region analysis.

#include <array>
#include <stdexcept>
#include <vector>

#include "fourphoton/elements.hpp"

namespace fourphoton::wavepacket {

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Physical parameters of a wave-packet evaluation. All four photons share the
/// coherence time T; central_omega[i] is the central frequency of photon i+1.
struct WavePacketParams {
  double coherence_time = 1.0;
  std::array<double, 4> central_omega{1.0, 1.0, 1.0, 1.0};
  BeamSplitterSpec bs;
  Geometry geom;
  TimingSpec timing;

  /// Sources fire at -/+ tau_s/2 (t0I - t0II = tau_s); D1, D2 trigger at the
  /// centers of their packets and D3, D4 straddle the center of the right-side
  /// packets by tau34. Zero path lengths.
  static WavePacketParams centered(double T, double tau_s, double tau34,
                                   const std::array<double, 4>& omega0 = {1.0, 1.0, 1.0, 1.0});

  void validate() const;

  double tau_s() const { return timing.tau_s(); }
  double tau34() const { return timing.tau34(); }
  /// Emission-time difference as seen at the beam splitter, (t0I + rI/c) - (t0II + rII/c).
  double source_offset() const;
  /// Detection-time difference referred to the beam splitter, (t3 - r3/c) - (t4 - r4/c).
  double detection_offset() const;
};

/// A probability density for a quadruple detection at time points t1..t4, in
/// the convention where the frequency integrals carry no 1/(2 pi) factors:
/// density = (F / T^4) * (cosh_term - interference).
struct QuadDensity {
  double density = 0.0;
  double damping_F = 0.0;
  double cosh_term = 0.0;
  double interference = 0.0;
};

/// Converts a QuadDensity value into a probability per unit time^4.
inline constexpr double kTimeDensityNormalization =
    1.0 / (16.0 * kPi * kPi * kPi * kPi);

/// (T^{1/2} / pi^{1/4}) exp(-(omega - omega0)^2 T^2 / 2)
double gaussian_amp(double omega, double omega0, double T);

/// Damping factor F = 2 pi^2 exp(-(s1^2 + s2^2 + M) / T^2), where s1, s2 are the
/// left packets' mis-centering at D1, D2 and M the mean squared mis-centering of
/// the two right-side routes.
double damping_factor(const WavePacketParams& params);

/// Closed-form density for arbitrary polarizers (absent ones summed over
/// {0, pi/2}) and arbitrary lossless beam splitter.
QuadDensity closed_density(const std::array<PolarizerSetting, 4>& polarizers,
                           const WavePacketParams& params);

/// (F/T^4){cosh(tau_s tau34 / T^2) - cos^2(theta3 - theta4) cos[(w30 - w40) tau34]}.
/// Requires a balanced beam splitter; tau_s and tau34 are the offsets referred to the
/// beam splitter, which reduce to t0I - t0II and t3 - t4 when rI = rII and r3 = r4.
QuadDensity closed_density_no_left(double theta3, double theta4, const WavePacketParams& params);
/// Same with cos^2(theta1 - theta2).
QuadDensity closed_density_no_right(double theta1, double theta2, const WavePacketParams& params);

struct QuadratureOptions {
  int order = 40;
  int max_order = 640;
  double rel_tol = 1e-8;
};

/// Gauss-Hermite nodes and weights for the weight exp(-x^2).
struct HermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const HermiteRule& hermite_rule(int order);

/// Numerical value of the frequency integral of f(omega, omega0, T) exp(i omega u).
Complex spectral_integral(double omega0, double T, double u, int order);

/// Numerically integrates the plane-wave amplitude against the four spectral
/// amplitudes and returns |result|^2 (summed over absent-polarizer settings).
/// The order is doubled until every 1-D integral changes by less than rel_tol of
/// its peak magnitude; otherwise NumericalError.
QuadDensity integrate_quad_density(const std::array<PolarizerSetting, 4>& polarizers,
                                   const WavePacketParams& params,
                                   const QuadratureOptions& options = {});

/// The frequency-integrated amplitude for definite angles on a full tensor-product
/// grid over (omega1..omega4), evaluating the plane-wave amplitude at every node.
Complex tensor_quadrature_amplitude(const std::array<double, 4>& theta,
                                    const WavePacketParams& params, int order);
/// Same integral as a product of 1-D integrals per amplitude term.
Complex separable_quadrature_amplitude(const std::array<double, 4>& theta,
                                       const WavePacketParams& params, int order);

/// Probability of a 1-1 coincidence with photons 1 and 2 passing polarizers at
/// theta1, theta2 and no right polarizers, integrated over all detection times.
double one_one_probability(double theta1, double theta2, const WavePacketParams& params);

/// v = [2 cosh(tau_s tau34 / T^2) - 1]^{-1}
double visibility(double tau_s, double tau34, double T);

/// Visibility read off by scanning theta1 - theta2 over [0, pi/2] in `steps` steps.
double scanned_visibility(const WavePacketParams& params, int steps = 180);

struct BellRegionBound {
  /// x* = arccosh((1 + sqrt 2)/2), where v(x*) = 2^{-1/2}.
  double analytic_product = 0.0;
  /// The same root by bisection on the visibility formula.
  double bisection_product = 0.0;
  /// Reference value 0.663, carried for comparison with the exact root.
  double printed_product = 0.663;
  /// (printed - analytic) / analytic
  double relative_discrepancy = 0.0;
  double T = 1.0;

  /// Largest |tau_s tau34| with v > 2^{-1/2}.
  double max_product() const { return analytic_product * T * T; }
};

BellRegionBound bell_region_bound(double T);

/// True when v(tau_s, tau34) > 2^{-1/2}.
bool in_bell_region(double tau_s, double tau34, double T);

}  // namespace fourphoton::wavepacket
