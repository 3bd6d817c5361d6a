#include "fourphoton/wavepacket.hpp"

#include <Eigen/Eigenvalues>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>

#include "fourphoton/analytic.hpp"

namespace fourphoton::wavepacket {

namespace {

double sq(double x) { return x * x; }

// Propagation offsets (seconds) of every amplitude route: the phase of photon j
// reaching detector k is omega_j * u_jk.
struct RouteOffsets {
  double s1, s2;    // photons 1, 2 to D1, D2
  double u34, u43;  // transmitted route: photon 3 -> D4, photon 4 -> D3
  double u33, u44;  // reflected route
};

RouteOffsets route_offsets(const WavePacketParams& p) {
  const auto& g = p.geom;
  const auto& t = p.timing;
  return {g.r1 / g.c + t.t0I - t.t1,
          g.r2 / g.c + t.t0II - t.t2,
          (g.rI + g.r4) / g.c + t.t0I - t.t4,
          (g.rII + g.r3) / g.c + t.t0II - t.t3,
          (g.rI + g.r3) / g.c + t.t0I - t.t3,
          (g.rII + g.r4) / g.c + t.t0II - t.t4};
}

// Peak magnitude of the 1-D spectral integral, reached at u = 0.
double spectral_peak(double T) { return std::sqrt(2.0) * std::pow(kPi, 0.25) / std::sqrt(T); }

std::vector<double> setting_choices(const PolarizerSetting& p) {
  if (p.present()) return {p.angle()};
  return {0.0, kPi / 2};
}

// Angle-dependent sums over absent-polarizer settings: sum A^2, sum B^2, sum AB
// with A = T14 T23 and B = R24 R13.
struct CoefficientSums {
  double aa = 0.0, bb = 0.0, ab = 0.0;
};

template <typename Fn>
void for_each_setting(const std::array<PolarizerSetting, 4>& pol, Fn&& fn) {
  for (double a : setting_choices(pol[0]))
    for (double b : setting_choices(pol[1]))
      for (double c : setting_choices(pol[2]))
        for (double d : setting_choices(pol[3])) fn(std::array<double, 4>{a, b, c, d});
}

CoefficientSums coefficient_sums(const std::array<PolarizerSetting, 4>& pol,
                                 const BeamSplitterSpec& bs) {
  CoefficientSums s;
  for_each_setting(pol, [&](const std::array<double, 4>& th) {
    const double a = analytic::t_coeff(th[0], th[3], bs) * analytic::t_coeff(th[1], th[2], bs);
    const double b = analytic::r_coeff(th[1], th[3], bs) * analytic::r_coeff(th[0], th[2], bs);
    s.aa += a * a;
    s.bb += b * b;
    s.ab += a * b;
  });
  return s;
}

QuadDensity assemble(double F, double T, double cosh_term, double interference) {
  QuadDensity d;
  d.damping_F = F;
  d.cosh_term = cosh_term;
  d.interference = interference;
  d.density = F / std::pow(T, 4) * (cosh_term - interference);
  return d;
}

// Dimensionless x = tau_s tau34 / T^2 and the beat phase (w30 - w40) tau34.
double cosh_argument(const WavePacketParams& p) {
  return p.source_offset() / p.coherence_time * (p.detection_offset() / p.coherence_time);
}
double beat_phase(const WavePacketParams& p) {
  return (p.central_omega[2] - p.central_omega[3]) * p.detection_offset();
}

QuadDensity balanced_form(double angle_diff, const WavePacketParams& params) {
  params.validate();
  if (!params.bs.is_balanced()) {
    throw ConfigError("closed-form densities with an absent polarizer pair need a 50:50 beam splitter");
  }
  const double c2 = sq(std::cos(angle_diff));
  return assemble(damping_factor(params), params.coherence_time, std::cosh(cosh_argument(params)),
                  c2 * std::cos(beat_phase(params)));
}

ExperimentConfig plane_wave_config(const std::array<double, 4>& theta,
                                   const WavePacketParams& params) {
  ExperimentConfig cfg;
  cfg.bs = params.bs;
  cfg.geom = params.geom;
  cfg.timing = params.timing;
  return cfg.with_angles(theta);
}

}  // namespace

WavePacketParams WavePacketParams::centered(double T, double tau_s, double tau34,
                                            const std::array<double, 4>& omega0) {
  WavePacketParams p;
  p.coherence_time = T;
  p.central_omega = omega0;
  p.timing.t0I = tau_s / 2;
  p.timing.t0II = -tau_s / 2;
  p.timing.t1 = p.timing.t0I;
  p.timing.t2 = p.timing.t0II;
  p.timing.t3 = tau34 / 2;
  p.timing.t4 = -tau34 / 2;
  return p;
}

void WavePacketParams::validate() const {
  if (!(coherence_time > 0.0) || !std::isfinite(coherence_time)) {
    throw ConfigError("coherence time T must be > 0");
  }
  bs.validate();
  geom.validate();
  FrequencySpec{central_omega}.validate();
}

double WavePacketParams::source_offset() const {
  return (timing.t0I + geom.rI / geom.c) - (timing.t0II + geom.rII / geom.c);
}

double WavePacketParams::detection_offset() const {
  return (timing.t3 - geom.r3 / geom.c) - (timing.t4 - geom.r4 / geom.c);
}

double gaussian_amp(double omega, double omega0, double T) {
  if (!(T > 0.0)) throw ConfigError("coherence time T must be > 0");
  return std::sqrt(T) / std::pow(kPi, 0.25) * std::exp(-sq((omega - omega0) * T) / 2.0);
}

double damping_factor(const WavePacketParams& params) {
  const auto r = route_offsets(params);
  const double T = params.coherence_time;
  const double mean_right = (sq(r.u34) + sq(r.u43) + sq(r.u33) + sq(r.u44)) / 2.0;
  return 2.0 * kPi * kPi * std::exp(-(sq(r.s1) + sq(r.s2) + mean_right) / (T * T));
}

QuadDensity closed_density(const std::array<PolarizerSetting, 4>& polarizers,
                           const WavePacketParams& params) {
  params.validate();
  const auto sums = coefficient_sums(polarizers, params.bs);
  const double x = cosh_argument(params);
  return assemble(damping_factor(params), params.coherence_time,
                  2.0 * (sums.aa * std::exp(-x) + sums.bb * std::exp(x)),
                  4.0 * sums.ab * std::cos(beat_phase(params)));
}

QuadDensity closed_density_no_left(double theta3, double theta4, const WavePacketParams& params) {
  return balanced_form(theta3 - theta4, params);
}

QuadDensity closed_density_no_right(double theta1, double theta2, const WavePacketParams& params) {
  return balanced_form(theta1 - theta2, params);
}

const HermiteRule& hermite_rule(int order) {
  if (order < 1) throw NumericalError("quadrature order must be positive");
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<HermiteRule>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[order];
  if (slot) return *slot;

  // Golub-Welsch: eigen-decomposition of the symmetric Jacobi matrix of the
  // physicists' Hermite recurrence.
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(order, order);
  for (int k = 1; k < order; ++k) {
    jacobi(k, k - 1) = jacobi(k - 1, k) = std::sqrt(k / 2.0);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  if (solver.info() != Eigen::Success) throw NumericalError("Gauss-Hermite eigen-solve failed");

  auto rule = std::make_unique<HermiteRule>();
  rule->nodes.resize(order);
  rule->weights.resize(order);
  for (int i = 0; i < order; ++i) {
    rule->nodes[i] = solver.eigenvalues()(i);
    rule->weights[i] = std::sqrt(kPi) * sq(solver.eigenvectors()(0, i));
  }
  slot = std::move(rule);
  return *slot;
}

Complex spectral_integral(double omega0, double T, double u, int order) {
  const auto& rule = hermite_rule(order);
  const double k = std::sqrt(2.0) * u / T;
  Complex sum{};
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    sum += rule.weights[i] * std::polar(1.0, k * rule.nodes[i]);
  }
  return std::sqrt(2.0) / (std::pow(kPi, 0.25) * std::sqrt(T)) * std::polar(1.0, omega0 * u) * sum;
}

QuadDensity integrate_quad_density(const std::array<PolarizerSetting, 4>& polarizers,
                                   const WavePacketParams& params,
                                   const QuadratureOptions& options) {
  params.validate();
  if (options.order < 20) throw NumericalError("quadrature order must be at least 20");
  const auto r = route_offsets(params);
  const double T = params.coherence_time;
  const auto& w = params.central_omega;

  auto integrals = [&](int n) {
    return std::array<Complex, 6>{
        spectral_integral(w[0], T, r.s1, n),  spectral_integral(w[1], T, r.s2, n),
        spectral_integral(w[2], T, r.u34, n), spectral_integral(w[3], T, r.u43, n),
        spectral_integral(w[2], T, r.u33, n), spectral_integral(w[3], T, r.u44, n)};
  };

  int n = options.order;
  auto coarse = integrals(n);
  std::array<Complex, 6> fine;
  const double tol = options.rel_tol * spectral_peak(T);
  for (;;) {
    if (2 * n > options.max_order) {
      throw NumericalError("frequency quadrature did not converge by order " +
                           std::to_string(options.max_order));
    }
    fine = integrals(2 * n);
    double change = 0.0;
    for (int i = 0; i < 6; ++i) change = std::max(change, std::abs(fine[i] - coarse[i]));
    if (change < tol) break;
    coarse = fine;
    n *= 2;
  }

  const Complex left = fine[0] * fine[1];
  const Complex transmitted = left * fine[2] * fine[3];
  const Complex reflected = left * fine[4] * fine[5];

  double direct = 0.0;
  double cross = 0.0;
  for_each_setting(polarizers, [&](const std::array<double, 4>& th) {
    const double a =
        analytic::t_coeff(th[0], th[3], params.bs) * analytic::t_coeff(th[1], th[2], params.bs);
    const double b =
        analytic::r_coeff(th[1], th[3], params.bs) * analytic::r_coeff(th[0], th[2], params.bs);
    const Complex t1 = 0.5 * a * transmitted;
    const Complex t2 = 0.5 * b * reflected;
    direct += std::norm(t1) + std::norm(t2);
    cross += 2.0 * (t1 * std::conj(t2)).real();
  });

  QuadDensity d;
  d.damping_F = damping_factor(params);
  d.density = direct - cross;
  const double scale = std::pow(T, 4) / d.damping_F;
  d.cosh_term = direct * scale;
  d.interference = cross * scale;
  return d;
}

Complex tensor_quadrature_amplitude(const std::array<double, 4>& theta,
                                    const WavePacketParams& params, int order) {
  params.validate();
  const auto& rule = hermite_rule(order);
  const double T = params.coherence_time;
  ExperimentConfig cfg = plane_wave_config(theta, params);
  const double scale = std::sqrt(2.0) / (std::pow(kPi, 0.25) * std::sqrt(T));
  const double step = std::sqrt(2.0) / T;
  const auto& w0 = params.central_omega;

  Complex sum{};
  const int n = order;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          const std::array<double, 4> omega{
              w0[0] + step * rule.nodes[i], w0[1] + step * rule.nodes[j],
              w0[2] + step * rule.nodes[k], w0[3] + step * rule.nodes[l]};
          const double weight =
              rule.weights[i] * rule.weights[j] * rule.weights[k] * rule.weights[l];
          sum += weight * analytic::quad_amplitude_at(cfg, omega);
        }
  return std::pow(scale, 4) * sum;
}

Complex separable_quadrature_amplitude(const std::array<double, 4>& theta,
                                       const WavePacketParams& params, int order) {
  params.validate();
  const auto r = route_offsets(params);
  const double T = params.coherence_time;
  const auto& w = params.central_omega;
  const double a =
      analytic::t_coeff(theta[0], theta[3], params.bs) * analytic::t_coeff(theta[1], theta[2], params.bs);
  const double b =
      analytic::r_coeff(theta[1], theta[3], params.bs) * analytic::r_coeff(theta[0], theta[2], params.bs);
  const Complex left =
      spectral_integral(w[0], T, r.s1, order) * spectral_integral(w[1], T, r.s2, order);
  const Complex transmitted =
      spectral_integral(w[2], T, r.u34, order) * spectral_integral(w[3], T, r.u43, order);
  const Complex reflected =
      spectral_integral(w[2], T, r.u33, order) * spectral_integral(w[3], T, r.u44, order);
  return 0.5 * left * (a * transmitted - b * reflected);
}

double one_one_probability(double theta1, double theta2, const WavePacketParams& params) {
  params.validate();
  if (!params.bs.is_balanced()) throw ConfigError("one_one_probability needs a 50:50 beam splitter");
  const double T = params.coherence_time;
  const double q = sq(params.source_offset() / T) / 2.0;
  const double spectral = sq((params.central_omega[2] - params.central_omega[3]) * T) / 2.0;
  return (1.0 - sq(std::cos(theta1 - theta2)) * std::exp(-q - spectral)) / 8.0;
}

double visibility(double tau_s, double tau34, double T) {
  if (!(T > 0.0)) throw ConfigError("coherence time T must be > 0");
  return 1.0 / (2.0 * std::cosh(tau_s * tau34 / (T * T)) - 1.0);
}

double scanned_visibility(const WavePacketParams& params, int steps) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (int k = 0; k <= steps; ++k) {
    const double d = closed_density_no_right(0.0, (kPi / 2) * k / steps, params).density;
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  return (hi - lo) / (hi + lo);
}

BellRegionBound bell_region_bound(double T) {
  if (!(T > 0.0)) throw ConfigError("coherence time T must be > 0");
  BellRegionBound b;
  b.T = T;
  b.analytic_product = std::acosh((1.0 + std::sqrt(2.0)) / 2.0);

  const double threshold = 1.0 / std::sqrt(2.0);
  auto f = [threshold](double x) { return visibility(x, 1.0, 1.0) - threshold; };
  boost::math::tools::eps_tolerance<double> tol(52);
  const auto [lo, hi] = boost::math::tools::bisect(f, 0.0, 5.0, tol);
  b.bisection_product = (lo + hi) / 2.0;
  b.relative_discrepancy = (b.printed_product - b.analytic_product) / b.analytic_product;
  return b;
}

bool in_bell_region(double tau_s, double tau34, double T) {
  return visibility(tau_s, tau34, T) > 1.0 / std::sqrt(2.0);
}

}  // namespace fourphoton::wavepacket
