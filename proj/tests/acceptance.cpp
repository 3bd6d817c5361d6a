// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fourphoton/analytic.hpp"
#include "fourphoton/bell.hpp"
#include "fourphoton/cli.hpp"
#include "fourphoton/montecarlo.hpp"
#include "fourphoton/oracle.hpp"
#include "fourphoton/wavepacket.hpp"

using namespace fourphoton;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

double sq(double x) { return x * x; }

const std::array<double, 5> kGrid{0.0, kPi / 8, kPi / 4, 3 * kPi / 8, kPi / 2};

std::string format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

Outcome quad_grid() {
  double worst = 0.0;
  for (double a : kGrid)
    for (double b : kGrid)
      for (double c : kGrid)
        for (double d : kGrid) {
          const double expected = sq(std::sin(a - b)) * sq(std::sin(c - d)) / 16;
          const double o = oracle::quad_probability(ExperimentConfig::symmetric(a, b, c, d));
          worst = std::max(worst, std::abs(o - expected));
        }
  return {worst < 1e-12, format("625 points, max |diff| = %.3g", worst)};
}

Outcome absent_grid() {
  double worst = 0.0;
  for (double a : kGrid)
    for (double b : kGrid) {
      auto left = ExperimentConfig::symmetric(0, 0, a, b);
      left.polarizers[0] = left.polarizers[1] = PolarizerSetting::absent();
      const double p4 = (1 - sq(std::cos(a - b))) / 8;
      worst = std::max(worst, std::abs(oracle::quad_probability(left) - p4));
      worst = std::max(worst, std::abs(analytic::prob_no_left_polarizers(a, b, 1, 1, 0, 0, 0, 0) - p4));

      auto right = ExperimentConfig::symmetric(a, b, 0, 0);
      right.polarizers[2] = right.polarizers[3] = PolarizerSetting::absent();
      const double p5 = (1 - sq(std::cos(a - b))) / 8;
      worst = std::max(worst, std::abs(oracle::quad_probability(right) - p5));
      worst = std::max(worst, std::abs(analytic::prob_no_right_polarizers(a, b, 1, 1, 0, 0, 0, 0) - p5));
    }
  return {worst < 1e-12, format("2 x 25 points, max |diff| = %.3g", worst)};
}

Outcome same_beam() {
  double worst = 0.0;
  for (double a : kGrid)
    for (double b : kGrid)
      for (double c : kGrid) {
        const double expected = sq(std::cos(a - c)) * sq(std::cos(b - c)) / 4;
        const auto cfg = ExperimentConfig::symmetric(a, b, c, c);
        worst = std::max(worst, std::abs(oracle::same_beam_moment(cfg, a, b, c) - expected));
      }
  return {worst < 1e-12, format("125 points, max |diff| = %.3g", worst)};
}

Outcome channel_sum() {
  double worst = 0.0;
  for (double a : kGrid)
    for (double b : kGrid) {
      const double closed = analytic::prob_one_one_channel_no_right(a, b) +
                            analytic::prob_two_photon_channels_no_right(a, b);
      const auto ch = oracle::output_channels(BeamSplitterSpec::balanced(), a, b);
      const auto cfg = ExperimentConfig::symmetric(a, b, 0, 0);
      const double moment = oracle::two_photon_channels_moment_route(cfg, a, b) + ch.one_one;
      worst = std::max({worst, std::abs(closed - 0.25), std::abs(ch.total() - 0.25),
                        std::abs(moment - 0.25)});
    }
  return {worst < 1e-12, format("25 points, max |sum - 1/4| = %.3g", worst)};
}

Outcome zero_witness() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> angle(0.0, kPi);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const double t = angle(rng);
    worst = std::max(worst, oracle::quad_probability(ExperimentConfig::symmetric(t, t, t, t)));
    worst = std::max(worst, bell::zero_coincidence_witness(t));
  }
  return {worst < 1e-14, format("100 random angles, max P = %.3g", worst)};
}

Outcome wavepacket_grid() {
  double worst = 0.0;
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j)
      for (int k = 0; k < 10; ++k) {
        const double ts = -2.0 + 4.0 * i / 9;
        const double t34 = -2.0 + 4.0 * j / 9;
        const double dtheta = (kPi / 2) * k / 9;
        const auto p = wavepacket::WavePacketParams::centered(1.0, ts, t34, {2, 2, 2, 2});
        const std::array<PolarizerSetting, 4> pol{PolarizerSetting::at(0), PolarizerSetting::at(dtheta),
                                                  PolarizerSetting::absent(), PolarizerSetting::absent()};
        const double closed = wavepacket::closed_density_no_right(0, dtheta, p).density;
        const double numeric = wavepacket::integrate_quad_density(pol, p).density;
        worst = std::max(worst, std::abs(numeric - closed) / closed);
        const std::array<PolarizerSetting, 4> mirrored{pol[2], pol[3], pol[0], pol[1]};
        const double closed_l = wavepacket::closed_density_no_left(0, dtheta, p).density;
        const double numeric_l = wavepacket::integrate_quad_density(mirrored, p).density;
        worst = std::max(worst, std::abs(numeric_l - closed_l) / closed_l);
      }
  return {worst < 1e-6, format("1000 points x 2 forms, max rel err = %.3g", worst)};
}

Outcome visibility_threshold() {
  const auto b = wavepacket::bell_region_bound(1.0);
  const double root_err = std::abs(b.bisection_product - b.analytic_product);
  const bool ok = root_err < 1e-9 && std::abs(b.relative_discrepancy) < 0.05;
  return {ok, format("x* = %.10f (bisection diff %.2g), reference 0.663 differs by %+.2f%%",
                     b.analytic_product, root_err, 100 * b.relative_discrepancy)};
}

montecarlo::MonteCarloConfig fringe_config() {
  montecarlo::MonteCarloConfig cfg;
  cfg.n_events = 1000000;
  cfg.seed = 20240601;
  cfg.sigma_s = 0.0;
  cfg.window34 = 0.05;
  cfg.physics.polarizers = {PolarizerSetting::at(0), PolarizerSetting::at(0),
                            PolarizerSetting::absent(), PolarizerSetting::absent()};
  return cfg;
}

Outcome mc_fringe() {
  const auto st = montecarlo::run(fringe_config());
  const double pulls = std::abs(st.visibility_est - 1.0) / st.visibility_stderr;
  return {pulls < 3, format("v = %.4f +- %.4f (%.2f sigma from 1), %llu in window", st.visibility_est,
                            st.visibility_stderr, pulls,
                            static_cast<unsigned long long>(st.n_in_window))};
}

Outcome chsh() {
  const auto exact = bell::chsh_S(bell::CorrelationSource::analytic(bell::quantum_left_probability),
                                  bell::CHSHSettings::canonical());
  auto cfg = fringe_config();
  cfg.window12 = montecarlo::kUnbounded;
  const auto sim = montecarlo::chsh_experiment(cfg, bell::CHSHSettings::canonical());
  const double exact_err = std::abs(exact.S - 2 * std::sqrt(2.0));
  const double sigmas = (sim.chsh.S - 2) / sim.chsh.std_error;
  return {exact_err < 1e-12 && sigmas >= 3,
          format("analytic S = %.15f; simulated S = %.4f +- %.4f (%.1f sigma above 2)", exact.S,
                 sim.chsh.S, sim.chsh.std_error, sigmas)};
}

Outcome lhv() {
  bell::LhvOptions opt;
  opt.n_events = 100000;
  opt.seed = 31337;
  const auto r = bell::lhv_baseline(opt);
  const bool ok = r.fringe.visibility <= 0.5 + 3 * r.fringe.std_error &&
                  r.chsh.S <= 2 + 3 * r.chsh.std_error;
  return {ok, format("v = %.4f +- %.4f, S = %.4f +- %.4f", r.fringe.visibility, r.fringe.std_error,
                     r.chsh.S, r.chsh.std_error)};
}

Outcome mean_tau34() {
  auto cfg = fringe_config();
  cfg.window34 = montecarlo::kUnbounded;
  cfg.n_events = 1000000;
  const auto a = montecarlo::run(cfg);
  cfg.threads = 1;
  const auto b = montecarlo::run(cfg);
  const bool identical = a.mean_abs_tau34 == b.mean_abs_tau34 && a.histogram == b.histogram;
  return {identical, format("<|tau34|> = %.4f T (rms %.4f T); reference sqrt(2) T = 1.4142 T, "
                            "sqrt(2/pi) T = %.4f T; bit-identical rerun: %s",
                            a.mean_abs_tau34, a.rms_tau34, std::sqrt(2 / kPi),
                            identical ? "yes" : "no")};
}

Outcome determinism() {
  auto run = [](std::vector<std::string> args) {
    args.insert(args.begin(), "fourphoton");
    std::vector<const char*> argv;
    for (const auto& s : args) argv.push_back(s.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return std::make_pair(code, out.str());
  };
  const std::vector<std::string> mc{"montecarlo", "--seed", "12", "--set", "n_events=100000",
                                    "--set", "sigma_s=1", "--set", "window34=0.5"};
  const std::vector<std::string> ch{"chsh", "--seed", "12", "--set", "n_events=160000",
                                    "--set", "window34=0.05", "--lhv"};
  const auto m1 = run(mc), m2 = run(mc), c1 = run(ch), c2 = run(ch);
  const bool ok = m1.first == 0 && c1.first == 0 && m1 == m2 && c1 == c2;
  return {ok, format("montecarlo %zu bytes, chsh %zu bytes, identical: %s", m1.second.size(),
                     c1.second.size(), ok ? "yes" : "no")};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> check;
    double time_limit;  // seconds; 0 = none
  };
  const std::vector<Criterion> criteria{
      {"quad coincidence vs operator algebra", quad_grid, 5},
      {"absent-polarizer formulas vs operator algebra", absent_grid, 0},
      {"same-beam channel", same_beam, 0},
      {"channel-sum conservation", channel_sum, 0},
      {"zero-coincidence witness", zero_witness, 0},
      {"wave-packet quadrature vs closed form", wavepacket_grid, 30},
      {"visibility threshold", visibility_threshold, 0},
      {"Monte Carlo fringe visibility", mc_fringe, 60},
      {"CHSH analytic and simulated", chsh, 0},
      {"local hidden-variable baseline", lhv, 0},
      {"mean |tau34|", mean_tau34, 0},
      {"determinism", determinism, 0},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto& c = criteria[i];
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.time_limit > 0 && secs > c.time_limit) {
      o.pass = false;
      o.detail += format(" [over %.0f s limit]", c.time_limit);
    }
    failures += !o.pass;
    std::printf("%s %2zu  %-46s %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", i + 1, c.name,
                o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
