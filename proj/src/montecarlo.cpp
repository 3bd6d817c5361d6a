#include "fourphoton/montecarlo.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "fourphoton/wavepacket.hpp"

namespace fourphoton::montecarlo {

namespace {

double sq(double x) { return x * x; }

constexpr double kEnvelopeSlack = 1e-12;

struct Job {
  std::size_t setting;
  std::uint64_t batch;
  std::uint64_t count;
};

// Left photon: passes with probability 1/2 at theta or is blocked, which is a
// projection onto theta + pi/2. Without a polarizer the basis is drawn at random.
double left_projection(const PolarizerSetting& p, Rng& rng, bool& passed) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (p.present()) {
    passed = unit(rng) < 0.5;
    return passed ? p.angle() : p.angle() + kPi / 2;
  }
  passed = true;
  return unit(rng) < 0.5 ? 0.0 : kPi / 2;
}

SettingTally empty_tally(const MonteCarloConfig& cfg, double theta1, double theta2) {
  SettingTally t;
  t.theta1 = theta1;
  t.theta2 = theta2;
  t.histogram.assign(static_cast<std::size_t>(cfg.histogram_bins), 0);
  return t;
}

void record(const MonteCarloConfig& cfg, const DetectionRecord& ev, SettingTally& tally) {
  ++tally.n_emitted;
  switch (ev.channel) {
    case Channel::OneOne: ++tally.one_one; break;
    case Channel::TwoAtD3: ++tally.two_d3; break;
    case Channel::TwoAtD4: ++tally.two_d4; break;
  }
  if (!ev.quad()) return;
  ++tally.n_quad_detected;
  if (!(std::abs(ev.t[0] - ev.t[1]) <= cfg.window12)) return;

  const double tau = ev.tau34();
  const double u = tau / cfg.coherence_time;
  if (std::abs(u) < cfg.histogram_range) {
    const double pos = (u + cfg.histogram_range) / (2.0 * cfg.histogram_range);
    const auto bin = std::min(static_cast<std::size_t>(pos * cfg.histogram_bins),
                              static_cast<std::size_t>(cfg.histogram_bins - 1));
    ++tally.histogram[bin];
  }
  if (!(std::abs(tau) <= cfg.window34)) return;
  ++tally.n_in_window;
  tally.sum_abs_tau34.add(std::abs(tau));
  tally.sum_sq_tau34.add(tau * tau);
}

std::vector<std::uint64_t> split_events(std::uint64_t n, std::size_t parts) {
  std::vector<std::uint64_t> out(parts, n / parts);
  for (std::size_t k = 0; k < n % parts; ++k) ++out[k];
  return out;
}

StatisticsUnavailable unavailable(const std::string& what, const std::vector<SettingTally>& t) {
  std::uint64_t e = 0, q = 0, w = 0;
  for (const auto& s : t) {
    e += s.n_emitted;
    q += s.n_quad_detected;
    w += s.n_in_window;
  }
  return StatisticsUnavailable(what, e, q, w);
}

}  // namespace

void MonteCarloConfig::validate() const {
  if (n_events == 0) throw ConfigError("n_events must be positive");
  if (!(sigma_s >= 0.0) || !std::isfinite(sigma_s)) throw ConfigError("sigma_s must be >= 0");
  if (!(window34 >= 0.0)) throw ConfigError("window34 must be >= 0");
  if (!(window12 >= 0.0)) throw ConfigError("window12 must be >= 0");
  if (!(detector_efficiency >= 0.0 && detector_efficiency <= 1.0)) {
    throw ConfigError("efficiency must be in [0, 1]");
  }
  if (!(coherence_time > 0.0) || !std::isfinite(coherence_time)) {
    throw ConfigError("coherence time T must be > 0");
  }
  if (scan_angles < 8) throw ConfigError("scan_angles must be >= 8");
  if (batch_size == 0) throw ConfigError("batch_size must be positive");
  if (histogram_bins < 1) throw ConfigError("histogram_bins must be positive");
  if (!(histogram_range > 0.0)) throw ConfigError("histogram_range must be positive");
  physics.bs.validate();
  if (!physics.bs.is_balanced()) {
    throw ConfigError("the event simulation needs a 50:50 beam splitter");
  }
  physics.geom.validate();
  FrequencySpec{central_omega}.validate();
}

StatisticsUnavailable::StatisticsUnavailable(const std::string& what, std::uint64_t emitted,
                                             std::uint64_t quad, std::uint64_t in_window)
    : std::runtime_error(what + " (emitted " + std::to_string(emitted) + ", quadruples " +
                         std::to_string(quad) + ", in window " + std::to_string(in_window) + ")"),
      n_emitted(emitted),
      n_quad_detected(quad),
      n_in_window(in_window) {}

Rng make_stream(std::uint64_t seed, std::uint64_t setting, std::uint64_t batch) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(setting), static_cast<std::uint32_t>(setting >> 32),
                    static_cast<std::uint32_t>(batch),   static_cast<std::uint32_t>(batch >> 32)};
  return Rng(seq);
}

DetectionRecord sample_event(const MonteCarloConfig& cfg, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double T = cfg.coherence_time;
  const auto& g = cfg.physics.geom;
  const auto& pol = cfg.physics.polarizers;

  DetectionRecord ev;
  ev.t.fill(std::numeric_limits<double>::quiet_NaN());
  ev.tau_s = cfg.sigma_s > 0.0 ? cfg.sigma_s * normal(rng) : 0.0;
  const double spectral_sd = 1.0 / (std::sqrt(2.0) * T);
  ev.omega3 = cfg.central_omega[2] + spectral_sd * normal(rng);
  ev.omega4 = cfg.central_omega[3] + spectral_sd * normal(rng);

  wavepacket::WavePacketParams params;
  params.coherence_time = T;
  params.central_omega = cfg.central_omega;
  params.bs = cfg.physics.bs;
  params.geom = g;
  auto& tm = params.timing;
  tm.t0I = ev.tau_s / 2;
  tm.t0II = -ev.tau_s / 2;

  std::array<double, 2> eff{};
  for (int j = 0; j < 2; ++j) {
    bool passed = false;
    eff[j] = left_projection(pol[j], rng, passed);
    ev.passed[j] = passed;
  }
  const double left_sd = T / std::sqrt(2.0);
  tm.t1 = tm.t0I + g.r1 / g.c + left_sd * normal(rng);
  tm.t2 = tm.t0II + g.r2 / g.c + left_sd * normal(rng);
  ev.t[0] = tm.t1;
  ev.t[1] = tm.t2;

  // Right-side arrival times referred to the beam splitter. The envelope
  // (F/T^4)(cosh x + 1) factorizes into a Gaussian in the common time and a
  // three-component Gaussian mixture in the difference.
  const double a = tm.t0I + g.rI / g.c;
  const double b = tm.t0II + g.rII / g.c;
  const double s = a - b;
  const double centre = (a + b) / 2;
  const double q = sq(s / T) / 2;
  const double common = centre + (T / 2) * normal(rng);
  double tau;
  if (unit(rng) < 1.0 / (1.0 + std::exp(-q))) {
    tau = (unit(rng) < 0.5 ? s : -s) + T * normal(rng);
  } else {
    tau = T * normal(rng);
  }
  tm.t3 = common + tau / 2 + g.r3 / g.c;
  tm.t4 = common - tau / 2 + g.r4 / g.c;

  const auto target = wavepacket::closed_density_no_right(eff[0], eff[1], params);
  const double ratio = (target.cosh_term - target.interference) / (target.cosh_term + 1.0);
  if (!(ratio <= 1.0 + kEnvelopeSlack) || !(ratio >= -kEnvelopeSlack)) {
    throw wavepacket::NumericalError("rejection envelope exceeded: ratio " + std::to_string(ratio));
  }

  const bool one_one = unit(rng) < ratio * (1.0 + std::exp(-q)) / 2.0;
  if (one_one) {
    ev.channel = Channel::OneOne;
    ev.t[2] = tm.t3;
    ev.t[3] = tm.t4;
    ev.passed[2] = ev.passed[3] = true;
    if (pol[2].present() || pol[3].present()) {
      // Split the 1-1 density over the right polarizer outcomes.
      std::array<double, 4> weight{};
      std::array<std::array<bool, 2>, 4> outcome{};
      int n = 0;
      for (int o3 = 0; o3 < (pol[2].present() ? 2 : 1); ++o3) {
        for (int o4 = 0; o4 < (pol[3].present() ? 2 : 1); ++o4) {
          auto setting = [](const PolarizerSetting& p, int o) {
            return p.present() ? PolarizerSetting::at(p.angle() + o * kPi / 2)
                               : PolarizerSetting::absent();
          };
          const std::array<PolarizerSetting, 4> sel{
              PolarizerSetting::at(eff[0]), PolarizerSetting::at(eff[1]), setting(pol[2], o3),
              setting(pol[3], o4)};
          weight[n] = std::max(0.0, wavepacket::closed_density(sel, params).density);
          outcome[n] = {o3 == 0, o4 == 0};
          ++n;
        }
      }
      double total = 0.0;
      for (int k = 0; k < n; ++k) total += weight[k];
      double pick = unit(rng) * total;
      int chosen = n - 1;
      for (int k = 0; k < n; ++k) {
        if (pick < weight[k]) {
          chosen = k;
          break;
        }
        pick -= weight[k];
      }
      ev.passed[2] = outcome[chosen][0];
      ev.passed[3] = outcome[chosen][1];
    }
  } else {
    ev.channel = unit(rng) < 0.5 ? Channel::TwoAtD3 : Channel::TwoAtD4;
    const int port = ev.channel == Channel::TwoAtD3 ? 2 : 3;
    ev.t[port] = common + (port == 2 ? g.r3 : g.r4) / g.c;
    ev.passed[port] = true;
  }

  for (int k = 0; k < 4; ++k) {
    const bool arrived = !std::isnan(ev.t[k]);
    bool detected = arrived && ev.passed[k];
    if (detected && cfg.detector_efficiency < 1.0) detected = unit(rng) < cfg.detector_efficiency;
    ev.fired[k] = detected;
  }
  return ev;
}

void CompensatedSum::add(double x) {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x)) {
    comp_ += (sum_ - t) + x;
  } else {
    comp_ += (x - t) + sum_;
  }
  sum_ = t;
}

void CompensatedSum::merge(const CompensatedSum& other) {
  add(other.sum_);
  add(other.comp_);
}

void SettingTally::merge(const SettingTally& other) {
  n_emitted += other.n_emitted;
  n_quad_detected += other.n_quad_detected;
  n_in_window += other.n_in_window;
  one_one += other.one_one;
  two_d3 += other.two_d3;
  two_d4 += other.two_d4;
  sum_abs_tau34.merge(other.sum_abs_tau34);
  sum_sq_tau34.merge(other.sum_sq_tau34);
  if (histogram.size() < other.histogram.size()) histogram.resize(other.histogram.size(), 0);
  for (std::size_t k = 0; k < other.histogram.size(); ++k) histogram[k] += other.histogram[k];
}

std::vector<SettingTally> simulate_settings(const MonteCarloConfig& cfg,
                                            const std::vector<std::array<double, 2>>& settings,
                                            const std::vector<std::uint64_t>& events_per_setting) {
  cfg.validate();
  if (settings.size() != events_per_setting.size()) {
    throw std::invalid_argument("settings and events_per_setting differ in length");
  }

  std::vector<Job> jobs;
  for (std::size_t k = 0; k < settings.size(); ++k) {
    const std::uint64_t n = events_per_setting[k];
    for (std::uint64_t b = 0; b * cfg.batch_size < n; ++b) {
      jobs.push_back({k, b, std::min(cfg.batch_size, n - b * cfg.batch_size)});
    }
  }

  std::vector<MonteCarloConfig> per_setting(settings.size(), cfg);
  for (std::size_t k = 0; k < settings.size(); ++k) {
    per_setting[k].physics.polarizers[0] = PolarizerSetting::at(settings[k][0]);
    per_setting[k].physics.polarizers[1] = PolarizerSetting::at(settings[k][1]);
  }

  std::vector<SettingTally> results(jobs.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t j = next++; j < jobs.size(); j = next++) {
      try {
        const Job& job = jobs[j];
        const auto& c = per_setting[job.setting];
        Rng rng = make_stream(cfg.seed, job.setting, job.batch);
        SettingTally tally =
            empty_tally(cfg, settings[job.setting][0], settings[job.setting][1]);
        for (std::uint64_t i = 0; i < job.count; ++i) record(c, sample_event(c, rng), tally);
        results[j] = std::move(tally);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = jobs.size();
      }
    }
  };

  unsigned n_threads = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  n_threads = static_cast<unsigned>(std::min<std::size_t>(n_threads, std::max<std::size_t>(jobs.size(), 1)));
  std::vector<std::thread> pool;
  for (unsigned i = 1; i < n_threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  std::vector<SettingTally> merged;
  for (std::size_t k = 0; k < settings.size(); ++k) {
    merged.push_back(empty_tally(cfg, settings[k][0], settings[k][1]));
  }
  for (std::size_t j = 0; j < jobs.size(); ++j) merged[jobs[j].setting].merge(results[j]);
  return merged;
}

CoincidenceStats run(const MonteCarloConfig& cfg) {
  cfg.validate();
  const auto& p1 = cfg.physics.polarizers[0];
  const double theta1 = p1.present() ? p1.angle() : 0.0;
  const auto n = static_cast<std::size_t>(cfg.scan_angles);

  std::vector<std::array<double, 2>> settings;
  for (std::size_t k = 0; k < n; ++k) settings.push_back({theta1, theta1 + kPi * k / n});
  const auto tallies = simulate_settings(cfg, settings, split_events(cfg.n_events, n));

  CoincidenceStats st;
  CompensatedSum abs_sum, sq_sum;
  std::vector<bell::FringePoint> points;
  st.histogram.assign(static_cast<std::size_t>(cfg.histogram_bins), 0);
  for (std::size_t k = 0; k < n; ++k) {
    const auto& t = tallies[k];
    st.n_emitted += t.n_emitted;
    st.n_quad_detected += t.n_quad_detected;
    st.n_in_window += t.n_in_window;
    st.one_one += t.one_one;
    st.two_d3 += t.two_d3;
    st.two_d4 += t.two_d4;
    abs_sum.merge(t.sum_abs_tau34);
    sq_sum.merge(t.sum_sq_tau34);
    for (std::size_t b = 0; b < t.histogram.size(); ++b) st.histogram[b] += t.histogram[b];
    points.push_back({kPi * k / n, t.n_in_window, t.n_emitted});
  }
  st.per_angle = tallies;
  for (int b = 0; b <= cfg.histogram_bins; ++b) {
    st.histogram_edges.push_back(-cfg.histogram_range +
                                 2.0 * cfg.histogram_range * b / cfg.histogram_bins);
  }
  if (st.n_in_window == 0) throw unavailable("no quadruple coincidence inside the window", tallies);

  const double w = static_cast<double>(st.n_in_window);
  st.mean_abs_tau34 = abs_sum.value() / w;
  st.rms_tau34 = std::sqrt(sq_sum.value() / w);
  st.postselect_fraction = w / static_cast<double>(st.n_quad_detected);
  try {
    const auto fit = bell::fit_cos2_fringe(points);
    st.visibility_est = fit.visibility;
    st.visibility_stderr = fit.std_error;
  } catch (const bell::UndefinedCorrelation& e) {
    throw unavailable(e.what(), tallies);
  }
  return st;
}

ChshExperiment chsh_experiment(const MonteCarloConfig& cfg, const bell::CHSHSettings& settings) {
  cfg.validate();
  if (cfg.physics.polarizers[2].present() || cfg.physics.polarizers[3].present()) {
    throw ConfigError("the CHSH experiment needs the right polarizers absent");
  }
  const auto s = settings.normalized();
  const std::array<double, 4> left1{s.a, s.a + kPi / 2, s.a_prime, s.a_prime + kPi / 2};
  const std::array<double, 4> left2{s.b, s.b + kPi / 2, s.b_prime, s.b_prime + kPi / 2};
  std::vector<std::array<double, 2>> pairs;
  for (double x : left1)
    for (double y : left2) pairs.push_back({x, y});
  const std::vector<std::uint64_t> counts(pairs.size(), cfg.n_events / pairs.size());

  ChshExperiment out;
  out.tallies = simulate_settings(cfg, pairs, counts);
  auto hits = [&](int i, int j) { return out.tallies[static_cast<std::size_t>(4 * i + j)].n_in_window; };

  std::vector<bell::SettingCounts> tallies;
  for (int ia : {0, 2}) {
    for (int ib : {0, 2}) {
      bell::SettingCounts sc{left1[ia], left2[ib], {}};
      sc.counts.pp = hits(ia, ib);
      sc.counts.pm = hits(ia, ib + 1);
      sc.counts.mp = hits(ia + 1, ib);
      sc.counts.mm = hits(ia + 1, ib + 1);
      tallies.push_back(sc);
    }
  }
  try {
    out.chsh = bell::chsh_S(bell::CorrelationSource::counts(std::move(tallies)), s);
  } catch (const bell::UndefinedCorrelation& e) {
    throw unavailable(e.what(), out.tallies);
  }
  return out;
}

double predicted_visibility(const MonteCarloConfig& cfg) {
  cfg.validate();
  const double T = cfg.coherence_time;
  const auto& g = cfg.physics.geom;
  const double dw = cfg.central_omega[2] - cfg.central_omega[3];
  const double shift = (g.r3 - g.r4) / g.c;
  const double rt2T = std::sqrt(2.0) * T;
  const bool bounded = std::isfinite(cfg.window34);
  // Detection offset tau with |tau + shift| <= window34.
  const double lo = -cfg.window34 - shift;
  const double hi = cfg.window34 - shift;

  // Window integral of exp(-tau^2/2T^2) cos(dw tau).
  double beat;
  if (!bounded) {
    beat = std::sqrt(2.0 * kPi) * T * std::exp(-sq(dw * T) / 2);
  } else {
    auto f = [&](double tau) { return std::exp(-sq(tau / T) / 2) * std::cos(dw * tau); };
    beat = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, lo, hi, 15, 1e-12);
  }

  auto source_term = [&](double s) {
    const double q = sq(s / T) / 2;
    double cosh_part;
    if (!bounded) {
      cosh_part = std::sqrt(2.0 * kPi) * T;
    } else {
      auto mass = [&](double m) {
        return std::sqrt(kPi / 2) * T * (std::erf((hi - m) / rt2T) - std::erf((lo - m) / rt2T));
      };
      cosh_part = (mass(s) + mass(-s)) / 2;
    }
    return std::array<double, 2>{cosh_part, std::exp(-q) * beat};
  };

  const double base = (g.rI - g.rII) / g.c;
  double C = 0.0, R = 0.0;
  if (cfg.sigma_s > 0.0) {
    const auto& rule = wavepacket::hermite_rule(64);
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const auto v = source_term(base + std::sqrt(2.0) * cfg.sigma_s * rule.nodes[i]);
      C += rule.weights[i] * v[0];
      R += rule.weights[i] * v[1];
    }
  } else {
    const auto v = source_term(base);
    C = v[0];
    R = v[1];
  }
  return std::abs(R) / (2.0 * C - R);
}

}  // namespace fourphoton::montecarlo
