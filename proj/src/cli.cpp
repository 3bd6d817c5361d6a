#include "fourphoton/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

#include "fourphoton/analytic.hpp"
#include "fourphoton/oracle.hpp"

namespace fourphoton::cli {

namespace {

constexpr double kRadPerDeg = kPi / 180.0;
constexpr double kOracleTolerance = 1e-12;
constexpr double kQuadratureTolerance = 1e-6;
constexpr double kReferenceMeanTau34 = 1.4142135623730951;  // sqrt 2, in units of T

using config::format_double;
using AngleRow = std::array<std::optional<double>, 4>;  // degrees

std::string fmt(double x) { return format_double(x); }

std::string angle_text(const std::optional<double>& deg) {
  return deg ? fmt(*deg) : std::string("absent");
}

std::optional<double> parse_angle_token(const std::string& tok) {
  if (tok == "absent") return std::nullopt;
  config::RunSettings probe;
  config::set_value(probe, "theta1", tok);
  return probe.theta_deg[0];
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(item);
  return out;
}

// Which angles a formula varies over, and which polarizers it removes.
struct FormulaShape {
  std::array<bool, 4> varies;
  std::array<bool, 4> absent;
};

FormulaShape shape_of(const std::string& formula) {
  if (formula == "quad" || formula == "eq3") return {{true, true, true, true}, {}};
  if (formula == "no-left" || formula == "eq4") {
    return {{false, false, true, true}, {true, true, false, false}};
  }
  if (formula == "no-right" || formula == "eq5") {
    return {{true, true, false, false}, {false, false, true, true}};
  }
  if (formula == "same-beam") return {{true, true, true, false}, {false, false, false, true}};
  if (formula == "channels") return {{true, true, false, false}, {false, false, true, true}};
  throw ConfigError("unknown formula '" + formula + "'");
}

double rad(const std::optional<double>& deg) { return *deg * kRadPerDeg; }

// (closed form, operator algebra) for one row.
std::pair<double, double> evaluate(const std::string& formula, const config::RunSettings& s,
                                   const AngleRow& row) {
  config::RunSettings local = s;
  local.theta_deg = row;
  const ExperimentConfig cfg = local.experiment();
  const auto& w = s.freq.omega;
  const auto& g = s.geom;
  const auto& t = s.timing;

  if (formula == "quad") {
    return {analytic::quad_probability(cfg).value, oracle::quad_probability(cfg)};
  }
  if (formula == "eq3") {
    return {analytic::quad_coincidence_prob(rad(row[0]), rad(row[1]), rad(row[2]), rad(row[3])),
            oracle::quad_probability(cfg)};
  }
  if (formula == "no-left" || formula == "eq4") {
    return {analytic::prob_no_left_polarizers(rad(row[2]), rad(row[3]), w[2], w[3], g.r3, g.r4,
                                              t.t3, t.t4, g.c),
            oracle::quad_probability(cfg)};
  }
  if (formula == "no-right" || formula == "eq5") {
    return {analytic::prob_no_right_polarizers(rad(row[0]), rad(row[1]), w[2], w[3], g.r3, g.r4,
                                               t.t3, t.t4, g.c),
            oracle::quad_probability(cfg)};
  }
  if (formula == "same-beam") {
    return {analytic::prob_both_same_beam(rad(row[0]), rad(row[1]), rad(row[2])),
            oracle::same_beam_moment(cfg, rad(row[0]), rad(row[1]), rad(row[2]))};
  }
  // channels: 1-1 plus both 2-photon channels
  const double a = analytic::prob_one_one_channel_no_right(rad(row[0]), rad(row[1])) +
                   analytic::prob_two_photon_channels_no_right(rad(row[0]), rad(row[1]));
  return {a, oracle::output_channels(s.bs, rad(row[0]), rad(row[1])).total()};
}

std::vector<AngleRow> angle_rows(const FormulaShape& shape, const AnalyticOptions& opt) {
  if (opt.theta) {
    AngleRow row;
    for (int i = 0; i < 4; ++i) row[i] = parse_angle_token((*opt.theta)[i]);
    for (int i = 0; i < 4; ++i) {
      if (shape.absent[i]) row[i] = std::nullopt;
      else if (!row[i]) throw ConfigError("formula needs a polarizer angle for theta" +
                                          std::to_string(i + 1));
    }
    return {row};
  }
  const auto values = parse_grid(opt.grid, 0.0, 90.0);
  std::vector<AngleRow> rows{AngleRow{}};
  for (int i = 0; i < 4; ++i) {
    std::vector<AngleRow> next;
    for (const auto& r : rows) {
      if (!shape.varies[i]) {
        next.push_back(r);
        continue;
      }
      for (double v : values) {
        auto c = r;
        c[i] = v;
        next.push_back(c);
      }
    }
    rows = std::move(next);
  }
  return rows;
}

void write_histogram(std::ostream& out, const montecarlo::CoincidenceStats& st) {
  out << "tau34_over_T,count\n";
  for (std::size_t b = 0; b < st.histogram.size(); ++b) {
    const double centre = (st.histogram_edges[b] + st.histogram_edges[b + 1]) / 2;
    out << fmt(centre) << ',' << st.histogram[b] << '\n';
  }
}

}  // namespace

std::vector<double> parse_grid(const std::string& spec, double default_start,
                               double default_stop) {
  const auto parts = split(spec, ':');
  double start = default_start;
  double stop = default_stop;
  std::string count_text;
  if (parts.size() == 1) {
    count_text = parts[0];
  } else if (parts.size() == 3) {
    config::RunSettings probe;
    config::set_value(probe, "T", parts[0]);
    start = probe.T;
    config::set_value(probe, "T", parts[1]);
    stop = probe.T;
    count_text = parts[2];
  } else {
    throw ConfigError("grid '" + spec + "': expected N or start:stop:count");
  }
  config::RunSettings probe;
  config::set_value(probe, "n_events", count_text);
  const auto n = probe.n_events;
  if (n == 0) throw ConfigError("grid '" + spec + "': count must be positive");
  if (!std::isfinite(start) || !std::isfinite(stop)) {
    throw ConfigError("grid '" + spec + "': bounds must be finite");
  }
  std::vector<double> out;
  for (std::uint64_t k = 0; k < n; ++k) {
    out.push_back(n == 1 ? start : start + (stop - start) * static_cast<double>(k) / (n - 1));
  }
  return out;
}

int cmd_analytic(const config::RunManifest& manifest, const AnalyticOptions& opt,
                 std::ostream& out) {
  std::string formula = opt.formula;
  if (opt.absent == "left") formula = "no-left";
  else if (opt.absent == "right") formula = "no-right";
  else if (!opt.absent.empty()) throw ConfigError("--absent expects 'left' or 'right'");
  const auto shape = shape_of(formula);
  const auto rows = angle_rows(shape, opt);

  config::write_manifest(out, manifest);
  out << "# formula: " << formula << '\n';
  out << "theta1,theta2,theta3,theta4,P_analytic,P_oracle,abs_diff\n";
  double worst = 0.0;
  for (const auto& row : rows) {
    const auto [a, o] = evaluate(formula, manifest.settings, row);
    const double diff = std::abs(a - o);
    worst = std::max(worst, diff);
    out << angle_text(row[0]) << ',' << angle_text(row[1]) << ',' << angle_text(row[2]) << ','
        << angle_text(row[3]) << ',' << fmt(a) << ',' << fmt(o) << ',' << fmt(diff) << '\n';
  }
  return worst < kOracleTolerance ? kOk : kFailure;
}

int cmd_wavepacket(const config::RunManifest& manifest, const WavepacketOptions& opt,
                   std::ostream& out) {
  const auto& s = manifest.settings;
  const auto grid = parse_grid(opt.grid, -1.5, 1.5);
  const auto bound = wavepacket::bell_region_bound(s.T);

  config::write_manifest(out, manifest);
  out << "# bell_region_product = " << fmt(bound.analytic_product) << " (computed)\n";
  out << "# bell_region_product_reference = " << fmt(bound.printed_product) << '\n';
  out << "# relative_discrepancy = " << fmt(bound.relative_discrepancy) << '\n';
  out << "tauS_over_T,tau34_over_T,theta_diff,density,visibility,in_bell_region,quad_rel_err,"
         "in_bell_region_0663\n";

  wavepacket::QuadratureOptions qopt;
  qopt.order = opt.quadrature_order;
  double worst = 0.0;
  for (double us : grid) {
    for (double u34 : grid) {
      for (double dtheta : opt.theta_diff_deg) {
        auto p = wavepacket::WavePacketParams::centered(s.T, us * s.T, u34 * s.T, s.freq.omega);
        p.bs = s.bs;
        const double dt = dtheta * kRadPerDeg;
        const auto closed = wavepacket::closed_density_no_right(0.0, dt, p);
        const std::array<PolarizerSetting, 4> pol{PolarizerSetting::at(0.0),
                                                  PolarizerSetting::at(dt),
                                                  PolarizerSetting::absent(),
                                                  PolarizerSetting::absent()};
        const auto numeric = wavepacket::integrate_quad_density(pol, p, qopt);
        // Relative to the size of the terms, so that zeros of the density are well defined.
        const double scale = closed.damping_F / std::pow(s.T, 4) *
                             (closed.cosh_term + std::abs(closed.interference));
        const double rel = std::abs(numeric.density - closed.density) / scale;
        worst = std::max(worst, rel);
        const double v = wavepacket::visibility(us * s.T, u34 * s.T, s.T);
        const bool inside = wavepacket::in_bell_region(us * s.T, u34 * s.T, s.T);
        const bool inside_ref = std::abs(us * u34) < bound.printed_product;
        out << fmt(us) << ',' << fmt(u34) << ',' << fmt(dtheta) << ',' << fmt(closed.density)
            << ',' << fmt(v) << ',' << (inside ? 1 : 0) << ',' << fmt(rel) << ','
            << (inside_ref ? 1 : 0) << '\n';
      }
    }
  }
  return worst < kQuadratureTolerance ? kOk : kFailure;
}

int cmd_montecarlo(const config::RunManifest& manifest, const MontecarloOptions& opt,
                   std::ostream& out, std::ostream& err) {
  const auto mc = manifest.settings.montecarlo();
  montecarlo::CoincidenceStats st;
  try {
    st = montecarlo::run(mc);
  } catch (const montecarlo::StatisticsUnavailable& e) {
    err << "statistics unavailable: " << e.what() << '\n';
    return kFailure;
  }
  const double T = mc.coherence_time;

  config::write_manifest(out, manifest);
  out << "n_emitted = " << st.n_emitted << '\n';
  out << "n_quad_detected = " << st.n_quad_detected << '\n';
  out << "n_in_window = " << st.n_in_window << '\n';
  out << "one_one = " << st.one_one << '\n';
  out << "two_photon_d3 = " << st.two_d3 << '\n';
  out << "two_photon_d4 = " << st.two_d4 << '\n';
  out << "postselect_fraction = " << fmt(st.postselect_fraction) << '\n';
  out << "visibility = " << fmt(st.visibility_est) << '\n';
  out << "visibility_stderr = " << fmt(st.visibility_stderr) << '\n';
  out << "visibility_predicted = " << fmt(montecarlo::predicted_visibility(mc)) << '\n';
  out << "mean_abs_tau34_over_T = " << fmt(st.mean_abs_tau34 / T) << '\n';
  out << "rms_tau34_over_T = " << fmt(st.rms_tau34 / T) << '\n';
  out << "mean_abs_tau34_reference_over_T = " << fmt(kReferenceMeanTau34) << '\n';
  for (const auto& a : st.per_angle) {
    out << "count_at_" << fmt((a.theta2 - a.theta1) / kRadPerDeg) << "_deg = " << a.n_in_window
        << '/' << a.n_emitted << '\n';
  }
  if (opt.histogram) {
    config::write_manifest(*opt.histogram, manifest);
    write_histogram(*opt.histogram, st);
  } else {
    out << '\n';
    write_histogram(out, st);
  }
  return kOk;
}

int cmd_chsh(const config::RunManifest& manifest, const ChshOptions& opt, std::ostream& out,
             std::ostream& err) {
  const auto& s = manifest.settings;
  const auto settings = s.chsh();
  auto mc = s.montecarlo();
  mc.physics.polarizers[2] = PolarizerSetting::absent();
  mc.physics.polarizers[3] = PolarizerSetting::absent();

  const auto quantum = bell::chsh_S(
      bell::CorrelationSource::analytic(bell::quantum_left_probability), settings);
  montecarlo::ChshExperiment sim;
  try {
    sim = montecarlo::chsh_experiment(mc, settings);
  } catch (const montecarlo::StatisticsUnavailable& e) {
    err << "statistics unavailable: " << e.what() << '\n';
    return kFailure;
  }

  config::write_manifest(out, manifest);
  std::optional<bell::LhvResult> lhv;
  if (opt.lhv) {
    bell::LhvOptions lo;
    lo.n_events = s.n_events;
    lo.seed = s.seed;
    lo.settings = settings;
    lhv = bell::lhv_baseline(lo);
    out << "# lhv_visibility = " << fmt(lhv->fringe.visibility) << '\n';
    out << "# lhv_visibility_stderr = " << fmt(lhv->fringe.std_error) << '\n';
  }
  out << "source," << bell::chsh_csv_header() << '\n';
  out << "analytic," << bell::chsh_csv_row(quantum) << '\n';
  out << "montecarlo," << bell::chsh_csv_row(sim.chsh) << '\n';
  if (lhv) out << "lhv," << bell::chsh_csv_row(lhv->chsh) << '\n';
  return kOk;
}

int cmd_oracle_check(std::ostream& out) {
  const std::array<double, 5> grid{0.0, kPi / 8, kPi / 4, 3 * kPi / 8, kPi / 2};
  bool all_ok = true;
  auto report = [&](const std::string& label, int ok, int total) {
    out << ok << '/' << total << ' ' << label << " OK\n";
    all_ok = all_ok && ok == total;
  };

  int ok = 0, total = 0;
  for (double a : grid)
    for (double b : grid)
      for (double c : grid)
        for (double d : grid) {
          const auto cfg = ExperimentConfig::symmetric(a, b, c, d);
          const double diff = std::abs(oracle::quad_probability(cfg) -
                                       analytic::quad_coincidence_prob(a, b, c, d));
          ok += diff < kOracleTolerance;
          ++total;
        }
  report("grid points", ok, total);

  int left_ok = 0, right_ok = 0, channel_ok = 0, pairs = 0;
  for (double a : grid) {
    for (double b : grid) {
      auto cfg = ExperimentConfig::symmetric(0.0, 0.0, a, b);
      cfg.polarizers[0] = cfg.polarizers[1] = PolarizerSetting::absent();
      const double p4 = analytic::prob_no_left_polarizers(a, b, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0);
      left_ok += std::abs(oracle::quad_probability(cfg) - p4) < kOracleTolerance;

      cfg = ExperimentConfig::symmetric(a, b, 0.0, 0.0);
      cfg.polarizers[2] = cfg.polarizers[3] = PolarizerSetting::absent();
      const double p5 = analytic::prob_no_right_polarizers(a, b, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0);
      right_ok += std::abs(oracle::quad_probability(cfg) - p5) < kOracleTolerance;

      const auto ch = oracle::output_channels(BeamSplitterSpec::balanced(), a, b);
      channel_ok += std::abs(ch.total() - 0.25) < kOracleTolerance;
      ++pairs;
    }
  }
  report("no-left-polarizer points", left_ok, pairs);
  report("no-right-polarizer points", right_ok, pairs);
  report("channel-sum points", channel_ok, pairs);

  int beam_ok = 0, triples = 0;
  for (double a : grid)
    for (double b : grid)
      for (double c : grid) {
        const auto cfg = ExperimentConfig::symmetric(a, b, c, c);
        const double diff = std::abs(oracle::same_beam_moment(cfg, a, b, c) -
                                     analytic::prob_both_same_beam(a, b, c));
        beam_ok += diff < kOracleTolerance;
        ++triples;
      }
  report("same-beam points", beam_ok, triples);
  return all_ok ? kOk : kFailure;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Four-photon fourth-order interference: closed forms, oracle, wave packets, "
               "Monte Carlo and CHSH"};
  app.require_subcommand(1);

  std::string config_path, out_path, grid;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> overrides;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "key = value configuration file");
    sub->add_option("--out", out_path, "output file (default: stdout)");
    sub->add_option("--seed", seed, "random seed");
    sub->add_option("--grid", grid, "grid: N or start:stop:count");
    sub->add_option("--set", overrides, "override a configuration key (key=value)");
  };

  AnalyticOptions aopt;
  std::string theta_text;
  auto* analytic_cmd = app.add_subcommand("analytic", "closed forms against the operator algebra");
  add_common(analytic_cmd);
  analytic_cmd->add_option("--formula", aopt.formula,
                           "quad | eq3 | no-left | eq4 | no-right | eq5 | same-beam | channels");
  analytic_cmd->add_option("--theta", theta_text, "four angles in degrees, e.g. 0,90,0,90");
  analytic_cmd->add_option("--absent", aopt.absent, "left | right");

  WavepacketOptions wopt;
  std::string theta_diff_text;
  auto* wave_cmd = app.add_subcommand("wavepacket", "wave-packet density and visibility sweep");
  add_common(wave_cmd);
  wave_cmd->add_option("--theta-diff", theta_diff_text, "comma-separated theta1 - theta2 (deg)");
  wave_cmd->add_option("--order", wopt.quadrature_order, "initial quadrature order");

  std::string hist_path;
  auto* mc_cmd = app.add_subcommand("montecarlo", "event simulation of the fringe");
  add_common(mc_cmd);
  mc_cmd->add_option("--hist", hist_path, "histogram CSV file");

  ChshOptions copt;
  auto* chsh_cmd = app.add_subcommand("chsh", "CHSH statistic: closed form and simulation");
  add_common(chsh_cmd);
  chsh_cmd->add_flag("--lhv", copt.lhv, "add the local hidden-variable baseline");

  auto* oracle_cmd = app.add_subcommand("oracle-check", "grid check against the operator algebra");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  if (oracle_cmd->parsed()) return cmd_oracle_check(out);

  try {
    std::vector<std::string> keys_set;
    config::RunManifest manifest;
    if (!config_path.empty()) manifest.settings = config::load_config(config_path, &keys_set);
    for (const auto& o : overrides) {
      const auto eq = o.find('=');
      if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + o + "'");
      config::set_value(manifest.settings, o.substr(0, eq), o.substr(eq + 1));
      keys_set.push_back(o.substr(0, eq));
    }
    if (seed) {
      manifest.settings.seed = *seed;
      keys_set.push_back("seed");
    }
    const bool stochastic = mc_cmd->parsed() || chsh_cmd->parsed();
    if (stochastic && std::find(keys_set.begin(), keys_set.end(), "seed") == keys_set.end()) {
      err << "error: a seed is required (--seed N or 'seed' in the config)\n";
      return kUsage;
    }
    if (mc_cmd->parsed() && !grid.empty()) {
      config::set_value(manifest.settings, "scan_angles", grid);
    }
    manifest.seed = manifest.settings.seed;
    if (!out_path.empty()) manifest.outputs.push_back(out_path);
    if (!hist_path.empty()) manifest.outputs.push_back(hist_path);

    std::ofstream file;
    if (!out_path.empty()) {
      file.open(out_path, std::ios::binary);
      if (!file) throw ConfigError("cannot open output file '" + out_path + "'");
    }
    std::ostream& dest = out_path.empty() ? out : file;

    if (analytic_cmd->parsed()) {
      manifest.subcommand = "analytic";
      if (!grid.empty()) aopt.grid = grid;
      if (!theta_text.empty()) {
        const auto parts = split(theta_text, ',');
        if (parts.size() != 4) throw ConfigError("--theta expects four comma-separated angles");
        aopt.theta = std::array<std::string, 4>{parts[0], parts[1], parts[2], parts[3]};
      }
      return cmd_analytic(manifest, aopt, dest);
    }
    if (wave_cmd->parsed()) {
      manifest.subcommand = "wavepacket";
      if (!grid.empty()) wopt.grid = grid;
      if (!theta_diff_text.empty()) {
        wopt.theta_diff_deg.clear();
        for (const auto& p : split(theta_diff_text, ',')) {
          const auto v = parse_angle_token(p);
          if (!v) throw ConfigError("--theta-diff needs numeric angles");
          wopt.theta_diff_deg.push_back(*v);
        }
      }
      return cmd_wavepacket(manifest, wopt, dest);
    }
    if (mc_cmd->parsed()) {
      manifest.subcommand = "montecarlo";
      std::ofstream hist;
      MontecarloOptions mopt;
      if (!hist_path.empty()) {
        hist.open(hist_path, std::ios::binary);
        if (!hist) throw ConfigError("cannot open histogram file '" + hist_path + "'");
        mopt.histogram = &hist;
      }
      return cmd_montecarlo(manifest, mopt, dest, err);
    }
    manifest.subcommand = "chsh";
    return cmd_chsh(manifest, copt, dest, err);
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
}

}  // namespace fourphoton::cli
