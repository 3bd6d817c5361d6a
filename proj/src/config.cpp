#include "fourphoton/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace fourphoton::config {

namespace {

constexpr double kRadPerDeg = kPi / 180.0;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  if (v == "inf" || v == "+inf") return montecarlo::kUnbounded;
  double x = 0.0;
  const char* first = v.data();
  const char* last = v.data() + v.size();
  if (!v.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, x);
  if (ec != std::errc{} || ptr != last || v.empty()) {
    throw ConfigError("key '" + key + "': expected a number, got '" + v + "'");
  }
  return x;
}

std::uint64_t parse_count(const std::string& key, const std::string& v) {
  std::uint64_t x = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc{} || ptr != v.data() + v.size() || v.empty()) {
    throw ConfigError("key '" + key + "': expected a non-negative integer, got '" + v + "'");
  }
  return x;
}

std::optional<double> parse_angle(const std::string& key, const std::string& v) {
  if (v == "absent") return std::nullopt;
  const double x = parse_double(key, v);
  if (!std::isfinite(x)) throw ConfigError("key '" + key + "': angle must be finite");
  return x;
}

struct Field {
  std::function<void(RunSettings&, const std::string&, const std::string&)> set;
  std::function<std::string(const RunSettings&)> get;
};

template <typename M>
Field real(M RunSettings::*member) {
  return {[member](RunSettings& s, const std::string& k, const std::string& v) {
            s.*member = parse_double(k, v);
          },
          [member](const RunSettings& s) { return format_double(s.*member); }};
}

template <typename Fn>
Field real_at(Fn ref) {
  return {[ref](RunSettings& s, const std::string& k, const std::string& v) {
            ref(s) = parse_double(k, v);
          },
          [ref](const RunSettings& s) { return format_double(ref(const_cast<RunSettings&>(s))); }};
}

template <typename M>
Field count(M RunSettings::*member) {
  return {[member](RunSettings& s, const std::string& k, const std::string& v) {
            const auto x = parse_count(k, v);
            s.*member = static_cast<M>(x);
            if (static_cast<std::uint64_t>(s.*member) != x) {
              throw ConfigError("key '" + k + "': value out of range");
            }
          },
          [member](const RunSettings& s) { return std::to_string(s.*member); }};
}

Field angle(int i) {
  return {[i](RunSettings& s, const std::string& k, const std::string& v) {
            s.theta_deg[i] = parse_angle(k, v);
          },
          [i](const RunSettings& s) {
            return s.theta_deg[i] ? format_double(*s.theta_deg[i]) : std::string("absent");
          }};
}

using Table = std::vector<std::pair<std::string, Field>>;

const Table& table() {
  static const Table t = [] {
    Table t;
    for (int i = 0; i < 4; ++i) t.emplace_back("theta" + std::to_string(i + 1), angle(i));
    t.emplace_back("Tx", real_at([](RunSettings& s) -> double& { return s.bs.Tx; }));
    t.emplace_back("Ty", real_at([](RunSettings& s) -> double& { return s.bs.Ty; }));
    t.emplace_back("Rx", real_at([](RunSettings& s) -> double& { return s.bs.Rx; }));
    t.emplace_back("Ry", real_at([](RunSettings& s) -> double& { return s.bs.Ry; }));
    t.emplace_back("r1", real_at([](RunSettings& s) -> double& { return s.geom.r1; }));
    t.emplace_back("r2", real_at([](RunSettings& s) -> double& { return s.geom.r2; }));
    t.emplace_back("r3", real_at([](RunSettings& s) -> double& { return s.geom.r3; }));
    t.emplace_back("r4", real_at([](RunSettings& s) -> double& { return s.geom.r4; }));
    t.emplace_back("rI", real_at([](RunSettings& s) -> double& { return s.geom.rI; }));
    t.emplace_back("rII", real_at([](RunSettings& s) -> double& { return s.geom.rII; }));
    for (int i = 0; i < 4; ++i) {
      t.emplace_back("omega" + std::to_string(i + 1),
                     real_at([i](RunSettings& s) -> double& { return s.freq.omega[i]; }));
    }
    t.emplace_back("t01", real_at([](RunSettings& s) -> double& { return s.timing.t0I; }));
    t.emplace_back("t02", real_at([](RunSettings& s) -> double& { return s.timing.t0II; }));
    t.emplace_back("t1", real_at([](RunSettings& s) -> double& { return s.timing.t1; }));
    t.emplace_back("t2", real_at([](RunSettings& s) -> double& { return s.timing.t2; }));
    t.emplace_back("t3", real_at([](RunSettings& s) -> double& { return s.timing.t3; }));
    t.emplace_back("t4", real_at([](RunSettings& s) -> double& { return s.timing.t4; }));
    t.emplace_back("c", real_at([](RunSettings& s) -> double& { return s.geom.c; }));
    t.emplace_back("T", real(&RunSettings::T));
    t.emplace_back("tauS", real(&RunSettings::tauS));
    t.emplace_back("tau34", real(&RunSettings::tau34));
    t.emplace_back("n_events", count(&RunSettings::n_events));
    t.emplace_back("seed", count(&RunSettings::seed));
    t.emplace_back("sigma_s", real(&RunSettings::sigma_s));
    t.emplace_back("window34", real(&RunSettings::window34));
    t.emplace_back("window12", real(&RunSettings::window12));
    t.emplace_back("efficiency", real(&RunSettings::efficiency));
    t.emplace_back("scan_angles", count(&RunSettings::scan_angles));
    t.emplace_back("threads", count(&RunSettings::threads));
    t.emplace_back("batch_size", count(&RunSettings::batch_size));
    t.emplace_back("a", real(&RunSettings::a));
    t.emplace_back("a_prime", real(&RunSettings::a_prime));
    t.emplace_back("b", real(&RunSettings::b));
    t.emplace_back("b_prime", real(&RunSettings::b_prime));
    return t;
  }();
  return t;
}

const Field* find_field(const std::string& key) {
  for (const auto& [k, f] : table()) {
    if (k == key) return &f;
  }
  return nullptr;
}

}  // namespace

ExperimentConfig RunSettings::experiment() const {
  ExperimentConfig cfg;
  for (int i = 0; i < 4; ++i) {
    cfg.polarizers[i] = theta_deg[i] ? PolarizerSetting::at(*theta_deg[i] * kRadPerDeg)
                                     : PolarizerSetting::absent();
  }
  cfg.bs = bs;
  cfg.geom = geom;
  cfg.timing = timing;
  cfg.freq = freq;
  return cfg;
}

wavepacket::WavePacketParams RunSettings::wavepacket() const {
  wavepacket::WavePacketParams p;
  p.coherence_time = T;
  p.central_omega = freq.omega;
  p.bs = bs;
  p.geom = geom;
  p.timing = timing;
  return p;
}

montecarlo::MonteCarloConfig RunSettings::montecarlo() const {
  montecarlo::MonteCarloConfig m;
  m.n_events = n_events;
  m.seed = seed;
  m.sigma_s = sigma_s;
  m.window34 = window34;
  m.window12 = window12;
  m.detector_efficiency = efficiency;
  m.physics = experiment();
  m.coherence_time = T;
  m.central_omega = freq.omega;
  m.scan_angles = scan_angles;
  m.batch_size = batch_size;
  m.threads = threads;
  return m;
}

bell::CHSHSettings RunSettings::chsh() const {
  return {a * kRadPerDeg, a_prime * kRadPerDeg, b * kRadPerDeg, b_prime * kRadPerDeg};
}

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& [name, f] : table()) k.push_back(name);
    return k;
  }();
  return keys;
}

void set_value(RunSettings& s, const std::string& key, const std::string& value) {
  const Field* f = find_field(key);
  if (!f) throw ConfigError("unknown key '" + key + "'");
  f->set(s, key, trim(value));
}

RunSettings parse_config(std::istream& in, const std::string& source,
                         std::vector<std::string>* keys_set) {
  RunSettings s;
  std::string line;
  int lineno = 0;
  std::map<std::string, int> seen;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto where = source + ":" + std::to_string(lineno) + ": ";
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError(where + "missing key before '='");
    if (auto it = seen.find(key); it != seen.end()) {
      throw ConfigError(where + "key '" + key + "' already set on line " +
                        std::to_string(it->second));
    }
    seen[key] = lineno;
    if (keys_set) keys_set->push_back(key);
    try {
      set_value(s, key, line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }
  return s;
}

RunSettings load_config(const std::string& path, std::vector<std::string>* keys_set) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in, path, keys_set);
}

std::string format_double(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<std::pair<std::string, std::string>> to_pairs(const RunSettings& s) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [k, f] : table()) out.emplace_back(k, f.get(s));
  return out;
}

void write_manifest(std::ostream& out, const RunManifest& m) {
  out << "# " << kToolName << ' ' << m.version << '\n';
  out << "# subcommand: " << m.subcommand << '\n';
  out << "# seed: " << m.seed << '\n';
  for (const auto& o : m.outputs) out << "# output: " << o << '\n';
  out << "# config:\n";
  for (const auto& [k, v] : to_pairs(m.settings)) out << "#   " << k << " = " << v << '\n';
}

RunManifest parse_manifest(std::istream& in) {
  RunManifest m;
  std::string line;
  bool in_config = false;
  std::ostringstream config_text;
  const std::string tool_prefix = std::string("# ") + kToolName + ' ';
  while (std::getline(in, line)) {
    if (line.rfind('#', 0) != 0) break;
    if (in_config && line.rfind("#   ", 0) == 0) {
      config_text << line.substr(4) << '\n';
      continue;
    }
    in_config = false;
    if (line.rfind(tool_prefix, 0) == 0) {
      m.version = line.substr(tool_prefix.size());
    } else if (line.rfind("# subcommand: ", 0) == 0) {
      m.subcommand = line.substr(14);
    } else if (line.rfind("# seed: ", 0) == 0) {
      m.seed = parse_count("seed", line.substr(8));
    } else if (line.rfind("# output: ", 0) == 0) {
      m.outputs.push_back(line.substr(10));
    } else if (line == "# config:") {
      in_config = true;
    }
  }
  std::istringstream cfg(config_text.str());
  m.settings = parse_config(cfg, "<manifest>");
  return m;
}

}  // namespace fourphoton::config
