#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "fourphoton/cli.hpp"
#include "fourphoton/config.hpp"
#include "generators.hpp"

using namespace fourphoton;
using namespace fourphoton::config;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "fourphoton");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> data_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '#') lines.push_back(line);
  }
  return lines;
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("fourphoton_test_" + name);
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("config parsing: comments, degrees, absent and inf") {
  std::istringstream in(
      "# comment\n"
      "theta1 = 90   # trailing\n"
      "theta3 = absent\n"
      "Tx = 0.25\nRx = 0.75\n"
      "window12 = inf\n"
      "seed = 18446744073709551615\n");
  std::vector<std::string> keys;
  const auto s = parse_config(in, "test", &keys);
  CHECK(*s.theta_deg[0] == 90.0);
  CHECK_FALSE(s.theta_deg[2].has_value());
  CHECK(s.experiment().polarizers[0].angle() == doctest::Approx(kPi / 2));
  CHECK(s.bs.Tx == 0.25);
  CHECK(s.seed == 18446744073709551615ull);
  CHECK(keys.size() == 6);
}

TEST_CASE("config errors carry source and line") {
  auto error_of = [](const std::string& text) {
    std::istringstream in(text);
    try {
      parse_config(in, "cfg.txt");
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(error_of("T = 1\nbogus = 3\n").find("cfg.txt:2: unknown key 'bogus'") != std::string::npos);
  CHECK(error_of("T = abc\n").find("cfg.txt:1: key 'T'") != std::string::npos);
  CHECK(error_of("\n\nT 1\n").find("cfg.txt:3") != std::string::npos);
  CHECK(error_of("T = 1\nT = 2\n").find("already set on line 1") != std::string::npos);
  CHECK(error_of("n_events = -5\n").find("non-negative integer") != std::string::npos);
  CHECK(error_of("T = 1\n").empty());
}

TEST_CASE("manifest round-trips random settings exactly") {
  testing::Gen gen(71);
  for (int trial = 0; trial < 100; ++trial) {
    RunManifest m;
    m.subcommand = "montecarlo";
    auto& s = m.settings;
    for (auto& t : s.theta_deg) {
      t = gen.integer(0, 4) == 0 ? std::optional<double>() : gen.uniform(-360, 360);
    }
    s.bs.Tx = gen.uniform(0, 1);
    s.bs.Rx = 1 - s.bs.Tx;
    s.geom.r3 = gen.uniform(0, 1e3);
    s.timing.t4 = gen.uniform(-1e-9, 1e-9);
    s.freq.omega[2] = gen.uniform(1e14, 1e16);
    s.T = gen.uniform(1e-15, 1e-9);
    s.sigma_s = gen.uniform(0, 1e-9);
    s.window34 = trial % 3 ? gen.uniform(0, 1) : montecarlo::kUnbounded;
    s.n_events = static_cast<std::uint64_t>(gen.uniform(1, 1e12));
    s.seed = gen.engine()();
    s.b_prime = gen.uniform(0, 180);
    m.seed = s.seed;
    m.outputs = {"out.csv"};

    std::stringstream buf;
    write_manifest(buf, m);
    buf << "col_a,col_b\n1,2\n";
    const auto back = parse_manifest(buf);
    CHECK(back.settings == s);
    CHECK(back.subcommand == "montecarlo");
    CHECK(back.seed == s.seed);
    CHECK(back.outputs == m.outputs);
    CHECK(back.version == kToolVersion);
  }
}

TEST_CASE("grid specs") {
  CHECK(cli::parse_grid("5", 0, 90) == std::vector<double>{0, 22.5, 45, 67.5, 90});
  CHECK(cli::parse_grid("-1:1:3", 0, 90) == std::vector<double>{-1, 0, 1});
  CHECK(cli::parse_grid("7:7:1", 0, 90) == std::vector<double>{7});
  CHECK_THROWS_AS(cli::parse_grid("1:2", 0, 1), ConfigError);
  CHECK_THROWS_AS(cli::parse_grid("0", 0, 1), ConfigError);
}

TEST_CASE("analytic subcommand: default grid and single points") {
  const auto all = run_cli({"analytic"});
  CHECK(all.code == 0);
  const auto rows = data_lines(all.out);
  REQUIRE(rows.size() == 626);
  CHECK(rows[0] == "theta1,theta2,theta3,theta4,P_analytic,P_oracle,abs_diff");

  const auto one = run_cli({"analytic", "--formula", "eq3", "--theta", "0,90,0,90"});
  CHECK(one.code == 0);
  CHECK(data_lines(one.out)[1].rfind("0,90,0,90,0.0625,", 0) == 0);

  const auto left = run_cli({"analytic", "--absent", "left"});
  CHECK(left.code == 0);
  const auto lrows = data_lines(left.out);
  CHECK(lrows.size() == 26);
  CHECK(lrows[1].rfind("absent,absent,", 0) == 0);

  const auto right = run_cli({"analytic", "--absent", "right", "--theta", "0,30,absent,absent"});
  const auto cells = data_lines(right.out)[1];
  CHECK(cells.rfind("0,30,absent,absent,", 0) == 0);
  CHECK(std::stod(cells.substr(19)) == doctest::Approx(0.03125).epsilon(1e-14));

  for (const char* f : {"quad", "no-right", "eq4", "same-beam", "channels"}) {
    CHECK(run_cli({"analytic", "--formula", f}).code == 0);
  }
  CHECK(run_cli({"analytic", "--formula", "nonsense"}).code == 2);
}

TEST_CASE("oracle-check subcommand") {
  const auto r = run_cli({"oracle-check"});
  CHECK(r.code == 0);
  CHECK(r.out.find("625/625 grid points OK") != std::string::npos);
}

TEST_CASE("wavepacket subcommand") {
  const auto r = run_cli({"wavepacket", "--grid", "-1:1:3", "--theta-diff", "0,45"});
  CHECK(r.code == 0);
  const auto rows = data_lines(r.out);
  REQUIRE(rows.size() == 1 + 3 * 3 * 2);
  CHECK(rows[0] ==
        "tauS_over_T,tau34_over_T,theta_diff,density,visibility,in_bell_region,quad_rel_err,"
        "in_bell_region_0663");
  CHECK(r.out.find("# bell_region_product_reference = 0.66300000000000003") != std::string::npos);
  // (0, 0) is the centre row of the first angle block.
  CHECK(rows[1 + 2 * 4].rfind("0,0,0,", 0) == 0);
  CHECK(rows[1 + 2 * 4].find(",1,1,") != std::string::npos);
}

TEST_CASE("montecarlo subcommand: seed, summary, histogram, errors") {
  CHECK(run_cli({"montecarlo"}).code == 2);
  const auto r = run_cli({"montecarlo", "--seed", "4", "--set", "n_events=20000"});
  CHECK(r.code == 0);
  CHECK(r.out.find("n_emitted = 20000") != std::string::npos);
  CHECK(r.out.find("tau34_over_T,count") != std::string::npos);

  const auto dead = run_cli({"montecarlo", "--seed", "4", "--set", "efficiency=0"});
  CHECK(dead.code == 1);
  CHECK(dead.err.find("statistics unavailable") != std::string::npos);

  CHECK(run_cli({"montecarlo", "--seed", "4", "--set", "nope=1"}).code == 2);
  CHECK(run_cli({"montecarlo", "--seed", "4", "--set", "Tx=0.7"}).code == 2);
}

TEST_CASE("config file with flag overrides; output file carries the manifest") {
  const auto cfg = temp_file("cfg.txt");
  const auto out = temp_file("out.txt");
  const auto hist = temp_file("hist.csv");
  {
    std::ofstream f(cfg);
    f << "seed = 5\nn_events = 16000\nwindow34 = 0.5\nsigma_s = 0.5\n";
  }
  const auto r = run_cli({"montecarlo", "--config", cfg.string(), "--seed", "9", "--out",
                          out.string(), "--hist", hist.string()});
  REQUIRE(r.code == 0);
  std::ifstream in(out);
  const auto m = parse_manifest(in);
  CHECK(m.seed == 9);
  CHECK(m.settings.seed == 9);
  CHECK(m.settings.window34 == 0.5);
  CHECK(m.outputs.size() == 2);
  const auto h = slurp(hist);
  CHECK(h.rfind("# fourphoton ", 0) == 0);
  CHECK(h.find("tau34_over_T,count\n") != std::string::npos);

  // Seed from the config alone is enough.
  CHECK(run_cli({"montecarlo", "--config", cfg.string()}).code == 0);
  for (const auto& p : {cfg, out, hist}) std::filesystem::remove(p);
}

TEST_CASE("chsh subcommand") {
  const auto r = run_cli({"chsh", "--seed", "2", "--set", "n_events=160000", "--set",
                          "window34=0.05", "--lhv"});
  CHECK(r.code == 0);
  const auto rows = data_lines(r.out);
  REQUIRE(rows.size() == 4);
  CHECK(rows[1].rfind("analytic,0,45,22.5,67.5,", 0) == 0);
  CHECK(rows[1].find(",2.8284271247461") != std::string::npos);
  CHECK(rows[2].rfind("montecarlo,", 0) == 0);
  CHECK(rows[3].rfind("lhv,", 0) == 0);
}

TEST_CASE("identical runs give byte-identical output") {
  const std::vector<std::string> args{"montecarlo", "--seed", "77", "--set", "n_events=30000",
                                      "--set", "sigma_s=1"};
  CHECK(run_cli(args).out == run_cli(args).out);
  auto threaded = args;
  threaded.insert(threaded.end(), {"--set", "threads=1"});
  auto other = args;
  other.insert(other.end(), {"--set", "threads=3"});
  CHECK(data_lines(run_cli(threaded).out) != std::vector<std::string>{});
  // Only the echoed threads line differs.
  auto strip = [](const std::string& s) {
    std::string out;
    std::istringstream in(s);
    std::string line;
    while (std::getline(in, line)) {
      if (line.find("threads") == std::string::npos) out += line + "\n";
    }
    return out;
  };
  CHECK(strip(run_cli(threaded).out) == strip(run_cli(other).out));
}
