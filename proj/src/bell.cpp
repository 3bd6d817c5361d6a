#include "fourphoton/bell.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include "fourphoton/analytic.hpp"
#include "fourphoton/elements.hpp"

namespace fourphoton::bell {

namespace {

constexpr double kAngleTolerance = 1e-9;

bool same_angle(double x, double y) {
  const double d = std::abs(normalize_angle(x) - normalize_angle(y));
  return d < kAngleTolerance || std::abs(d - kPi) < kAngleTolerance;
}

double sq(double x) { return x * x; }

}  // namespace

CHSHSettings CHSHSettings::canonical() { return {0.0, kPi / 4, kPi / 8, 3 * kPi / 8}; }

CHSHSettings CHSHSettings::normalized() const {
  return {normalize_angle(a), normalize_angle(a_prime), normalize_angle(b),
          normalize_angle(b_prime)};
}

CorrelationSource CorrelationSource::analytic(ProbabilityFn p) {
  CorrelationSource s;
  s.data_ = std::move(p);
  return s;
}

CorrelationSource CorrelationSource::counts(std::vector<SettingCounts> tallies) {
  CorrelationSource s;
  s.data_ = std::move(tallies);
  return s;
}

const OutcomeCounts& CorrelationSource::lookup(double theta_a, double theta_b) const {
  for (const auto& t : std::get<std::vector<SettingCounts>>(data_)) {
    if (same_angle(t.theta_a, theta_a) && same_angle(t.theta_b, theta_b)) return t.counts;
  }
  char buf[128];
  std::snprintf(buf, sizeof buf, "no coincidence tallies for setting pair (%.6g, %.6g) rad",
                theta_a, theta_b);
  throw UndefinedCorrelation(buf);
}

Correlation correlation(const CorrelationSource& src, double theta_a, double theta_b) {
  if (src.is_analytic()) {
    const auto& p = src.probability();
    const double ap = theta_a + kPi / 2;
    const double bp = theta_b + kPi / 2;
    const double same = p(theta_a, theta_b) + p(ap, bp);
    const double diff = p(theta_a, bp) + p(ap, theta_b);
    if (!(same + diff > 0.0)) throw UndefinedCorrelation("probabilities sum to zero");
    return {(same - diff) / (same + diff), 0.0};
  }
  const auto& c = src.lookup(theta_a, theta_b);
  const double n = static_cast<double>(c.total());
  if (c.total() == 0) throw UndefinedCorrelation("no coincidences recorded for setting pair");
  const double e = (static_cast<double>(c.pp + c.mm) - static_cast<double>(c.pm + c.mp)) / n;
  return {e, std::sqrt(std::max(0.0, 1.0 - e * e) / n)};
}

ChshResult chsh_S(const CorrelationSource& src, const CHSHSettings& settings) {
  ChshResult r;
  r.settings = settings.normalized();
  r.E = {correlation(src, settings.a, settings.b), correlation(src, settings.a, settings.b_prime),
         correlation(src, settings.a_prime, settings.b),
         correlation(src, settings.a_prime, settings.b_prime)};
  r.S = std::abs(r.E[0].value - r.E[1].value + r.E[2].value + r.E[3].value);
  double var = 0.0;
  for (const auto& e : r.E) var += e.std_error * e.std_error;
  r.std_error = std::sqrt(var);
  return r;
}

std::string chsh_csv_header() { return "a,a_prime,b,b_prime,E_ab,E_ab',E_a'b,E_a'b',S,stderr"; }

std::string chsh_csv_row(const ChshResult& r) {
  constexpr double kDeg = 180.0 / kPi;
  char buf[512];
  std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g",
                r.settings.a * kDeg, r.settings.a_prime * kDeg, r.settings.b * kDeg,
                r.settings.b_prime * kDeg, r.E[0].value, r.E[1].value, r.E[2].value,
                r.E[3].value, r.S, r.std_error);
  return buf;
}

FringeFit fit_cos2_fringe(const std::vector<FringePoint>& points) {
  if (points.size() < 2) throw UndefinedCorrelation("fringe fit needs at least two angles");
  std::uint64_t total = 0;
  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd X(n, 2);
  Eigen::VectorXd rate(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto& p = points[k];
    if (p.trials == 0) throw UndefinedCorrelation("fringe point without trials");
    X(k, 0) = 1.0;
    X(k, 1) = -sq(std::cos(p.angle));
    rate(k) = static_cast<double>(p.count) / static_cast<double>(p.trials);
    total += p.count;
  }
  if (total == 0) throw UndefinedCorrelation("no coincidences in any fringe point");

  const Eigen::Matrix2d gram_inv = (X.transpose() * X).inverse();
  const Eigen::Vector2d coef = gram_inv * X.transpose() * rate;

  // Binomial variance of each rate, evaluated at the fitted mean.
  Eigen::VectorXd var(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double mu = std::clamp(coef(0) + X(k, 1) * coef(1), 0.0, 1.0);
    var(k) = mu * (1.0 - mu) / static_cast<double>(points[k].trials);
  }
  const Eigen::Matrix2d cov = gram_inv * X.transpose() * var.asDiagonal() * X * gram_inv;

  FringeFit fit;
  fit.alpha = coef(0);
  fit.beta = coef(1);
  const double denom = 2.0 * fit.alpha - fit.beta;
  if (denom == 0.0) throw UndefinedCorrelation("fringe has zero mean rate");
  fit.visibility = std::abs(fit.beta / denom);
  const Eigen::Vector2d grad(-2.0 * fit.beta / (denom * denom), 2.0 * fit.alpha / (denom * denom));
  fit.std_error = std::sqrt(std::max(0.0, grad.dot(cov * grad)));
  return fit;
}

double quantum_left_probability(double theta_a, double theta_b) {
  return analytic::prob_no_right_polarizers(theta_a, theta_b, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0);
}

double lhv_pair_rate(double theta_a, double theta_b) {
  return 0.25 + std::cos(2.0 * (theta_a - theta_b)) / 8.0;
}

double lhv_quad_rate(double theta1, double theta2, double theta3, double theta4) {
  return lhv_pair_rate(theta1, theta3) * lhv_pair_rate(theta2, theta4);
}

LhvResult lhv_baseline(const LhvOptions& options) {
  if (options.n_events < 10000) throw std::invalid_argument("LHV baseline needs n_events >= 1e4");
  if (options.scan_points < 2) throw std::invalid_argument("LHV fringe needs >= 2 scan points");

  std::seed_seq seq{static_cast<std::uint32_t>(options.seed),
                    static_cast<std::uint32_t>(options.seed >> 32), 0x4c4856u};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto hidden = [&] { return options.fixed_lambda ? *options.fixed_lambda : kPi * unit(rng); };
  auto passes = [&](double theta, double lambda) { return unit(rng) < sq(std::cos(theta - lambda)); };

  LhvResult result;
  const std::uint64_t fringe_events = options.n_events / 2;
  const std::uint64_t per_angle = fringe_events / options.scan_points;
  for (int k = 0; k < options.scan_points; ++k) {
    const double delta = kPi * k / options.scan_points;
    FringePoint pt{delta, 0, per_angle};
    for (std::uint64_t i = 0; i < per_angle; ++i) {
      const double lam1 = hidden();
      const double lam2 = hidden();
      const bool p1 = passes(delta, lam1);
      const bool p3 = passes(0.0, lam1);
      const bool p2 = passes(0.0, lam2);
      const bool p4 = passes(0.0, lam2);
      if (p1 && p2 && p3 && p4) ++pt.count;
    }
    result.fringe_points.push_back(pt);
  }
  result.fringe = fit_cos2_fringe(result.fringe_points);

  const auto s = options.settings.normalized();
  const std::array<std::pair<double, double>, 4> pairs{
      {{s.a, s.b}, {s.a, s.b_prime}, {s.a_prime, s.b}, {s.a_prime, s.b_prime}}};
  const std::uint64_t per_pair = (options.n_events - fringe_events) / 4;
  std::vector<SettingCounts> tallies;
  for (const auto& [ta, tb] : pairs) {
    SettingCounts sc{ta, tb, {}};
    for (std::uint64_t i = 0; i < per_pair; ++i) {
      const double lam = hidden();
      const bool pa = passes(ta, lam);
      const bool pb = passes(tb, lam);
      if (pa && pb) ++sc.counts.pp;
      else if (pa) ++sc.counts.pm;
      else if (pb) ++sc.counts.mp;
      else ++sc.counts.mm;
    }
    tallies.push_back(sc);
  }
  result.chsh = chsh_S(CorrelationSource::counts(std::move(tallies)), s);
  return result;
}

double zero_coincidence_witness(double theta) {
  return analytic::quad_coincidence_prob(theta, theta, theta, theta);
}

}  // namespace fourphoton::bell
