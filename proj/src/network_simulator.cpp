#include "raqr/network_simulator.hpp"

#include <cmath>
#include <exception>
#include <iomanip>
#include <limits>
#include <ostream>

#include <Eigen/Dense>

#include "raqr/constants.hpp"
#include "raqr/errors.hpp"
#include "raqr/rng.hpp"

namespace raqr {

using cplx = std::complex<double>;

std::string sim_mode_name(SimMode mode) {
  switch (mode) {
    case SimMode::raqr_nonlinear: return "raqr-nonlinear";
    case SimMode::raqr_bussgang: return "raqr-bussgang";
    case SimMode::conventional: return "conventional";
    case SimMode::conventional_coupled: return "conventional-coupled";
  }
  return "unknown";
}

SimMode parse_sim_mode(const std::string& name) {
  for (SimMode m : {SimMode::raqr_nonlinear, SimMode::raqr_bussgang, SimMode::conventional,
                    SimMode::conventional_coupled})
    if (sim_mode_name(m) == name) return m;
  throw ConfigError("unknown receiver mode '" + name + "'");
}

void TrialConfig::validate() const {
  net.validate();
  if (!(net.bs_density > 0)) throw ConfigError("simulation needs bs_density > 0");
  if (n_trials < 1) throw ConfigError("n_trials must be >= 1");
  if (sampling_radius < 0) throw ConfigError("sampling_radius must be >= 0");
  if (symbol_batch < 1) throw ConfigError("symbol_batch must be >= 1");
  if (sampling_radius > 0 && sampling_radius < 10.0 * serving_distance_quantile(net, 0.999))
    throw ConfigError("sampling_radius must be at least 10x the 99.9% serving-distance quantile");
}

double default_sampling_radius(const NetworkConfig& net) {
  double radius = 10.0 * serving_distance_quantile(net, 0.999);
  if (net.lambda_u() > 0) radius = std::max(radius, 30.0 / std::sqrt(kPi * net.lambda_u()));
  return radius;
}

double trial_sampling_radius(const TrialConfig& cfg, double r) {
  const double base = cfg.sampling_radius > 0 ? cfg.sampling_radius : default_sampling_radius(cfg.net);
  const double tail = r * std::pow(1000.0, 1.0 / (cfg.net.pathloss_exponent - 2.0));
  const double radius = std::max(base, tail);
  if (cfg.net.lambda_u() * kPi * radius * radius > 1e7)
    throw ConfigError("interferer field too large to sample (expected count above 1e7)");
  return radius;
}

double sample_serving_distance(const NetworkConfig& net, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double d0 = net.min_distance;
  return std::sqrt(d0 * d0 - std::log1p(-u(rng)) / (kPi * net.bs_density));
}

namespace {

std::vector<double> sample_interferer_distances(const NetworkConfig& net, double r, double radius,
                                                std::mt19937_64& rng) {
  std::vector<double> d;
  const double lu = net.lambda_u();
  if (!(lu > 0) || !(radius > r)) return d;
  const double area = kPi * (radius * radius - r * r);
  std::poisson_distribution<long> count(lu * area);
  const long n = count(rng);
  d.resize(static_cast<std::size_t>(n));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (auto& x : d) x = std::sqrt(r * r + u(rng) * (radius * radius - r * r));
  return d;
}

cplx cn01(std::normal_distribution<double>& n, std::mt19937_64& rng) {
  const double a = n(rng);
  const double b = n(rng);
  return {a * std::sqrt(0.5), b * std::sqrt(0.5)};
}

cplx random_symbol(std::uniform_real_distribution<double>& u, std::mt19937_64& rng) {
  const double phi = kTwoPi * u(rng);
  return {std::cos(phi), std::sin(phi)};
}

bool uses_coupling(const TrialConfig& cfg) {
  return cfg.mode != SimMode::conventional && cfg.net.correlation > 0 && cfg.net.array_size > 1;
}

Eigen::MatrixXd correlation_matrix(int m, double rho) {
  Eigen::MatrixXd R(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) R(i, j) = std::pow(rho, std::abs(i - j));
  return R;
}

Eigen::MatrixXd correlation_root(const Eigen::MatrixXd& R) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(R);
  return es.operatorSqrt();
}

double sinr_ratio(double signal, double denom) {
  if (denom <= 0.0) return std::numeric_limits<double>::infinity();
  return signal / denom;
}

TrialOutcome scalar_trial(const TrialConfig& cfg, double r, std::mt19937_64& rng) {
  const NetworkConfig& net = cfg.net;
  const double C = net.intercept();
  const double a = net.pathloss_exponent;
  TrialOutcome out;
  out.serving_distance = r;

  double h0 = 0.0;
  double q = 1.0;  // mean of the projected interferer fading
  if (uses_coupling(cfg)) {
    const int m = net.array_size;
    const Eigen::MatrixXd R = correlation_matrix(m, net.correlation);
    std::normal_distribution<double> n01;
    Eigen::VectorXcd g(m);
    for (int i = 0; i < m; ++i) g[i] = cn01(n01, rng);
    const Eigen::VectorXcd h = correlation_root(R).cast<cplx>() * g;
    h0 = h.squaredNorm();
    // t0^H R^{1/2} g_i is CN(0, t0^H R t0) for white g_i.
    const Eigen::VectorXcd t0 = h / std::sqrt(h0);
    q = std::real(t0.dot(R.cast<cplx>() * t0));
  } else {
    std::gamma_distribution<double> gamma(net.array_size, 1.0);
    h0 = gamma(rng);
  }

  const double radius = trial_sampling_radius(cfg, r);
  const auto dist = sample_interferer_distances(net, r, radius, rng);
  std::exponential_distribution<double> expo(1.0);
  double interference = 0.0;
  for (double d : dist) interference += net.pu * C * std::pow(d, -a) * q * expo(rng);
  out.interference = interference;

  const double K = field_conversion(net.carrier_freq);
  out.input_power = input_power(net, K, r);
  double noise;
  if (cfg.mode == SimMode::raqr_bussgang) {
    try {
      noise = effective_noise(cfg.coeffs, net, K, r);
    } catch (const GainNullError&) {
      out.sinr = 0.0;
      return out;
    }
  } else {
    noise = thermal_noise(net);
  }
  out.sinr = sinr_ratio(net.p0 * C * std::pow(r, -a) * h0, interference + noise);
  return out;
}

TrialOutcome nonlinear_trial(const TrialConfig& cfg, double r, std::mt19937_64& rng) {
  const NetworkConfig& net = cfg.net;
  const double C = net.intercept();
  const double a = net.pathloss_exponent;
  const double K = field_conversion(net.carrier_freq);
  const int m = net.array_size;
  const int nb = cfg.symbol_batch;
  std::normal_distribution<double> n01;
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  TrialOutcome out;
  out.serving_distance = r;

  const bool coupled = uses_coupling(cfg);
  Eigen::MatrixXcd root;
  if (coupled) root = correlation_root(correlation_matrix(m, net.correlation)).cast<cplx>();

  const double amp0 = K * std::sqrt(net.p0 * C * std::pow(r, -a));
  Eigen::VectorXcd h(m);
  for (int i = 0; i < m; ++i) h[i] = amp0 * cn01(n01, rng);
  if (coupled) h = root * h;
  const double hn2 = h.squaredNorm();

  // Received field per element and symbol draw (columns).
  Eigen::MatrixXcd U(m, nb);
  for (int b = 0; b < nb; ++b) U.col(b) = h * random_symbol(u01, rng);

  const double radius = trial_sampling_radius(cfg, r);
  const auto dist = sample_interferer_distances(net, r, radius, rng);
  double projected = 0.0;  // sum |h^H h_i|^2
  Eigen::VectorXcd hi(m);
  for (double d : dist) {
    const double amp = K * std::sqrt(net.pu * C * std::pow(d, -a));
    for (int i = 0; i < m; ++i) hi[i] = amp * cn01(n01, rng);
    if (coupled) hi = root * hi;
    projected += std::norm(h.dot(hi));
    for (int b = 0; b < nb; ++b) U.col(b) += hi * random_symbol(u01, rng);
  }

  const cplx c1 = cfg.coeffs.c1, c3 = cfg.coeffs.c3;
  Eigen::MatrixXcd Y(m, nb);
  cplx num = 0.0;
  double den = 0.0;
  for (int b = 0; b < nb; ++b) {
    for (int i = 0; i < m; ++i) {
      const cplx x = U(i, b);
      const cplx y = c1 * x + c3 * std::norm(x) * x;
      Y(i, b) = y;
      num += y * std::conj(x);
      den += std::norm(x);
    }
  }
  out.input_power = den / (static_cast<double>(m) * nb);
  const cplx kappa = den > 0 ? num / den : c1;
  double resid = 0.0, output = 0.0;
  for (int b = 0; b < nb; ++b) {
    resid += std::norm(h.dot(Y.col(b) - kappa * U.col(b)));
    output += std::norm(h.dot(Y.col(b)));
  }
  // A residual at rounding level means the front end acted linearly.
  if (resid <= 1e-24 * output) resid = 0.0;
  resid /= nb;

  const double k2 = std::norm(kappa);
  out.interference = hn2 > 0 ? projected / (K * K * hn2) : 0.0;
  const double signal = k2 * hn2 * hn2;
  const double denom = k2 * projected + resid + net.photodetection_variance * hn2;
  out.sinr = sinr_ratio(signal, denom);
  return out;
}

}  // namespace

std::vector<Interferer> sample_interferers(const NetworkConfig& net, double r, double radius,
                                           std::mt19937_64& rng) {
  const auto dist = sample_interferer_distances(net, r, radius, rng);
  std::exponential_distribution<double> expo(1.0);
  std::vector<Interferer> out(dist.size());
  for (std::size_t i = 0; i < dist.size(); ++i) out[i] = {dist[i], expo(rng)};
  return out;
}

cplx sample_element_input(const NetworkConfig& net, double K, double r, double radius,
                          std::mt19937_64& rng) {
  const double C = net.intercept();
  const double a = net.pathloss_exponent;
  std::normal_distribution<double> n01;
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  cplx u = K * std::sqrt(net.p0 * C * std::pow(r, -a)) * cn01(n01, rng) * random_symbol(u01, rng);
  for (double d : sample_interferer_distances(net, r, radius, rng))
    u += K * std::sqrt(net.pu * C * std::pow(d, -a)) * cn01(n01, rng) * random_symbol(u01, rng);
  return u;
}

TrialOutcome run_trial(const TrialConfig& cfg, std::mt19937_64& rng) {
  const double r = sample_serving_distance(cfg.net, rng);
  if (cfg.mode == SimMode::raqr_nonlinear) return nonlinear_trial(cfg, r, rng);
  return scalar_trial(cfg, r, rng);
}

std::vector<TrialOutcome> run_trials_serial(const TrialConfig& cfg) {
  cfg.validate();
  std::vector<TrialOutcome> out(static_cast<std::size_t>(cfg.n_trials));
  for (long i = 0; i < cfg.n_trials; ++i) {
    auto rng = stream_engine(cfg.seed, static_cast<std::uint64_t>(i));
    out[static_cast<std::size_t>(i)] = run_trial(cfg, rng);
  }
  return out;
}

std::vector<TrialOutcome> run_trials(const TrialConfig& cfg) {
  cfg.validate();
  std::vector<TrialOutcome> out(static_cast<std::size_t>(cfg.n_trials));
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic, 64)
  for (long i = 0; i < cfg.n_trials; ++i) {
    try {
      auto rng = stream_engine(cfg.seed, static_cast<std::uint64_t>(i));
      out[static_cast<std::size_t>(i)] = run_trial(cfg, rng);
    } catch (...) {
#pragma omp critical
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return out;
}

CurvePoint coverage_point(const std::vector<TrialOutcome>& outcomes, double theta, double x) {
  if (outcomes.empty()) throw ConfigError("no trials to estimate coverage from");
  long hits = 0;
  for (const auto& o : outcomes)
    if (o.sinr > theta) ++hits;
  const double n = static_cast<double>(outcomes.size());
  const double p = hits / n;
  return {x, p, std::sqrt(p * (1.0 - p) / n)};
}

CoverageCurve estimate_coverage(const TrialConfig& cfg, const SweepSpec& sweep) {
  if (cfg.n_trials < 100) throw ConfigError("coverage estimation needs at least 100 trials");
  CoverageCurve curve{sweep.axis, cfg.label.empty() ? sim_mode_name(cfg.mode) : cfg.label,
                      "monte-carlo", {}};
  if (sweep.axis == AxisKind::theta_db) {
    const auto outcomes = run_trials(cfg);
    for (double x : sweep.values) curve.points.push_back(coverage_point(outcomes, db_to_linear(x), x));
    return curve;
  }
  for (double x : sweep.values) {
    TrialConfig point = cfg;
    point.net = sweep_network(cfg.net, sweep, x);
    curve.points.push_back(coverage_point(run_trials(point), sweep_threshold(sweep, x), x));
  }
  return curve;
}

void write_trial_dump(std::ostream& os, const std::vector<TrialOutcome>& outcomes) {
  os << "trial,r_m,sinr_db,interference_w\n" << std::setprecision(10);
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const auto& o = outcomes[i];
    os << i << ',' << o.serving_distance << ',';
    if (std::isinf(o.sinr))
      os << "inf";
    else if (o.sinr <= 0.0)
      os << "-inf";
    else
      os << linear_to_db(o.sinr);
    os << ',' << o.interference << '\n';
  }
}

}  // namespace raqr
