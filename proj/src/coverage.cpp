#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <string>
#include <vector>

#include "raqr/constants.hpp"
#include "raqr/coverage_analytics.hpp"
#include "raqr/errors.hpp"
#include "raqr/numerics.hpp"

namespace raqr {

using cplx = std::complex<double>;

// ---- serving distance ------------------------------------------------------

double serving_distance_pdf(const NetworkConfig& net, double r) {
  const double d0 = net.min_distance, lb = net.bs_density;
  if (r < d0) return 0.0;
  return 2.0 * kPi * lb * r * std::exp(-kPi * lb * (r * r - d0 * d0));
}

double serving_distance_cdf(const NetworkConfig& net, double r) {
  const double d0 = net.min_distance;
  if (r <= d0) return 0.0;
  return -std::expm1(-kPi * net.bs_density * (r * r - d0 * d0));
}

double serving_distance_quantile(const NetworkConfig& net, double p) {
  if (!(p >= 0.0 && p < 1.0)) throw ConfigError("quantile level must lie in [0, 1)");
  if (!(net.bs_density > 0)) throw ConfigError("bs_density must be positive");
  const double d0 = net.min_distance;
  return std::sqrt(d0 * d0 - std::log1p(-p) / (kPi * net.bs_density));
}

// ---- interference ----------------------------------------------------------

namespace {

void require_alpha(const NetworkConfig& net) {
  if (!(net.pathloss_exponent > 2)) throw ConfigError("path-loss exponent must exceed 2");
}

// Integral of zeta / (tau^(alpha/2) + zeta) over tau in [r^2, inf), after
// tau = r^2 / x.
double exponent_quadrature(double alpha, double zeta, double r) {
  const double ra = std::pow(r, alpha);
  const double half = 0.5 * alpha;
  auto f = [&](double x) {
    if (x <= 0.0) return 0.0;
    return zeta * r * r * std::pow(x, half - 2.0) / (ra + zeta * std::pow(x, half));
  };
  if (half >= 2.0) return integrate_adaptive(f, 0.0, 1.0, 1e-12, 1e-300).value;
  return integrate_tanh_sinh(f, 0.0, 1.0, 1e-13).value;
}

cplx exponent_quadrature(double alpha, cplx zeta, double r) {
  const double ra = std::pow(r, alpha);
  const double half = 0.5 * alpha;
  auto g = [&](double x) {
    return zeta * r * r * std::pow(x, half - 2.0) / (ra + zeta * std::pow(x, half));
  };
  auto re = [&](double x) { return x <= 0.0 ? 0.0 : g(x).real(); };
  auto im = [&](double x) { return x <= 0.0 ? 0.0 : g(x).imag(); };
  if (half >= 2.0)
    return {integrate_adaptive(re, 0.0, 1.0, 1e-10, 1e-300).value,
            integrate_adaptive(im, 0.0, 1.0, 1e-10, 1e-300).value};
  return {integrate_tanh_sinh(re, 0.0, 1.0, 1e-11).value,
          integrate_tanh_sinh(im, 0.0, 1.0, 1e-11).value};
}

}  // namespace

double interference_laplace_quadrature(const NetworkConfig& net, double s, double r, double mu_I) {
  require_alpha(net);
  const double zeta = s * net.pu * net.intercept() * mu_I;
  if (zeta == 0.0 || net.lambda_u() == 0.0) return 1.0;
  return std::exp(-kPi * net.lambda_u() * exponent_quadrature(net.pathloss_exponent, zeta, r));
}

double interference_laplace(const NetworkConfig& net, double s, double r, double mu_I) {
  require_alpha(net);
  if (net.pathloss_exponent != 4.0) return interference_laplace_quadrature(net, s, r, mu_I);
  const double zeta = s * net.pu * net.intercept() * mu_I;
  if (zeta == 0.0 || net.lambda_u() == 0.0) return 1.0;
  const double q = std::sqrt(zeta);
  // pi/2 - atan(r^2/q) written as atan(q/r^2) to keep precision for small q.
  return std::exp(-kPi * net.lambda_u() * q * std::atan(q / (r * r)));
}

cplx interference_laplace(const NetworkConfig& net, cplx s, double r, double mu_I) {
  require_alpha(net);
  const cplx zeta = s * (net.pu * net.intercept() * mu_I);
  if (zeta == 0.0 || net.lambda_u() == 0.0) return 1.0;
  if (net.pathloss_exponent == 4.0) {
    const cplx q = std::sqrt(zeta);
    return std::exp(-kPi * net.lambda_u() * q * std::atan(q / (r * r)));
  }
  return std::exp(-kPi * net.lambda_u() * exponent_quadrature(net.pathloss_exponent, zeta, r));
}

// ---- coverage --------------------------------------------------------------

namespace {

double normalized_threshold(const NetworkConfig& net, double theta, double r) {
  return theta * std::pow(r, net.pathloss_exponent) / (net.p0 * net.intercept());
}

void require_coverage_args(double theta, double r, const NetworkConfig& net) {
  if (!(theta > 0) || !std::isfinite(theta)) throw ConfigError("threshold must be positive");
  if (!(r >= net.min_distance)) throw ConfigError("serving distance below d0");
}

}  // namespace

double conditional_coverage(const NetworkConfig& net, double noise, double theta, double r,
                            const GammaApprox& fit) {
  require_coverage_args(theta, r, net);
  const int m = fit.array_size;
  const double s = normalized_threshold(net, theta, r);
  long double total = 0.0L, magnitude = 0.0L;
  long double binom = 1.0L;
  for (int k = 1; k <= m; ++k) {
    binom = binom * (m - k + 1) / k;
    const double sk = k * fit.rate * s;
    const long double term = binom * std::exp(-sk * noise) * interference_laplace(net, sk, r);
    total += (k % 2 == 1) ? term : -term;
    magnitude += term;
  }
  // Each term carries double-precision error, so cancellation leaves about
  // eps * sum|term| of absolute error.
  if (8.0L * std::numeric_limits<double>::epsilon() * magnitude > 1e-4L) {
    throw NumericalError("binomial coverage sum cancels beyond double precision for Mr = " +
                         std::to_string(m));
  }
  return std::clamp(static_cast<double>(total), 0.0, 1.0);
}

double conditional_coverage_inversion(const NetworkConfig& net, double noise, double theta,
                                      double r, const CorrelationSpectrum& spectrum) {
  require_coverage_args(theta, r, net);
  const double s = normalized_threshold(net, theta, r);
  const double a = s * noise;
  const double mu = spectrum.interference_factor;
  double mean = 0.0;
  for (double l : spectrum.eigenvalues) mean += l;
  mean /= static_cast<double>(spectrum.eigenvalues.size());

  // Gil-Pelaez on Z = H - s I: P(Z > a) = 1/2 + (1/pi) int Im[e^{-j w a} phi_Z(w)] / w dw.
  auto integrand = [&](double t) {
    if (t <= 0.0 || t >= 1.0) return 0.0;
    const double w = t / (1.0 - t) / mean;
    const double dw = 1.0 / ((1.0 - t) * (1.0 - t) * mean);
    cplx phi = std::exp(cplx{0.0, -w * a});
    for (double l : spectrum.eigenvalues) phi /= cplx{1.0, -w * l};
    phi *= interference_laplace(net, cplx{0.0, w * s}, r, mu);
    return phi.imag() / w * dw;
  };
  const double integral = integrate_adaptive(integrand, 0.0, 1.0, 1e-9, 1e-12).value;
  return std::clamp(0.5 + integral / kPi, 0.0, 1.0);
}

double conditional_coverage(const NetworkConfig& net, double noise, double theta, double r,
                            const CorrelationSpectrum& spectrum) {
  require_coverage_args(theta, r, net);
  if (spectrum.degenerate)
    throw SingularSystemError("repeated eigenvalues: use the uncoupled coverage path");
  if (!spectrum.weights_reliable)
    return conditional_coverage_inversion(net, noise, theta, r, spectrum);
  const double s = normalized_threshold(net, theta, r);
  const double mu = spectrum.interference_factor;
  long double total = 0.0L;
  for (std::size_t k = 0; k < spectrum.weights.size(); ++k) {
    const double sk = s / spectrum.eigenvalues[k];
    total += static_cast<long double>(spectrum.weights[k]) * std::exp(-sk * noise) *
             interference_laplace(net, sk, r, mu);
  }
  return std::clamp(static_cast<double>(total), 0.0, 1.0);
}

Receiver Receiver::raqr(const TransducerCoefficients& coeffs, std::string label) {
  Receiver rx;
  rx.kind = ReceiverKind::raqr;
  rx.coeffs = coeffs;
  rx.label = std::move(label);
  return rx;
}

Receiver Receiver::conventional(std::string label) {
  Receiver rx;
  rx.kind = ReceiverKind::conventional;
  rx.label = std::move(label);
  return rx;
}

namespace {

NetworkConfig effective_network(const NetworkConfig& net, const Receiver& rx) {
  NetworkConfig out = net;
  if (rx.noise_limited) out.ue_density = 0.0;
  return out;
}

double noise_for(const NetworkConfig& net, const Receiver& rx, double K, double r) {
  if (rx.kind == ReceiverKind::conventional) return thermal_noise(net);
  return effective_noise(rx.coeffs, net, K, r);
}

struct CoverageContext {
  NetworkConfig net;
  double K = 0.0;
  bool coupled = false;
  GammaApprox fit;
  CorrelationSpectrum spectrum;
};

CoverageContext make_context(const NetworkConfig& net_in, const Receiver& rx) {
  CoverageContext ctx;
  ctx.net = effective_network(net_in, rx);
  ctx.net.validate();
  ctx.K = field_conversion(ctx.net.carrier_freq);
  ctx.coupled = ctx.net.correlation > 0.0 && ctx.net.array_size > 1;
  if (ctx.coupled)
    ctx.spectrum = correlation_spectrum(ctx.net.array_size, ctx.net.correlation);
  else
    ctx.fit = ks_fit(ctx.net.array_size);
  return ctx;
}

// Serving distance minimizing |kappa(r)|, or 0 when the minimum lies outside
// [d0, inf). The input power decreases monotonically in r.
double gain_null_radius(const NetworkConfig& net, const TransducerCoefficients& c, double K) {
  const double c3sq = std::norm(c.c3);
  if (!(c3sq > 0)) return 0.0;
  const double target = -std::real(c.c1 * std::conj(c.c3)) / (2.0 * c3sq);
  const double d0 = net.min_distance;
  if (!(target > 0) || input_power(net, K, d0) <= target) return 0.0;
  double lo = d0, hi = 2.0 * d0;
  while (input_power(net, K, hi) > target) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e12) return 0.0;
  }
  for (int i = 0; i < 200 && hi - lo > 1e-13 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (input_power(net, K, mid) > target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double context_coverage(const CoverageContext& ctx, const Receiver& rx, double theta, double r) {
  double noise;
  try {
    noise = noise_for(ctx.net, rx, ctx.K, r);
  } catch (const GainNullError&) {
    return 0.0;
  }
  if (ctx.coupled) return conditional_coverage(ctx.net, noise, theta, r, ctx.spectrum);
  return conditional_coverage(ctx.net, noise, theta, r, ctx.fit);
}

}  // namespace

double receiver_noise(const NetworkConfig& net, const Receiver& rx, double r) {
  const NetworkConfig eff = effective_network(net, rx);
  return noise_for(eff, rx, field_conversion(eff.carrier_freq), r);
}

double receiver_conditional_coverage(const NetworkConfig& net, const Receiver& rx, double theta,
                                     double r) {
  return context_coverage(make_context(net, rx), rx, theta, r);
}

double network_coverage(const NetworkConfig& net, const Receiver& rx, double theta) {
  const CoverageContext ctx = make_context(net, rx);
  if (!(ctx.net.bs_density > 0)) throw ConfigError("bs_density must be positive");
  if (!(theta > 0) || !std::isfinite(theta)) throw ConfigError("threshold must be positive");
  const double d0 = ctx.net.min_distance;
  const double scale = 1.0 / (kPi * ctx.net.bs_density);
  // v = pi lambda_b (r^2 - d0^2) turns f_R dr into e^{-v} dv; the tail beyond
  // v_max carries 1e-12 of the mass.
  const double v_max = -std::log(1e-12);
  auto integrand = [&](double v) {
    const double r = std::sqrt(d0 * d0 + v * scale);
    return context_coverage(ctx, rx, theta, r) * std::exp(-v);
  };
  // The alternating binomial sum loses about log10 C(Mr, Mr/2) digits, which
  // sets a floor on the attainable absolute accuracy.
  const int m = ctx.net.array_size;
  const double peak_binom = std::exp(std::lgamma(m + 1.0) - 2.0 * std::lgamma(0.5 * m + 1.0));
  const double abs_tol =
      ctx.coupled ? 1e-11 : std::max(1e-11, 64.0 * std::numeric_limits<double>::epsilon() * peak_binom);
  // Split at the gain null, where the coverage has a narrow dip to zero.
  std::vector<double> breaks{0.0};
  breaks.reserve(64);
  if (rx.kind == ReceiverKind::raqr) {
    const double r_null = gain_null_radius(ctx.net, rx.coeffs, ctx.K);
    const double v_null = (r_null * r_null - d0 * d0) / scale;
    if (v_null > 0.0 && v_null < v_max) {
      // Geometric breakpoints on both sides so the first panels resolve the
      // dip instead of sampling around it.
      const double unit = std::max(v_null, 1.0);
      for (int k = 24; k >= 0; --k) breaks.push_back(v_null - unit * std::ldexp(1.0, -k));
      breaks.push_back(v_null);
      for (int k = 24; k >= 0; --k) breaks.push_back(v_null + unit * std::ldexp(1.0, -k));
    }
  }
  breaks.push_back(v_max);
  std::erase_if(breaks, [&](double b) { return b < 0.0 || b > v_max; });
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  double p = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i)
    p += integrate_adaptive(integrand, breaks[i], breaks[i + 1], 1e-9, abs_tol).value;
  return std::clamp(p, 0.0, 1.0);
}

double crossover_density(const NetworkConfig& net, const Receiver& a, const Receiver& b,
                         double theta, double lo, double hi, double rel_tol) {
  if (!(lo > 0 && hi > lo)) throw ConfigError("crossover bracket must satisfy 0 < lo < hi");
  auto diff = [&](double lambda) {
    NetworkConfig n = net;
    n.bs_density = lambda;
    n.ue_density.reset();
    return network_coverage(n, a, theta) - network_coverage(n, b, theta);
  };
  double flo = diff(lo), fhi = diff(hi);
  if (flo == 0.0 && fhi == 0.0) throw NumericalError("coverage curves coincide on the density bracket");
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0) == (fhi > 0))
    throw NumericalError("coverage curves do not cross on the density bracket");
  while (hi / lo - 1.0 > rel_tol) {
    const double mid = std::sqrt(lo * hi);
    const double fm = diff(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return std::sqrt(lo * hi);
}

// ---- curves ----------------------------------------------------------------

std::string axis_name(AxisKind kind) {
  switch (kind) {
    case AxisKind::theta_db: return "theta_db";
    case AxisKind::density: return "density";
    case AxisKind::array_size: return "array_size";
  }
  return "unknown";
}

AxisKind parse_axis(const std::string& name) {
  if (name == "theta" || name == "theta_db") return AxisKind::theta_db;
  if (name == "density") return AxisKind::density;
  if (name == "array" || name == "array_size") return AxisKind::array_size;
  throw ConfigError("unknown sweep axis '" + name + "' (expected theta, density or array)");
}

NetworkConfig sweep_network(const NetworkConfig& net, const SweepSpec& sweep, double x) {
  NetworkConfig n = net;
  if (sweep.axis == AxisKind::density) {
    if (!(x > 0)) throw ConfigError("density sweep values must be positive");
    n.bs_density = x;
  } else if (sweep.axis == AxisKind::array_size) {
    n.array_size = static_cast<int>(std::lround(x));
  }
  return n;
}

double sweep_threshold(const SweepSpec& sweep, double x) {
  return db_to_linear(sweep.axis == AxisKind::theta_db ? x : sweep.theta_db);
}

namespace {

std::string mode_tag(const Receiver& rx) {
  if (!rx.label.empty()) return rx.label;
  return rx.kind == ReceiverKind::raqr ? "raqr" : "conventional";
}

}  // namespace

CoverageCurve analytic_curve_serial(const NetworkConfig& net, const Receiver& rx,
                                    const SweepSpec& sweep) {
  CoverageCurve c{sweep.axis, mode_tag(rx), "analytic", {}};
  c.points.resize(sweep.values.size());
  for (std::size_t i = 0; i < sweep.values.size(); ++i) {
    const double x = sweep.values[i];
    c.points[i] = {x, network_coverage(sweep_network(net, sweep, x), rx, sweep_threshold(sweep, x)),
                   0.0};
  }
  return c;
}

CoverageCurve analytic_curve(const NetworkConfig& net, const Receiver& rx,
                             const SweepSpec& sweep) {
  CoverageCurve c{sweep.axis, mode_tag(rx), "analytic", {}};
  const long n = static_cast<long>(sweep.values.size());
  c.points.resize(sweep.values.size());
  // Exceptions must not escape the parallel region; rethrow the first one.
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < n; ++i) {
    try {
      const double x = sweep.values[static_cast<std::size_t>(i)];
      c.points[static_cast<std::size_t>(i)] = {
          x, network_coverage(sweep_network(net, sweep, x), rx, sweep_threshold(sweep, x)), 0.0};
    } catch (...) {
#pragma omp critical
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return c;
}

}  // namespace raqr
