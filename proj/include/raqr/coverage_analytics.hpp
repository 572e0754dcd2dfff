#pragma once

#include <complex>
#include <string>
#include <vector>

#include "raqr/atomic_transducer.hpp"
#include "raqr/rf_frontend_stats.hpp"

namespace raqr {

// ---- serving distance ------------------------------------------------------

double serving_distance_pdf(const NetworkConfig& net, double r);
double serving_distance_cdf(const NetworkConfig& net, double r);
double serving_distance_quantile(const NetworkConfig& net, double p);

// ---- interference ----------------------------------------------------------

// E[exp(-s I) | r] for the interferer field outside the guard radius r. The
// fading mean is scaled by mu_I (1 for uncoupled arrays). Closed form at
// alpha = 4, adaptive quadrature otherwise.
double interference_laplace(const NetworkConfig& net, double s, double r, double mu_I = 1.0);

// Quadrature evaluation for any alpha > 2.
double interference_laplace_quadrature(const NetworkConfig& net, double s, double r,
                                       double mu_I = 1.0);

// Analytic continuation to complex s with Re s >= 0.
std::complex<double> interference_laplace(const NetworkConfig& net, std::complex<double> s,
                                          double r, double mu_I = 1.0);

// ---- gamma approximation ---------------------------------------------------

struct GammaApprox {
  int array_size = 1;
  double ks_coefficient = 1.0;  // alpha_ks
  double rate = 1.0;            // nu = alpha_ks / Mr
  double sup_distance = 0.0;
};

// sup_x |P(Mr, Mr x) - (1 - exp(-xi x))^Mr| on a 4001-point log grid over
// [1e-4, 50 Mr] with local refinement around the largest deviation.
double ks_sup_distance(int array_size, double xi);

// Minimizer of ks_sup_distance. Results are memoized per array size.
GammaApprox ks_fit(int array_size);

// Mr (Mr!)^(-1/Mr).
double alzer_coefficient(int array_size);

// ---- coupled arrays --------------------------------------------------------

struct CorrelationSpectrum {
  double correlation = 0.0;
  std::vector<double> eigenvalues;
  std::vector<double> weights;       // partial-fraction weights; empty when degenerate
  double interference_factor = 1.0;  // mu_I = sum lambda_k^2 / Mr
  bool degenerate = false;           // rho = 0: identity covariance
  bool weights_reliable = true;      // |sum omega - 1| <= 1e-6
  double identity_error = 0.0;       // |sum omega - 1|
};

// Spectrum of [R]_ij = rho^|i-j|. Throws SingularSystemError if two
// eigenvalues collide for rho > 0.
CorrelationSpectrum correlation_spectrum(int array_size, double rho);

// P(sum_k lambda_k E_k > x) for unit exponentials E_k via partial fractions.
double spectrum_ccdf(const CorrelationSpectrum& spectrum, double x);

// ---- coverage --------------------------------------------------------------

// Binomial-sum coverage for an uncoupled array given the noise power (W)
// referred to the input, the linear threshold and the serving distance.
double conditional_coverage(const NetworkConfig& net, double noise, double theta, double r,
                            const GammaApprox& fit);

// Partial-fraction coverage for a coupled array. Falls back to
// characteristic-function inversion when the weights are unreliable.
double conditional_coverage(const NetworkConfig& net, double noise, double theta, double r,
                            const CorrelationSpectrum& spectrum);

// Characteristic-function inversion of the coupled coverage; exact for the
// weighted-exponential signal model, used as the fallback path.
double conditional_coverage_inversion(const NetworkConfig& net, double noise, double theta,
                                      double r, const CorrelationSpectrum& spectrum);

enum class ReceiverKind { raqr, conventional };

struct Receiver {
  ReceiverKind kind = ReceiverKind::raqr;
  TransducerCoefficients coeffs{};
  bool noise_limited = false;  // drop the interferer field entirely
  std::string label;

  static Receiver raqr(const TransducerCoefficients& coeffs, std::string label = "raqr");
  static Receiver conventional(std::string label = "conventional");
};

// Noise power seen by the receiver at serving distance r. Throws
// GainNullError when the RAQR gain vanishes.
double receiver_noise(const NetworkConfig& net, const Receiver& rx, double r);

// Conditional coverage of a receiver at r, choosing the coupled path when
// net.correlation > 0. Gain nulls yield zero coverage.
double receiver_conditional_coverage(const NetworkConfig& net, const Receiver& rx, double theta,
                                     double r);

// Coverage averaged over the serving distance.
double network_coverage(const NetworkConfig& net, const Receiver& rx, double theta);

// BS density (with lambda_u = lambda_b) at which the two receivers have equal
// coverage, by bisection in log density to `rel_tol`. Throws NumericalError
// when the difference does not change sign on [lo, hi].
double crossover_density(const NetworkConfig& net, const Receiver& a, const Receiver& b,
                         double theta, double lo = 1e-6, double hi = 1e-3, double rel_tol = 1e-3);

enum class AxisKind { theta_db, density, array_size };

std::string axis_name(AxisKind kind);
AxisKind parse_axis(const std::string& name);

struct CurvePoint {
  double x = 0.0;
  double p_cov = 0.0;
  double std_error = 0.0;  // zero for analytic points
};

struct CoverageCurve {
  AxisKind axis = AxisKind::theta_db;
  std::string receiver_mode;
  std::string method;  // "analytic" or "monte-carlo"
  std::vector<CurvePoint> points;
};

struct SweepSpec {
  AxisKind axis = AxisKind::theta_db;
  std::vector<double> values;  // dB, m^-2 or element counts
  double theta_db = 0.0;       // threshold for density and array sweeps
};

// Network and threshold for one sweep point. Density sweeps keep lambda_u
// tied to lambda_b unless it was set explicitly.
NetworkConfig sweep_network(const NetworkConfig& net, const SweepSpec& sweep, double x);
double sweep_threshold(const SweepSpec& sweep, double x);

CoverageCurve analytic_curve(const NetworkConfig& net, const Receiver& rx, const SweepSpec& sweep);
CoverageCurve analytic_curve_serial(const NetworkConfig& net, const Receiver& rx,
                                    const SweepSpec& sweep);

}  // namespace raqr
