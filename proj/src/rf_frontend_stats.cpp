#include "raqr/rf_frontend_stats.hpp"

#include <cmath>
#include <string>

#include "raqr/constants.hpp"
#include "raqr/errors.hpp"

namespace raqr {

namespace {

void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw ConfigError("network." + field + ": " + what);
}

}  // namespace

double NetworkConfig::intercept() const {
  if (pathloss_intercept) return *pathloss_intercept;
  const double g = PhysicalConstants::light_speed / (4.0 * kPi * carrier_freq);
  return g * g;
}

void NetworkConfig::validate() const {
  require(std::isfinite(bs_density) && bs_density >= 0, "bs_density", "must be >= 0");
  require(std::isfinite(lambda_u()) && lambda_u() >= 0, "ue_density", "must be >= 0");
  require(p0 > 0 && std::isfinite(p0), "p0", "must be positive");
  require(pu >= 0 && std::isfinite(pu), "pu", "must be >= 0");
  require(pathloss_exponent > 2 && std::isfinite(pathloss_exponent), "pathloss_exponent",
          "must exceed 2");
  require(carrier_freq > 0 && std::isfinite(carrier_freq), "carrier_freq", "must be positive");
  require(intercept() > 0 && std::isfinite(intercept()), "pathloss_intercept",
          "must be positive");
  require(min_distance > 0 && std::isfinite(min_distance), "min_distance", "must be positive");
  require(array_size >= 1, "array_size", "must be >= 1");
  require(bandwidth > 0, "bandwidth", "must be positive");
  require(photodetection_variance >= 0, "photodetection_variance", "must be >= 0");
  require(sys_temp > 0, "sys_temp", "must be positive");
  require(noise_figure > 0, "noise_figure", "must be positive");
  require(correlation >= 0 && correlation < 1, "correlation", "must lie in [0, 1)");
}

double field_conversion(double carrier_freq) {
  if (!(carrier_freq > 0)) throw ConfigError("carrier frequency must be positive");
  const double lambda_c = PhysicalConstants::light_speed / carrier_freq;
  const double area = lambda_c * lambda_c / (4.0 * kPi);
  return std::sqrt(2.0 / (PhysicalConstants::light_speed * PhysicalConstants::vacuum_permittivity *
                          area));
}

double input_power(const NetworkConfig& net, double K, double r) {
  const double a = net.pathloss_exponent;
  if (!(a > 2)) throw ConfigError("path-loss exponent must exceed 2");
  const double C = net.intercept();
  const double direct = net.p0 * C * std::pow(r, -a);
  const double interference = 2.0 * kPi * net.lambda_u() * net.pu * C * std::pow(r, 2.0 - a) / (a - 2.0);
  return K * K * (direct + interference);
}

BussgangTerms bussgang(const TransducerCoefficients& coeffs, double sigma2) {
  BussgangTerms t;
  t.gain = coeffs.c1 + 2.0 * coeffs.c3 * sigma2;
  t.distortion_variance = 2.0 * std::norm(coeffs.c3) * sigma2 * sigma2 * sigma2;
  return t;
}

double effective_noise(const TransducerCoefficients& coeffs, const NetworkConfig& net, double K,
                       double r) {
  const BussgangTerms b = bussgang(coeffs, input_power(net, K, r));
  const double g2 = std::norm(b.gain);
  if (!(g2 > 0)) throw GainNullError("Bussgang gain vanishes at r = " + std::to_string(r) + " m");
  return (net.photodetection_variance + b.distortion_variance) / (g2 * K * K);
}

double raqr_intrinsic_noise(const TransducerCoefficients& coeffs, const NetworkConfig& net,
                            double K) {
  const double g2 = std::norm(coeffs.c1);
  if (!(g2 > 0)) throw GainNullError("linear gain c1 is zero");
  return net.photodetection_variance / (g2 * K * K);
}

double thermal_noise(const NetworkConfig& net) {
  if (!(net.sys_temp > 0 && net.noise_figure > 0 && net.bandwidth > 0))
    throw ConfigError("thermal noise needs positive T, F and B");
  return PhysicalConstants::boltzmann * net.sys_temp * net.noise_figure * net.bandwidth;
}

double nonlinearity_ratio(const TransducerCoefficients& coeffs, double sigma2) {
  const double a1 = std::abs(coeffs.c1);
  if (!(a1 > 0)) throw GainNullError("linear gain c1 is zero");
  return std::abs(coeffs.c3) * sigma2 / a1;
}

FrontEndStatistics frontend_statistics(const TransducerCoefficients& coeffs,
                                       const NetworkConfig& net, double r) {
  const double K = field_conversion(net.carrier_freq);
  FrontEndStatistics s;
  s.serving_distance = r;
  s.input_power = input_power(net, K, r);
  const BussgangTerms b = bussgang(coeffs, s.input_power);
  s.bussgang_gain = b.gain;
  s.distortion_variance = b.distortion_variance;
  s.effective_noise = effective_noise(coeffs, net, K, r);
  s.nonlinearity_ratio = nonlinearity_ratio(coeffs, s.input_power);
  return s;
}

}  // namespace raqr
