#pragma once

#include <complex>
#include <optional>

#include "raqr/atomic_transducer.hpp"

namespace raqr {

// Network and receiver parameters shared by the analytics and the simulator.
// Defaults describe a 10 GHz, 1 MHz uplink with a 10-element array.
struct NetworkConfig {
  double bs_density = 1e-5;                // lambda_b, m^-2
  std::optional<double> ue_density;        // lambda_u, m^-2; follows lambda_b when unset
  double p0 = 1.0;                         // W
  double pu = 1.0;                         // W
  double pathloss_exponent = 4.0;
  std::optional<double> pathloss_intercept;  // C; (c / (4 pi fc))^2 when unset
  double min_distance = 10.0;              // d0, m
  int array_size = 10;                     // Mr
  double carrier_freq = 10e9;              // Hz
  double bandwidth = 1e6;                  // Hz
  double photodetection_variance = 2e-9;   // sigma_w^2, V^2
  double sys_temp = 290.0;                 // K
  double noise_figure = 3.1622776601683795;  // linear (5 dB)
  double correlation = 0.0;                // rho in [0, 1)

  double lambda_u() const { return ue_density.value_or(bs_density); }
  double intercept() const;

  // Throws ConfigError naming the first offending field.
  void validate() const;
};

// Field conversion factor K = sqrt(2 / (c eps0 A_e)), A_e = lambda_c^2 / (4 pi).
double field_conversion(double carrier_freq);

// Per-element received field power conditioned on the serving distance,
// (V/m)^2. Photodetection noise is not included.
double input_power(const NetworkConfig& net, double K, double r);

struct BussgangTerms {
  cdouble gain;                    // kappa
  double distortion_variance = 0;  // sigma_d^2
};

BussgangTerms bussgang(const TransducerCoefficients& coeffs, double input_power);

// Input-referred noise (sigma_w^2 + sigma_d^2) / (|kappa|^2 K^2), in W.
// Throws GainNullError when kappa vanishes.
double effective_noise(const TransducerCoefficients& coeffs, const NetworkConfig& net, double K,
                       double r);

// sigma_w^2 / (|c1|^2 K^2), the distortion-free limit of effective_noise.
double raqr_intrinsic_noise(const TransducerCoefficients& coeffs, const NetworkConfig& net,
                            double K);

// kB T F B, in W.
double thermal_noise(const NetworkConfig& net);

// |c3| sigma^2 / |c1|.
double nonlinearity_ratio(const TransducerCoefficients& coeffs, double input_power);

struct FrontEndStatistics {
  double serving_distance = 0;
  double input_power = 0;
  cdouble bussgang_gain;
  double distortion_variance = 0;
  double effective_noise = 0;
  double nonlinearity_ratio = 0;
};

FrontEndStatistics frontend_statistics(const TransducerCoefficients& coeffs,
                                       const NetworkConfig& net, double r);

}  // namespace raqr
