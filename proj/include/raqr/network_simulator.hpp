#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "raqr/atomic_transducer.hpp"
#include "raqr/coverage_analytics.hpp"
#include "raqr/rf_frontend_stats.hpp"

namespace raqr {

// conventional ignores net.correlation; the other modes draw correlated
// element fading whenever net.correlation > 0.
enum class SimMode { raqr_nonlinear, raqr_bussgang, conventional, conventional_coupled };

std::string sim_mode_name(SimMode mode);
SimMode parse_sim_mode(const std::string& name);

struct TrialConfig {
  NetworkConfig net;
  SimMode mode = SimMode::raqr_bussgang;
  TransducerCoefficients coeffs{};
  long n_trials = 30000;
  std::uint64_t seed = 1;
  // Interferer field radius. Zero selects max(10 q999(R0), 30 / sqrt(pi lambda_u)).
  // Each trial further extends it to r 1000^(1/(alpha-2)) so that the
  // truncated Campbell tail stays below 0.1% of the mean interference.
  double sampling_radius = 0.0;
  int symbol_batch = 8;  // symbol draws per trial in raqr-nonlinear mode
  std::string label;     // receiver_mode tag of estimated curves; mode name when empty

  void validate() const;
};

struct Interferer {
  double distance = 0.0;
  double fading = 0.0;  // projected fading |t0^H g_i|^2
};

struct TrialOutcome {
  double sinr = 0.0;  // +inf when the denominator vanishes
  double serving_distance = 0.0;
  double interference = 0.0;  // W, after combining
  double input_power = 0.0;   // per-element field power, (V/m)^2
};

double default_sampling_radius(const NetworkConfig& net);
// Radius used for a trial with serving distance r.
double trial_sampling_radius(const TrialConfig& cfg, double r);

double sample_serving_distance(const NetworkConfig& net, std::mt19937_64& rng);

// Poisson field in the annulus [r, radius] with unit-mean exponential fading.
std::vector<Interferer> sample_interferers(const NetworkConfig& net, double r, double radius,
                                           std::mt19937_64& rng);

// One received field sample at a single element: desired user plus the
// interferer field, Rayleigh fading and unit-modulus symbols, in V/m.
std::complex<double> sample_element_input(const NetworkConfig& net, double K, double r,
                                          double radius, std::mt19937_64& rng);

TrialOutcome run_trial(const TrialConfig& cfg, std::mt19937_64& rng);

// Trial i uses the stream derived from (seed, i); the result does not depend
// on the number of threads.
std::vector<TrialOutcome> run_trials(const TrialConfig& cfg);
std::vector<TrialOutcome> run_trials_serial(const TrialConfig& cfg);

// Fraction of outcomes with SINR > theta (linear) and its standard error.
CurvePoint coverage_point(const std::vector<TrialOutcome>& outcomes, double theta, double x);

// Monte Carlo coverage along a sweep. Theta sweeps reuse a single trial set;
// density and array sweeps rerun the trials per point with the same seed.
CoverageCurve estimate_coverage(const TrialConfig& cfg, const SweepSpec& sweep);

// Columns: trial, r_m, sinr_db, interference_w; rows ordered by trial index.
void write_trial_dump(std::ostream& os, const std::vector<TrialOutcome>& outcomes);

}  // namespace raqr
