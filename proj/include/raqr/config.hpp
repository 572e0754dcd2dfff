#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "raqr/atomic_transducer.hpp"
#include "raqr/coverage_analytics.hpp"
#include "raqr/detuning_search.hpp"
#include "raqr/rf_frontend_stats.hpp"

namespace raqr {

// Named coefficient sets: cs_optimized (0.327, 281), cs_resonant (0.198, 38)
// and rb_optimized (0.192, 81), all with arg(c3/c1) = pi.
TransducerCoefficients coefficient_preset(const std::string& name);
std::vector<std::string> coefficient_preset_names();

// Atomic hardware profile by name: cesium / rubidium, or any coefficient
// preset name starting with cs_ / rb_.
AtomicConfig atomic_profile(const std::string& name);

struct ReceiverSpec {
  std::string name;  // preset name, "custom" or "conventional"
  TransducerCoefficients coeffs{};
  bool conventional = false;
};

struct GridOptions {
  double lower = -kTwoPi * 20e6;
  double upper = kTwoPi * 20e6;
  int n_probe = 81;
  int n_coupling = 81;
};

struct SimulationOptions {
  long trials = 30000;
  std::uint64_t seed = 1;
  double sampling_radius = 0.0;
  int symbol_batch = 8;
  bool nonlinear = false;  // add the exact-cubic mode next to the Bussgang one
  bool dump = false;       // write per-trial data
  double max_gap = 0.03;   // --check threshold
};

// Everything one CLI run depends on. The text form written by write_config
// parses back to an identical RunConfig.
struct RunConfig {
  NetworkConfig net;
  AtomicConfig atomic = cesium_profile();
  SearchSpec search;
  GridOptions grid;
  SimulationOptions sim;
  SweepSpec sweep{AxisKind::theta_db, {}, 5.0};
  std::vector<ReceiverSpec> receivers;
};

// Defaults: reference network, Cs profile, cs_optimized + conventional
// receivers, theta grid -10..20 dB in 1 dB steps.
RunConfig default_run_config();

// Parses "[section]" headers and "key = value" lines on top of `base`.
// Errors carry "<source>:<line>: " prefixes.
RunConfig parse_config(const std::string& text, const std::string& source, RunConfig base);
RunConfig load_config(const std::string& path, RunConfig base);

void write_config(std::ostream& os, const RunConfig& cfg);
std::string config_text(const RunConfig& cfg);

// "a:b:step" ranges or comma lists.
std::vector<double> parse_value_list(const std::string& text);

ReceiverSpec receiver_from_name(const std::string& name);
Receiver to_receiver(const ReceiverSpec& spec);

std::uint64_t fnv1a_64(const std::string& data);

}  // namespace raqr
