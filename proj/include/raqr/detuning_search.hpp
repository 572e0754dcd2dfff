#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "raqr/atomic_transducer.hpp"
#include "raqr/constants.hpp"

namespace raqr {

// Multi-start search settings. Bounds are shared by all three detunings.
struct SearchSpec {
  double lower = -kTwoPi * 20e6;    // rad/s
  double upper = kTwoPi * 20e6;     // rad/s
  int n_starts = 64;
  double tolerance = kTwoPi * 1e3;  // simplex diameter, rad/s
  int max_iterations = 600;
  std::uint64_t seed = 1;

  void validate() const;
};

struct RestartRecord {
  DetuningTriple start;
  DetuningTriple optimum;
  double objective = 0.0;  // maximized value, -inf when the restart failed
  bool converged = false;
  int evaluations = 0;
};

struct SearchResult {
  DetuningTriple optimum;
  double objective = 0.0;
  std::size_t best_restart = 0;
  // No axis probe at +-tolerance around the optimum improves the objective.
  bool locally_optimal = false;
  std::vector<RestartRecord> restarts;
};

using DetuningObjective = std::function<double(const DetuningTriple&)>;

// Maximizes an arbitrary objective with seeded Nelder-Mead restarts. Ties go
// to the lowest restart index. Restarts run in parallel with OpenMP.
SearchResult multi_start_maximize(const DetuningObjective& objective, const SearchSpec& spec);

// Single-threaded reference with identical results.
SearchResult multi_start_maximize_serial(const DetuningObjective& objective,
                                         const SearchSpec& spec);

struct DetuningOptimum {
  SearchResult search;
  TransducerCoefficients coeffs;
};

// Maximizes |c1| over (probe, coupling, LO) detunings.
DetuningOptimum optimize_detunings(const AtomicConfig& cfg, const SearchSpec& spec);

struct GridSpec {
  std::vector<double> probe_axis;     // rad/s
  std::vector<double> coupling_axis;  // rad/s
  double lo_detuning = 0.0;           // rad/s

  static GridSpec uniform(double lo, double hi, std::size_t n_probe, std::size_t n_coupling,
                          double lo_detuning);
};

struct LandscapeCell {
  double abs_c1 = 0.0;
  double abs_c3_over_c1 = 0.0;
  bool valid = false;  // false when the coefficient extraction failed
};

struct LandscapeGrid {
  std::vector<double> probe_axis;
  std::vector<double> coupling_axis;
  double lo_detuning = 0.0;
  std::vector<LandscapeCell> cells;  // probe-major

  const LandscapeCell& at(std::size_t i_probe, std::size_t i_coupling) const {
    return cells[i_probe * coupling_axis.size() + i_coupling];
  }
};

LandscapeGrid scan_landscape(const AtomicConfig& cfg, const GridSpec& grid);
LandscapeGrid scan_landscape_serial(const AtomicConfig& cfg, const GridSpec& grid);

// Columns: delta_p_hz, delta_c_hz, abs_c1, abs_c3_over_c1. Failed cells are
// written as nan.
void write_landscape_csv(std::ostream& os, const LandscapeGrid& grid);

}  // namespace raqr
