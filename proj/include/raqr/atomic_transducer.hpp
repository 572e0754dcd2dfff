#pragma once

#include <complex>
#include <functional>
#include <string>

#include <Eigen/Dense>

namespace raqr {

using cdouble = std::complex<double>;

// Laser, cell and readout parameters of a four-level ladder transducer.
// Rabi frequencies and rates are angular (rad/s).
struct AtomicConfig {
  std::string species_label = "custom";
  double probe_wavelength = 0.0;  // m
  double decay_rate = 0.0;        // gamma_2 of |2>, rad/s
  double rabi_probe = 0.0;
  double rabi_coupling = 0.0;
  double rabi_lo = 0.0;
  double dipole_12 = 0.0;  // C m
  double dipole_34 = 0.0;  // C m
  double number_density = 0.0;  // m^-3
  double cell_length = 0.0;     // m
  double probe_power_in = 0.0;  // W
  double probe_phase_in = 0.0;  // rad
  double reference_power = 0.0; // W
  double responsivity = 0.0;    // A/W
  double lna_gain = 1.0;
  // Uniform transit-time relaxation of every level back to |1>. Zero keeps
  // gamma_2 as the only decoherence channel.
  double transit_rate = 0.0;

  // Throws ConfigError naming the first offending field.
  void validate() const;
};

// Representative Cs (852 nm, gamma_2 = 2pi x 5.2 MHz) and Rb (780 nm)
// hardware profiles. Only the wavelength and decay rate are published; the
// remaining values are plausible vapor-cell numbers.
AtomicConfig cesium_profile();
AtomicConfig rubidium_profile();

struct DetuningTriple {
  double probe = 0.0;
  double coupling = 0.0;
  double lo = 0.0;

  friend bool operator==(const DetuningTriple&, const DetuningTriple&) = default;
};

using DensityMatrix = Eigen::Matrix4cd;
using Liouvillian = Eigen::Matrix<cdouble, 16, 16>;

// Rotating-frame four-level Hamiltonian in rad/s.
Eigen::Matrix4cd ladder_hamiltonian(const AtomicConfig& cfg, const DetuningTriple& det,
                                    double omega_rf);

// Row-major vectorized Lindblad generator: d vec(rho)/dt = L vec(rho), with
// vec(rho)[4 i + j] = rho(i, j). Time is measured in units of 1/gamma_2.
Liouvillian lindblad_generator(const AtomicConfig& cfg, const DetuningTriple& det,
                               double omega_rf);

// Stationary density matrix of the Lindblad generator. When the stationary
// subspace is degenerate (e.g. all fields off), returns the long-time state
// reached from the ground state |1><1|.
DensityMatrix steady_state(const AtomicConfig& cfg, const DetuningTriple& det, double omega_rf);

// chi = -2 N0 mu12^2 rho21 / (eps0 hbar Omega_p).
cdouble susceptibility(const AtomicConfig& cfg, cdouble rho21);

// BCOD readout of a probe that traversed a cell with susceptibility chi.
double readout_voltage(const AtomicConfig& cfg, cdouble chi);

// Optical probe output power for a given susceptibility.
double probe_output_power(const AtomicConfig& cfg, cdouble chi);

// V^(B)(omega_rf): steady state -> susceptibility -> readout.
double detector_voltage(const AtomicConfig& cfg, const DetuningTriple& det, double omega_rf);

// Baseband transduction coefficients around the LO operating point.
// Convention: c1 = a1 mu34/hbar and c3 = (a3/8)(mu34/hbar)^3, so with the
// field envelope u in V/m, c1 u and c3 |u|^2 u share the units of V.
struct TransducerCoefficients {
  cdouble c1{0.0, 0.0};
  cdouble c3{0.0, 0.0};
  double a0 = 0.0;
  double a1 = 0.0;
  double a2 = 0.0;
  double a3 = 0.0;
  DetuningTriple operating_point{};
  double nonlinearity_ratio = 0.0;  // |c3/c1|

  // Builds coefficients from published magnitudes |c1| and |c3/c1| with a
  // relative phase arg(c3/c1). a_n are left at zero.
  static TransducerCoefficients from_magnitudes(double abs_c1, double abs_c3_over_c1,
                                                double relative_phase);
};

struct DerivativeOptions {
  double initial_step_fraction = 0.05;  // h0 = fraction * |omega_lo|
  double relative_tolerance = 1e-6;
  int max_levels = 10;
};

// a1..a3 of an arbitrary curve V(Omega) at omega_lo by Richardson-extrapolated
// central differences; c1, c3 are assembled with dipole_34.
TransducerCoefficients taylor_coefficients(const std::function<double(double)>& curve,
                                           double omega_lo, double dipole_34,
                                           const DerivativeOptions& opts = {});

TransducerCoefficients taylor_coefficients(const AtomicConfig& cfg, const DetuningTriple& det,
                                           const DerivativeOptions& opts = {});

// Input power |u|^2 up to which the linear model errs by at most tolerance.
// Returns +inf when c3 = 0.
double linearity_radius(const TransducerCoefficients& coeffs, double tolerance);

// Complex baseband envelope of the component at f_delta for an input of
// Rabi-frequency magnitude input_magnitude and phase input_phase:
// (a1 W + a3 W^3 / 8) e^{j phase}.
cdouble fundamental_envelope(const TransducerCoefficients& coeffs, double input_magnitude,
                             double input_phase);

}  // namespace raqr
