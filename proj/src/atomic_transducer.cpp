#include "raqr/atomic_transducer.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <vector>

#include "raqr/constants.hpp"
#include "raqr/errors.hpp"

namespace raqr {

namespace {

using PC = PhysicalConstants;

void require_positive(double value, const char* field) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    std::ostringstream os;
    os << "AtomicConfig." << field << " must be positive and finite (got " << value << ")";
    throw ConfigError(os.str());
  }
}

void require_finite(double value, const char* what) {
  if (!std::isfinite(value)) {
    std::ostringstream os;
    os << what << " is not finite";
    throw ConfigError(os.str());
  }
}

}  // namespace

void AtomicConfig::validate() const {
  require_positive(probe_wavelength, "probe_wavelength");
  require_positive(decay_rate, "decay_rate");
  require_positive(rabi_lo, "rabi_lo");
  require_positive(dipole_12, "dipole_12");
  require_positive(dipole_34, "dipole_34");
  require_positive(number_density, "number_density");
  require_positive(cell_length, "cell_length");
  require_positive(probe_power_in, "probe_power_in");
  require_positive(reference_power, "reference_power");
  require_positive(responsivity, "responsivity");
  require_positive(lna_gain, "lna_gain");
  // Omega_p may be zero for the undriven test case; it must not be negative.
  if (rabi_probe < 0.0 || rabi_coupling < 0.0 || !std::isfinite(rabi_probe) ||
      !std::isfinite(rabi_coupling)) {
    throw ConfigError("AtomicConfig.rabi_probe/rabi_coupling must be non-negative and finite");
  }
  if (transit_rate < 0.0 || !std::isfinite(transit_rate)) {
    throw ConfigError("AtomicConfig.transit_rate must be non-negative");
  }
  if (!std::isfinite(probe_phase_in)) {
    throw ConfigError("AtomicConfig.probe_phase_in must be finite");
  }
}

AtomicConfig cesium_profile() {
  AtomicConfig cfg;
  cfg.species_label = "Cs-133 42D5/2->43P3/2";
  cfg.probe_wavelength = 852e-9;
  cfg.decay_rate = kTwoPi * 5.2e6;
  cfg.rabi_probe = kTwoPi * 5.0e6;
  cfg.rabi_coupling = kTwoPi * 1.0e6;
  cfg.rabi_lo = kTwoPi * 2.0e6;
  cfg.dipole_12 = 3.8 * kAtomicDipole;
  cfg.dipole_34 = 1780.0 * kAtomicDipole;
  cfg.number_density = 2e15;
  cfg.cell_length = 0.02;
  cfg.probe_power_in = 50e-6;
  cfg.probe_phase_in = 0.0;
  cfg.reference_power = 1e-3;
  cfg.responsivity = 0.6;
  cfg.lna_gain = 4500.0;
  return cfg;
}

AtomicConfig rubidium_profile() {
  AtomicConfig cfg = cesium_profile();
  cfg.species_label = "Rb-85 59D5/2->60P3/2";
  cfg.probe_wavelength = 780e-9;
  cfg.decay_rate = kTwoPi * 6.07e6;
  cfg.rabi_probe = kTwoPi * 6.0e6;
  cfg.rabi_lo = kTwoPi * 3.0e6;
  cfg.dipole_12 = 3.6 * kAtomicDipole;
  cfg.dipole_34 = 1327.0 * kAtomicDipole;
  cfg.lna_gain = 6400.0;
  return cfg;
}

Eigen::Matrix4cd ladder_hamiltonian(const AtomicConfig& cfg, const DetuningTriple& det,
                                    double omega_rf) {
  Eigen::Matrix4cd h = Eigen::Matrix4cd::Zero();
  h(0, 1) = h(1, 0) = 0.5 * cfg.rabi_probe;
  h(1, 2) = h(2, 1) = 0.5 * cfg.rabi_coupling;
  h(2, 3) = h(3, 2) = 0.5 * omega_rf;
  h(1, 1) = det.probe;
  h(2, 2) = det.probe + det.coupling;
  h(3, 3) = det.probe + det.coupling + det.lo;
  return h;
}

Liouvillian lindblad_generator(const AtomicConfig& cfg, const DetuningTriple& det,
                               double omega_rf) {
  const double scale = cfg.decay_rate;
  const Eigen::Matrix4cd h = ladder_hamiltonian(cfg, det, omega_rf) / scale;
  const double transit = cfg.transit_rate / scale;
  const double loss[4] = {transit, 1.0 + transit, transit, transit};

  Liouvillian l = Liouvillian::Zero();
  const cdouble j{0.0, 1.0};
  for (int i = 0; i < 4; ++i) {
    for (int k = 0; k < 4; ++k) {
      const int row = 4 * i + k;
      // -j (H rho - rho H)
      for (int m = 0; m < 4; ++m) {
        l(row, 4 * m + k) += -j * h(i, m);
        l(row, 4 * i + m) += j * h(m, k);
      }
      // -1/2 {Gamma, rho}
      l(row, row) += -0.5 * (loss[i] + loss[k]);
    }
  }
  // Lambda: every decayed population is returned to |1>.
  for (int level = 0; level < 4; ++level) {
    l(0, 5 * level) += loss[level];
  }
  return l;
}

DensityMatrix steady_state(const AtomicConfig& cfg, const DetuningTriple& det, double omega_rf) {
  require_finite(det.probe, "probe detuning");
  require_finite(det.coupling, "coupling detuning");
  require_finite(det.lo, "LO detuning");
  require_finite(omega_rf, "omega_rf");
  if (omega_rf < 0.0) throw ConfigError("steady_state: omega_rf must be >= 0");
  if (!(cfg.decay_rate > 0.0)) throw ConfigError("AtomicConfig.decay_rate must be positive");

  const Liouvillian l = lindblad_generator(cfg, det, omega_rf);

  // The diagonal rows of L sum to zero, so the rho_11 row is replaced by
  // the trace condition.
  Liouvillian a = l;
  a.row(0).setZero();
  for (int level = 0; level < 4; ++level) a(0, 5 * level) = 1.0;
  Eigen::Matrix<cdouble, 16, 1> b = Eigen::Matrix<cdouble, 16, 1>::Zero();
  b(0) = 1.0;

  Eigen::FullPivLU<Liouvillian> lu(a);
  Eigen::Matrix<cdouble, 16, 1> x;
  const bool regular = lu.rank() == 16;
  if (regular) {
    x = lu.solve(b);
    x += lu.solve(b - a * x);  // one refinement sweep
  } else {
    // Degenerate stationary subspace: Abel limit eps (eps - L)^-1 rho_0
    // started from the ground state.
    constexpr double eps = 1e-9;
    Liouvillian shifted = eps * Liouvillian::Identity() - l;
    Eigen::Matrix<cdouble, 16, 1> ground = Eigen::Matrix<cdouble, 16, 1>::Zero();
    ground(0) = 1.0;
    Eigen::FullPivLU<Liouvillian> shifted_lu(shifted);
    if (shifted_lu.rank() < 16) {
      throw SingularSystemError("steady_state: stationarity system is singular");
    }
    x = eps * shifted_lu.solve(ground);
  }

  if (!x.allFinite()) throw SingularSystemError("steady_state: non-finite solution");

  DensityMatrix rho;
  for (int i = 0; i < 4; ++i)
    for (int k = 0; k < 4; ++k) rho(i, k) = x(4 * i + k);
  rho = 0.5 * (rho + rho.adjoint()).eval();
  rho /= rho.trace().real();

  Eigen::Matrix<cdouble, 16, 1> v;
  for (int i = 0; i < 4; ++i)
    for (int k = 0; k < 4; ++k) v(4 * i + k) = rho(i, k);
  const double residual = (l * v).norm() / (l.norm() * v.norm());
  if (!(residual <= (regular ? 1e-12 : 1e-8))) {
    std::ostringstream os;
    os << "steady_state: stationarity residual " << residual << " (ill-conditioned parameters)";
    throw SingularSystemError(os.str());
  }
  return rho;
}

cdouble susceptibility(const AtomicConfig& cfg, cdouble rho21) {
  if (cfg.rabi_probe == 0.0) {
    throw ConfigError("susceptibility: undefined for zero probe Rabi frequency");
  }
  const double prefactor = -2.0 * cfg.number_density * cfg.dipole_12 * cfg.dipole_12 /
                           (PC::vacuum_permittivity * PC::reduced_planck * cfg.rabi_probe);
  return prefactor * rho21;
}

double probe_output_power(const AtomicConfig& cfg, cdouble chi) {
  return cfg.probe_power_in *
         std::exp(-kTwoPi * cfg.cell_length / cfg.probe_wavelength * chi.imag());
}

double readout_voltage(const AtomicConfig& cfg, cdouble chi) {
  const double p_out = probe_output_power(cfg, chi);
  const double phase = cfg.probe_phase_in + kPi * cfg.cell_length / cfg.probe_wavelength * chi.real();
  const double mixing = 2.0 * std::sqrt(cfg.reference_power * p_out) * std::cos(phase);
  return std::sqrt(cfg.lna_gain) * cfg.responsivity * mixing;
}

double detector_voltage(const AtomicConfig& cfg, const DetuningTriple& det, double omega_rf) {
  const DensityMatrix rho = steady_state(cfg, det, omega_rf);
  return readout_voltage(cfg, susceptibility(cfg, rho(1, 0)));
}

TransducerCoefficients TransducerCoefficients::from_magnitudes(double abs_c1,
                                                               double abs_c3_over_c1,
                                                               double relative_phase) {
  if (!(abs_c1 >= 0.0) || !(abs_c3_over_c1 >= 0.0)) {
    throw ConfigError("from_magnitudes: magnitudes must be non-negative");
  }
  TransducerCoefficients c;
  c.c1 = abs_c1;
  c.c3 = std::polar(abs_c1 * abs_c3_over_c1, relative_phase);
  c.nonlinearity_ratio = abs_c3_over_c1;
  return c;
}

namespace {

// Richardson tableau for one derivative order. Successive rows halve h.
class RichardsonColumn {
 public:
  // Returns true once two diagonal entries agree within tolerance.
  bool push(double estimate, double noise_floor, double tol) {
    std::vector<double> row{estimate};
    for (std::size_t j = 1; j <= rows_.size(); ++j) {
      const double factor = std::pow(4.0, static_cast<double>(j)) - 1.0;
      row.push_back(row[j - 1] + (row[j - 1] - rows_.back()[j - 1]) / factor);
    }
    const bool have_previous = !rows_.empty();
    const double prev = have_previous ? rows_.back().back() : 0.0;
    rows_.push_back(std::move(row));
    if (!have_previous) return false;
    const double diff = std::abs(value() - prev);
    return diff <= tol * std::abs(value()) + noise_floor;
  }
  double value() const { return rows_.back().back(); }

 private:
  std::vector<std::vector<double>> rows_;
};

}  // namespace

TransducerCoefficients taylor_coefficients(const std::function<double(double)>& curve,
                                           double omega_lo, double dipole_34,
                                           const DerivativeOptions& opts) {
  if (!(omega_lo > 0.0)) throw ConfigError("taylor_coefficients: omega_lo must be > 0");
  double h = opts.initial_step_fraction * omega_lo;

  std::map<double, double> cache;
  auto f = [&](double offset) {
    auto it = cache.find(offset);
    if (it != cache.end()) return it->second;
    const double v = curve(omega_lo + offset);
    if (!std::isfinite(v)) throw NumericalError("taylor_coefficients: curve returned non-finite");
    cache.emplace(offset, v);
    return v;
  };

  const double f0 = f(0.0);
  RichardsonColumn d1, d2, d3;
  bool ok1 = false, ok2 = false, ok3 = false;
  constexpr double eps = std::numeric_limits<double>::epsilon();
  for (int level = 0; level < opts.max_levels; ++level, h *= 0.5) {
    const double fp1 = f(h), fm1 = f(-h), fp2 = f(2 * h), fm2 = f(-2 * h);
    const double scale = std::max({std::abs(f0), std::abs(fp1), std::abs(fm1), std::abs(fp2),
                                   std::abs(fm2)});
    const double noise = 64.0 * eps * scale;
    ok1 = d1.push((fp1 - fm1) / (2 * h), noise / h, opts.relative_tolerance);
    ok2 = d2.push((fp1 - 2 * f0 + fm1) / (h * h), noise / (h * h), opts.relative_tolerance);
    ok3 = d3.push((fp2 - 2 * fp1 + 2 * fm1 - fm2) / (2 * h * h * h), noise / (h * h * h),
                  opts.relative_tolerance);
    if (ok1 && ok2 && ok3) break;
  }
  if (!(ok1 && ok2 && ok3)) {
    throw ConvergenceError("taylor_coefficients: Richardson extrapolation did not converge");
  }

  TransducerCoefficients c;
  c.a0 = f0;
  c.a1 = d1.value();
  c.a2 = d2.value();
  c.a3 = d3.value();
  const double k = dipole_34 / PC::reduced_planck;
  c.c1 = c.a1 * k;
  c.c3 = c.a3 / 8.0 * k * k * k;
  c.nonlinearity_ratio = c.c1 == 0.0 ? std::numeric_limits<double>::infinity()
                                     : std::abs(c.c3) / std::abs(c.c1);
  return c;
}

TransducerCoefficients taylor_coefficients(const AtomicConfig& cfg, const DetuningTriple& det,
                                           const DerivativeOptions& opts) {
  cfg.validate();
  auto curve = [&](double omega) { return detector_voltage(cfg, det, omega); };
  TransducerCoefficients c = taylor_coefficients(curve, cfg.rabi_lo, cfg.dipole_34, opts);
  c.operating_point = det;
  return c;
}

double linearity_radius(const TransducerCoefficients& coeffs, double tolerance) {
  if (!(tolerance > 0.0)) throw ConfigError("linearity_radius: tolerance must be > 0");
  const double c3 = std::abs(coeffs.c3);
  if (c3 == 0.0) return std::numeric_limits<double>::infinity();
  return tolerance * std::abs(coeffs.c1) / c3;
}

cdouble fundamental_envelope(const TransducerCoefficients& coeffs, double input_magnitude,
                             double input_phase) {
  require_finite(input_magnitude, "input magnitude");
  require_finite(input_phase, "input phase");
  if (input_magnitude < 0.0) throw ConfigError("fundamental_envelope: magnitude < 0");
  const double w = input_magnitude;
  return (coeffs.a1 * w + coeffs.a3 * w * w * w / 8.0) * std::exp(cdouble{0.0, input_phase});
}

}  // namespace raqr
