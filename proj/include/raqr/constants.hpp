#pragma once

#include <cmath>
#include <numbers>

namespace raqr {

// CODATA 2018 exact / recommended values.
struct PhysicalConstants {
  static constexpr double reduced_planck = 1.054571817e-34;      // J s
  static constexpr double vacuum_permittivity = 8.8541878128e-12;  // F/m
  static constexpr double light_speed = 299792458.0;             // m/s
  static constexpr double boltzmann = 1.380649e-23;              // J/K
  static constexpr double elementary_charge = 1.602176634e-19;   // C
  static constexpr double bohr_radius = 5.29177210903e-11;       // m
};

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// e * a0, the atomic unit of dipole moment.
inline constexpr double kAtomicDipole =
    PhysicalConstants::elementary_charge * PhysicalConstants::bohr_radius;

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }

}  // namespace raqr
