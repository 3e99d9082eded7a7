#pragma once

// CODATA 2018 / SI-2019 exact values.
namespace gwsql::constants {

inline constexpr double hbar = 1.054571817e-34;  // reduced Planck constant [J s]
inline constexpr double c    = 299792458.0;      // speed of light [m/s]
inline constexpr double k_B  = 1.380649e-23;     // Boltzmann constant [J/K]

}  // namespace gwsql::constants
