#pragma once

namespace pondera::phys {

// CODATA 2018
inline constexpr double c_light = 299792458.0;        // m/s
inline constexpr double hbar = 1.054571817e-34;       // J s
inline constexpr double k_boltzmann = 1.380649e-23;   // J/K
inline constexpr double pi = 3.14159265358979323846;

// All internal frequencies are angular (rad/s). File and CLI boundaries
// speak Hz; conversions happen there and nowhere else.
inline constexpr double hz_to_rad(double f_hz) { return 2.0 * pi * f_hz; }
inline constexpr double rad_to_hz(double w) { return w / (2.0 * pi); }

} // namespace pondera::phys
