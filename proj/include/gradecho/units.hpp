// Physical constants and unit conversions. Everything inside the library is
// SI base units; human units (V/cm, kHz, G, um, ...) are converted at the
// edges (file loaders, CLI flags).

#pragma once

#include <numbers>

namespace gradecho::units {

inline constexpr double pi = std::numbers::pi;
inline constexpr double speed_of_light = 299792458.0;        // m/s
inline constexpr double mu0 = 4.0e-7 * pi;                   // T m/A

// Stark coefficients are conventionally quoted in kHz per (V/cm).
inline constexpr double khz_per_v_cm_to_si(double v) { return v * 1e3 / 1e2; }
// Zeeman coefficients in MHz per gauss.
inline constexpr double mhz_per_gauss_to_si(double v) { return v * 1e6 / 1e-4; }

inline constexpr double nm = 1e-9;
inline constexpr double um = 1e-6;
inline constexpr double mm = 1e-3;
inline constexpr double us = 1e-6;
inline constexpr double ns = 1e-9;
inline constexpr double khz = 1e3;
inline constexpr double mhz = 1e6;
inline constexpr double ghz = 1e9;
inline constexpr double gauss = 1e-4;
inline constexpr double v_per_cm = 1e2;

} // namespace gradecho::units
