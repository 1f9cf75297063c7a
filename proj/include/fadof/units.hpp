#pragma once

#include <numbers>

// Conversions between the human units used in config files and the SI units
// used everywhere inside the library (rad/s, m, T). Each quantity is
// converted exactly once, at ingest.
namespace fadof::units {

inline constexpr double speed_of_light = 299'792'458.0;  // m/s, exact
inline constexpr double two_pi = 2.0 * std::numbers::pi;

constexpr double ghz_to_rad_per_s(double ghz) { return two_pi * ghz * 1e9; }
constexpr double rad_per_s_to_ghz(double w) { return w / (two_pi * 1e9); }

constexpr double mm_to_m(double mm) { return mm * 1e-3; }
constexpr double m_to_mm(double m) { return m * 1e3; }

constexpr double per_cm_to_per_m(double a) { return a * 100.0; }
constexpr double per_m_to_per_cm(double a) { return a / 100.0; }

// Vacuum wavelength (nm) <-> angular frequency (rad/s).
constexpr double nm_to_rad_per_s(double nm) { return two_pi * speed_of_light / (nm * 1e-9); }
constexpr double rad_per_s_to_um(double w) { return two_pi * speed_of_light / w * 1e6; }

// Config files give the full width; the model stores the half width.
constexpr double fwhm_ghz_to_hwhm_rad_per_s(double fwhm) { return ghz_to_rad_per_s(0.5 * fwhm); }
constexpr double hwhm_rad_per_s_to_fwhm_ghz(double hwhm) { return 2.0 * rad_per_s_to_ghz(hwhm); }

}  // namespace fadof::units
