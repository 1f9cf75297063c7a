#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <sstream>
#include <string>

#include "fadof/errors.hpp"
#include "fadof/sellmeier.hpp"
#include "fadof/units.hpp"

namespace fadof {

using Complex = std::complex<double>;

enum class Polarization { H, V };
enum class LineLabel { a = 0, b = 1, c = 2, d = 3 };

inline constexpr std::array<LineLabel, 4> all_labels{LineLabel::a, LineLabel::b, LineLabel::c, LineLabel::d};

inline char to_char(LineLabel label) { return static_cast<char>('a' + static_cast<int>(label)); }
inline char to_char(Polarization pol) { return pol == Polarization::H ? 'H' : 'V'; }

// Selection rules: b, c couple to light along the c axis (H); a, d to V.
constexpr Polarization polarization_of(LineLabel label) {
    return (label == LineLabel::b || label == LineLabel::c) ? Polarization::H : Polarization::V;
}

struct HostCrystal {
    SellmeierSet ordinary = yvo4::ordinary;
    SellmeierSet extraordinary = yvo4::extraordinary;
    double length_m = 0.0;  // doped crystal; the compensator has the same length
};

// Splitting coefficients are stored as angular frequency per tesla so that
// the level splitting is a single multiplication by the field.
struct ZeemanConfig {
    double center_rad_s = 0.0;
    double ground_split_rad_s_per_t = 0.0;
    double excited_split_rad_s_per_t = 0.0;
    double field_t = 0.0;

    double ground_splitting() const { return ground_split_rad_s_per_t * field_t; }
    double excited_splitting() const { return excited_split_rad_s_per_t * field_t; }
};

struct LineStrength {
    double alpha_per_m = 0.0;  // on-resonance absorption coefficient
    double hwhm_rad_s = 0.0;   // half width at half maximum
};

// Indexed by LineLabel.
struct LineStrengths {
    std::array<LineStrength, 4> lines{};

    LineStrength& operator[](LineLabel label) { return lines[static_cast<std::size_t>(label)]; }
    const LineStrength& operator[](LineLabel label) const { return lines[static_cast<std::size_t>(label)]; }
};

struct TransitionLine {
    LineLabel label = LineLabel::a;
    Polarization polarization = Polarization::V;
    double center_offset_rad_s = 0.0;  // omega_q - omega_0, exact in the field
    double frequency_rad_s = 0.0;      // omega_q
    double alpha_per_m = 0.0;
    double hwhm_rad_s = 0.0;
};

using TransitionSet = std::array<TransitionLine, 4>;

struct FilterConfig {
    HostCrystal host;
    ZeemanConfig zeeman;
    LineStrengths strengths;

    double center_wavelength_um() const { return units::rad_per_s_to_um(zeeman.center_rad_s); }
};

inline void validate(const ZeemanConfig& z) {
    if (!(z.center_rad_s > 0.0) || !std::isfinite(z.center_rad_s)) fail(ErrorKind::Domain, "transition frequency must be positive");
    if (!(z.field_t >= 0.0) || !std::isfinite(z.field_t)) fail(ErrorKind::Domain, "magnetic field must be >= 0");
    if (!(z.ground_split_rad_s_per_t >= 0.0) || !(z.excited_split_rad_s_per_t >= 0.0)) {
        fail(ErrorKind::Domain, "Zeeman splitting coefficients must be >= 0");
    }
}

inline void validate(const LineStrengths& s) {
    for (LineLabel label : all_labels) {
        const LineStrength& line = s[label];
        if (!(line.alpha_per_m >= 0.0) || !std::isfinite(line.alpha_per_m)) {
            fail(ErrorKind::Domain, std::string("line ") + to_char(label) + ": absorption coefficient must be >= 0");
        }
        if (!(line.hwhm_rad_s > 0.0) || !std::isfinite(line.hwhm_rad_s)) {
            fail(ErrorKind::Domain, std::string("line ") + to_char(label) + ": linewidth must be > 0");
        }
    }
}

inline void validate(const FilterConfig& config) {
    if (!(config.host.length_m > 0.0) || !std::isfinite(config.host.length_m)) {
        fail(ErrorKind::Domain, "crystal length must be > 0");
    }
    validate(config.host.ordinary);
    validate(config.host.extraordinary);
    validate(config.zeeman);
    validate(config.strengths);
    const double lambda = config.center_wavelength_um();
    if (!config.host.ordinary.in_range(lambda) || !config.host.extraordinary.in_range(lambda)) {
        std::ostringstream msg;
        msg << "transition wavelength " << lambda << " um outside Sellmeier validity";
        fail(ErrorKind::Domain, msg.str());
    }
}

// Four Zeeman components of one Kramers-doublet pair. Labels a..d sit at
// -(Dg+De)/2, -(Dg-De)/2, +(Dg-De)/2, +(Dg+De)/2 from the zero-field line:
// b, c (H) form the inner doublet and a, d (V) the outer one.
inline TransitionSet zeeman_transitions(const ZeemanConfig& z, const LineStrengths& s) {
    validate(z);
    validate(s);
    const double dg = z.ground_splitting();
    const double de = z.excited_splitting();
    const std::array<double, 4> offsets{-(dg + de) / 2.0, -(dg - de) / 2.0, (dg - de) / 2.0, (dg + de) / 2.0};

    TransitionSet set{};
    for (LineLabel label : all_labels) {
        const auto i = static_cast<std::size_t>(label);
        set[i] = TransitionLine{label,
                                polarization_of(label),
                                offsets[i],
                                z.center_rad_s + offsets[i],
                                s[label].alpha_per_m,
                                s[label].hwhm_rad_s};
    }
    return set;
}

// Sum over lines of the given polarization of alpha*delta / ((x - x_q) + i*delta),
// with x the detuning from the zero-field line. Units of m^-1.
inline Complex lorentzian_sum(const TransitionSet& lines, Polarization pol, double center_detuning_rad_s) {
    Complex sum{0.0, 0.0};
    for (const TransitionLine& line : lines) {
        if (line.polarization != pol) continue;
        const Complex denom{center_detuning_rad_s - line.center_offset_rad_s, line.hwhm_rad_s};
        sum += line.alpha_per_m * line.hwhm_rad_s / denom;
    }
    return sum;
}

// Complex susceptibility of the doped medium for one polarization:
//   chi(w) = -sum_q alpha_q delta_q / (k0 [(w - w_q) + i delta_q]).
inline Complex susceptibility(const TransitionSet& lines, Polarization pol, double omega_rad_s, double k0_per_m) {
    if (!(k0_per_m > 0.0)) fail(ErrorKind::Domain, "k0 must be positive");
    if (!(omega_rad_s > 0.0)) fail(ErrorKind::Domain, "frequency must be positive");
    Complex sum{0.0, 0.0};
    for (const TransitionLine& line : lines) {
        if (line.polarization != pol) continue;
        const Complex denom{omega_rad_s - line.frequency_rad_s, line.hwhm_rad_s};
        sum += line.alpha_per_m * line.hwhm_rad_s / denom;
    }
    return -sum / k0_per_m;
}

inline double vacuum_wavenumber(double omega_rad_s) { return omega_rad_s / units::speed_of_light; }

// Background index seen by each polarization. H is along the optic (c) axis.
inline double host_index(const HostCrystal& host, Polarization pol, double omega_rad_s) {
    const double lambda_um = units::rad_per_s_to_um(omega_rad_s);
    return sellmeier_index(pol == Polarization::H ? host.extraordinary : host.ordinary, lambda_um);
}

inline double host_wavenumber(const HostCrystal& host, Polarization pol, double omega_rad_s) {
    return host_index(host, pol, omega_rad_s) * vacuum_wavenumber(omega_rad_s);
}

// Small-chi dispersion relation k = k0 (1 + chi/2).
inline Complex wavenumber(double omega_rad_s, double n0, Complex chi) {
    const double k0 = n0 * vacuum_wavenumber(omega_rad_s);
    return k0 * (1.0 + 0.5 * chi);
}

// Exact relation k = k0 sqrt(1 + chi); used to probe the validity of the
// small-chi form.
inline Complex wavenumber_exact(double omega_rad_s, double n0, Complex chi) {
    const double k0 = n0 * vacuum_wavenumber(omega_rad_s);
    return k0 * std::sqrt(1.0 + chi);
}

inline double absorption_depth(Complex k, double length_m) {
    if (!(length_m > 0.0)) fail(ErrorKind::Domain, "length must be positive");
    return 2.0 * k.imag() * length_m;
}

}  // namespace fadof
