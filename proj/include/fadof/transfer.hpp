#pragma once

#include <algorithm>
#include <cmath>
#include <array>
#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

#include "fadof/errors.hpp"
#include "fadof/parallel.hpp"
#include "fadof/physics.hpp"
#include "fadof/units.hpp"

namespace fadof {

// Detuning grid relative to line b, in GHz.
struct GridSpec {
    double min_ghz = -60.0;
    double max_ghz = 60.0;
    std::size_t points = 8192;

    static GridSpec centered(double half_span_ghz, std::size_t points) {
        return GridSpec{-half_span_ghz, half_span_ghz, points};
    }

    double at(std::size_t i) const {
        if (i + 1 == points) return max_ghz;
        return min_ghz + (max_ghz - min_ghz) * static_cast<double>(i) / static_cast<double>(points - 1);
    }
};

inline void validate(const GridSpec& grid) {
    if (grid.points < 2) fail(ErrorKind::Domain, "grid needs at least 2 points");
    if (!std::isfinite(grid.min_ghz) || !std::isfinite(grid.max_ghz) || !(grid.max_ghz > grid.min_ghz)) {
        fail(ErrorKind::Domain, "grid range must be finite and increasing");
    }
}

struct SpectrumPoint {
    double detuning_ghz = 0.0;
    double transmission = 0.0;
    double rotation_rad = 0.0;
    double depth_h = 0.0;
    double depth_v = 0.0;
    double n_h = 1.0;
    double n_v = 1.0;
};

struct Spectrum {
    std::vector<SpectrumPoint> points;
    FilterConfig config;
};

// Dopant contribution to the wavenumber for both polarizations,
// kappa = k0 * chi / 2. The host's base phases k0 L cancel in the
// birefringence-compensated cell, so only this part reaches the analyzer.
struct DopantWavenumbers {
    Complex h;
    Complex v;
};

inline DopantWavenumbers dopant_wavenumbers(const TransitionSet& lines, double center_detuning_rad_s) {
    return DopantWavenumbers{-0.5 * lorentzian_sum(lines, Polarization::H, center_detuning_rad_s),
                             -0.5 * lorentzian_sum(lines, Polarization::V, center_detuning_rad_s)};
}

// Faraday rotation angle, unwrapped.
inline double rotation_angle(Complex k_h, Complex k_v, double length_m) {
    if (!(length_m > 0.0)) fail(ErrorKind::Domain, "length must be positive");
    return 0.5 * length_m * (k_h - k_v).real();
}

// Field between crossed polarizers: (1/2)[exp(i kH L) - exp(i kV L)].
inline double transmission_from(const DopantWavenumbers& k, double length_m) {
    const Complex i{0.0, 1.0};
    const Complex out = std::exp(i * k.h * length_m) - std::exp(i * k.v * length_m);
    return std::clamp(0.25 * std::norm(out), 0.0, 1.0);
}

// Expanded intensity form in terms of the two depths and the rotation.
inline double transmission_closed_form(double depth_h, double depth_v, double rotation_rad) {
    return 0.25 * std::exp(-depth_h) + 0.25 * std::exp(-depth_v) -
           0.5 * std::cos(2.0 * rotation_rad) * std::exp(-0.5 * (depth_h + depth_v));
}

inline double transmission(const FilterConfig& config, double omega_rad_s) {
    validate(config);
    const TransitionSet lines = zeeman_transitions(config.zeeman, config.strengths);
    const DopantWavenumbers k = dopant_wavenumbers(lines, omega_rad_s - config.zeeman.center_rad_s);
    return transmission_from(k, config.host.length_m);
}

struct JonesOptions {
    bool compensator = true;
};

namespace detail {

using LongComplex = std::complex<long double>;

inline long double sellmeier_index_ld(const SellmeierSet& set, long double wavelength_um) {
    const long double l2 = wavelength_um * wavelength_um;
    return std::sqrt(static_cast<long double>(set.a) + static_cast<long double>(set.b_um2) / (l2 - set.c_um2) -
                     static_cast<long double>(set.d_per_um2) * l2);
}

}  // namespace detail

// Brute-force Jones propagation through polarizer, doped crystal, 90-degree
// rotated undoped crystal and crossed analyzer, using full wavenumbers.
// Evaluated in extended precision from the raw config so that it shares no
// code path with transmission() beyond validation.
inline double jones_oracle(const FilterConfig& config, double omega_rad_s, JonesOptions options = {}) {
    using detail::LongComplex;
    validate(config);
    const long double omega = omega_rad_s;
    const long double length = config.host.length_m;
    const long double c = units::speed_of_light;
    const long double lambda_um = 2.0L * std::numbers::pi_v<long double> * c / omega * 1e6L;
    if (!config.host.ordinary.in_range(static_cast<double>(lambda_um)) ||
        !config.host.extraordinary.in_range(static_cast<double>(lambda_um))) {
        fail(ErrorKind::Domain, "probe wavelength outside Sellmeier validity");
    }
    const long double k0_h = detail::sellmeier_index_ld(config.host.extraordinary, lambda_um) * omega / c;
    const long double k0_v = detail::sellmeier_index_ld(config.host.ordinary, lambda_um) * omega / c;

    const long double dg = static_cast<long double>(config.zeeman.ground_split_rad_s_per_t) * config.zeeman.field_t;
    const long double de = static_cast<long double>(config.zeeman.excited_split_rad_s_per_t) * config.zeeman.field_t;
    const std::array<long double, 4> offsets{-(dg + de) / 2, -(dg - de) / 2, (dg - de) / 2, (dg + de) / 2};

    LongComplex chi_h{0.0L, 0.0L};
    LongComplex chi_v{0.0L, 0.0L};
    for (LineLabel label : all_labels) {
        const LineStrength& s = config.strengths[label];
        const long double omega_q = static_cast<long double>(config.zeeman.center_rad_s) + offsets[static_cast<std::size_t>(label)];
        const long double width = s.hwhm_rad_s;
        const long double k0 = polarization_of(label) == Polarization::H ? k0_h : k0_v;
        const LongComplex term = -static_cast<long double>(s.alpha_per_m) * width / (k0 * LongComplex{omega - omega_q, width});
        (polarization_of(label) == Polarization::H ? chi_h : chi_v) += term;
    }
    const LongComplex k_h = k0_h * (1.0L + 0.5L * chi_h);
    const LongComplex k_v = k0_v * (1.0L + 0.5L * chi_v);

    const LongComplex i{0.0L, 1.0L};
    const long double s = 1.0L / std::sqrt(2.0L);
    std::array<LongComplex, 2> field{LongComplex{s}, LongComplex{s}};
    field[0] *= std::exp(i * k_h * length);
    field[1] *= std::exp(i * k_v * length);
    if (options.compensator) {
        // The undoped crystal's c axis is along V, so H sees the ordinary index.
        field[0] *= std::exp(i * k0_v * length);
        field[1] *= std::exp(i * k0_h * length);
    }
    const LongComplex projected = s * (field[0] - field[1]);
    return static_cast<double>(std::norm(projected));
}

inline SpectrumPoint evaluate_point(const FilterConfig& config, const TransitionSet& lines, double detuning_ghz) {
    const double center_detuning = units::ghz_to_rad_per_s(detuning_ghz) + lines[1].center_offset_rad_s;
    const double omega = config.zeeman.center_rad_s + center_detuning;
    const double length = config.host.length_m;
    const DopantWavenumbers k = dopant_wavenumbers(lines, center_detuning);

    SpectrumPoint p;
    p.detuning_ghz = detuning_ghz;
    p.transmission = transmission_from(k, length);
    p.rotation_rad = rotation_angle(k.h, k.v, length);
    p.depth_h = 2.0 * k.h.imag() * length;
    p.depth_v = 2.0 * k.v.imag() * length;
    const double k_vac = vacuum_wavenumber(omega);
    const double n0_h = host_index(config.host, Polarization::H, omega);
    const double n0_v = host_index(config.host, Polarization::V, omega);
    p.n_h = n0_h + k.h.real() / k_vac;
    p.n_v = n0_v + k.v.real() / k_vac;
    return p;
}

inline Spectrum spectrum(const FilterConfig& config, const GridSpec& grid, unsigned workers = 1) {
    validate(config);
    validate(grid);
    const TransitionSet lines = zeeman_transitions(config.zeeman, config.strengths);
    Spectrum out;
    out.config = config;
    out.points.resize(grid.points);
    parallel_for(grid.points, workers,
                 [&](std::size_t i) { out.points[i] = evaluate_point(config, lines, grid.at(i)); });
    return out;
}

}  // namespace fadof
