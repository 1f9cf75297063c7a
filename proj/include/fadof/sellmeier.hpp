#pragma once

#include <cmath>
#include <sstream>

#include "fadof/errors.hpp"

namespace fadof {

// One principal index of a uniaxial host:
//   n^2 = A + B / (lambda^2 - C) - D * lambda^2,   lambda in um.
struct SellmeierSet {
    double a = 1.0;
    double b_um2 = 0.0;
    double c_um2 = 0.0;
    double d_per_um2 = 0.0;
    double valid_min_um = 0.0;
    double valid_max_um = 0.0;

    bool in_range(double wavelength_um) const {
        return wavelength_um >= valid_min_um && wavelength_um <= valid_max_um;
    }
};

inline void validate(const SellmeierSet& set) {
    if (!(set.valid_min_um > 0.0) || !(set.valid_max_um > set.valid_min_um)) {
        fail(ErrorKind::InvalidCoefficients, "Sellmeier valid range must be a nonempty interval of positive wavelengths");
    }
}

inline double sellmeier_index(const SellmeierSet& set, double wavelength_um) {
    if (!std::isfinite(wavelength_um) || !set.in_range(wavelength_um)) {
        std::ostringstream msg;
        msg << "wavelength " << wavelength_um << " um outside Sellmeier range [" << set.valid_min_um << ", "
            << set.valid_max_um << "]";
        fail(ErrorKind::Domain, msg.str());
    }
    const double l2 = wavelength_um * wavelength_um;
    const double pole = l2 - set.c_um2;
    if (pole == 0.0) {
        fail(ErrorKind::InvalidCoefficients, "Sellmeier pole at requested wavelength");
    }
    const double n2 = set.a + set.b_um2 / pole - set.d_per_um2 * l2;
    if (!(n2 > 1.0) || !std::isfinite(n2)) {
        std::ostringstream msg;
        msg << "Sellmeier n^2 = " << n2 << " at " << wavelength_um << " um; expected n^2 > 1";
        fail(ErrorKind::InvalidCoefficients, msg.str());
    }
    return std::sqrt(n2);
}

namespace yvo4 {

// Undoped YVO4 at room temperature, lambda in um.
inline constexpr SellmeierSet ordinary{3.77834, 0.069736, 0.04724, 0.0108133, 0.4, 5.0};
inline constexpr SellmeierSet extraordinary{4.59905, 0.110534, 0.04813, 0.0122676, 0.4, 5.0};

}  // namespace yvo4

}  // namespace fadof
