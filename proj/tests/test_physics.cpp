#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fadof/physics.hpp"
#include "fadof/sellmeier.hpp"
#include "test_support.hpp"

using namespace fadof;

namespace {

double ghz(double w) { return units::rad_per_s_to_ghz(w); }

TransitionSet single_line(LineLabel label, double alpha_per_m, double hwhm_rad_s, double center) {
    ZeemanConfig z;
    z.center_rad_s = center;
    LineStrengths s;
    for (LineLabel l : all_labels) s[l] = {0.0, hwhm_rad_s};
    s[label] = {alpha_per_m, hwhm_rad_s};
    return zeeman_transitions(z, s);
}

}  // namespace

TEST(Sellmeier, ConstantSetGivesSqrtA) {
    const SellmeierSet set{4.0, 0.0, 0.0, 0.0, 0.3, 3.0};
    EXPECT_DOUBLE_EQ(sellmeier_index(set, 0.5), 2.0);
    EXPECT_DOUBLE_EQ(sellmeier_index(set, 2.9), 2.0);
}

TEST(Sellmeier, Yvo4AtTransitionWavelength) {
    // Closed form evaluated at 40 significant digits (mpmath), rounded.
    EXPECT_NEAR(sellmeier_index(yvo4::ordinary, 0.8797), 1.9662002512406074, 1e-15);
    EXPECT_NEAR(sellmeier_index(yvo4::extraordinary, 0.8797), 2.1775815120030701, 1e-15);
}

TEST(Sellmeier, NormalDispersion) {
    for (const SellmeierSet& set : {yvo4::ordinary, yvo4::extraordinary}) {
        EXPECT_GT(sellmeier_index(set, 0.6), sellmeier_index(set, 1.0));
    }
}

TEST(Sellmeier, IndexSquaredAboveOneOverValidRange) {
    for (const SellmeierSet& set : {yvo4::ordinary, yvo4::extraordinary}) {
        for (double l = set.valid_min_um; l <= set.valid_max_um; l += 0.01) EXPECT_GT(sellmeier_index(set, l), 1.0);
    }
}

TEST(Sellmeier, Errors) {
    try {
        sellmeier_index(yvo4::ordinary, 6.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Domain);
    }
    const SellmeierSet bad{0.5, 0.0, 0.0, 0.0, 0.3, 3.0};
    try {
        sellmeier_index(bad, 1.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::InvalidCoefficients);
    }
    const SellmeierSet pole{4.0, 1.0, 1.0, 0.0, 0.3, 3.0};
    EXPECT_THROW(sellmeier_index(pole, 1.0), Error);
}

TEST(Zeeman, ZeroFieldIsDegenerate) {
    ZeemanConfig z{units::nm_to_rad_per_s(879.7), units::ghz_to_rad_per_s(10.0), units::ghz_to_rad_per_s(4.0), 0.0};
    LineStrengths s;
    for (LineLabel l : all_labels) s[l] = {100.0, 1e9};
    const TransitionSet t = zeeman_transitions(z, s);
    for (const TransitionLine& line : t) EXPECT_EQ(line.frequency_rad_s, z.center_rad_s);
    EXPECT_EQ(t[0].polarization, Polarization::V);
    EXPECT_EQ(t[1].polarization, Polarization::H);
    EXPECT_EQ(t[2].polarization, Polarization::H);
    EXPECT_EQ(t[3].polarization, Polarization::V);
}

TEST(Zeeman, WorkedExample) {
    // 10 and 4 GHz/T at 0.5 T: splittings 5 and 2 GHz.
    ZeemanConfig z{units::nm_to_rad_per_s(879.7), units::ghz_to_rad_per_s(10.0), units::ghz_to_rad_per_s(4.0), 0.5};
    LineStrengths s;
    for (LineLabel l : all_labels) s[l] = {100.0, 1e9};
    const TransitionSet t = zeeman_transitions(z, s);
    const double expected[] = {-3.5, -1.5, 1.5, 3.5};
    for (int i = 0; i < 4; ++i) EXPECT_NEAR(ghz(t[i].center_offset_rad_s), expected[i], 1e-12);
}

TEST(Zeeman, LinearInFieldToTheBit) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    LineStrengths s;
    for (LineLabel l : all_labels) s[l] = {1.0, 1e9};
    for (int trial = 0; trial < 1000; ++trial) {
        ZeemanConfig z{units::nm_to_rad_per_s(879.7), units::ghz_to_rad_per_s(50 * u(rng)),
                       units::ghz_to_rad_per_s(50 * u(rng)), 2.0 * u(rng)};
        ZeemanConfig z2 = z;
        z2.field_t = 2.0 * z.field_t;
        const TransitionSet a = zeeman_transitions(z, s);
        const TransitionSet b = zeeman_transitions(z2, s);
        for (int i = 0; i < 4; ++i) EXPECT_EQ(b[i].center_offset_rad_s, 2.0 * a[i].center_offset_rad_s);
    }
}

TEST(Zeeman, RejectsInvalidInput) {
    ZeemanConfig z{units::nm_to_rad_per_s(879.7), 1.0, 1.0, -0.1};
    LineStrengths s;
    for (LineLabel l : all_labels) s[l] = {1.0, 1e9};
    EXPECT_THROW(zeeman_transitions(z, s), Error);
    z.field_t = 0.1;
    s[LineLabel::c].hwhm_rad_s = 0.0;
    EXPECT_THROW(zeeman_transitions(z, s), Error);
}

TEST(Susceptibility, PurelyImaginaryAtResonance) {
    const double center = units::nm_to_rad_per_s(879.7);
    const double k0 = 2.1 * vacuum_wavenumber(center);
    const double alpha = 1234.5;
    const TransitionSet t = single_line(LineLabel::b, alpha, 2e9, center);
    const Complex chi = susceptibility(t, Polarization::H, t[1].frequency_rad_s, k0);
    EXPECT_EQ(chi.real(), 0.0);
    EXPECT_NEAR(chi.imag(), alpha / k0, 1e-12 * alpha / k0);
    // The line is invisible to the other polarization.
    EXPECT_EQ(susceptibility(t, Polarization::V, t[1].frequency_rad_s, k0), Complex(0.0, 0.0));
}

TEST(Susceptibility, VanishingTail) {
    const double center = units::nm_to_rad_per_s(879.7);
    const double k0 = 2.0 * vacuum_wavenumber(center);
    const double width = 1e6;
    const TransitionSet t = single_line(LineLabel::a, 500.0, width, center);
    const Complex chi = susceptibility(t, Polarization::V, center + 1e6 * width, k0);
    EXPECT_LE(std::abs(chi), 1.0000001 * 500.0 * width / (k0 * 1e6 * width));
}

TEST(Susceptibility, SymmetricPairCancelsDispersion) {
    ZeemanConfig z{units::nm_to_rad_per_s(879.7), units::ghz_to_rad_per_s(6.0), units::ghz_to_rad_per_s(2.0), 0.5};
    LineStrengths s;
    for (LineLabel l : all_labels) s[l] = {300.0, units::ghz_to_rad_per_s(0.4)};
    const TransitionSet t = zeeman_transitions(z, s);
    const double k0 = 2.0 * vacuum_wavenumber(z.center_rad_s);
    const Complex pair = susceptibility(t, Polarization::H, z.center_rad_s, k0);
    EXPECT_NEAR(pair.real(), 0.0, 1e-15 * std::abs(pair));

    // Single-line imaginary part at the same offset.
    const double x = t[2].center_offset_rad_s;
    const double width = s[LineLabel::b].hwhm_rad_s;
    const double single = 300.0 * width * width / (k0 * (x * x + width * width));
    // Absolute frequencies near 2e15 rad/s limit this to ~1e-11 relative.
    EXPECT_NEAR(pair.imag(), 2.0 * single, 1e-9 * single);
}

TEST(Susceptibility, DispersionSignAroundResonance) {
    const double center = units::nm_to_rad_per_s(879.7);
    const double k0 = 2.0 * vacuum_wavenumber(center);
    const double width = 1e9;
    const TransitionSet t = single_line(LineLabel::c, 800.0, width, center);
    for (double offset : {0.1, 1.0, 10.0, 1e3}) {
        EXPECT_LT(susceptibility(t, Polarization::H, center + offset * width, k0).real(), 0.0);
        EXPECT_GT(susceptibility(t, Polarization::H, center - offset * width, k0).real(), 0.0);
    }
}

TEST(Susceptibility, PassivityProperty) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 1000; ++trial) {
        const FilterConfig c = fixtures::random_config(rng);
        const TransitionSet t = zeeman_transitions(c.zeeman, c.strengths);
        for (int j = 0; j < 100; ++j) {
            const double w = fixtures::random_probe(c, rng);
            for (Polarization p : {Polarization::H, Polarization::V}) {
                const double k0 = host_wavenumber(c.host, p, w);
                const Complex chi = susceptibility(t, p, w, k0);
                ASSERT_GE(chi.imag(), 0.0);
                ASSERT_GE(absorption_depth(wavenumber(w, host_index(c.host, p, w), chi), c.host.length_m), 0.0);
            }
        }
    }
}

TEST(Susceptibility, PolarizationPartition) {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 200; ++trial) {
        const FilterConfig c = fixtures::random_config(rng);
        const TransitionSet t = zeeman_transitions(c.zeeman, c.strengths);
        const double w = fixtures::random_probe(c, rng);
        const double k0 = 2.0 * vacuum_wavenumber(w);
        Complex all{0.0, 0.0};
        for (const TransitionLine& line : t) {
            all -= line.alpha_per_m * line.hwhm_rad_s / (k0 * Complex(w - line.frequency_rad_s, line.hwhm_rad_s));
        }
        const Complex parts = susceptibility(t, Polarization::H, w, k0) + susceptibility(t, Polarization::V, w, k0);
        EXPECT_NEAR(std::abs(parts - all), 0.0, 1e-13 * std::abs(all) + 1e-300);
    }
}

TEST(Wavenumber, NoDopantsGivesHostWavenumber) {
    const double w = units::nm_to_rad_per_s(879.7);
    const Complex k = wavenumber(w, 2.0, Complex{0.0, 0.0});
    EXPECT_EQ(k, Complex(2.0 * w / units::speed_of_light, 0.0));
}

TEST(Wavenumber, ResonantDepthIsAlphaL) {
    const double w = units::nm_to_rad_per_s(879.7);
    const double n0 = 2.0;
    const double k0 = n0 * vacuum_wavenumber(w);
    const double alpha = 1000.0;  // 10 cm^-1
    const Complex k = wavenumber(w, n0, Complex{0.0, alpha / k0});
    EXPECT_NEAR(k.imag(), alpha / 2.0, 1e-12 * alpha);
    EXPECT_NEAR(absorption_depth(k, 0.9e-3), 0.9, 1e-12);
}

TEST(Wavenumber, AgreesWithExactRelationForSmallChi) {
    const double w = units::nm_to_rad_per_s(879.7);
    for (double phase = 0.0; phase < 3.2; phase += 0.1) {
        const Complex chi = std::polar(1e-3, phase);
        const Complex approx = wavenumber(w, 2.0, chi);
        const Complex exact = 2.0 * vacuum_wavenumber(w) * std::sqrt(1.0 + chi);
        EXPECT_LE(std::abs(approx - exact) / std::abs(exact), std::norm(chi) / 4.0);
    }
}

TEST(AbsorptionDepth, ZeroForRealWavenumber) {
    EXPECT_EQ(absorption_depth(Complex{1e7, 0.0}, 1e-3), 0.0);
    EXPECT_THROW(absorption_depth(Complex{1e7, 1.0}, 0.0), Error);
}

TEST(AbsorptionDepth, ResonanceIdentityForSingleLines) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 500; ++trial) {
        const double center = units::nm_to_rad_per_s(700.0 + 600.0 * u(rng));
        const double alpha = 10.0 + 5000.0 * u(rng);
        const double length = 1e-4 + 1e-2 * u(rng);
        const LineLabel label = all_labels[trial % 4];
        const TransitionSet t = single_line(label, alpha, units::ghz_to_rad_per_s(0.05 + 2 * u(rng)), center);
        const Polarization pol = polarization_of(label);
        const double w = t[static_cast<std::size_t>(label)].frequency_rad_s;
        const double n0 = host_index(HostCrystal{}, pol, w);
        const Complex k = wavenumber(w, n0, susceptibility(t, pol, w, n0 * vacuum_wavenumber(w)));
        EXPECT_NEAR(absorption_depth(k, length), alpha * length, 1e-9 * alpha * length);
    }
}
