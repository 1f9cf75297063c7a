#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "fadof/transfer.hpp"
#include "test_support.hpp"

using namespace fadof;

namespace {

// 5 cm^-1, 1 GHz FWHM, 10 and 4 GHz/T at 0.5 T, 2 mm.
FilterConfig reference_config() { return fixtures::uniform_config(5.0, 1.0, 10.0, 4.0, 0.5, 2.0); }

SpectrumPoint point_at(const FilterConfig& c, double detuning_ghz) {
    return evaluate_point(c, zeeman_transitions(c.zeeman, c.strengths), detuning_ghz);
}

}  // namespace

// Reference values from a 40-digit evaluation of the crossed-polarizer
// field with the same Lorentzian wavenumbers.
TEST(Transfer, ReferencePoints) {
    struct Row {
        double detuning, t, phi, dh, dv;
    };
    const Row rows[] = {
        {2.0, 0.0033684072861614080, 0.031405160816925523, 0.25882352941176471, 0.042411642411642412},
        {-1.0, 0.035214136686353057, 0.21007957559681698, 0.21538461538461538, 0.20689655172413793},
        {10.0, 2.4956102409082820e-05, 0.0049157633736188285, 0.0075699077180146081, 0.011634092352042830},
    };
    const FilterConfig c = reference_config();
    for (const Row& r : rows) {
        const SpectrumPoint p = point_at(c, r.detuning);
        EXPECT_NEAR(p.transmission, r.t, 1e-13 * r.t + 1e-16);
        EXPECT_NEAR(p.rotation_rad, r.phi, 1e-12 * r.phi);
        EXPECT_NEAR(p.depth_h, r.dh, 1e-12 * r.dh);
        EXPECT_NEAR(p.depth_v, r.dv, 1e-12 * r.dv);
    }
}

TEST(Transfer, EqualSusceptibilitiesBlockEverything) {
    // At zero field all four lines coincide, two per polarization.
    const FilterConfig c = fixtures::uniform_config(20.0, 2.0, 10.0, 4.0, 0.0, 5.0);
    for (double d = -20.0; d <= 20.0; d += 0.37) EXPECT_LE(point_at(c, d).transmission, 1e-12);
}

TEST(Transfer, QuarterWaveRotationWithoutLossTransmitsFully) {
    const double length = 3e-3;
    const DopantWavenumbers k{Complex{std::numbers::pi / length, 0.0}, Complex{0.0, 0.0}};
    EXPECT_NEAR(rotation_angle(k.h, k.v, length), std::numbers::pi / 2, 1e-15);
    EXPECT_NEAR(transmission_from(k, length), 1.0, 1e-12);
    EXPECT_NEAR(transmission_closed_form(0.0, 0.0, std::numbers::pi / 2), 1.0, 1e-12);
}

TEST(Transfer, SinSquaredLawWithoutLoss) {
    const double length = 1e-3;
    for (double phi = -4.0; phi <= 4.0; phi += 0.05) {
        const DopantWavenumbers k{Complex{2.0 * phi / length, 0.0}, Complex{0.0, 0.0}};
        EXPECT_NEAR(transmission_from(k, length), std::pow(std::sin(phi), 2), 1e-13);
    }
}

TEST(Transfer, ClosedFormMatchesFieldForm) {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 2000; ++trial) {
        const FilterConfig c = fixtures::random_config(rng);
        const TransitionSet lines = zeeman_transitions(c.zeeman, c.strengths);
        const double detuning = units::rad_per_s_to_ghz(fixtures::random_probe(c, rng) - c.zeeman.center_rad_s) -
                                units::rad_per_s_to_ghz(lines[1].center_offset_rad_s);
        const SpectrumPoint p = evaluate_point(c, lines, detuning);
        EXPECT_NEAR(p.transmission, transmission_closed_form(p.depth_h, p.depth_v, p.rotation_rad), 1e-13);
    }
}

TEST(Transfer, AgreesWithJonesOracle) {
    std::mt19937_64 rng(22);
    for (int trial = 0; trial < 2000; ++trial) {
        const FilterConfig c = fixtures::random_config(rng);
        const double w = fixtures::random_probe(c, rng);
        EXPECT_NEAR(transmission(c, w), jones_oracle(c, w), 1e-10);
    }
}

TEST(Transfer, CompensatorIsRequiredForAgreement) {
    const FilterConfig c = fixtures::uniform_config(5.0, 1.0, 10.0, 4.0, 0.5, 8.5);
    double worst = 0.0;
    for (double d = -10.0; d <= 10.0; d += 0.5) {
        const double w = c.zeeman.center_rad_s + units::ghz_to_rad_per_s(d);
        worst = std::max(worst, std::abs(transmission(c, w) - jones_oracle(c, w, JonesOptions{false})));
    }
    EXPECT_GT(worst, 1e-3);
}

TEST(Transfer, BoundedForRandomConfigs) {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 300; ++trial) {
        const FilterConfig c = fixtures::random_config(rng);
        for (int j = 0; j < 50; ++j) {
            const double t = transmission(c, fixtures::random_probe(c, rng));
            ASSERT_GE(t, 0.0);
            ASSERT_LE(t, 1.0);
        }
    }
}

TEST(Transfer, RefractiveIndexFollowsHostFarFromLines) {
    const FilterConfig c = reference_config();
    const SpectrumPoint p = point_at(c, 1e4);
    const double w = c.zeeman.center_rad_s + units::ghz_to_rad_per_s(1e4 - 1.5);
    EXPECT_NEAR(p.n_h, host_index(c.host, Polarization::H, w), 1e-8);
    EXPECT_NEAR(p.n_v, host_index(c.host, Polarization::V, w), 1e-8);
    EXPECT_GT(p.n_h, p.n_v);
}

TEST(Transfer, RotationIsOddAroundLineCenter) {
    // Symmetric splitting: b and c mirror each other, a and d too.
    const FilterConfig c = fixtures::uniform_config(10.0, 1.0, 10.0, 4.0, 0.6, 2.0);
    const TransitionSet lines = zeeman_transitions(c.zeeman, c.strengths);
    const double b = units::rad_per_s_to_ghz(lines[1].center_offset_rad_s);
    for (double x = 0.1; x < 20.0; x *= 1.7) {
        const SpectrumPoint up = evaluate_point(c, lines, x - b);
        const SpectrumPoint down = evaluate_point(c, lines, -x - b);
        EXPECT_NEAR(up.rotation_rad, -down.rotation_rad, 1e-14);
        EXPECT_NEAR(up.transmission, down.transmission, 1e-14);
    }
}

TEST(Grid, EndpointsAreExact) {
    const GridSpec g = GridSpec::centered(60.0, 8192);
    EXPECT_EQ(g.at(0), -60.0);
    EXPECT_EQ(g.at(8191), 60.0);
    EXPECT_THROW(validate(GridSpec{0.0, 1.0, 1}), Error);
    EXPECT_THROW(validate(GridSpec{1.0, 1.0, 10}), Error);
}

TEST(Spectrum, WorkerCountDoesNotChangeResults) {
    const FilterConfig c = reference_config();
    const GridSpec g = GridSpec::centered(30.0, 1001);
    const Spectrum one = spectrum(c, g, 1);
    const Spectrum many = spectrum(c, g, 5);
    ASSERT_EQ(one.points.size(), many.points.size());
    for (std::size_t i = 0; i < one.points.size(); ++i) {
        EXPECT_EQ(one.points[i].transmission, many.points[i].transmission);
        EXPECT_EQ(one.points[i].n_h, many.points[i].n_h);
    }
}

TEST(Spectrum, RejectsOutOfRangeWavelength) {
    FilterConfig c = reference_config();
    c.zeeman.center_rad_s = units::nm_to_rad_per_s(300.0);
    EXPECT_THROW(spectrum(c, GridSpec::centered(1.0, 3)), Error);
}

TEST(Transfer, ExtinctFarFromLines) {
    std::mt19937_64 rng(24);
    for (int trial = 0; trial < 200; ++trial) {
        const FilterConfig c = fixtures::random_config(rng);
        double widest = 0.0;
        for (LineLabel l : all_labels) widest = std::max(widest, c.strengths[l].hwhm_rad_s);
        const double reach = std::max(1e4 * widest, 1e3 * (c.zeeman.ground_splitting() + c.zeeman.excited_splitting()));
        for (double sign : {-1.0, 1.0}) {
            EXPECT_LT(transmission(c, c.zeeman.center_rad_s + sign * reach), 1e-4);
        }
    }
}
