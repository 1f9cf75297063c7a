#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "fadof/errors.hpp"
#include "fadof/physics.hpp"
#include "fadof/transfer.hpp"
#include "fadof/units.hpp"

namespace fadof {

// ---------------------------------------------------------------------------
// Derivative-free simplex minimization (reflection 1, expansion 2,
// contraction 0.5, shrink 0.5).

struct SimplexOptions {
    double initial_step = 0.25;
    double relative_tolerance = 1e-8;
    double absolute_floor = 0.0;  // spreads below this count as converged
    std::size_t max_iterations = 10'000;
    std::size_t restarts = 2;
};

struct SimplexResult {
    std::vector<double> x;
    double value = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    std::vector<double> best_history;  // best value after each iteration
};

template <typename F>
SimplexResult minimize_simplex(F&& f, std::vector<double> start, const SimplexOptions& options) {
    const std::size_t n = start.size();
    SimplexResult result;
    result.x = start;
    result.value = f(start);
    if (!std::isfinite(result.value)) fail(ErrorKind::Numeric, "objective not finite at the starting point");

    std::vector<std::vector<double>> simplex(n + 1);
    std::vector<double> values(n + 1);
    std::vector<std::size_t> order(n + 1);
    std::vector<double> centroid(n);
    std::vector<double> trial(n);

    auto evaluate = [&](const std::vector<double>& x) {
        const double v = f(x);
        if (std::isnan(v)) fail(ErrorKind::Numeric, "objective evaluated to NaN");
        return v;
    };
    auto along = [&](double t, const std::vector<double>& from) {
        // centroid + t * (centroid - from)
        for (std::size_t k = 0; k < n; ++k) trial[k] = centroid[k] + t * (centroid[k] - from[k]);
        return trial;
    };

    double step = options.initial_step;
    for (std::size_t attempt = 0; attempt <= options.restarts; ++attempt) {
        simplex[0] = result.x;
        values[0] = result.value;
        for (std::size_t i = 0; i < n; ++i) {
            simplex[i + 1] = result.x;
            simplex[i + 1][i] += step;
            values[i + 1] = evaluate(simplex[i + 1]);
        }
        bool converged = false;
        while (result.iterations < options.max_iterations) {
            std::iota(order.begin(), order.end(), 0);
            std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
            const std::size_t best = order.front();
            const std::size_t worst = order.back();
            const std::size_t second_worst = order[n - 1];

            const double spread = values[worst] - values[best];
            if (spread <= options.relative_tolerance * std::abs(values[best]) || spread <= options.absolute_floor) {
                converged = true;
                break;
            }
            ++result.iterations;

            std::fill(centroid.begin(), centroid.end(), 0.0);
            for (std::size_t i : order) {
                if (i == worst) continue;
                for (std::size_t k = 0; k < n; ++k) centroid[k] += simplex[i][k];
            }
            for (double& c : centroid) c /= static_cast<double>(n);

            const std::vector<double> reflected = along(1.0, simplex[worst]);
            const double f_reflected = evaluate(reflected);
            if (f_reflected < values[best]) {
                const std::vector<double> expanded = along(2.0, simplex[worst]);
                const double f_expanded = evaluate(expanded);
                if (f_expanded < f_reflected) {
                    simplex[worst] = expanded;
                    values[worst] = f_expanded;
                } else {
                    simplex[worst] = reflected;
                    values[worst] = f_reflected;
                }
            } else if (f_reflected < values[second_worst]) {
                simplex[worst] = reflected;
                values[worst] = f_reflected;
            } else {
                const bool outside = f_reflected < values[worst];
                const std::vector<double> contracted = outside ? along(0.5, simplex[worst]) : along(-0.5, simplex[worst]);
                const double f_contracted = evaluate(contracted);
                if (f_contracted < std::min(f_reflected, values[worst])) {
                    simplex[worst] = contracted;
                    values[worst] = f_contracted;
                } else {
                    for (std::size_t i : order) {
                        if (i == best) continue;
                        for (std::size_t k = 0; k < n; ++k) {
                            simplex[i][k] = simplex[best][k] + 0.5 * (simplex[i][k] - simplex[best][k]);
                        }
                        values[i] = evaluate(simplex[i]);
                    }
                }
            }
            const auto it = std::min_element(values.begin(), values.end());
            if (*it < result.value) {
                result.value = *it;
                result.x = simplex[static_cast<std::size_t>(it - values.begin())];
            }
            result.best_history.push_back(result.value);
        }
        const auto it = std::min_element(values.begin(), values.end());
        if (*it < result.value) {
            result.value = *it;
            result.x = simplex[static_cast<std::size_t>(it - values.begin())];
        }
        result.converged = result.converged || converged;
        if (!converged) break;
        // Restart from the best vertex with a smaller simplex to guard
        // against premature collapse.
        step *= 0.2;
    }
    return result;
}

// ---------------------------------------------------------------------------
// Line-parameter fitting against absorption-depth spectra.

struct AbsorptionSample {
    double detuning_ghz = 0.0;  // relative to line b
    double depth = 0.0;
    Polarization polarization = Polarization::H;
};

struct FitOptions {
    bool fit_zeeman = false;
    std::size_t max_iterations = 10'000;
    double relative_tolerance = 1e-8;
};

struct FitParameter {
    std::string name;  // in config units, e.g. "b.alpha_per_cm"
    double start = 0.0;
    double end = 0.0;
};

struct FitResult {
    LineStrengths strengths;
    double ground_split_rad_s_per_t = 0.0;
    double excited_split_rad_s_per_t = 0.0;
    bool zeeman_fitted = false;
    double rms_residual = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    std::vector<FitParameter> parameters;
    std::vector<double> residual_history;  // best sum of squares per iteration
};

// Model absorption depth for one polarization at a detuning from line b.
inline double model_depth(const TransitionSet& lines, Polarization pol, double detuning_ghz, double length_m) {
    const double x = units::ghz_to_rad_per_s(detuning_ghz) + lines[1].center_offset_rad_s;
    const DopantWavenumbers k = dopant_wavenumbers(lines, x);
    return 2.0 * (pol == Polarization::H ? k.h : k.v).imag() * length_m;
}

namespace detail {

// Fixed-order pairwise summation.
inline double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 8) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const std::size_t half = v.size() / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

struct FitLayout {
    bool fit_zeeman = false;
    std::size_t size() const { return fit_zeeman ? 10 : 8; }
};

inline std::vector<double> pack(const ZeemanConfig& z, const LineStrengths& s, FitLayout layout) {
    std::vector<double> theta;
    for (LineLabel label : all_labels) theta.push_back(std::log(s[label].alpha_per_m));
    for (LineLabel label : all_labels) theta.push_back(std::log(s[label].hwhm_rad_s));
    if (layout.fit_zeeman) {
        theta.push_back(std::log(z.ground_split_rad_s_per_t));
        theta.push_back(std::log(z.excited_split_rad_s_per_t));
    }
    return theta;
}

inline void unpack(std::span<const double> theta, ZeemanConfig& z, LineStrengths& s, FitLayout layout) {
    for (std::size_t i = 0; i < 4; ++i) {
        s.lines[i].alpha_per_m = std::exp(theta[i]);
        s.lines[i].hwhm_rad_s = std::exp(theta[4 + i]);
    }
    if (layout.fit_zeeman) {
        z.ground_split_rad_s_per_t = std::exp(theta[8]);
        z.excited_split_rad_s_per_t = std::exp(theta[9]);
    }
}

inline std::vector<FitParameter> describe(const ZeemanConfig& z, const LineStrengths& s, FitLayout layout) {
    std::vector<FitParameter> out;
    for (LineLabel label : all_labels) {
        out.push_back({std::string(1, to_char(label)) + ".alpha_per_cm", units::per_m_to_per_cm(s[label].alpha_per_m), 0.0});
    }
    for (LineLabel label : all_labels) {
        out.push_back({std::string(1, to_char(label)) + ".linewidth_fwhm_ghz",
                       units::hwhm_rad_per_s_to_fwhm_ghz(s[label].hwhm_rad_s), 0.0});
    }
    if (layout.fit_zeeman) {
        out.push_back({"ground_split_ghz_per_t", units::rad_per_s_to_ghz(z.ground_split_rad_s_per_t), 0.0});
        out.push_back({"excited_split_ghz_per_t", units::rad_per_s_to_ghz(z.excited_split_rad_s_per_t), 0.0});
    }
    return out;
}

}  // namespace detail

inline FitResult fit_lines(std::span<const AbsorptionSample> samples, const FilterConfig& fixed,
                           const LineStrengths& initial, const FitOptions& options = {}) {
    if (samples.empty()) fail(ErrorKind::InsufficientData, "no absorption samples");
    const bool has_h = std::any_of(samples.begin(), samples.end(), [](const auto& s) { return s.polarization == Polarization::H; });
    const bool has_v = std::any_of(samples.begin(), samples.end(), [](const auto& s) { return s.polarization == Polarization::V; });
    if (!has_h || !has_v) fail(ErrorKind::InsufficientData, "samples for both H and V polarizations are required");
    for (const AbsorptionSample& s : samples) {
        if (!std::isfinite(s.detuning_ghz) || !std::isfinite(s.depth) || s.depth < 0.0) {
            fail(ErrorKind::Domain, "absorption samples need finite detuning and non-negative depth");
        }
    }
    validate(initial);
    FilterConfig start = fixed;
    start.strengths = initial;
    validate(start);

    const detail::FitLayout layout{options.fit_zeeman};
    if (layout.fit_zeeman && (!(fixed.zeeman.ground_split_rad_s_per_t > 0.0) || !(fixed.zeeman.excited_split_rad_s_per_t > 0.0))) {
        fail(ErrorKind::Domain, "fitting Zeeman coefficients needs positive starting values");
    }
    const double length = fixed.host.length_m;

    std::vector<double> squared(samples.size());
    auto residual = [&](const std::vector<double>& theta) {
        // exp() of the log-parameters must stay representable and positive.
        for (double t : theta) {
            if (!(std::abs(t) < 600.0)) return std::numeric_limits<double>::infinity();
        }
        ZeemanConfig z = fixed.zeeman;
        LineStrengths s;
        detail::unpack(theta, z, s, layout);
        const TransitionSet lines = zeeman_transitions(z, s);
        for (std::size_t i = 0; i < samples.size(); ++i) {
            const double r = model_depth(lines, samples[i].polarization, samples[i].detuning_ghz, length) - samples[i].depth;
            squared[i] = r * r;
        }
        const double total = detail::pairwise_sum(squared);
        if (!std::isfinite(total)) fail(ErrorKind::Numeric, "non-finite residual");
        return total;
    };

    double data_energy = 0.0;
    for (const AbsorptionSample& s : samples) data_energy += s.depth * s.depth;

    SimplexOptions simplex;
    simplex.max_iterations = options.max_iterations;
    simplex.relative_tolerance = options.relative_tolerance;
    simplex.absolute_floor = 1e-24 * std::max(data_energy, 1e-300);

    const std::vector<double> theta0 = detail::pack(fixed.zeeman, initial, layout);
    const SimplexResult found = minimize_simplex(residual, theta0, simplex);

    FitResult result;
    ZeemanConfig z = fixed.zeeman;
    detail::unpack(found.x, z, result.strengths, layout);
    result.ground_split_rad_s_per_t = z.ground_split_rad_s_per_t;
    result.excited_split_rad_s_per_t = z.excited_split_rad_s_per_t;
    result.zeeman_fitted = layout.fit_zeeman;
    result.rms_residual = std::sqrt(found.value / static_cast<double>(samples.size()));
    result.iterations = found.iterations;
    result.converged = found.converged;
    result.residual_history = found.best_history;

    result.parameters = detail::describe(fixed.zeeman, initial, layout);
    const std::vector<FitParameter> end = detail::describe(z, result.strengths, layout);
    for (std::size_t i = 0; i < end.size(); ++i) result.parameters[i].end = end[i].start;
    return result;
}

}  // namespace fadof
