#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "fadof/errors.hpp"
#include "fadof/parallel.hpp"
#include "fadof/physics.hpp"
#include "fadof/transfer.hpp"
#include "fadof/units.hpp"

namespace fadof {

inline constexpr double no_peak_floor = 1e-9;

struct FigureOfMerit {
    double peak_transmission = 0.0;
    std::vector<double> peak_detunings_ghz;
    double bandwidth_ghz = 0.0;  // between the outermost half-maximum crossings
    double half_max_low_ghz = 0.0;
    double half_max_high_ghz = 0.0;
    double enbw_ghz = 0.0;  // integral of T over detuning divided by the peak
    std::size_t peak_count() const { return peak_detunings_ghz.size(); }
};

// Local maxima by strict three-point comparison; a run of equal samples
// counts once, at the midpoint of the run. Endpoints are never peaks.
inline std::vector<double> local_maxima(std::span<const double> x, std::span<const double> y) {
    std::vector<double> peaks;
    const std::size_t n = y.size();
    std::size_t i = 1;
    while (i + 1 < n) {
        if (!(y[i] > y[i - 1])) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j + 1 < n && y[j + 1] == y[i]) ++j;
        if (j + 1 < n && y[j + 1] < y[i]) peaks.push_back(0.5 * (x[i] + x[j]));
        i = j + 1;
    }
    return peaks;
}

inline FigureOfMerit figures_of_merit(std::span<const double> detuning_ghz, std::span<const double> transmission) {
    const std::size_t n = transmission.size();
    if (detuning_ghz.size() != n || n < 2) fail(ErrorKind::Domain, "spectrum needs at least 2 matching samples");
    for (std::size_t i = 1; i < n; ++i) {
        if (!(detuning_ghz[i] > detuning_ghz[i - 1])) fail(ErrorKind::Domain, "detuning grid must be strictly increasing");
    }

    FigureOfMerit fom;
    fom.peak_transmission = *std::max_element(transmission.begin(), transmission.end());
    if (!(fom.peak_transmission >= no_peak_floor)) {
        std::ostringstream msg;
        msg << "no transmission peak (max T = " << fom.peak_transmission << ")";
        fail(ErrorKind::NoPeak, msg.str());
    }
    fom.peak_detunings_ghz = local_maxima(detuning_ghz, transmission);

    const double half = 0.5 * fom.peak_transmission;
    std::size_t lo = 0;
    while (transmission[lo] < half) ++lo;
    std::size_t hi = n - 1;
    while (transmission[hi] < half) --hi;
    if (lo == 0 || hi == n - 1) fail(ErrorKind::GridTooNarrow, "half-maximum crossings not bracketed by the grid");

    const auto crossing = [&](std::size_t below, std::size_t above) {
        const double t = (half - transmission[below]) / (transmission[above] - transmission[below]);
        return detuning_ghz[below] + t * (detuning_ghz[above] - detuning_ghz[below]);
    };
    fom.half_max_low_ghz = crossing(lo - 1, lo);
    fom.half_max_high_ghz = crossing(hi + 1, hi);
    fom.bandwidth_ghz = fom.half_max_high_ghz - fom.half_max_low_ghz;

    double area = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
        area += 0.5 * (transmission[i] + transmission[i - 1]) * (detuning_ghz[i] - detuning_ghz[i - 1]);
    }
    fom.enbw_ghz = area / fom.peak_transmission;
    return fom;
}

inline FigureOfMerit figures_of_merit(const Spectrum& s) {
    std::vector<double> x(s.points.size());
    std::vector<double> t(s.points.size());
    for (std::size_t i = 0; i < s.points.size(); ++i) {
        x[i] = s.points[i].detuning_ghz;
        t[i] = s.points[i].transmission;
    }
    return figures_of_merit(x, t);
}

inline FilterConfig with_design(FilterConfig config, double field_t, double length_m) {
    config.zeeman.field_t = field_t;
    config.host.length_m = length_m;
    return config;
}

// ---------------------------------------------------------------------------
// Sweeps

struct SweepSpec {
    double field_min_t = 0.0;
    double field_max_t = 0.0;
    std::size_t field_steps = 1;
    double length_min_m = 0.0;
    double length_max_m = 0.0;
    std::size_t length_steps = 1;
};

inline double lattice_value(double lo, double hi, std::size_t steps, std::size_t i) {
    if (steps <= 1) return lo;
    if (i + 1 == steps) return hi;
    return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(steps - 1);
}

inline void validate(const SweepSpec& spec) {
    const bool finite = std::isfinite(spec.field_min_t) && std::isfinite(spec.field_max_t) &&
                        std::isfinite(spec.length_min_m) && std::isfinite(spec.length_max_m);
    if (!finite) fail(ErrorKind::Domain, "sweep ranges must be finite");
    if (spec.field_steps < 1 || spec.length_steps < 1) fail(ErrorKind::Domain, "sweep steps must be >= 1");
    if (spec.field_min_t < 0.0 || spec.field_max_t < spec.field_min_t) fail(ErrorKind::Domain, "invalid field range");
    if (!(spec.length_min_m > 0.0) || spec.length_max_m < spec.length_min_m) fail(ErrorKind::Domain, "invalid length range");
}

// One lattice point. A cell whose figures of merit could not be extracted
// keeps the reason instead of a value.
struct SweepCell {
    double field_t = 0.0;
    double length_m = 0.0;
    std::optional<FigureOfMerit> fom;
    std::optional<ErrorKind> error_kind;
    std::string error;
};

struct SweepResult {
    SweepSpec spec;
    GridSpec grid;
    std::vector<SweepCell> cells;  // field-major, length-minor
};

inline SweepCell evaluate_cell(const FilterConfig& base, double field_t, double length_m, const GridSpec& grid,
                               unsigned workers) {
    SweepCell cell;
    cell.field_t = field_t;
    cell.length_m = length_m;
    try {
        cell.fom = figures_of_merit(spectrum(with_design(base, field_t, length_m), grid, workers));
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::NoPeak && e.kind() != ErrorKind::GridTooNarrow) throw;
        cell.error_kind = e.kind();
        cell.error = e.what();
    }
    return cell;
}

inline SweepResult sweep(const FilterConfig& base, const SweepSpec& spec, const GridSpec& grid, unsigned workers = 1) {
    validate(spec);
    validate(grid);
    validate(with_design(base, spec.field_min_t, spec.length_min_m));

    SweepResult result;
    result.spec = spec;
    result.grid = grid;
    result.cells.resize(spec.field_steps * spec.length_steps);
    parallel_for(result.cells.size(), workers, [&](std::size_t idx) {
        const std::size_t ib = idx / spec.length_steps;
        const std::size_t il = idx % spec.length_steps;
        result.cells[idx] = evaluate_cell(base, lattice_value(spec.field_min_t, spec.field_max_t, spec.field_steps, ib),
                                          lattice_value(spec.length_min_m, spec.length_max_m, spec.length_steps, il),
                                          grid, 1);
    });
    return result;
}

struct TradeoffPoint {
    double field_t = 0.0;
    std::optional<double> peak_transmission;
    std::optional<double> bandwidth_ghz;
    std::string error;
};

inline std::vector<TradeoffPoint> tradeoff_curve(const FilterConfig& base, std::span<const double> fields_t,
                                                 double length_m, const GridSpec& grid, unsigned workers = 1) {
    if (fields_t.size() < 2) fail(ErrorKind::Domain, "trade-off curve needs at least 2 field samples");
    validate(grid);
    std::vector<TradeoffPoint> out(fields_t.size());
    parallel_for(out.size(), workers, [&](std::size_t i) {
        const SweepCell cell = evaluate_cell(base, fields_t[i], length_m, grid, 1);
        out[i].field_t = fields_t[i];
        if (cell.fom) {
            out[i].peak_transmission = cell.fom->peak_transmission;
            out[i].bandwidth_ghz = cell.fom->bandwidth_ghz;
        } else {
            out[i].error = cell.error;
        }
    });
    return out;
}

// ---------------------------------------------------------------------------
// Box-constrained maximization: coarse lattice scan, then coordinate-wise
// golden-section refinement around the best feasible cell.

struct Box {
    double x_min = 0.0;
    double x_max = 0.0;
    double y_min = 0.0;
    double y_max = 0.0;
};

struct Candidate {
    double objective = -std::numeric_limits<double>::infinity();
    bool feasible = false;
};

struct BoxPoint {
    double x = 0.0;
    double y = 0.0;
    Candidate value;
};

struct BoxSearchOptions {
    std::size_t coarse_steps = 32;
    double tolerance_fraction = 1e-4;
    std::size_t max_rounds = 12;
    unsigned workers = 1;
};

struct BoxSearchResult {
    std::optional<BoxPoint> best;        // best feasible point overall
    std::vector<BoxPoint> coarse;        // every lattice cell, x-major
    std::optional<BoxPoint> best_infeasible;
    std::size_t evaluations = 0;
};

namespace detail {

inline bool better(const Candidate& a, const Candidate& b) {
    if (a.feasible != b.feasible) return a.feasible;
    return a.objective > b.objective;
}

// Golden-section maximization of f on [lo, hi]; infeasible values rank
// below every feasible one. Returns the best point visited.
template <typename F>
std::pair<double, Candidate> golden_section(F&& f, double lo, double hi, double tolerance, std::size_t& evaluations) {
    constexpr double inv_phi = 0.6180339887498949;
    double a = lo;
    double b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    Candidate fc = f(c);
    Candidate fd = f(d);
    evaluations += 2;
    std::pair<double, Candidate> best = better(fd, fc) ? std::pair{d, fd} : std::pair{c, fc};
    while (b - a > tolerance) {
        if (better(fc, fd) || (!better(fd, fc) && c < d && fc.objective == fd.objective)) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
            ++evaluations;
            if (better(fc, best.second)) best = {c, fc};
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
            ++evaluations;
            if (better(fd, best.second)) best = {d, fd};
        }
    }
    return best;
}

}  // namespace detail

template <typename Objective>
BoxSearchResult maximize_in_box(Objective&& objective, const Box& box, const BoxSearchOptions& options) {
    const bool valid = std::isfinite(box.x_min) && std::isfinite(box.x_max) && std::isfinite(box.y_min) &&
                       std::isfinite(box.y_max) && box.x_max >= box.x_min && box.y_max >= box.y_min;
    if (!valid) fail(ErrorKind::Domain, "search bounds must be finite and nonempty");
    if (options.coarse_steps < 1) fail(ErrorKind::Domain, "coarse lattice needs at least one step");

    const double span_x = box.x_max - box.x_min;
    const double span_y = box.y_max - box.y_min;
    const std::size_t nx = span_x > 0.0 ? std::max<std::size_t>(options.coarse_steps, 2) : 1;
    const std::size_t ny = span_y > 0.0 ? std::max<std::size_t>(options.coarse_steps, 2) : 1;

    BoxSearchResult result;
    result.coarse.resize(nx * ny);
    parallel_for(result.coarse.size(), options.workers, [&](std::size_t idx) {
        BoxPoint& p = result.coarse[idx];
        p.x = lattice_value(box.x_min, box.x_max, nx, idx / ny);
        p.y = lattice_value(box.y_min, box.y_max, ny, idx % ny);
        p.value = objective(p.x, p.y);
    });
    result.evaluations = result.coarse.size();

    for (const BoxPoint& p : result.coarse) {
        if (p.value.feasible) {
            if (!result.best || p.value.objective > result.best->value.objective) result.best = p;
        } else if (!result.best_infeasible || p.value.objective > result.best_infeasible->value.objective) {
            result.best_infeasible = p;
        }
    }
    if (!result.best) return result;

    BoxPoint current = *result.best;
    double half_x = nx > 1 ? span_x / static_cast<double>(nx - 1) : 0.0;
    double half_y = ny > 1 ? span_y / static_cast<double>(ny - 1) : 0.0;
    const double tol_x = options.tolerance_fraction * span_x;
    const double tol_y = options.tolerance_fraction * span_y;

    for (std::size_t round = 0; round < options.max_rounds; ++round) {
        const double before = current.value.objective;
        if (half_x > 0.0) {
            const double lo = std::max(box.x_min, current.x - half_x);
            const double hi = std::min(box.x_max, current.x + half_x);
            const double y = current.y;
            auto [x, value] = detail::golden_section([&](double t) { return objective(t, y); }, lo, hi, tol_x,
                                                     result.evaluations);
            if (value.feasible && value.objective > current.value.objective) current = BoxPoint{x, y, value};
        }
        if (half_y > 0.0) {
            const double lo = std::max(box.y_min, current.y - half_y);
            const double hi = std::min(box.y_max, current.y + half_y);
            const double x = current.x;
            auto [y, value] = detail::golden_section([&](double t) { return objective(x, t); }, lo, hi, tol_y,
                                                     result.evaluations);
            if (value.feasible && value.objective > current.value.objective) current = BoxPoint{x, y, value};
        }
        half_x *= 0.5;
        half_y *= 0.5;
        const bool converged = (half_x <= tol_x) && (half_y <= tol_y);
        if (current.value.objective - before <= 1e-12 * std::max(1.0, std::abs(before)) && round > 0) break;
        if (converged) break;
    }
    result.best = current;
    return result;
}

// ---------------------------------------------------------------------------
// Filter design optimization over (B, L).

enum class ObjectiveKind {
    PeakTransmission,   // maximize T_max of the sampled spectrum
    ProbeTransmission,  // maximize T at a fixed detuning from the zero-field line
};

struct DesignBounds {
    double field_min_t = 0.0;
    double field_max_t = 0.0;
    double length_min_m = 0.0;
    double length_max_m = 0.0;
};

struct DesignOptions {
    ObjectiveKind objective = ObjectiveKind::PeakTransmission;
    double probe_detuning_ghz = 0.0;
    std::optional<double> max_bandwidth_ghz;
    std::optional<std::size_t> required_peaks;
    GridSpec grid = GridSpec::centered(60.0, 8192);
    std::size_t coarse_steps = 32;
    double tolerance_fraction = 1e-4;
    std::size_t verify_density = 4;
    unsigned workers = 1;
};

struct DesignSolution {
    double field_t = 0.0;
    double length_m = 0.0;
    double objective = 0.0;
    std::optional<FigureOfMerit> fom;  // from the dense verification spectrum
    bool bandwidth_ok = true;
    bool peaks_ok = true;
    bool constraints_satisfied = false;
    std::size_t evaluations = 0;
};

class InfeasibleDesign : public Error {
public:
    InfeasibleDesign(const std::string& what, DesignSolution best)
        : Error(ErrorKind::Infeasible, what), best_(std::move(best)) {}
    const DesignSolution& best() const { return best_; }

private:
    DesignSolution best_;
};

namespace detail {

struct DesignEvaluation {
    Candidate value;
    std::optional<FigureOfMerit> fom;
    bool bandwidth_ok = true;
    bool peaks_ok = true;
};

inline DesignEvaluation evaluate_design(const FilterConfig& base, double field_t, double length_m,
                                        const DesignOptions& options, const GridSpec& grid, unsigned workers) {
    DesignEvaluation out;
    const FilterConfig config = with_design(base, field_t, length_m);
    const bool needs_fom = options.objective == ObjectiveKind::PeakTransmission || options.max_bandwidth_ghz ||
                           options.required_peaks;
    if (needs_fom) {
        try {
            out.fom = figures_of_merit(spectrum(config, grid, workers));
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::NoPeak && e.kind() != ErrorKind::GridTooNarrow) throw;
        }
        if (!out.fom) {
            out.bandwidth_ok = !options.max_bandwidth_ghz;
            out.peaks_ok = !options.required_peaks;
        } else {
            if (options.max_bandwidth_ghz) out.bandwidth_ok = out.fom->bandwidth_ghz <= *options.max_bandwidth_ghz;
            if (options.required_peaks) out.peaks_ok = out.fom->peak_count() == *options.required_peaks;
        }
    }
    if (options.objective == ObjectiveKind::PeakTransmission) {
        out.value.objective = out.fom ? out.fom->peak_transmission : 0.0;
        out.value.feasible = out.fom.has_value() && out.bandwidth_ok && out.peaks_ok;
    } else {
        const double omega = config.zeeman.center_rad_s + units::ghz_to_rad_per_s(options.probe_detuning_ghz);
        out.value.objective = transmission(config, omega);
        out.value.feasible = out.bandwidth_ok && out.peaks_ok;
    }
    return out;
}

}  // namespace detail

inline DesignSolution optimize(const FilterConfig& base, const DesignBounds& bounds, const DesignOptions& options) {
    const bool valid = std::isfinite(bounds.field_min_t) && std::isfinite(bounds.field_max_t) &&
                       std::isfinite(bounds.length_min_m) && std::isfinite(bounds.length_max_m) &&
                       bounds.field_min_t >= 0.0 && bounds.field_max_t >= bounds.field_min_t &&
                       bounds.length_min_m > 0.0 && bounds.length_max_m >= bounds.length_min_m;
    if (!valid) fail(ErrorKind::Domain, "design bounds must be finite and nonempty");
    validate(options.grid);
    validate(with_design(base, bounds.field_min_t, bounds.length_min_m));

    // Lattice cells run in parallel, each with a serial spectrum.
    auto objective = [&](double b, double l) {
        return detail::evaluate_design(base, b, l, options, options.grid, 1).value;
    };
    BoxSearchOptions search;
    search.coarse_steps = options.coarse_steps;
    search.tolerance_fraction = options.tolerance_fraction;
    search.workers = options.workers;
    const Box box{bounds.field_min_t, bounds.field_max_t, bounds.length_min_m, bounds.length_max_m};
    BoxSearchResult found = maximize_in_box(objective, box, search);

    GridSpec dense = options.grid;
    dense.points = (options.grid.points - 1) * std::max<std::size_t>(1, options.verify_density) + 1;

    auto verify = [&](const BoxPoint& p) {
        const detail::DesignEvaluation e =
            detail::evaluate_design(base, p.x, p.y, options, dense, options.workers);
        DesignSolution s;
        s.field_t = p.x;
        s.length_m = p.y;
        s.objective = e.value.objective;
        s.fom = e.fom;
        s.bandwidth_ok = e.bandwidth_ok;
        s.peaks_ok = e.peaks_ok;
        s.constraints_satisfied = e.value.feasible;
        s.evaluations = found.evaluations;
        return s;
    };

    if (found.best) {
        DesignSolution s = verify(*found.best);
        if (s.constraints_satisfied) return s;
        // Under-resolved on the search grid: fall back to the best coarse
        // cells that hold up at the dense resolution.
        std::vector<BoxPoint> feasible;
        for (const BoxPoint& p : found.coarse) {
            if (p.value.feasible) feasible.push_back(p);
        }
        std::stable_sort(feasible.begin(), feasible.end(),
                         [](const BoxPoint& a, const BoxPoint& b) { return a.value.objective > b.value.objective; });
        for (const BoxPoint& p : feasible) {
            DesignSolution fallback = verify(p);
            if (fallback.constraints_satisfied) return fallback;
        }
        throw InfeasibleDesign("no candidate satisfies the constraints at verification density", s);
    }
    const BoxPoint& worst_case = *found.best_infeasible;
    throw InfeasibleDesign("no lattice cell satisfies the constraints", verify(worst_case));
}

}  // namespace fadof
