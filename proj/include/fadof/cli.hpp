#pragma once

#include <cmath>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fadof/calibrate.hpp"
#include "fadof/config.hpp"
#include "fadof/design.hpp"
#include "fadof/errors.hpp"
#include "fadof/io.hpp"
#include "fadof/parallel.hpp"
#include "fadof/transfer.hpp"

// Command implementations behind the `fadof` executable. Each command
// returns a process exit code:
//   0 success, 1 I/O failure, 2 config/usage error,
//   3 numeric or convergence failure, 4 infeasible design or no peak.
namespace fadof::cli {

enum ExitCode : int { ok = 0, io_failure = 1, usage = 2, numeric = 3, infeasible = 4 };

inline int exit_code_for(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::Io: return io_failure;
    case ErrorKind::Domain:
    case ErrorKind::InvalidCoefficients:
    case ErrorKind::Config:
    case ErrorKind::InsufficientData: return usage;
    case ErrorKind::Numeric:
    case ErrorKind::GridTooNarrow: return numeric;
    case ErrorKind::NoPeak:
    case ErrorKind::Infeasible: return infeasible;
    }
    return numeric;
}

inline constexpr double oracle_threshold = 1e-10;
// Above this |chi| the first-order dispersion relation is no longer trusted.
inline constexpr double small_chi_limit = 1e-2;

struct CommandOptions {
    std::string config_path;
    std::optional<std::string> out;
    std::optional<double> grid_span_ghz;
    std::optional<std::size_t> grid_points;
    unsigned workers = 0;  // 0: FADOF_WORKERS or hardware concurrency
    bool quiet = false;
    std::optional<std::string> samples;
};

inline RunConfig load_run(const CommandOptions& opts) {
    RunConfig run = parse_config(opts.config_path);
    if (opts.grid_span_ghz) {
        if (!(*opts.grid_span_ghz > 0.0) || !std::isfinite(*opts.grid_span_ghz)) {
            fail(ErrorKind::Config, "--grid-span-ghz: must be > 0");
        }
        run.grid = GridSpec::centered(*opts.grid_span_ghz, run.grid.points);
    }
    if (opts.grid_points) {
        if (*opts.grid_points < 2) fail(ErrorKind::Config, "--grid-points: must be >= 2");
        run.grid.points = *opts.grid_points;
    }
    if (opts.out) run.output_path = opts.out;
    return run;
}

inline void emit(const std::optional<std::string>& path, const std::string& text, std::ostream& out) {
    if (path) {
        io::write_file(*path, text);
    } else {
        out << text;
    }
}

inline std::string summary_path(const std::string& csv_path) {
    return std::filesystem::path(csv_path).replace_extension(".summary.json").string();
}

inline int cmd_spectrum(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
    const RunConfig run = load_run(opts);
    if (!run.output_path) fail(ErrorKind::Config, "spectrum: an output path is required (--out or output.path)");
    const Spectrum s = spectrum(run.filter, run.grid, resolve_workers(opts.workers));
    io::write_file(*run.output_path, io::spectrum_csv(s.points));

    io::json summary{{"field_t", run.filter.zeeman.field_t},
                     {"length_mm", units::m_to_mm(run.filter.host.length_m)},
                     {"points", s.points.size()}};
    int code = ok;
    try {
        summary["figures_of_merit"] = io::to_json(figures_of_merit(s));
        summary["status"] = "ok";
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::NoPeak && e.kind() != ErrorKind::GridTooNarrow) throw;
        summary["figures_of_merit"] = nullptr;
        summary["status"] = to_string(e.kind());
        summary["error"] = e.what();
        code = exit_code_for(e.kind());
        if (!opts.quiet) err << "fadof: " << e.what() << '\n';
    }
    const std::string text = io::dump(summary);
    io::write_file(summary_path(*run.output_path), text);
    if (!opts.quiet) out << text;
    return code;
}

inline int cmd_sweep(const CommandOptions& opts, std::ostream&, std::ostream&) {
    const RunConfig run = load_run(opts);
    if (!run.sweep) fail(ErrorKind::Config, "sweep: missing required section");
    if (!run.output_path) fail(ErrorKind::Config, "sweep: an output path is required (--out or output.path)");
    const SweepResult result = sweep(run.filter, *run.sweep, run.grid, resolve_workers(opts.workers));
    io::write_file(*run.output_path, io::sweep_csv(result));
    return ok;
}

inline int cmd_optimize(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
    const RunConfig run = load_run(opts);
    if (!run.optimize) fail(ErrorKind::Config, "optimize: missing required section");
    DesignOptions options = run.optimize->options;
    options.grid = run.grid;
    options.workers = resolve_workers(opts.workers);
    try {
        const DesignSolution s = optimize(run.filter, run.optimize->bounds, options);
        io::json j = io::to_json(s);
        j["status"] = "ok";
        emit(run.output_path, io::dump(j), out);
        return ok;
    } catch (const InfeasibleDesign& e) {
        io::json j{{"status", "infeasible"}, {"error", e.what()}, {"best", io::to_json(e.best())}};
        emit(run.output_path, io::dump(j), out);
        if (!opts.quiet) err << "fadof: " << e.what() << '\n';
        return infeasible;
    }
}

inline int cmd_calibrate(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
    const RunConfig run = load_run(opts);
    const CalibrateSection section = run.calibrate.value_or(CalibrateSection{});
    std::optional<std::string> samples_path = opts.samples ? opts.samples : section.samples_csv;
    if (!samples_path) fail(ErrorKind::Config, "calibrate: a samples CSV is required (--samples or calibrate.samples_csv)");
    const std::vector<AbsorptionSample> samples = io::parse_samples_csv(io::read_file(*samples_path));

    FitOptions fit;
    fit.fit_zeeman = section.fit_zeeman;
    fit.max_iterations = section.max_iterations;
    const FitResult result = fit_lines(samples, run.filter, run.filter.strengths, fit);
    emit(run.output_path, io::dump(io::to_json(result)), out);
    if (!result.converged) {
        if (!opts.quiet) err << "fadof: fit did not converge within " << result.iterations << " iterations\n";
        return numeric;
    }
    return ok;
}

struct OracleReport {
    std::size_t points = 0;
    double max_abs_deviation = 0.0;
    double max_deviation_detuning_ghz = 0.0;
    double max_abs_chi = 0.0;
    bool passed = false;
};

inline OracleReport oracle_check(const RunConfig& run, unsigned workers) {
    const FilterConfig& filter = run.filter;
    validate(run.grid);
    const TransitionSet lines = zeeman_transitions(filter.zeeman, filter.strengths);
    std::vector<double> deviation(run.grid.points);
    std::vector<double> chi(run.grid.points);
    parallel_for(run.grid.points, workers, [&](std::size_t i) {
        const double center_detuning = units::ghz_to_rad_per_s(run.grid.at(i)) + lines[1].center_offset_rad_s;
        const double omega = filter.zeeman.center_rad_s + center_detuning;
        deviation[i] = std::abs(transmission(filter, omega) - jones_oracle(filter, omega));
        const double chi_h = std::abs(susceptibility(lines, Polarization::H, omega, host_wavenumber(filter.host, Polarization::H, omega)));
        const double chi_v = std::abs(susceptibility(lines, Polarization::V, omega, host_wavenumber(filter.host, Polarization::V, omega)));
        chi[i] = std::max(chi_h, chi_v);
    });
    OracleReport report;
    report.points = run.grid.points;
    for (std::size_t i = 0; i < run.grid.points; ++i) {
        if (deviation[i] > report.max_abs_deviation || std::isnan(deviation[i])) {
            report.max_abs_deviation = deviation[i];
            report.max_deviation_detuning_ghz = run.grid.at(i);
        }
        report.max_abs_chi = std::max(report.max_abs_chi, chi[i]);
    }
    report.passed = report.max_abs_deviation <= oracle_threshold && report.max_abs_chi <= small_chi_limit;
    return report;
}

inline int cmd_oracle_check(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
    const RunConfig run = load_run(opts);
    const OracleReport report = oracle_check(run, resolve_workers(opts.workers));
    const io::json j{{"points", report.points},
                     {"max_abs_deviation", report.max_abs_deviation},
                     {"max_deviation_detuning_ghz", report.max_deviation_detuning_ghz},
                     {"threshold", oracle_threshold},
                     {"max_abs_chi", report.max_abs_chi},
                     {"small_chi_limit", small_chi_limit},
                     {"small_chi_ok", report.max_abs_chi <= small_chi_limit},
                     {"passed", report.passed}};
    emit(run.output_path, io::dump(j), out);
    if (!report.passed) {
        if (!opts.quiet) err << "fadof: oracle check failed\n";
        return numeric;
    }
    return ok;
}

template <typename Command>
int guarded(Command&& command, const CommandOptions& opts, std::ostream& out, std::ostream& err) {
    try {
        return command(opts, out, err);
    } catch (const Error& e) {
        err << "fadof: " << to_string(e.kind()) << " error: " << e.what() << '\n';
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        err << "fadof: " << e.what() << '\n';
        return numeric;
    }
}

}  // namespace fadof::cli
