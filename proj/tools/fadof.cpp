#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "fadof/cli.hpp"

namespace {

void add_common(CLI::App* cmd, fadof::cli::CommandOptions& opts) {
    cmd->add_option("--config", opts.config_path, "Run configuration (JSON)")->required();
    cmd->add_option("--out", opts.out, "Output path");
    cmd->add_option("--grid-span-ghz", opts.grid_span_ghz, "Grid half-width around line b, GHz");
    cmd->add_option("--grid-points", opts.grid_points, "Number of grid points");
    cmd->add_option("--workers", opts.workers, "Worker threads (default: FADOF_WORKERS or all cores)");
    cmd->add_flag("--quiet", opts.quiet, "Suppress informational output");
}

}  // namespace

int main(int argc, char** argv) {
    namespace cli = fadof::cli;
    CLI::App app{"Solid-state Faraday anomalous-dispersion optical filter simulator"};
    app.require_subcommand(1);

    cli::CommandOptions opts;
    CLI::App* spectrum = app.add_subcommand("spectrum", "Sample the transmission spectrum");
    CLI::App* sweep = app.add_subcommand("sweep", "Figures of merit over a (B, L) lattice");
    CLI::App* optimize = app.add_subcommand("optimize", "Search (B, L) for maximum peak transmission");
    CLI::App* calibrate = app.add_subcommand("calibrate", "Fit line parameters to absorption spectra");
    CLI::App* oracle = app.add_subcommand("oracle-check", "Compare the transfer function against Jones propagation");
    for (CLI::App* cmd : {spectrum, sweep, optimize, calibrate, oracle}) add_common(cmd, opts);
    calibrate->add_option("--samples", opts.samples, "Absorption samples CSV (detuning_ghz,depth,polarization)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return cli::usage;
    }

    if (spectrum->parsed()) return cli::guarded(cli::cmd_spectrum, opts, std::cout, std::cerr);
    if (sweep->parsed()) return cli::guarded(cli::cmd_sweep, opts, std::cout, std::cerr);
    if (optimize->parsed()) return cli::guarded(cli::cmd_optimize, opts, std::cout, std::cerr);
    if (calibrate->parsed()) return cli::guarded(cli::cmd_calibrate, opts, std::cout, std::cerr);
    return cli::guarded(cli::cmd_oracle_check, opts, std::cout, std::cerr);
}
