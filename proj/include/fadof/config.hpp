#pragma once

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "fadof/design.hpp"
#include "fadof/errors.hpp"
#include "fadof/physics.hpp"
#include "fadof/sellmeier.hpp"
#include "fadof/transfer.hpp"
#include "fadof/units.hpp"

// Run configuration files: JSON objects with nested sections, every physical
// quantity carrying its unit in the key name. Unknown keys are rejected.
// See docs/config.md for the schema.
namespace fadof {

struct OptimizeSection {
    DesignBounds bounds;
    DesignOptions options;  // grid and workers are filled in from the run
};

struct CalibrateSection {
    std::optional<std::string> samples_csv;
    bool fit_zeeman = false;
    std::size_t max_iterations = 10'000;
};

struct RunConfig {
    FilterConfig filter;
    GridSpec grid = GridSpec::centered(60.0, 8192);
    std::optional<std::string> output_path;
    std::optional<SweepSpec> sweep;
    std::optional<OptimizeSection> optimize;
    std::optional<CalibrateSection> calibrate;
};

namespace config_detail {

using json = nlohmann::json;

[[noreturn]] inline void config_error(const std::string& path, const std::string& what) {
    fail(ErrorKind::Config, path + ": " + what);
}

inline std::string join(const std::string& parent, const std::string& key) {
    return parent.empty() ? key : parent + "." + key;
}

inline void expect_object(const json& j, const std::string& path) {
    if (!j.is_object()) config_error(path.empty() ? "<root>" : path, "expected an object");
}

inline void allow_keys(const json& j, const std::string& path, std::initializer_list<const char*> keys) {
    const std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& [key, value] : j.items()) {
        if (!allowed.count(key)) config_error(join(path, key), "unknown key");
    }
}

inline const json& require(const json& j, const std::string& path, const char* key) {
    if (!j.contains(key)) config_error(join(path, key), "missing required key");
    return j.at(key);
}

inline double number(const json& j, const std::string& path) {
    if (!j.is_number()) config_error(path, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) config_error(path, "expected a finite number");
    return v;
}

inline double positive(const json& j, const std::string& parent, const char* key) {
    const std::string path = join(parent, key);
    const double v = number(require(j, parent, key), path);
    if (!(v > 0.0)) config_error(path, "must be > 0");
    return v;
}

inline double non_negative(const json& j, const std::string& parent, const char* key) {
    const std::string path = join(parent, key);
    const double v = number(require(j, parent, key), path);
    if (!(v >= 0.0)) config_error(path, "must be >= 0");
    return v;
}

inline std::size_t count(const json& j, const std::string& parent, const char* key, std::size_t minimum) {
    const std::string path = join(parent, key);
    const json& v = require(j, parent, key);
    if (!v.is_number_integer() || v.get<long long>() < static_cast<long long>(minimum)) {
        config_error(path, "expected an integer >= " + std::to_string(minimum));
    }
    return static_cast<std::size_t>(v.get<long long>());
}

inline SellmeierSet parse_sellmeier(const json& j, const std::string& path) {
    expect_object(j, path);
    allow_keys(j, path, {"a", "b_um2", "c_um2", "d_per_um2", "valid_min_um", "valid_max_um"});
    SellmeierSet s;
    s.a = number(require(j, path, "a"), join(path, "a"));
    s.b_um2 = number(require(j, path, "b_um2"), join(path, "b_um2"));
    s.c_um2 = number(require(j, path, "c_um2"), join(path, "c_um2"));
    s.d_per_um2 = number(require(j, path, "d_per_um2"), join(path, "d_per_um2"));
    s.valid_min_um = positive(j, path, "valid_min_um");
    s.valid_max_um = positive(j, path, "valid_max_um");
    if (!(s.valid_max_um > s.valid_min_um)) config_error(join(path, "valid_max_um"), "must exceed valid_min_um");
    return s;
}

inline void parse_filter(const json& root, FilterConfig& filter) {
    const json& crystal = require(root, "", "crystal");
    expect_object(crystal, "crystal");
    allow_keys(crystal, "crystal", {"length_mm", "ordinary", "extraordinary"});
    filter.host.length_m = units::mm_to_m(positive(crystal, "crystal", "length_mm"));
    if (crystal.contains("ordinary")) filter.host.ordinary = parse_sellmeier(crystal.at("ordinary"), "crystal.ordinary");
    if (crystal.contains("extraordinary")) {
        filter.host.extraordinary = parse_sellmeier(crystal.at("extraordinary"), "crystal.extraordinary");
    }

    const json& transition = require(root, "", "transition");
    expect_object(transition, "transition");
    allow_keys(transition, "transition", {"wavelength_nm", "ground_split_ghz_per_t", "excited_split_ghz_per_t"});
    const double wavelength_nm = positive(transition, "transition", "wavelength_nm");
    filter.zeeman.center_rad_s = units::nm_to_rad_per_s(wavelength_nm);
    filter.zeeman.ground_split_rad_s_per_t =
        units::ghz_to_rad_per_s(non_negative(transition, "transition", "ground_split_ghz_per_t"));
    filter.zeeman.excited_split_rad_s_per_t =
        units::ghz_to_rad_per_s(non_negative(transition, "transition", "excited_split_ghz_per_t"));
    filter.zeeman.field_t = non_negative(root, "", "field_t");

    const json& lines = require(root, "", "lines");
    expect_object(lines, "lines");
    allow_keys(lines, "lines", {"a", "b", "c", "d"});
    for (LineLabel label : all_labels) {
        const std::string key(1, to_char(label));
        const std::string path = join("lines", key);
        const json& line = require(lines, "lines", key.c_str());
        expect_object(line, path);
        allow_keys(line, path, {"alpha_per_cm", "linewidth_fwhm_ghz"});
        filter.strengths[label].alpha_per_m = units::per_cm_to_per_m(non_negative(line, path, "alpha_per_cm"));
        filter.strengths[label].hwhm_rad_s = units::fwhm_ghz_to_hwhm_rad_per_s(positive(line, path, "linewidth_fwhm_ghz"));
    }

    const double lambda_um = wavelength_nm * 1e-3;
    for (const SellmeierSet* set : {&filter.host.ordinary, &filter.host.extraordinary}) {
        if (!set->in_range(lambda_um)) config_error("transition.wavelength_nm", "outside the Sellmeier validity range");
        try {
            sellmeier_index(*set, lambda_um);
        } catch (const Error& e) {
            config_error(set == &filter.host.ordinary ? "crystal.ordinary" : "crystal.extraordinary", e.what());
        }
    }
}

inline SweepSpec parse_sweep(const json& j) {
    const std::string path = "sweep";
    expect_object(j, path);
    allow_keys(j, path, {"field_min_t", "field_max_t", "field_steps", "length_min_mm", "length_max_mm", "length_steps"});
    SweepSpec s;
    s.field_min_t = non_negative(j, path, "field_min_t");
    s.field_max_t = non_negative(j, path, "field_max_t");
    s.field_steps = count(j, path, "field_steps", 1);
    s.length_min_m = units::mm_to_m(positive(j, path, "length_min_mm"));
    s.length_max_m = units::mm_to_m(positive(j, path, "length_max_mm"));
    s.length_steps = count(j, path, "length_steps", 1);
    if (s.field_max_t < s.field_min_t) config_error("sweep.field_max_t", "must be >= field_min_t");
    if (s.length_max_m < s.length_min_m) config_error("sweep.length_max_mm", "must be >= length_min_mm");
    return s;
}

inline OptimizeSection parse_optimize(const json& j) {
    const std::string path = "optimize";
    expect_object(j, path);
    allow_keys(j, path,
               {"field_min_t", "field_max_t", "length_min_mm", "length_max_mm", "max_bandwidth_ghz", "required_peaks",
                "coarse_steps", "objective", "probe_detuning_ghz"});
    OptimizeSection o;
    o.bounds.field_min_t = non_negative(j, path, "field_min_t");
    o.bounds.field_max_t = non_negative(j, path, "field_max_t");
    o.bounds.length_min_m = units::mm_to_m(positive(j, path, "length_min_mm"));
    o.bounds.length_max_m = units::mm_to_m(positive(j, path, "length_max_mm"));
    if (o.bounds.field_max_t < o.bounds.field_min_t) config_error("optimize.field_max_t", "must be >= field_min_t");
    if (o.bounds.length_max_m < o.bounds.length_min_m) config_error("optimize.length_max_mm", "must be >= length_min_mm");
    if (j.contains("max_bandwidth_ghz")) o.options.max_bandwidth_ghz = positive(j, path, "max_bandwidth_ghz");
    if (j.contains("required_peaks")) o.options.required_peaks = count(j, path, "required_peaks", 1);
    if (j.contains("coarse_steps")) o.options.coarse_steps = count(j, path, "coarse_steps", 1);
    if (j.contains("objective")) {
        const json& v = j.at("objective");
        const std::string name = v.is_string() ? v.get<std::string>() : "";
        if (name == "peak_transmission") {
            o.options.objective = ObjectiveKind::PeakTransmission;
        } else if (name == "probe_transmission") {
            o.options.objective = ObjectiveKind::ProbeTransmission;
        } else {
            config_error("optimize.objective", "expected \"peak_transmission\" or \"probe_transmission\"");
        }
    }
    if (j.contains("probe_detuning_ghz")) {
        o.options.probe_detuning_ghz = number(j.at("probe_detuning_ghz"), "optimize.probe_detuning_ghz");
    }
    return o;
}

inline CalibrateSection parse_calibrate(const json& j) {
    const std::string path = "calibrate";
    expect_object(j, path);
    allow_keys(j, path, {"samples_csv", "fit_zeeman", "max_iterations"});
    CalibrateSection c;
    if (j.contains("samples_csv")) {
        if (!j.at("samples_csv").is_string()) config_error("calibrate.samples_csv", "expected a string");
        c.samples_csv = j.at("samples_csv").get<std::string>();
    }
    if (j.contains("fit_zeeman")) {
        if (!j.at("fit_zeeman").is_boolean()) config_error("calibrate.fit_zeeman", "expected true or false");
        c.fit_zeeman = j.at("fit_zeeman").get<bool>();
    }
    if (j.contains("max_iterations")) c.max_iterations = count(j, path, "max_iterations", 1);
    return c;
}

}  // namespace config_detail

inline RunConfig parse_config_text(const std::string& text) {
    using namespace config_detail;
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        fail(ErrorKind::Config, std::string("<root>: malformed JSON: ") + e.what());
    }
    expect_object(root, "");
    allow_keys(root, "",
               {"description", "crystal", "transition", "field_t", "lines", "grid", "output", "sweep", "optimize",
                "calibrate"});
    if (root.contains("description") && !root.at("description").is_string()) {
        config_error("description", "expected a string");
    }

    RunConfig run;
    parse_filter(root, run.filter);

    if (root.contains("grid")) {
        const json& grid = root.at("grid");
        expect_object(grid, "grid");
        allow_keys(grid, "grid", {"span_ghz", "points"});
        run.grid = GridSpec::centered(positive(grid, "grid", "span_ghz"), count(grid, "grid", "points", 2));
    }
    if (root.contains("output")) {
        const json& output = root.at("output");
        expect_object(output, "output");
        allow_keys(output, "output", {"path"});
        if (!require(output, "output", "path").is_string()) config_error("output.path", "expected a string");
        run.output_path = output.at("path").get<std::string>();
    }
    if (root.contains("sweep")) run.sweep = parse_sweep(root.at("sweep"));
    if (root.contains("optimize")) run.optimize = parse_optimize(root.at("optimize"));
    if (root.contains("calibrate")) run.calibrate = parse_calibrate(root.at("calibrate"));

    try {
        validate(run.filter);
    } catch (const Error& e) {
        fail(ErrorKind::Config, std::string("<root>: ") + e.what());
    }
    return run;
}

inline RunConfig parse_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::Io, "cannot read config file " + path);
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config_text(text.str());
}

}  // namespace fadof
