#pragma once

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "fadof/calibrate.hpp"
#include "fadof/design.hpp"
#include "fadof/errors.hpp"
#include "fadof/transfer.hpp"
#include "fadof/units.hpp"

namespace fadof::io {

using json = nlohmann::json;

inline constexpr std::string_view spectrum_header = "detuning_ghz,transmission,rotation_rad,depth_h,depth_v,n_h,n_v";
inline constexpr std::string_view sweep_header =
    "field_t,length_mm,peak_transmission,bandwidth_ghz,enbw_ghz,peak_count,error";
inline constexpr std::string_view samples_header = "detuning_ghz,depth,polarization";

// Shortest form is not needed; 17 significant digits round-trip any double.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        fields.emplace_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    for (std::string& f : fields) {
        while (!f.empty() && (f.back() == '\r' || f.back() == ' ')) f.pop_back();
        while (!f.empty() && f.front() == ' ') f.erase(f.begin());
    }
    return fields;
}

inline double parse_double(const std::string& text, const std::string& where) {
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (text.empty() || end != text.c_str() + text.size()) fail(ErrorKind::Config, where + ": not a number: '" + text + "'");
    return v;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::Io, "cannot read " + path);
    std::ostringstream text;
    text << in.rdbuf();
    return text.str();
}

inline void write_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::Io, "cannot write " + path);
    out << contents;
    out.flush();
    if (!out) fail(ErrorKind::Io, "write failed for " + path);
}

// ---------------------------------------------------------------------------
// Spectrum CSV

inline std::string spectrum_csv(const std::vector<SpectrumPoint>& points) {
    std::string out(spectrum_header);
    out += '\n';
    for (const SpectrumPoint& p : points) {
        out += format_double(p.detuning_ghz) + ',' + format_double(p.transmission) + ',' + format_double(p.rotation_rad) +
               ',' + format_double(p.depth_h) + ',' + format_double(p.depth_v) + ',' + format_double(p.n_h) + ',' +
               format_double(p.n_v) + '\n';
    }
    return out;
}

inline std::vector<SpectrumPoint> parse_spectrum_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || split_csv_line(line) != split_csv_line(spectrum_header)) {
        fail(ErrorKind::Config, "spectrum CSV: unexpected header");
    }
    std::vector<SpectrumPoint> points;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        const std::string where = "spectrum CSV row " + std::to_string(row);
        if (f.size() != 7) fail(ErrorKind::Config, where + ": expected 7 columns");
        points.push_back({parse_double(f[0], where), parse_double(f[1], where), parse_double(f[2], where),
                          parse_double(f[3], where), parse_double(f[4], where), parse_double(f[5], where),
                          parse_double(f[6], where)});
    }
    return points;
}

// ---------------------------------------------------------------------------
// Absorption samples CSV (detuning_ghz,depth,polarization), columns by name.

inline std::vector<AbsorptionSample> parse_samples_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) fail(ErrorKind::Config, "samples CSV: empty file");
    const auto header = split_csv_line(line);
    std::map<std::string, std::size_t> column;
    for (std::size_t i = 0; i < header.size(); ++i) column[header[i]] = i;
    for (const char* name : {"detuning_ghz", "depth", "polarization"}) {
        if (!column.count(name)) fail(ErrorKind::Config, std::string("samples CSV: missing column '") + name + "'");
    }
    if (header.size() != 3) fail(ErrorKind::Config, "samples CSV: expected exactly the columns " + std::string(samples_header));

    std::vector<AbsorptionSample> samples;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty() || line == "\r") continue;
        const auto f = split_csv_line(line);
        const std::string where = "samples CSV row " + std::to_string(row);
        if (f.size() != 3) fail(ErrorKind::Config, where + ": expected 3 columns");
        AbsorptionSample s;
        s.detuning_ghz = parse_double(f[column["detuning_ghz"]], where);
        s.depth = parse_double(f[column["depth"]], where);
        const std::string& pol = f[column["polarization"]];
        if (pol == "H") {
            s.polarization = Polarization::H;
        } else if (pol == "V") {
            s.polarization = Polarization::V;
        } else {
            fail(ErrorKind::Config, where + ": polarization must be H or V");
        }
        samples.push_back(s);
    }
    return samples;
}

inline std::string samples_csv(const std::vector<AbsorptionSample>& samples) {
    std::string out(samples_header);
    out += '\n';
    for (const AbsorptionSample& s : samples) {
        out += format_double(s.detuning_ghz) + ',' + format_double(s.depth) + ',' + to_char(s.polarization) + '\n';
    }
    return out;
}

// ---------------------------------------------------------------------------
// Sweep CSV; absent cells leave the numeric columns empty.

inline std::string sweep_csv(const SweepResult& result) {
    std::string out(sweep_header);
    out += '\n';
    for (const SweepCell& cell : result.cells) {
        out += format_double(cell.field_t) + ',' + format_double(units::m_to_mm(cell.length_m)) + ',';
        if (cell.fom) {
            out += format_double(cell.fom->peak_transmission) + ',' + format_double(cell.fom->bandwidth_ghz) + ',' +
                   format_double(cell.fom->enbw_ghz) + ',' + std::to_string(cell.fom->peak_count()) + ',';
        } else {
            out += ",,,," + std::string(to_string(*cell.error_kind));
        }
        out += '\n';
    }
    return out;
}

// ---------------------------------------------------------------------------
// JSON documents

inline json to_json(const FigureOfMerit& fom) {
    return json{{"peak_transmission", fom.peak_transmission},
                {"peak_count", fom.peak_count()},
                {"peak_detunings_ghz", fom.peak_detunings_ghz},
                {"bandwidth_ghz", fom.bandwidth_ghz},
                {"half_max_low_ghz", fom.half_max_low_ghz},
                {"half_max_high_ghz", fom.half_max_high_ghz},
                {"enbw_ghz", fom.enbw_ghz}};
}

inline json lines_json(const LineStrengths& s) {
    json lines = json::object();
    for (LineLabel label : all_labels) {
        lines[std::string(1, to_char(label))] = json{
            {"alpha_per_cm", units::per_m_to_per_cm(s[label].alpha_per_m)},
            {"linewidth_fwhm_ghz", units::hwhm_rad_per_s_to_fwhm_ghz(s[label].hwhm_rad_s)}};
    }
    return lines;
}

inline json to_json(const DesignSolution& s) {
    json j{{"field_t", s.field_t},
           {"length_mm", units::m_to_mm(s.length_m)},
           {"objective", s.objective},
           {"bandwidth_ok", s.bandwidth_ok},
           {"peaks_ok", s.peaks_ok},
           {"constraints_satisfied", s.constraints_satisfied},
           {"evaluations", s.evaluations}};
    j["figures_of_merit"] = s.fom ? to_json(*s.fom) : json(nullptr);
    return j;
}

inline json to_json(const FitResult& r) {
    json params = json::array();
    for (const FitParameter& p : r.parameters) params.push_back(json{{"name", p.name}, {"start", p.start}, {"end", p.end}});
    json j{{"converged", r.converged},
           {"iterations", r.iterations},
           {"rms_residual", r.rms_residual},
           {"lines", lines_json(r.strengths)},
           {"parameters", params}};
    if (r.zeeman_fitted) {
        j["ground_split_ghz_per_t"] = units::rad_per_s_to_ghz(r.ground_split_rad_s_per_t);
        j["excited_split_ghz_per_t"] = units::rad_per_s_to_ghz(r.excited_split_rad_s_per_t);
    }
    return j;
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace fadof::io
