#include "phasesim/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace phasesim {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::string line;
    std::istringstream in(text);
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) lines.push_back(line);
    }
    return lines;
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) fields.push_back(field);
    return fields;
}

double parse_field(const std::string& s, const char* what) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0') {
        throw std::invalid_argument(std::string("malformed ") + what + " field: " + s);
    }
    return v;
}

void require_header(const std::vector<std::string>& lines, const char* header) {
    if (lines.empty() || lines[0] != header) {
        throw std::invalid_argument(std::string("expected header '") + header + "'");
    }
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string histogram_csv(const PhaseHistogram& hist) {
    std::string out = "bin_center_over_pi,count,probability,density\n";
    const double total = static_cast<double>(hist.total);
    const double spacing = hist.spacing();
    for (std::size_t k = 0; k < hist.n_bins; ++k) {
        const double count = static_cast<double>(hist.counts[k]);
        const double prob = hist.total > 0 ? count / total : 0.0;
        out += format_double(hist.center(k) / kPi);
        out += ',';
        out += std::to_string(hist.counts[k]);
        out += ',';
        out += format_double(prob);
        out += ',';
        out += format_double(prob / spacing);
        out += '\n';
    }
    return out;
}

PhaseHistogram parse_histogram_csv(const std::string& text) {
    const std::vector<std::string> lines = split_lines(text);
    require_header(lines, "bin_center_over_pi,count,probability,density");
    PhaseHistogram hist;
    hist.n_bins = lines.size() - 1;
    if (hist.n_bins < 2) throw std::invalid_argument("histogram file has fewer than 2 bins");
    hist.counts.resize(hist.n_bins);
    hist.total = 0;
    for (std::size_t k = 0; k < hist.n_bins; ++k) {
        const std::vector<std::string> f = split_fields(lines[k + 1]);
        if (f.size() != 4) throw std::invalid_argument("histogram row needs 4 fields");
        const double center = parse_field(f[0], "bin center") * kPi;
        if (std::abs(center - hist.center(k)) > 1e-12) {
            throw std::invalid_argument("histogram bin centers do not match a uniform grid");
        }
        const double count = parse_field(f[1], "count");
        if (count < 0.0 || count != std::floor(count)) {
            throw std::invalid_argument("histogram count must be a non-negative integer");
        }
        hist.counts[k] = static_cast<std::uint64_t>(count);
        hist.total += hist.counts[k];
    }
    return hist;
}

std::string density_csv(const PhaseDensity& density) {
    std::string out = "phi_over_pi,density\n";
    for (std::size_t k = 0; k < density.grid.n_points; ++k) {
        out += format_double(density.grid.center(k) / kPi);
        out += ',';
        out += format_double(density.values[k]);
        out += '\n';
    }
    return out;
}

PhaseDensity parse_density_csv(const std::string& text) {
    const std::vector<std::string> lines = split_lines(text);
    require_header(lines, "phi_over_pi,density");
    PhaseDensity density;
    density.grid.n_points = lines.size() - 1;
    validate_phase_grid(density.grid);
    density.values.resize(density.grid.n_points);
    for (std::size_t k = 0; k < density.grid.n_points; ++k) {
        const std::vector<std::string> f = split_fields(lines[k + 1]);
        if (f.size() != 2) throw std::invalid_argument("density row needs 2 fields");
        const double center = parse_field(f[0], "phi") * kPi;
        if (std::abs(center - density.grid.center(k)) > 1e-12) {
            throw std::invalid_argument("density centers do not match a uniform grid");
        }
        density.values[k] = parse_field(f[1], "density");
    }
    return density;
}

std::string sweep_csv(const SweepResult& sweep) {
    std::string out = "N,width1,width2,predicted1,predicted2\n";
    for (const SweepRow& r : sweep.rows) {
        out += format_double(r.N);
        out += ',';
        out += format_double(r.width1);
        out += ',';
        out += format_double(r.width2);
        out += ',';
        out += format_double(r.predicted1);
        out += ',';
        out += format_double(r.predicted2);
        out += '\n';
    }
    return out;
}

std::vector<SweepRow> parse_sweep_csv(const std::string& text) {
    const std::vector<std::string> lines = split_lines(text);
    require_header(lines, "N,width1,width2,predicted1,predicted2");
    std::vector<SweepRow> rows;
    rows.reserve(lines.size() - 1);
    for (std::size_t k = 1; k < lines.size(); ++k) {
        const std::vector<std::string> f = split_fields(lines[k]);
        if (f.size() != 5) throw std::invalid_argument("sweep row needs 5 fields");
        SweepRow r;
        r.N = parse_field(f[0], "N");
        r.width1 = parse_field(f[1], "width1");
        r.width2 = parse_field(f[2], "width2");
        r.predicted1 = parse_field(f[3], "predicted1");
        r.predicted2 = parse_field(f[4], "predicted2");
        rows.push_back(r);
    }
    return rows;
}

const char* reallocation_name(Reallocation r) {
    return r == Reallocation::FixedRatio ? "fixed-ratio" : "fixed-rs";
}

std::string summary_json(const TwoStepResult& result, const std::string& hist1_path,
                         const std::string& hist2_path) {
    nlohmann::ordered_json j;
    j["budget"] = {{"total_photons", result.budget.N},
                   {"beta_s", result.budget.beta_s},
                   {"beta_p", result.budget.beta_p}};
    j["reallocation"] = reallocation_name(result.reallocation);
    j["run"] = {{"n_samples", result.hist1.total},
                {"n_bins", result.hist1.n_bins},
                {"seed", result.seed},
                {"streams", {result.stream1, result.stream2}}};
    j["step1"] = {{"x_s", result.signal1.x_s},
                  {"r_s", result.signal1.r_s},
                  {"r_p", 0.0},
                  {"width", result.width1},
                  {"predicted_width", result.predicted1}};
    j["step2"] = {{"x_s", result.signal2.x_s},
                  {"r_s", result.signal2.r_s},
                  {"r_p", result.probe2.r_p},
                  {"psi_p", result.probe2.psi_p},
                  {"width", result.width2},
                  {"predicted_width", result.predicted2}};
    j["phi_bar"] = result.phi_bar;
    j["files"] = {{"hist1", hist1_path}, {"hist2", hist2_path}};
    return j.dump(2) + "\n";
}

std::string density_json(const PhaseDensity& density) {
    nlohmann::ordered_json j;
    j["n_points"] = density.grid.n_points;
    j["phi_over_pi"] = nlohmann::ordered_json::array();
    j["density"] = nlohmann::ordered_json::array();
    for (std::size_t k = 0; k < density.grid.n_points; ++k) {
        j["phi_over_pi"].push_back(density.grid.center(k) / kPi);
        j["density"].push_back(density.values[k]);
    }
    return j.dump(2) + "\n";
}

std::string sweep_json(const SweepResult& sweep) {
    nlohmann::ordered_json j;
    j["rows"] = nlohmann::ordered_json::array();
    for (const SweepRow& r : sweep.rows) {
        j["rows"].push_back({{"N", r.N},
                             {"width1", r.width1},
                             {"width2", r.width2},
                             {"predicted1", r.predicted1},
                             {"predicted2", r.predicted2}});
    }
    j["slope1"] = sweep.slope1;
    j["slope2"] = sweep.slope2;
    return j.dump(2) + "\n";
}

}  // namespace phasesim
