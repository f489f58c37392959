#include "doctest.h"

#include "phasesim/io.hpp"
#include "phasesim/phase.hpp"
#include "phasesim/simulate.hpp"

#include "json.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <stdexcept>
#include <string>

using namespace phasesim;

namespace {

PhaseHistogram sample_hist() {
    std::vector<double> angles;
    const PhaseGrid grid{64};
    for (std::size_t k = 0; k < grid.n_points; ++k) {
        for (std::size_t rep = 0; rep <= k % 3; ++rep) {
            angles.push_back(grid.center(k));
        }
    }
    return histogram(angles, 16);
}

} // namespace

TEST_CASE("format_double round trips exactly") {
    const double values[] = {0.0,         1.0 / 3.0, 3.14159265358979323846,
                             0.1,         -2.5e-17,  1e300,
                             -4.9406e-324, 12345.678901234567};
    for (double v : values) {
        const std::string s = format_double(v);
        CHECK(std::strtod(s.c_str(), nullptr) == v);
    }
}

TEST_CASE("text files round trip and missing files throw") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "phasesim_io_test";
    fs::create_directories(dir);
    const std::string path = (dir / "echo.txt").string();
    const std::string content = "line one\nline two\n";
    write_text_file(path, content);
    CHECK(read_text_file(path) == content);
    CHECK_THROWS_AS(read_text_file((dir / "missing.txt").string()), std::runtime_error);
    fs::remove_all(dir);
}

TEST_CASE("histogram CSV round trips") {
    const auto h = sample_hist();
    const std::string csv = histogram_csv(h);
    CHECK(csv.rfind("bin_center_over_pi,count,probability,density", 0) == 0);
    // One header plus one row per bin.
    std::size_t lines = 0;
    for (char ch : csv) {
        if (ch == '\n') ++lines;
    }
    CHECK(lines == h.n_bins + 1);

    const auto back = parse_histogram_csv(csv);
    CHECK(back.n_bins == h.n_bins);
    CHECK(back.total == h.total);
    CHECK(back.counts == h.counts);
}

TEST_CASE("histogram CSV parser rejects malformed input") {
    const auto h = sample_hist();
    const std::string csv = histogram_csv(h);
    CHECK_THROWS_AS(parse_histogram_csv("wrong,header\n0,1,2,3\n"),
                    std::invalid_argument);
    CHECK_THROWS_AS(parse_histogram_csv(
                        "bin_center_over_pi,count,probability,density\n"
                        "-0.96875,nonsense,0.1,0.2\n"),
                    std::invalid_argument);
    CHECK_THROWS_AS(parse_histogram_csv(
                        "bin_center_over_pi,count,probability,density\n"
                        "-0.96875,2.5,0.1,0.2\n"),
                    std::invalid_argument);
    // Bin centres must land on the canonical grid for the parsed bin count.
    std::string shifted = csv;
    const auto pos = shifted.find('\n') + 1;
    shifted.replace(pos, shifted.find(',', pos) - pos, "0.5");
    CHECK_THROWS_AS(parse_histogram_csv(shifted), std::invalid_argument);
}

TEST_CASE("density CSV round trips bitwise") {
    const auto v = q_variances(0.65847894846240835431);
    const auto d = closed_form_density(1.2247448713915890491, v[0], v[1],
                                       PhaseGrid{64});
    const std::string csv = density_csv(d);
    CHECK(csv.rfind("phi_over_pi,density", 0) == 0);
    const auto back = parse_density_csv(csv);
    CHECK(back.grid.n_points == d.grid.n_points);
    REQUIRE(back.values.size() == d.values.size());
    for (std::size_t k = 0; k < d.values.size(); ++k) {
        CHECK(back.values[k] == d.values[k]);
    }
    CHECK_THROWS_AS(parse_density_csv("density\n0.1\n"), std::invalid_argument);
}

TEST_CASE("sweep CSV round trips") {
    const auto sweep = scaling_sweep({100.0, 1000.0, 10000.0}, 0.75, 0.0,
                                     SweepMode::MonteCarlo, 1, 2000);
    const std::string csv = sweep_csv(sweep);
    CHECK(csv.rfind("N,width1,width2,predicted1,predicted2", 0) == 0);
    const auto rows = parse_sweep_csv(csv);
    REQUIRE(rows.size() == sweep.rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].N == sweep.rows[i].N);
        CHECK(rows[i].width1 == sweep.rows[i].width1);
        CHECK(rows[i].width2 == sweep.rows[i].width2);
        CHECK(rows[i].predicted1 == sweep.rows[i].predicted1);
        CHECK(rows[i].predicted2 == sweep.rows[i].predicted2);
    }
    CHECK_THROWS_AS(parse_sweep_csv("bad\n"), std::invalid_argument);
}

TEST_CASE("summary JSON carries the run record") {
    const auto r = two_step({2.0, 0.5625, 0.25}, 1000, 16, 3);
    const std::string text = summary_json(r, "hist1.csv", "hist2.csv");
    CHECK(text.back() == '\n');
    const auto j = nlohmann::json::parse(text);
    CHECK(j["budget"]["total_photons"].get<double>() == 2.0);
    CHECK(j["budget"]["beta_s"].get<double>() == 0.5625);
    CHECK(j["budget"]["beta_p"].get<double>() == 0.25);
    CHECK(j["reallocation"].get<std::string>() == "fixed-ratio");
    CHECK(j["run"]["n_samples"].get<std::uint64_t>() == 1000);
    CHECK(j["run"]["n_bins"].get<std::uint64_t>() == 16);
    CHECK(j["run"]["seed"].get<std::uint64_t>() == 3);
    CHECK(j["run"]["streams"][0].get<int>() == 1);
    CHECK(j["run"]["streams"][1].get<int>() == 2);
    CHECK(j["step1"]["x_s"].get<double>() == r.signal1.x_s);
    CHECK(j["step1"]["r_p"].get<double>() == 0.0);
    CHECK(j["step2"]["r_p"].get<double>() == r.probe2.r_p);
    CHECK(j["step2"]["psi_p"].get<double>() == r.probe2.psi_p);
    CHECK(j["phi_bar"].get<double>() == r.phi_bar);
    CHECK(j["files"]["hist1"].get<std::string>() == "hist1.csv");
    CHECK(j["files"]["hist2"].get<std::string>() == "hist2.csv");
    CHECK_FALSE(j.contains("timestamp"));
}

TEST_CASE("sweep and density JSON parse cleanly") {
    const auto sweep = scaling_sweep({100.0, 1000.0, 10000.0}, 0.75, 0.0,
                                     SweepMode::MonteCarlo, 1, 2000);
    const auto js = nlohmann::json::parse(sweep_json(sweep));
    CHECK(js["rows"].size() == 3);
    CHECK(js["slope1"].get<double>() == sweep.slope1);

    const auto v = q_variances(0.3);
    const auto d = closed_form_density(1.0, v[0], v[1], PhaseGrid{32});
    const auto jd = nlohmann::json::parse(density_json(d));
    CHECK(jd["n_points"].get<std::size_t>() == 32);
    CHECK(jd["phi_over_pi"].size() == 32);
    CHECK(jd["density"].size() == 32);
    CHECK(jd["density"][0].get<double>() == d.values[0]);
}

TEST_CASE("reallocation names") {
    CHECK(std::string(reallocation_name(Reallocation::FixedRatio)) == "fixed-ratio");
    CHECK(std::string(reallocation_name(Reallocation::FixedRs)) == "fixed-rs");
}
