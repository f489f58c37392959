#pragma once

// ---------------------------------------------------------------------------
// io.hpp -- CSV and JSON serialization of histograms, densities and sweeps.
//
// All floating-point fields are written with 17 significant digits so files
// round-trip to the exact double, and all writers emit fully deterministic
// bytes (fixed headers, '\n' line endings, no timestamps).  Angles appear in
// files as phi/pi.
// ---------------------------------------------------------------------------

#include <string>
#include <vector>

#include "phasesim/phase.hpp"
#include "phasesim/simulate.hpp"

namespace phasesim {

// %.17g rendering used by every writer.
std::string format_double(double v);

// Whole-file helpers; throw std::runtime_error when the file cannot be
// opened.
void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

// hist CSV: bin_center_over_pi,count,probability,density
std::string histogram_csv(const PhaseHistogram& hist);
PhaseHistogram parse_histogram_csv(const std::string& text);

// density CSV: phi_over_pi,density
std::string density_csv(const PhaseDensity& density);
PhaseDensity parse_density_csv(const std::string& text);

// sweep CSV: N,width1,width2,predicted1,predicted2
std::string sweep_csv(const SweepResult& sweep);
std::vector<SweepRow> parse_sweep_csv(const std::string& text);

// JSON documents (pretty-printed, deterministic key order).
std::string summary_json(const TwoStepResult& result, const std::string& hist1_path,
                         const std::string& hist2_path);
std::string sweep_json(const SweepResult& sweep);
std::string density_json(const PhaseDensity& density);

const char* reallocation_name(Reallocation r);

}  // namespace phasesim
