#pragma once

// ---------------------------------------------------------------------------
// simulate.hpp -- deterministic Monte Carlo of the two-photocurrent
// measurement and the two-step adaptive protocol.
//
// Each experimental event is a plane point z = (z1, z2) drawn from the
// outcome Gaussian; the measured phase is the polar angle of the point.  The
// two-step protocol first measures with a vacuum probe to locate the mean
// phase phi_bar, then repeats with the probe squeezed and phase-matched to
// phi_bar, trading part of the signal energy for probe squeezing at fixed
// total photon number.
//
// Determinism: sample i of stream s is a pure function of (seed, s, i)
// through the counter-based generator, samples land in a preallocated array
// by index, and every reduction runs in fixed index order -- so results are
// bit-identical under any thread count.  Step 1 draws from stream 1 and
// step 2 from stream 2 of the same master seed.
// ---------------------------------------------------------------------------

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "phasesim/gaussian.hpp"
#include "phasesim/phase.hpp"

namespace phasesim {

// A batch of outcome points and the generator coordinates that produced it.
struct SampleBatch {
    std::vector<std::array<double, 2>> outcomes;
    std::uint64_t seed = 0;
    std::uint32_t stream = 0;
};

// Binned counts of outcome angles over (-pi, pi].
struct PhaseHistogram {
    std::size_t n_bins = 0;
    std::vector<std::uint64_t> counts;
    std::uint64_t total = 0;

    double spacing() const {
        return 6.28318530717958647692 / static_cast<double>(n_bins);
    }
    double center(std::size_t k) const {
        return -3.14159265358979323846 +
               (static_cast<double>(k) + 0.5) * spacing();
    }
};

struct StepResult {
    PhaseHistogram hist;
    double phi_bar = 0.0;
    double width = 0.0;
};

// Step-2 signal reallocation rule: either keep the step-1 coherent:squeezing
// ratio within the reduced signal budget (fixed-ratio, the default) or keep
// the step-1 squeezing parameter and absorb the probe cost in the coherent
// part (fixed-rs).
enum class Reallocation { FixedRatio, FixedRs };

enum class SweepMode { Analytic, MonteCarlo };

struct TwoStepResult {
    EnergyBudget budget;
    Reallocation reallocation = Reallocation::FixedRatio;
    std::uint64_t seed = 0;
    std::uint32_t stream1 = 1;
    std::uint32_t stream2 = 2;
    SqueezedSignalParams signal1;
    SqueezedSignalParams signal2;
    ProbeParams probe2;
    PhaseHistogram hist1;
    PhaseHistogram hist2;
    double phi_bar = 0.0;
    double width1 = 0.0;
    double width2 = 0.0;
    double predicted1 = 0.0;
    double predicted2 = 0.0;
};

struct SweepRow {
    double N = 0.0;
    double width1 = 0.0;
    double width2 = 0.0;
    double predicted1 = 0.0;
    double predicted2 = 0.0;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    double slope1 = 0.0;
    double slope2 = 0.0;
};

// i.i.d. draws from the model: outcome_i = mean + S normal_pair(seed, stream, i)
// with S the symmetric square root of the covariance.  `threads` partitions
// the index range into contiguous chunks without changing any value.
SampleBatch sample_outcomes(const GaussianModel& model, std::size_t n,
                            std::uint64_t seed, std::uint32_t stream = 1,
                            unsigned threads = 1);

// Polar angles atan2(z2, z1) in (-pi, pi]; the exact origin maps to 0.
std::vector<double> phases_of(const SampleBatch& batch);

// Bin angles over (-pi, pi] into n_bins uniform bins.
PhaseHistogram histogram(const std::vector<double>& angles, std::size_t n_bins);

// Direction of the resultant vector sum(e^{i phi}).  Throws std::domain_error
// when the resultant length is below 1e-6 of the count (no preferred
// direction).
double circular_mean(const std::vector<double>& angles);

// Sample counterpart of numeric_width: mode-localized truncated-moment width
// of the angles (hard membership window, same window_factor refinement).
// Degenerate samples report the infinity marker.
double circular_std(const std::vector<double>& angles);

// Whole-circle diagnostic sqrt(-2 ln Rbar), Rbar = |sum e^{i phi}| / n.
double circular_std_global(const std::vector<double>& angles);

// One measurement step: compose the outcome model, draw n_samples outcomes,
// histogram the angles and estimate (phi_bar, width).
StepResult run_step(const SqueezedSignalParams& signal, const ProbeParams& probe,
                    std::size_t n_samples, std::size_t n_bins, std::uint64_t seed,
                    std::uint32_t stream = 1, unsigned threads = 1);

// The full two-step protocol for a photon budget.  Step 1: all N photons in
// the signal with coherent fraction beta_s / (1 - beta_p), vacuum probe.
// Step 2: probe squeezed to sinh^2 r_p = beta_p N at psi_p = phi_bar, signal
// reduced to N - sinh^2 r_p photons split per the reallocation rule.  Throws
// std::invalid_argument for malformed budgets (beta_s = 0, fractions over 1,
// fewer than 1000 samples) and std::domain_error for infeasible fixed-rs
// reallocation.
TwoStepResult two_step(const EnergyBudget& budget, std::size_t n_samples,
                       std::size_t n_bins, std::uint64_t seed,
                       Reallocation reallocation = Reallocation::FixedRatio,
                       unsigned threads = 1);

// Phase-grid resolution for analytic sweep widths: at least 150 cells per
// predicted width, power-of-two between 4096 and 2^22.
std::size_t sweep_grid_points(double predicted_width);

// Width-versus-N table for a family of budgets with fixed fractions, either
// from closed-form densities (analytic) or from the simulated protocol
// (monte-carlo), plus least-squares slopes of log(width) against log(N).
// N_list must be strictly ascending with at least 3 entries.
SweepResult scaling_sweep(const std::vector<double>& n_list, double beta_s,
                          double beta_p, SweepMode mode, std::uint64_t seed,
                          std::size_t n_samples = 100000, unsigned threads = 1);

}  // namespace phasesim
