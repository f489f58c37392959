#pragma once

// ---------------------------------------------------------------------------
// gaussian.hpp -- Gaussian states on the outcome plane.
//
// The joint measurement of the two photocurrents produces a point z = (z1, z2)
// on the plane.  For a squeezed signal and a (possibly squeezed) probe the
// outcome density K_b is a bivariate Gaussian: the convolution of the signal
// Wigner function with the reflected probe Wigner function.  This module
// carries the analytic (mean, covariance) forms plus two independent
// grid-based cross-checks (direct convolution and Fourier inversion of the
// characteristic function).
//
// Conventions:
//   * plane coordinates are (Re, Im) with vacuum variance 1/4 per axis;
//   * a squeezing parameter r scales the aligned variances to e^{+-2r}/4,
//     with the first (Re) axis anti-squeezed and the second (Im) axis
//     squeezed;
//   * the probe covariance is rotated by its squeezing phase psi_p before
//     being added to the signal covariance, so at psi_p = 0 the squeezed
//     probe sharpens the Im axis -- the direction that carries the phase
//     information near phi = 0.
// ---------------------------------------------------------------------------

#include <array>
#include <complex>
#include <cstddef>
#include <vector>

namespace phasesim {

// Signal mode: coherent amplitude x_s >= 0 along the real axis, squeezing
// parameter r_s >= 0 aligned with the axes (both phases are zero).
struct SqueezedSignalParams {
    double x_s = 0.0;
    double r_s = 0.0;
};

// Probe mode: squeezing magnitude r_p >= 0 and squeezing phase psi_p; r_p = 0
// is the vacuum probe regardless of psi_p.
struct ProbeParams {
    double r_p = 0.0;
    double psi_p = 0.0;
};

// Symmetric 2x2 matrix.
struct Mat2 {
    double xx = 0.0;
    double xy = 0.0;
    double yy = 0.0;
};

double det(const Mat2& m);
double trace(const Mat2& m);

// Symmetric positive-definite square root: S with S = S^T and S S = m.  For
// 2x2 SPD matrices S = (m + sqrt(det) I) / sqrt(trace + 2 sqrt(det)).
Mat2 sqrt_sym2(const Mat2& m);

// Bivariate Gaussian outcome model: mean 2-vector and covariance.
struct GaussianModel {
    std::array<double, 2> mean = {0.0, 0.0};
    Mat2 cov = {0.25, 0.0, 0.25};
};

// Uniform square grid over [-L, L]^2 with M points per axis (M odd, >= 3).
// values[i * M + j] holds the function at (x_i, y_j) with x_i = -L + i h,
// h = 2L/(M-1); the first index walks the Re axis.
struct PlaneGrid {
    double L = 0.0;
    std::size_t M = 0;
    std::vector<double> values;

    double step() const { return 2.0 * L / static_cast<double>(M - 1); }
    double coord(std::size_t i) const {
        return -L + static_cast<double>(i) * step();
    }
};

// Parameter validation.  Throws std::invalid_argument for non-finite or
// negative values and std::domain_error for squeezing beyond r = 20 (where
// e^{2r} endangers double arithmetic).
void validate_signal(const SqueezedSignalParams& s);
void validate_probe(const ProbeParams& p);
void validate_model(const GaussianModel& m);

// Aligned variances of the vacuum-probe outcome distribution:
//   sigma1^2 = (1 + e^{+2 r_s}) / 4,   sigma2^2 = (1 + e^{-2 r_s}) / 4.
std::array<double, 2> q_variances(double r_s);

// Wigner-function Gaussians of the individual modes: the signal is centred at
// (x_s, 0) with covariance diag(e^{+2 r_s}, e^{-2 r_s})/4; the probe is
// centred at the origin with the same form rotated by psi_p.
GaussianModel signal_model(const SqueezedSignalParams& s);
GaussianModel probe_model(const ProbeParams& p);

// Outcome model K_b: mean (x_s, 0), covariance = signal cov + rotated probe
// cov.  With the vacuum probe the diagonal reduces to q_variances(r_s).
GaussianModel composed_model(const SqueezedSignalParams& s, const ProbeParams& p);

// Normalized bivariate Gaussian density of `model` at `point`.
double wigner_gaussian(const GaussianModel& model, const std::array<double, 2>& point);
double wigner_gaussian(const SqueezedSignalParams& s, const std::array<double, 2>& point);
double wigner_gaussian(const ProbeParams& p, const std::array<double, 2>& point);

// Trapezoidal integral of a grid function over [-L, L]^2.
double trapezoid_integral(const PlaneGrid& grid);

// Samples a model's Gaussian on the grid.  Throws std::domain_error when the
// grid clips the state (trapezoidal integral deficit above 1e-3).
PlaneGrid wigner_on_grid(const GaussianModel& model, double L, std::size_t M);
PlaneGrid wigner_on_grid(const SqueezedSignalParams& s, double L, std::size_t M);
PlaneGrid wigner_on_grid(const ProbeParams& p, double L, std::size_t M);

// Default grid half-width for a model: max(6, |mean| + 6 max axis std).
double default_grid_halfwidth(const GaussianModel& model);

// Discrete outcome distribution K_b(z) = integral W_a(z + b) W_b(b) d^2 b,
// i.e. the convolution of the signal Wigner function with the reflected probe
// Wigner function, evaluated by direct summation (cross-correlation of the
// two grids times h^2) and renormalized to unit trapezoidal integral.
// Throws std::invalid_argument when the grid geometries differ.
PlaneGrid grid_convolution(const PlaneGrid& w_signal, const PlaneGrid& w_probe);

// Gaussian characteristic function chi(k) = exp(i k.mean - k^T cov k / 2) in
// the real wave-vector parameterization (k conjugate to the plane point z; in
// terms of the complex argument gamma this is k = 2 (-Im gamma, Re gamma)).
std::complex<double> characteristic_gaussian(const GaussianModel& model,
                                             const std::array<double, 2>& k);

// Independent Fourier cross-check of the composed distribution: forms
// Xi(k) = chi_signal(k) chi_probe(-k) on a k-grid [-k_max, k_max]^2 with
// m_k points per axis and inverts K(z) = (2 pi)^-2 integral Xi e^{-i k.z} d^2 k
// onto the requested plane grid, renormalized to unit trapezoidal integral.
PlaneGrid kb_by_fourier(const GaussianModel& signal, const GaussianModel& probe,
                        double L, std::size_t M, double k_max = 30.0,
                        std::size_t m_k = 121);

}  // namespace phasesim
