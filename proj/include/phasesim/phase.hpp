#pragma once

// ---------------------------------------------------------------------------
// phase.hpp -- marginal phase distributions and width formulas.
//
// The phase density of an outcome model is obtained by integrating the plane
// density over the radius,
//
//     p(phi) = integral_0^inf  rho K(rho e^{i phi})  d rho,
//
// which for a bivariate Gaussian K has the closed form
//
//     p(phi) = [ e^{-kappa} + sqrt(pi) t e^{t^2 - kappa} (1 + erf t) ]
//              / (4 pi mu sqrt(det cov)),        t = nu / sqrt(mu),
//
// with mu = u^T cov^{-1} u / 2, nu = u^T cov^{-1} mean / 2,
// kappa = mean^T cov^{-1} mean / 2 and u = (cos phi, sin phi).  For the
// aligned vacuum-probe case this reduces to the familiar double-Gaussian
// marginal with mu = (cos^2 phi / sigma1^2 + sin^2 phi / sigma2^2) / 2 and
// nu = x_s cos phi / (2 sigma1^2).
//
// Three independent evaluation routes are provided (closed form, radial
// quadrature, Fock-basis sum) plus the width formulas
//
//     gaussian approx:  dphi = sigma2 / x_s
//     step 1:           dphi = 1 / (2 sqrt(beta_s N))
//     two-step:         dphi = 1 / (4 sqrt(beta_s beta_p) N)
//
// and a numerical width estimator for densities on a phase grid.
// ---------------------------------------------------------------------------

#include <array>
#include <complex>
#include <cstddef>
#include <vector>

#include "phasesim/gaussian.hpp"

namespace phasesim {

// Uniform grid of bin centers spanning (-pi, pi]:
// center(k) = -pi + (k + 1) * 2 pi / n,  k = 0 .. n-1.
struct PhaseGrid {
    std::size_t n_points = 0;

    double spacing() const {
        return 6.28318530717958647692 / static_cast<double>(n_points);
    }
    double center(std::size_t k) const {
        return -3.14159265358979323846 +
               static_cast<double>(k + 1) * spacing();
    }
};

void validate_phase_grid(const PhaseGrid& grid);  // n_points >= 8

// Density values (1/radian) on the centers of a PhaseGrid.
struct PhaseDensity {
    PhaseGrid grid;
    std::vector<double> values;
};

// Riemann integral of a density over the circle: sum(values) * spacing.
double density_integral(const PhaseDensity& density);

// Density matrix in the Fock basis, row-major: rho[n * dim + m] = <n|rho|m>.
struct FockDensityMatrix {
    std::size_t dim = 0;
    std::vector<std::complex<double>> rho;

    std::complex<double> at(std::size_t n, std::size_t m) const {
        return rho[n * dim + m];
    }
};

// Photon-number budget of the two-step scheme: N total mean photons,
// beta_s = x_s^2 / N the coherent fraction of the final (step-2) signal and
// beta_p = sinh^2(r_p) / N the probe squeezing fraction; the residual
// 1 - beta_s - beta_p is the step-2 signal squeezing fraction.
struct EnergyBudget {
    double N = 0.0;
    double beta_s = 0.0;
    double beta_p = 0.0;
};

void validate_budget(const EnergyBudget& budget);

// Wraps an angle to [-pi, pi).
double wrap_angle(double a);

// Gaussian parameters of the radial integral at angle phi for the aligned
// double Gaussian: mu = (cos^2 phi / s1 + sin^2 phi / s2)/2,
// nu = x_s cos phi / (2 s1).
std::array<double, 2> mu_nu(double x_s, double sigma1_sq, double sigma2_sq,
                            double phi);

// Closed-form marginal for the aligned double Gaussian (mean (x_s, 0),
// covariance diag(sigma1_sq, sigma2_sq)), and for a general outcome model.
double marginal_closed_form(double x_s, double sigma1_sq, double sigma2_sq,
                            double phi);
double marginal_closed_form(const GaussianModel& model, double phi);

PhaseDensity closed_form_density(double x_s, double sigma1_sq, double sigma2_sq,
                                 const PhaseGrid& grid);
PhaseDensity closed_form_density(const GaussianModel& model, const PhaseGrid& grid);

// Radial-quadrature marginal: composite Gauss-Legendre panels scaled to the
// ray's Gaussian width, verified against a doubled-panel evaluation.  Throws
// std::runtime_error with the achieved error estimate on non-convergence.
PhaseDensity marginal_by_quadrature(const GaussianModel& model, const PhaseGrid& grid);

// Fock representation of the coherent state |alpha> truncated at `dim`
// (throws std::domain_error when the truncation captures less than
// 1 - 1e-12 of the norm).  fock_default_dim grows the truncation with
// alpha^2 + 10 |alpha| + 20 and enforces the dim <= 512 cap.
FockDensityMatrix coherent_fock(double alpha, std::size_t dim);
std::size_t fock_default_dim(double alpha);

// Fock-basis phase marginal
//   p(phi) = (1/2pi) sum_{nm} Gamma(1 + (n+m)/2) / sqrt(n! m!)
//                              e^{i (n-m) phi} rho_{nm},
// evaluated with log-space coefficients and iterated powers of e^{i phi}.
PhaseDensity fock_marginal(const FockDensityMatrix& rho, const PhaseGrid& grid);

// Width predictions.
double gaussian_approx_width(double x_s, double sigma2_sq);
double step1_width(const EnergyBudget& budget);
double step2_width(const EnergyBudget& budget);

// ---------------------------------------------------------------------------
// Numerical width of a phase density.
//
// The estimator measures the spread of the dominant mode: starting from the
// resultant direction it iteratively (a) recentres on the windowed mean,
// (b) takes the second moment inside a soft window (edge cells enter
// fractionally), and (c) inverts the truncated-Gaussian relation
// m2 = s^2 f(window/s) to undo the truncation bias, shrinking the window to
// `window_factor` times the current width estimate until the window is
// stable.  The window never shrinks below two grid cells.  Degenerate
// densities (no resultant direction, or width beyond pi) report the infinity
// marker.
// ---------------------------------------------------------------------------
inline constexpr double kWidthWindowFactor = 2.76;

double numeric_width(const PhaseDensity& density);

// Shared truncated-Gaussian helpers (also used by the sample estimator):
// truncated_gaussian_factor(kappa) = E[x^2 | |x| < kappa s] / s^2 for a
// centred Gaussian, as a function of kappa = window/s; truncated_moment_width
// inverts m2 = s^2 f(window/s) for s.
double truncated_gaussian_factor(double kappa);
double truncated_moment_width(double m2, double window);

// Whole-circle diagnostics: the resultant-length width sqrt(-2 ln R) and the
// linear rms about the circular mean.  Both are tail-sensitive; they are
// reported alongside numeric_width for comparison.
struct WidthDiagnostics {
    double resultant_width = 0.0;
    double linear_rms = 0.0;
};

WidthDiagnostics width_diagnostics(const PhaseDensity& density);

}  // namespace phasesim
