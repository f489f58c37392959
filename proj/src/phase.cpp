#include "phasesim/phase.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "phasesim/special.hpp"

namespace phasesim {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 6.28318530717958647692;
constexpr double kSqrtPi = 1.77245385090551602730;
const double kInf = std::numeric_limits<double>::infinity();

void require_finite(double v, const char* what) {
    if (!std::isfinite(v)) {
        throw std::invalid_argument(std::string(what) + " must be finite");
    }
}

// exp(-kappa) + sqrt(pi) t exp(t^2 - kappa) (1 + erf t) evaluated without
// overflow: t^2 - kappa <= 0 always (Cauchy-Schwarz of nu^2 <= mu kappa), and
// the t < 0 branch is rewritten through erfcx so no large exponential appears:
//   sqrt(pi) t e^{t^2} (1 + erf t) = -sqrt(pi) u erfcx(u),  u = -t.
double marginal_bracket(double t, double kappa) {
    if (t >= 0.0) {
        return std::exp(-kappa) +
               kSqrtPi * t * std::exp(t * t - kappa) * (1.0 + std::erf(t));
    }
    const double u = -t;
    return std::exp(-kappa) * (1.0 - kSqrtPi * u * erfcx(u));
}

struct InverseForm {
    double ixx, ixy, iyy;  // cov^{-1}
    double kappa;          // mean^T cov^{-1} mean / 2
    double sqrt_det;
    double gx, gy;         // cov^{-1} mean
};

InverseForm inverse_form(const GaussianModel& model) {
    validate_model(model);
    const double d = det(model.cov);
    InverseForm f;
    f.ixx = model.cov.yy / d;
    f.ixy = -model.cov.xy / d;
    f.iyy = model.cov.xx / d;
    f.sqrt_det = std::sqrt(d);
    f.gx = f.ixx * model.mean[0] + f.ixy * model.mean[1];
    f.gy = f.ixy * model.mean[0] + f.iyy * model.mean[1];
    f.kappa = 0.5 * (model.mean[0] * f.gx + model.mean[1] * f.gy);
    return f;
}

double marginal_at(const InverseForm& f, double phi) {
    const double c = std::cos(phi);
    const double s = std::sin(phi);
    const double mu = 0.5 * (f.ixx * c * c + 2.0 * f.ixy * c * s + f.iyy * s * s);
    const double nu = 0.5 * (c * f.gx + s * f.gy);
    const double t = nu / std::sqrt(mu);
    return marginal_bracket(t, f.kappa) / (4.0 * kPi * mu * f.sqrt_det);
}

}  // namespace

void validate_phase_grid(const PhaseGrid& grid) {
    if (grid.n_points < 8) {
        throw std::invalid_argument("phase grid needs at least 8 points");
    }
}

double density_integral(const PhaseDensity& density) {
    validate_phase_grid(density.grid);
    if (density.values.size() != density.grid.n_points) {
        throw std::invalid_argument("density value count does not match its grid");
    }
    double sum = 0.0;
    for (double v : density.values) sum += v;
    return sum * density.grid.spacing();
}

void validate_budget(const EnergyBudget& b) {
    require_finite(b.N, "N");
    require_finite(b.beta_s, "beta_s");
    require_finite(b.beta_p, "beta_p");
    if (!(b.N > 0.0)) throw std::invalid_argument("N must be positive");
    if (b.beta_s < 0.0 || b.beta_p < 0.0) {
        throw std::invalid_argument("photon fractions must be non-negative");
    }
    if (b.beta_s + b.beta_p > 1.0) {
        throw std::invalid_argument("beta_s + beta_p must not exceed 1");
    }
}

double wrap_angle(double a) {
    double r = std::fmod(a + kPi, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    return r - kPi;
}

std::array<double, 2> mu_nu(double x_s, double sigma1_sq, double sigma2_sq,
                            double phi) {
    require_finite(x_s, "x_s");
    require_finite(phi, "phi");
    if (!(sigma1_sq > 0.0) || !(sigma2_sq > 0.0)) {
        throw std::invalid_argument("variances must be positive");
    }
    const double c = std::cos(phi);
    const double s = std::sin(phi);
    return {0.5 * (c * c / sigma1_sq + s * s / sigma2_sq),
            x_s * c / (2.0 * sigma1_sq)};
}

double marginal_closed_form(double x_s, double sigma1_sq, double sigma2_sq,
                            double phi) {
    const std::array<double, 2> mn = mu_nu(x_s, sigma1_sq, sigma2_sq, phi);
    const double kappa = x_s * x_s / (2.0 * sigma1_sq);
    const double t = mn[1] / std::sqrt(mn[0]);
    return marginal_bracket(t, kappa) /
           (4.0 * kPi * mn[0] * std::sqrt(sigma1_sq * sigma2_sq));
}

double marginal_closed_form(const GaussianModel& model, double phi) {
    require_finite(phi, "phi");
    return marginal_at(inverse_form(model), phi);
}

PhaseDensity closed_form_density(double x_s, double sigma1_sq, double sigma2_sq,
                                 const PhaseGrid& grid) {
    validate_phase_grid(grid);
    PhaseDensity out;
    out.grid = grid;
    out.values.resize(grid.n_points);
    for (std::size_t k = 0; k < grid.n_points; ++k) {
        out.values[k] = marginal_closed_form(x_s, sigma1_sq, sigma2_sq, grid.center(k));
    }
    return out;
}

PhaseDensity closed_form_density(const GaussianModel& model, const PhaseGrid& grid) {
    validate_phase_grid(grid);
    const InverseForm f = inverse_form(model);
    PhaseDensity out;
    out.grid = grid;
    out.values.resize(grid.n_points);
    for (std::size_t k = 0; k < grid.n_points; ++k) {
        out.values[k] = marginal_at(f, grid.center(k));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Radial quadrature.  Along the ray at angle phi the integrand is
//   f(rho) = rho C exp(-(mu rho^2 - 2 nu rho + kappa)),  C = 1/(2 pi sqrt det),
// a Gaussian profile of width sigma_ray = 1/sqrt(2 mu) centred at
// rho* = max(0, nu/mu).  Composite 16-point Gauss-Legendre panels of roughly
// one sigma_ray cover [0, rho* + 12 sigma_ray]; the evaluation is repeated
// with doubled panel count and the worse-by-construction first pass serves
// as the convergence check.
// ---------------------------------------------------------------------------
PhaseDensity marginal_by_quadrature(const GaussianModel& model, const PhaseGrid& grid) {
    validate_phase_grid(grid);
    const InverseForm f = inverse_form(model);
    const double c_norm = 1.0 / (kTwoPi * f.sqrt_det);
    static const GaussLegendreRule rule = gauss_legendre(16);

    PhaseDensity out;
    out.grid = grid;
    out.values.resize(grid.n_points);
    double sup_err = 0.0;
    for (std::size_t k = 0; k < grid.n_points; ++k) {
        const double phi = grid.center(k);
        const double cphi = std::cos(phi);
        const double sphi = std::sin(phi);
        const double mu = 0.5 * (f.ixx * cphi * cphi + 2.0 * f.ixy * cphi * sphi +
                                 f.iyy * sphi * sphi);
        const double nu = 0.5 * (cphi * f.gx + sphi * f.gy);
        const double sigma_ray = 1.0 / std::sqrt(2.0 * mu);
        const double peak = nu > 0.0 ? nu / mu : 0.0;
        const double reach = peak + 12.0 * sigma_ray;

        const auto integrate = [&](std::size_t panels) {
            const double width = reach / static_cast<double>(panels);
            double total = 0.0;
            for (std::size_t p = 0; p < panels; ++p) {
                const double mid = (static_cast<double>(p) + 0.5) * width;
                const double half = 0.5 * width;
                double acc = 0.0;
                for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
                    const double rho = mid + half * rule.nodes[q];
                    const double expo = (mu * rho - 2.0 * nu) * rho + f.kappa;
                    acc += rule.weights[q] * rho * std::exp(-expo);
                }
                total += acc * half;
            }
            return total * c_norm;
        };

        const std::size_t base = static_cast<std::size_t>(std::ceil(reach / sigma_ray));
        const double coarse = integrate(base);
        const double fine = integrate(2 * base);
        const double err = std::abs(fine - coarse);
        if (err > sup_err) sup_err = err;
        out.values[k] = fine;
    }
    if (sup_err > 1e-10) {
        throw std::runtime_error(
            "marginal_by_quadrature did not converge (error estimate " +
            std::to_string(sup_err) + ")");
    }
    return out;
}

// ---------------------------------------------------------------------------
// Fock-basis route.
// ---------------------------------------------------------------------------
std::size_t fock_default_dim(double alpha) {
    require_finite(alpha, "alpha");
    const double a = std::abs(alpha);
    double d = std::ceil(a * a + 10.0 * a + 20.0);
    if (d < 60.0) d = 60.0;
    if (d > 512.0) {
        throw std::domain_error("fock_default_dim: required truncation exceeds the cap of 512");
    }
    return static_cast<std::size_t>(d);
}

FockDensityMatrix coherent_fock(double alpha, std::size_t dim) {
    require_finite(alpha, "alpha");
    if (dim == 0) throw std::invalid_argument("coherent_fock: dim must be >= 1");
    if (dim > 512) throw std::domain_error("coherent_fock: dim exceeds the cap of 512");
    std::vector<double> c(dim, 0.0);
    if (alpha == 0.0) {
        c[0] = 1.0;
    } else {
        const double la = std::log(std::abs(alpha));
        for (std::size_t n = 0; n < dim; ++n) {
            const double ln = -0.5 * alpha * alpha + static_cast<double>(n) * la -
                              0.5 * std::lgamma(static_cast<double>(n) + 1.0);
            double v = std::exp(ln);
            if (alpha < 0.0 && n % 2 == 1) v = -v;
            c[n] = v;
        }
    }
    double captured = 0.0;
    for (double v : c) captured += v * v;
    if (captured < 1.0 - 1e-12) {
        throw std::domain_error("coherent_fock: truncation captures less than 1 - 1e-12 of the norm");
    }
    FockDensityMatrix rho;
    rho.dim = dim;
    rho.rho.resize(dim * dim);
    for (std::size_t n = 0; n < dim; ++n) {
        for (std::size_t m = 0; m < dim; ++m) {
            rho.rho[n * dim + m] = c[n] * c[m] / captured;
        }
    }
    return rho;
}

PhaseDensity fock_marginal(const FockDensityMatrix& rho, const PhaseGrid& grid) {
    validate_phase_grid(grid);
    const std::size_t d = rho.dim;
    if (d == 0 || rho.rho.size() != d * d) {
        throw std::invalid_argument("fock_marginal: malformed density matrix");
    }
    if (d > 512) {
        throw std::domain_error("fock_marginal: dimension exceeds the cap of 512");
    }
    double trace = 0.0;
    for (std::size_t n = 0; n < d; ++n) {
        trace += rho.at(n, n).real();
        for (std::size_t m = n; m < d; ++m) {
            if (std::abs(rho.at(n, m) - std::conj(rho.at(m, n))) > 1e-10) {
                throw std::invalid_argument("fock_marginal: density matrix is not Hermitian");
            }
        }
    }
    if (std::abs(trace - 1.0) > 1e-10) {
        throw std::invalid_argument("fock_marginal: density matrix trace is not 1");
    }
    // Collapse the double sum over (n, m) to diagonals k = n - m >= 0:
    //   p(phi) = ( c_0 + 2 sum_{k>=1} Re(c_k e^{i k phi}) ) / 2 pi,
    //   c_k = sum_m g_{m+k,m} rho_{m+k,m},
    //   g_{nm} = exp( lnGamma(1 + (n+m)/2) - (lnGamma(n+1) + lnGamma(m+1))/2 ).
    // The k < 0 terms are complex conjugates by Hermiticity, and g_{nn} = 1
    // makes c_0 the trace.
    std::vector<std::complex<double>> ck(d, {0.0, 0.0});
    for (std::size_t k = 0; k < d; ++k) {
        std::complex<double> acc = 0.0;
        for (std::size_t m = 0; m + k < d; ++m) {
            const std::size_t n = m + k;
            const double g = std::exp(
                std::lgamma(1.0 + 0.5 * static_cast<double>(n + m)) -
                0.5 * (std::lgamma(static_cast<double>(n) + 1.0) +
                       std::lgamma(static_cast<double>(m) + 1.0)));
            acc += g * rho.at(n, m);
        }
        ck[k] = acc;
    }
    PhaseDensity out;
    out.grid = grid;
    out.values.resize(grid.n_points);
    for (std::size_t j = 0; j < grid.n_points; ++j) {
        const double phi = grid.center(j);
        const std::complex<double> e1 = std::polar(1.0, phi);
        std::complex<double> ek = e1;
        double acc = ck[0].real();
        for (std::size_t k = 1; k < d; ++k) {
            acc += 2.0 * (ck[k] * ek).real();
            ek *= e1;
        }
        out.values[j] = acc / kTwoPi;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Width formulas.
// ---------------------------------------------------------------------------
double gaussian_approx_width(double x_s, double sigma2_sq) {
    require_finite(x_s, "x_s");
    require_finite(sigma2_sq, "sigma2_sq");
    if (!(x_s > 0.0)) {
        throw std::invalid_argument("gaussian_approx_width: x_s must be positive");
    }
    if (sigma2_sq < 0.0) {
        throw std::invalid_argument("gaussian_approx_width: variance must be non-negative");
    }
    return std::sqrt(sigma2_sq) / x_s;
}

double step1_width(const EnergyBudget& b) {
    validate_budget(b);
    if (!(b.beta_s > 0.0)) {
        throw std::invalid_argument("step1_width: zero coherent fraction");
    }
    return 0.5 / std::sqrt(b.beta_s * b.N);
}

double step2_width(const EnergyBudget& b) {
    validate_budget(b);
    if (!(b.beta_s > 0.0) || !(b.beta_p > 0.0)) {
        throw std::invalid_argument("step2_width: zero photon fraction");
    }
    return 1.0 / (4.0 * std::sqrt(b.beta_s * b.beta_p) * b.N);
}

// ---------------------------------------------------------------------------
// Truncated-Gaussian second moment: for a centred Gaussian of std s observed
// only inside |x| < kappa s,
//   E[x^2] = s^2 f(kappa),  f(kappa) = 1 - sqrt(2/pi) kappa e^{-kappa^2/2}
//                                          / erf(kappa/sqrt(2)).
// f is increasing from 0 to 1, and f(kappa)/kappa^2 decreases from 1/3 (the
// uniform limit) to 0, so m2 = s^2 f(window/s) inverts by bisection in
// kappa = window/s.
// ---------------------------------------------------------------------------
double truncated_gaussian_factor(double kappa) {
    const double num = 2.0 * kappa * std::exp(-0.5 * kappa * kappa) /
                       std::sqrt(kTwoPi);
    const double den = std::erf(kappa / std::sqrt(2.0));
    return 1.0 - num / den;
}

double truncated_moment_width(double m2, double window) {
    if (m2 <= 0.0) return 0.0;
    const double target = m2 / (window * window);
    if (target >= 1.0 / 3.0 - 1e-12) {
        // At least as flat as uniform inside the window: report a width far
        // beyond the window so the caller widens (or gives up at pi/2).
        return window * 1e3;
    }
    double lo = 1e-3;
    double hi = 1e4;
    for (int i = 0; i < 60; ++i) {
        const double mid = std::sqrt(lo * hi);
        if (truncated_gaussian_factor(mid) / (mid * mid) > target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return window / std::sqrt(lo * hi);
}

// ---------------------------------------------------------------------------
// Mode-localized width of a density on the phase grid.  Cells whose distance
// from the centre crosses the window edge enter with the covered fraction
// f = clip((window - (|dev| - d/2)) / d, 0, 1) of their weight, which keeps
// the estimate continuous as the window moves across cell boundaries.
// ---------------------------------------------------------------------------
double numeric_width(const PhaseDensity& density) {
    validate_phase_grid(density.grid);
    const std::size_t n = density.grid.n_points;
    if (density.values.size() != n) {
        throw std::invalid_argument("numeric_width: density value count does not match its grid");
    }
    const double d = density.grid.spacing();
    double tot = 0.0, cx = 0.0, sy = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double w = density.values[k];
        require_finite(w, "density value");
        const double phi = density.grid.center(k);
        tot += w;
        cx += w * std::cos(phi);
        sy += w * std::sin(phi);
    }
    if (!(tot > 0.0)) {
        throw std::invalid_argument("numeric_width: density carries no mass");
    }
    if (std::hypot(cx, sy) / tot < 1e-6) return kInf;

    double centre = std::atan2(sy, cx);
    double window = 0.5 * kPi;
    const double floor_window = 2.0 * d;
    double s = kInf;
    for (int iter = 0; iter < 80; ++iter) {
        double m2 = 0.0;
        for (int pass = 0; pass < 2; ++pass) {
            double m0 = 0.0, acc = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                const double dev = wrap_angle(density.grid.center(k) - centre);
                double f = (window - (std::abs(dev) - 0.5 * d)) / d;
                if (f < 0.0) f = 0.0;
                if (f > 1.0) f = 1.0;
                const double we = density.values[k] * f;
                m0 += we;
                acc += pass == 0 ? we * dev : we * dev * dev;
            }
            if (!(m0 > 0.0)) return kInf;
            if (pass == 0) {
                centre = wrap_angle(centre + acc / m0);
            } else {
                m2 = acc / m0;
            }
        }
        s = truncated_moment_width(m2, window);
        if (s == 0.0) break;
        double next = kWidthWindowFactor * s;
        if (next > 0.5 * kPi) next = 0.5 * kPi;
        if (next < floor_window) next = floor_window;
        if (next == window) break;
        window = next;
    }
    return s > kPi ? kInf : s;
}

WidthDiagnostics width_diagnostics(const PhaseDensity& density) {
    validate_phase_grid(density.grid);
    const std::size_t n = density.grid.n_points;
    if (density.values.size() != n) {
        throw std::invalid_argument("width_diagnostics: density value count does not match its grid");
    }
    double tot = 0.0, cx = 0.0, sy = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double w = density.values[k];
        tot += w;
        cx += w * std::cos(density.grid.center(k));
        sy += w * std::sin(density.grid.center(k));
    }
    if (!(tot > 0.0)) {
        throw std::invalid_argument("width_diagnostics: density carries no mass");
    }
    const double r = std::hypot(cx, sy) / tot;
    WidthDiagnostics out;
    out.resultant_width = std::sqrt(-2.0 * std::log(r));
    const double mean = std::atan2(sy, cx);
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double dev = wrap_angle(density.grid.center(k) - mean);
        acc += density.values[k] * dev * dev;
    }
    out.linear_rms = std::sqrt(acc / tot);
    return out;
}

}  // namespace phasesim
