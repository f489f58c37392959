#include "phasesim/gaussian.hpp"

#include <cmath>
#include <stdexcept>

namespace phasesim {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kMaxSqueezing = 20.0;  // e^{2r} stays comfortably in range

void require_finite(double v, const char* what) {
    if (!std::isfinite(v)) {
        throw std::invalid_argument(std::string(what) + " must be finite");
    }
}

// R(psi) diag(a, b) R(psi)^T for the 2D rotation R.
Mat2 rotated_diag(double a, double b, double psi) {
    const double c = std::cos(psi);
    const double s = std::sin(psi);
    Mat2 m;
    m.xx = a * c * c + b * s * s;
    m.yy = a * s * s + b * c * c;
    m.xy = (a - b) * c * s;
    return m;
}

}  // namespace

double det(const Mat2& m) { return m.xx * m.yy - m.xy * m.xy; }

double trace(const Mat2& m) { return m.xx + m.yy; }

Mat2 sqrt_sym2(const Mat2& m) {
    const double d = det(m);
    if (!(d > 0.0) || !(m.xx > 0.0)) {
        throw std::invalid_argument("sqrt_sym2: matrix must be positive definite");
    }
    const double s = std::sqrt(d);
    const double t = std::sqrt(trace(m) + 2.0 * s);
    return {(m.xx + s) / t, m.xy / t, (m.yy + s) / t};
}

void validate_signal(const SqueezedSignalParams& p) {
    require_finite(p.x_s, "x_s");
    require_finite(p.r_s, "r_s");
    if (p.x_s < 0.0) throw std::invalid_argument("x_s must be non-negative");
    if (p.r_s < 0.0) throw std::invalid_argument("r_s must be non-negative");
    if (p.r_s > kMaxSqueezing) {
        throw std::domain_error("r_s exceeds the overflow guard (r <= 20)");
    }
}

void validate_probe(const ProbeParams& p) {
    require_finite(p.r_p, "r_p");
    require_finite(p.psi_p, "psi_p");
    if (p.r_p < 0.0) throw std::invalid_argument("r_p must be non-negative");
    if (p.r_p > kMaxSqueezing) {
        throw std::domain_error("r_p exceeds the overflow guard (r <= 20)");
    }
}

void validate_model(const GaussianModel& m) {
    require_finite(m.mean[0], "mean");
    require_finite(m.mean[1], "mean");
    require_finite(m.cov.xx, "cov");
    require_finite(m.cov.xy, "cov");
    require_finite(m.cov.yy, "cov");
    if (!(m.cov.xx > 0.0) || !(det(m.cov) > 0.0)) {
        throw std::invalid_argument("covariance must be positive definite");
    }
}

// ---------------------------------------------------------------------------
// Aligned outcome variances with the vacuum probe:
//   sigma1^2 = (1 + e^{2 r_s})/4,  sigma2^2 = (1 + e^{-2 r_s})/4,
// the sum of the signal's squeezed variances e^{+-2r}/4 and the vacuum
// quarter contributed by the probe.
// ---------------------------------------------------------------------------
std::array<double, 2> q_variances(double r_s) {
    validate_signal({0.0, r_s});
    const double e2r = std::exp(2.0 * r_s);
    return {0.25 * (1.0 + e2r), 0.25 * (1.0 + 1.0 / e2r)};
}

GaussianModel signal_model(const SqueezedSignalParams& s) {
    validate_signal(s);
    const double e2r = std::exp(2.0 * s.r_s);
    GaussianModel m;
    m.mean = {s.x_s, 0.0};
    m.cov = {0.25 * e2r, 0.0, 0.25 / e2r};
    return m;
}

GaussianModel probe_model(const ProbeParams& p) {
    validate_probe(p);
    const double e2r = std::exp(2.0 * p.r_p);
    GaussianModel m;
    m.mean = {0.0, 0.0};
    m.cov = rotated_diag(0.25 * e2r, 0.25 / e2r, p.psi_p);
    return m;
}

// ---------------------------------------------------------------------------
// Outcome model: convolution of Gaussians adds means and covariances.  The
// probe enters reflected, but reflection leaves a centred Gaussian invariant,
// so K_b has mean (x_s, 0) and covariance cov_signal + cov_probe(psi_p).
// ---------------------------------------------------------------------------
GaussianModel composed_model(const SqueezedSignalParams& s, const ProbeParams& p) {
    const GaussianModel a = signal_model(s);
    const GaussianModel b = probe_model(p);
    GaussianModel m;
    m.mean = a.mean;
    m.cov = {a.cov.xx + b.cov.xx, a.cov.xy + b.cov.xy, a.cov.yy + b.cov.yy};
    return m;
}

double wigner_gaussian(const GaussianModel& model, const std::array<double, 2>& point) {
    validate_model(model);
    require_finite(point[0], "point");
    require_finite(point[1], "point");
    const double d = det(model.cov);
    const double dx = point[0] - model.mean[0];
    const double dy = point[1] - model.mean[1];
    // quadratic form d^T cov^{-1} d via the adjugate
    const double q = (model.cov.yy * dx * dx - 2.0 * model.cov.xy * dx * dy +
                      model.cov.xx * dy * dy) / d;
    return std::exp(-0.5 * q) / (2.0 * kPi * std::sqrt(d));
}

double wigner_gaussian(const SqueezedSignalParams& s, const std::array<double, 2>& point) {
    return wigner_gaussian(signal_model(s), point);
}

double wigner_gaussian(const ProbeParams& p, const std::array<double, 2>& point) {
    return wigner_gaussian(probe_model(p), point);
}

double trapezoid_integral(const PlaneGrid& grid) {
    if (grid.M < 3 || grid.values.size() != grid.M * grid.M) {
        throw std::invalid_argument("trapezoid_integral: malformed grid");
    }
    const std::size_t M = grid.M;
    double sum = 0.0;
    for (std::size_t i = 0; i < M; ++i) {
        const double wi = (i == 0 || i == M - 1) ? 0.5 : 1.0;
        double row = 0.0;
        const double* v = grid.values.data() + i * M;
        for (std::size_t j = 0; j < M; ++j) {
            const double wj = (j == 0 || j == M - 1) ? 0.5 : 1.0;
            row += wj * v[j];
        }
        sum += wi * row;
    }
    const double h = grid.step();
    return sum * h * h;
}

namespace {

void validate_grid_shape(double L, std::size_t M) {
    if (!(L > 0.0) || !std::isfinite(L)) {
        throw std::invalid_argument("grid half-width must be positive and finite");
    }
    if (M < 3 || M % 2 == 0) {
        throw std::invalid_argument("grid must have an odd number of points >= 3");
    }
}

}  // namespace

PlaneGrid wigner_on_grid(const GaussianModel& model, double L, std::size_t M) {
    validate_model(model);
    validate_grid_shape(L, M);
    PlaneGrid grid;
    grid.L = L;
    grid.M = M;
    grid.values.resize(M * M);
    const double d = det(model.cov);
    const double ixx = model.cov.yy / d;
    const double ixy = -model.cov.xy / d;
    const double iyy = model.cov.xx / d;
    const double norm = 1.0 / (2.0 * kPi * std::sqrt(d));
    for (std::size_t i = 0; i < M; ++i) {
        const double dx = grid.coord(i) - model.mean[0];
        for (std::size_t j = 0; j < M; ++j) {
            const double dy = grid.coord(j) - model.mean[1];
            const double q = ixx * dx * dx + 2.0 * ixy * dx * dy + iyy * dy * dy;
            grid.values[i * M + j] = norm * std::exp(-0.5 * q);
        }
    }
    const double deficit = std::abs(1.0 - trapezoid_integral(grid));
    if (deficit > 1e-3) {
        throw std::domain_error("wigner_on_grid: grid clips the state (integral deficit " +
                                std::to_string(deficit) + ")");
    }
    return grid;
}

PlaneGrid wigner_on_grid(const SqueezedSignalParams& s, double L, std::size_t M) {
    return wigner_on_grid(signal_model(s), L, M);
}

PlaneGrid wigner_on_grid(const ProbeParams& p, double L, std::size_t M) {
    return wigner_on_grid(probe_model(p), L, M);
}

double default_grid_halfwidth(const GaussianModel& model) {
    validate_model(model);
    const double half_gap = 0.5 * std::hypot(model.cov.xx - model.cov.yy,
                                             2.0 * model.cov.xy);
    const double lam_max = 0.5 * trace(model.cov) + half_gap;
    const double reach = std::hypot(model.mean[0], model.mean[1]) +
                         6.0 * std::sqrt(lam_max);
    return reach > 6.0 ? reach : 6.0;
}

// ---------------------------------------------------------------------------
// Direct evaluation of K(z) = integral A(z + b) B(b) d^2 b on matching grids:
//   K[i][j] = h^2 sum_{k,l} A[i+k-c][j+l-c] B[k][l],   c = (M-1)/2,
// with zero padding outside the grid.  The inner sum over l runs over
// contiguous rows of both arrays, which keeps the O(M^4) loop vectorizable.
// The result is renormalized to unit trapezoidal integral, absorbing both the
// zero-padding loss and the measure convention of the convolution.
// ---------------------------------------------------------------------------
PlaneGrid grid_convolution(const PlaneGrid& w_signal, const PlaneGrid& w_probe) {
    if (w_signal.M != w_probe.M || w_signal.L != w_probe.L) {
        throw std::invalid_argument("grid_convolution: grid geometries differ");
    }
    const std::size_t M = w_signal.M;
    validate_grid_shape(w_signal.L, M);
    if (w_signal.values.size() != M * M || w_probe.values.size() != M * M) {
        throw std::invalid_argument("grid_convolution: malformed grid values");
    }
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(M);
    const std::ptrdiff_t c = (n - 1) / 2;
    PlaneGrid out;
    out.L = w_signal.L;
    out.M = M;
    out.values.assign(M * M, 0.0);
    const double* A = w_signal.values.data();
    const double* B = w_probe.values.data();
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        double* K = out.values.data() + i * n;
        const std::ptrdiff_t k_lo = (c - i > 0) ? c - i : 0;
        const std::ptrdiff_t k_hi = (n - 1 + c - i < n - 1) ? n - 1 + c - i : n - 1;
        for (std::ptrdiff_t k = k_lo; k <= k_hi; ++k) {
            const double* a_row = A + (i + k - c) * n;
            const double* b_row = B + k * n;
            for (std::ptrdiff_t j = 0; j < n; ++j) {
                const std::ptrdiff_t l_lo = (c - j > 0) ? c - j : 0;
                const std::ptrdiff_t l_hi = (n - 1 + c - j < n - 1) ? n - 1 + c - j : n - 1;
                const double* a = a_row + (j - c);
                double acc = 0.0;
                for (std::ptrdiff_t l = l_lo; l <= l_hi; ++l) {
                    acc += a[l] * b_row[l];
                }
                K[j] += acc;
            }
        }
    }
    const double h = out.step();
    for (double& v : out.values) v *= h * h;
    const double total = trapezoid_integral(out);
    if (!(total > 0.0)) {
        throw std::runtime_error("grid_convolution: degenerate result");
    }
    for (double& v : out.values) v /= total;
    return out;
}

std::complex<double> characteristic_gaussian(const GaussianModel& model,
                                             const std::array<double, 2>& k) {
    validate_model(model);
    require_finite(k[0], "k");
    require_finite(k[1], "k");
    const double lin = k[0] * model.mean[0] + k[1] * model.mean[1];
    const double quad = model.cov.xx * k[0] * k[0] + 2.0 * model.cov.xy * k[0] * k[1] +
                        model.cov.yy * k[1] * k[1];
    return std::exp(std::complex<double>(-0.5 * quad, lin));
}

// ---------------------------------------------------------------------------
// Fourier route to K_b: the characteristic function of the outcome variable
// is Xi(k) = chi_a(k) chi_b(-k), inverted by a separable discrete transform
//   K[i][j] = Re( sum_{a,b} e^{-i x_i k_a} Xi[a][b] e^{-i y_j k_b} )
//             * dk^2 / (2 pi)^2
// computed as two complex matrix products, then renormalized.
// ---------------------------------------------------------------------------
PlaneGrid kb_by_fourier(const GaussianModel& signal, const GaussianModel& probe,
                        double L, std::size_t M, double k_max, std::size_t m_k) {
    validate_model(signal);
    validate_model(probe);
    validate_grid_shape(L, M);
    if (!(k_max > 0.0) || m_k < 3 || m_k % 2 == 0) {
        throw std::invalid_argument("kb_by_fourier: need k_max > 0 and odd m_k >= 3");
    }
    const double dk = 2.0 * k_max / static_cast<double>(m_k - 1);
    std::vector<double> kv(m_k);
    for (std::size_t a = 0; a < m_k; ++a) {
        kv[a] = -k_max + static_cast<double>(a) * dk;
    }
    // Xi on the k-grid.
    std::vector<std::complex<double>> xi(m_k * m_k);
    for (std::size_t a = 0; a < m_k; ++a) {
        for (std::size_t b = 0; b < m_k; ++b) {
            xi[a * m_k + b] = characteristic_gaussian(signal, {kv[a], kv[b]}) *
                              characteristic_gaussian(probe, {-kv[a], -kv[b]});
        }
    }
    // Plane-coordinate phase factors (the x and y grids coincide).
    PlaneGrid out;
    out.L = L;
    out.M = M;
    out.values.assign(M * M, 0.0);
    std::vector<std::complex<double>> ph(M * m_k);
    for (std::size_t i = 0; i < M; ++i) {
        const double x = out.coord(i);
        for (std::size_t a = 0; a < m_k; ++a) {
            ph[i * m_k + a] = std::exp(std::complex<double>(0.0, -x * kv[a]));
        }
    }
    // T[a][j] = sum_b Xi[a][b] ph[j][b]
    std::vector<std::complex<double>> t(m_k * M, {0.0, 0.0});
    for (std::size_t a = 0; a < m_k; ++a) {
        for (std::size_t j = 0; j < M; ++j) {
            std::complex<double> acc = 0.0;
            const std::complex<double>* xr = xi.data() + a * m_k;
            const std::complex<double>* pr = ph.data() + j * m_k;
            for (std::size_t b = 0; b < m_k; ++b) acc += xr[b] * pr[b];
            t[a * M + j] = acc;
        }
    }
    const double scale = dk * dk / (4.0 * kPi * kPi);
    for (std::size_t i = 0; i < M; ++i) {
        const std::complex<double>* pr = ph.data() + i * m_k;
        for (std::size_t j = 0; j < M; ++j) {
            std::complex<double> acc = 0.0;
            for (std::size_t a = 0; a < m_k; ++a) acc += pr[a] * t[a * M + j];
            out.values[i * M + j] = acc.real() * scale;
        }
    }
    const double total = trapezoid_integral(out);
    if (!(total > 0.0)) {
        throw std::runtime_error("kb_by_fourier: degenerate result");
    }
    for (double& v : out.values) v /= total;
    return out;
}

}  // namespace phasesim
