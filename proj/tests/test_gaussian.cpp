#include "doctest.h"

#include "phasesim/gaussian.hpp"

#include <cmath>
#include <stdexcept>

using namespace phasesim;

namespace {

constexpr double kXs1 = 1.2247448713915890491;        // sqrt(3/2)
constexpr double kRs1 = 0.65847894846240835431;       // asinh(sqrt(1/2))
constexpr double kXs2 = 1.0606601717798212866;        // sqrt(9/8)
constexpr double kRs2 = 0.57940518021497340587;       // asinh(sqrt(3/8))

double sup_diff(const PlaneGrid& a, const PlaneGrid& b) {
    double sup = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        sup = std::max(sup, std::abs(a.values[i] - b.values[i]));
    }
    return sup;
}

PlaneGrid analytic_grid(const GaussianModel& model, double L, std::size_t M) {
    PlaneGrid grid{L, M, std::vector<double>(M * M)};
    for (std::size_t i = 0; i < M; ++i) {
        for (std::size_t j = 0; j < M; ++j) {
            grid.values[i * M + j] =
                wigner_gaussian(model, {grid.coord(i), grid.coord(j)});
        }
    }
    return grid;
}

} // namespace

// ---------------------------------------------------------------------------
// Aligned variances and model composition.
// ---------------------------------------------------------------------------
TEST_CASE("q_variances reference values") {
    const auto vac = q_variances(0.0);
    CHECK(vac[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(vac[1] == doctest::Approx(0.5).epsilon(1e-15));

    const auto sq = q_variances(kRs1);
    CHECK(sq[0] == doctest::Approx(1.1830127018922193234).epsilon(1e-12));
    CHECK(sq[1] == doctest::Approx(0.31698729810778067662).epsilon(1e-12));
    // sigma1^2 + sigma2^2 = (2 + 2 cosh 2r)/4 and sigma1^2 sigma2^2 grows with r.
    CHECK(sq[0] + sq[1] ==
          doctest::Approx(0.5 + 0.5 * std::cosh(2.0 * kRs1)).epsilon(1e-13));
}

TEST_CASE("composed_model with the vacuum probe reduces to q_variances") {
    for (double r = 0.0; r <= 3.0; r += 0.0612) {
        const auto model = composed_model({0.8, r}, {0.0, 0.0});
        const auto v = q_variances(r);
        CHECK(std::abs(model.cov.xx - v[0]) < 1e-14 * v[0]);
        CHECK(std::abs(model.cov.yy - v[1]) < 1e-14);
        CHECK(model.cov.xy == 0.0);
        CHECK(model.mean[0] == 0.8);
        CHECK(model.mean[1] == 0.0);
    }
}

TEST_CASE("composed_model covariance for a rotated squeezed probe") {
    const auto model = composed_model({kXs1, kRs1}, {0.65848, 0.4});
    CHECK(model.mean[0] == doctest::Approx(kXs1).epsilon(1e-15));
    CHECK(model.mean[1] == 0.0);
    CHECK(model.cov.xx == doctest::Approx(1.734697199806408).epsilon(1e-12));
    CHECK(model.cov.xy == doctest::Approx(0.31062505346682595).epsilon(1e-12));
    CHECK(model.cov.yy == doctest::Approx(0.26530462151233819).epsilon(1e-12));
}

TEST_CASE("composed covariance is signal covariance plus rotated probe covariance") {
    const SqueezedSignalParams s{0.7, 0.45};
    const ProbeParams p{0.6, -1.1};
    const auto sum = composed_model(s, p);
    const auto sig = signal_model(s);
    const auto prb = probe_model(p);
    CHECK(std::abs(sum.cov.xx - (sig.cov.xx + prb.cov.xx)) < 1e-15);
    CHECK(std::abs(sum.cov.xy - (sig.cov.xy + prb.cov.xy)) < 1e-15);
    CHECK(std::abs(sum.cov.yy - (sig.cov.yy + prb.cov.yy)) < 1e-15);
    // The probe Wigner function is centred at the origin with det = 1/16.
    CHECK(prb.mean[0] == 0.0);
    CHECK(prb.mean[1] == 0.0);
    CHECK(det(prb.cov) == doctest::Approx(1.0 / 16.0).epsilon(1e-13));
}

TEST_CASE("aligned squeezed probe sharpens the Im axis") {
    // At psi_p = 0 the composed yy variance is (e^{-2 r_s} + e^{-2 r_p})/4.
    const auto model = composed_model({kXs2, kRs2}, {kRs1, 0.0});
    const double want_yy = (std::exp(-2.0 * kRs2) + std::exp(-2.0 * kRs1)) / 4.0;
    const double want_xx = (std::exp(2.0 * kRs2) + std::exp(2.0 * kRs1)) / 4.0;
    CHECK(model.cov.yy == doctest::Approx(want_yy).epsilon(1e-13));
    CHECK(model.cov.xx == doctest::Approx(want_xx).epsilon(1e-13));
    CHECK(model.cov.xy == 0.0);
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(validate_signal({-0.1, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(validate_signal({0.0, -0.1}), std::invalid_argument);
    CHECK_THROWS_AS(validate_signal({std::nan(""), 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(validate_signal({0.0, 21.0}), std::domain_error);
    CHECK_THROWS_AS(validate_probe({-1.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(validate_probe({21.0, 0.0}), std::domain_error);
    CHECK_NOTHROW(validate_signal({3.0, 2.0}));
    CHECK_NOTHROW(validate_probe({0.0, -7.0}));
    GaussianModel bad;
    bad.cov = {1.0, 2.0, 1.0};  // negative determinant
    CHECK_THROWS_AS(validate_model(bad), std::invalid_argument);
}

// ---------------------------------------------------------------------------
// Matrix helpers.
// ---------------------------------------------------------------------------
TEST_CASE("sqrt_sym2 squares back to the input") {
    const Mat2 mats[] = {
        {0.25, 0.0, 0.25},
        {1.1830127018922193, 0.0, 0.31698729810778068},
        {1.734697199806408, 0.31062505346682595, 0.26530462151233819},
    };
    for (const auto& m : mats) {
        const auto s = sqrt_sym2(m);
        const double xx = s.xx * s.xx + s.xy * s.xy;
        const double xy = s.xx * s.xy + s.xy * s.yy;
        const double yy = s.xy * s.xy + s.yy * s.yy;
        CHECK(std::abs(xx - m.xx) < 1e-13);
        CHECK(std::abs(xy - m.xy) < 1e-13);
        CHECK(std::abs(yy - m.yy) < 1e-13);
        CHECK(det(s) > 0.0);
    }
    CHECK_THROWS_AS(sqrt_sym2({1.0, 2.0, 1.0}), std::invalid_argument);
}

// ---------------------------------------------------------------------------
// Wigner densities on the plane.
// ---------------------------------------------------------------------------
TEST_CASE("wigner_gaussian peak values") {
    // Any pure squeezed state has det cov = 1/16, so the peak density is
    // 1/(2 pi sqrt(det)) = 2/pi.
    const double peak = 2.0 / M_PI;
    CHECK(wigner_gaussian(SqueezedSignalParams{0.0, 0.0}, {0.0, 0.0}) ==
          doctest::Approx(peak).epsilon(1e-14));
    CHECK(wigner_gaussian(SqueezedSignalParams{1.0, 0.0}, {1.0, 0.0}) ==
          doctest::Approx(peak).epsilon(1e-14));
    CHECK(wigner_gaussian(SqueezedSignalParams{0.0, 1.3}, {0.0, 0.0}) ==
          doctest::Approx(peak).epsilon(1e-13));
    CHECK(wigner_gaussian(ProbeParams{0.9, 0.7}, {0.0, 0.0}) ==
          doctest::Approx(peak).epsilon(1e-13));
}

TEST_CASE("wigner_on_grid integrates to one and rejects clipped states") {
    const auto vac = wigner_on_grid(SqueezedSignalParams{0.0, 0.0}, 6.0, 241);
    CHECK(std::abs(trapezoid_integral(vac) - 1.0) < 1e-12);

    // Point-symmetric states sample to a point-symmetric grid (up to the
    // one-ulp coordinate asymmetry of the generated axes in the far tails).
    const auto sq = wigner_on_grid(SqueezedSignalParams{0.0, 0.9}, 6.0, 121);
    const std::size_t M = sq.M;
    for (std::size_t i = 0; i < M; ++i) {
        for (std::size_t j = 0; j < M; ++j) {
            const double va = sq.values[i * M + j];
            const double vb = sq.values[(M - 1 - i) * M + (M - 1 - j)];
            CHECK(std::abs(va - vb) <= 1e-12 * std::max(va, vb) + 1e-300);
        }
    }

    CHECK_NOTHROW(wigner_on_grid(SqueezedSignalParams{1.2, 0.8}, 6.0, 241));
    CHECK_THROWS_AS(wigner_on_grid(SqueezedSignalParams{2.0, 1.0}, 6.0, 241),
                    std::domain_error);
    CHECK_THROWS_AS(wigner_on_grid(SqueezedSignalParams{5.0, 0.0}, 1.0, 121),
                    std::domain_error);
    CHECK_THROWS_AS(wigner_on_grid(SqueezedSignalParams{0.0, 0.0}, 6.0, 240),
                    std::invalid_argument);
    CHECK_THROWS_AS(wigner_on_grid(SqueezedSignalParams{0.0, 0.0}, 0.0, 241),
                    std::invalid_argument);
}

TEST_CASE("default_grid_halfwidth covers the state") {
    GaussianModel vac;
    CHECK(default_grid_halfwidth(vac) == 6.0);
    GaussianModel wide;
    wide.mean = {4.0, 0.0};
    wide.cov = {1.0, 0.0, 0.25};
    CHECK(default_grid_halfwidth(wide) == doctest::Approx(10.0).epsilon(1e-13));
}

// ---------------------------------------------------------------------------
// Grid convolution against the analytic composed Gaussian.
// ---------------------------------------------------------------------------
TEST_CASE("grid_convolution five-point reference values") {
    // The coarse 5x5 vacuum grid clips too much mass for wigner_on_grid's
    // normalization gate, so it is sampled directly.
    const auto a = analytic_grid(GaussianModel{}, 2.0, 5);
    const auto out = grid_convolution(a, a);
    // Raw cross-correlation values of the centre row, before the final
    // renormalization by the raw trapezoidal integral 1.0338241049054364.
    const double raw[5] = {0.00797684272771776, 0.11375522287951778,
                           0.43552095059774243, 0.11375522287951782,
                           0.00797684272771776};
    const double raw_trapz = 1.0338241049054364;
    for (std::size_t j = 0; j < 5; ++j) {
        CHECK(out.values[2 * 5 + j] ==
              doctest::Approx(raw[j] / raw_trapz).epsilon(1e-12));
    }
    CHECK(std::abs(trapezoid_integral(out) - 1.0) < 1e-14);
}

TEST_CASE("grid_convolution of vacuum grids matches the analytic sum") {
    const std::size_t M = 81;
    const auto a = wigner_on_grid(SqueezedSignalParams{0.0, 0.0}, 6.0, M);
    const auto conv = grid_convolution(a, a);
    const auto want = analytic_grid(composed_model({0.0, 0.0}, {0.0, 0.0}), 6.0, M);
    CHECK(sup_diff(conv, want) < 1e-12);
}

TEST_CASE("grid_convolution of a squeezed signal with the vacuum probe") {
    const std::size_t M = 241;
    const double L = 6.0;
    const auto ws = wigner_on_grid(SqueezedSignalParams{1.22474, 0.65848}, L, M);
    const auto wp = wigner_on_grid(ProbeParams{0.0, 0.0}, L, M);
    const auto conv = grid_convolution(ws, wp);
    const auto want =
        analytic_grid(composed_model({1.22474, 0.65848}, {0.0, 0.0}), L, M);
    CHECK(sup_diff(conv, want) < 1e-4);
    // Discrete convolution of nonnegative grids stays nonnegative.
    double min_v = 0.0;
    for (double v : conv.values) min_v = std::min(min_v, v);
    CHECK(min_v >= -1e-12);
}

TEST_CASE("grid_convolution converges to the signal as the probe narrows") {
    const std::size_t M = 121;
    const double L = 6.0;
    const auto ws = wigner_on_grid(SqueezedSignalParams{1.0, 0.5}, L, M);
    auto narrow = [&](double sigma) {
        GaussianModel g;
        g.cov = {sigma * sigma, 0.0, sigma * sigma};
        const auto wg = wigner_on_grid(g, L, M);
        return sup_diff(grid_convolution(ws, wg), ws);
    };
    const double dev_coarse = narrow(0.2);
    const double dev_fine = narrow(0.1);
    CHECK(dev_fine < 0.05);
    CHECK(dev_fine < 0.45 * dev_coarse);
}

TEST_CASE("grid_convolution rejects mismatched geometries") {
    const auto a = wigner_on_grid(GaussianModel{}, 6.0, 41);
    const auto b = wigner_on_grid(GaussianModel{}, 6.0, 43);
    const auto c = wigner_on_grid(GaussianModel{}, 6.5, 41);
    CHECK_THROWS_AS(grid_convolution(a, b), std::invalid_argument);
    CHECK_THROWS_AS(grid_convolution(a, c), std::invalid_argument);
}

// ---------------------------------------------------------------------------
// Characteristic function and Fourier inversion.
// ---------------------------------------------------------------------------
TEST_CASE("characteristic_gaussian known values") {
    GaussianModel vac;
    CHECK(characteristic_gaussian(vac, {0.0, 0.0}) == std::complex<double>(1.0, 0.0));
    for (double kx : {0.3, 1.0, 2.5}) {
        for (double ky : {-1.2, 0.0, 0.7}) {
            const auto chi = characteristic_gaussian(vac, {kx, ky});
            const double want = std::exp(-(kx * kx + ky * ky) / 8.0);
            CHECK(std::abs(chi - std::complex<double>(want, 0.0)) < 1e-14);
        }
    }

    const auto model = composed_model({kXs1, kRs1}, {0.65848, 0.4});
    const std::array<double, 2> k = {0.8, -0.5};
    const auto chi = characteristic_gaussian(model, k);
    const double quad = model.cov.xx * k[0] * k[0] + 2.0 * model.cov.xy * k[0] * k[1] +
                        model.cov.yy * k[1] * k[1];
    CHECK(std::abs(std::abs(chi) - std::exp(-0.5 * quad)) < 1e-14);
    const double phase = model.mean[0] * k[0] + model.mean[1] * k[1];
    CHECK(std::arg(chi) == doctest::Approx(phase).epsilon(1e-12));
}

TEST_CASE("kb_by_fourier reproduces the composed Gaussian") {
    const std::size_t M = 121;
    const double L = 6.0;
    {
        const auto got = kb_by_fourier(signal_model({0.0, 0.0}),
                                       probe_model({0.0, 0.0}), L, M);
        const auto want = analytic_grid(composed_model({0.0, 0.0}, {0.0, 0.0}), L, M);
        CHECK(sup_diff(got, want) < 1e-10);
    }
    {
        const auto got = kb_by_fourier(signal_model({kXs2, kRs2}),
                                       probe_model({kRs1, 0.3}), L, M);
        const auto want =
            analytic_grid(composed_model({kXs2, kRs2}, {kRs1, 0.3}), L, M);
        CHECK(sup_diff(got, want) < 1e-4);
    }
    CHECK_THROWS_AS(kb_by_fourier(signal_model({0.0, 0.0}), probe_model({0.0, 0.0}),
                                  6.0, 121, 30.0, 120),
                    std::invalid_argument);
}
