#include "phasesim/special.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace phasesim {

// ---------------------------------------------------------------------------
// erfcx(x) = exp(x^2) erfc(x)
//
// Three regimes:
//   x <  0   : reflection, erfcx(-x) = 2 exp(x^2) - erfcx(x).
//   0 <= x < 25 : exp(x^2) * std::erfc(x).  erfc underflows only past
//                 x ~ 26.6, so the product is exact to double precision here.
//   x >= 25  : Lentz evaluation of the Laplace continued fraction
//                 erfcx(x) = (1/sqrt(pi)) / (x + (1/2)/(x + 1/(x + (3/2)/(...))))
//              with partial numerators a_n = n/2.
// ---------------------------------------------------------------------------
double erfcx(double x) {
    if (std::isnan(x)) return x;
    if (x < 0.0) {
        // 2 exp(x^2) overflows near x < -26.6; by then the answer overflows
        // anyway, so let the arithmetic saturate naturally.
        return 2.0 * std::exp(x * x) - erfcx(-x);
    }
    if (x < 25.0) {
        return std::exp(x * x) * std::erfc(x);
    }
    // Modified Lentz algorithm for b0 + a1/(b1 + a2/(b2 + ...)) with
    // b0 = 0, b_n = x, a_1 = 1, a_n = (n-1)/2 for n >= 2.
    const double tiny = 1e-300;
    double f = tiny;
    double c = f;
    double d = 0.0;
    for (int n = 1; n <= 60; ++n) {
        const double a = (n == 1) ? 1.0 : 0.5 * (n - 1);
        const double b = x;
        d = b + a * d;
        if (d == 0.0) d = tiny;
        c = b + a / c;
        if (c == 0.0) c = tiny;
        d = 1.0 / d;
        const double delta = c * d;
        f *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    const double inv_sqrt_pi = 0.56418958354775628695;
    return inv_sqrt_pi * f;
}

// ---------------------------------------------------------------------------
// Regularized upper incomplete gamma Q(a, x).
//
// For x < a + 1 the lower series P(a, x) converges quickly:
//   P(a, x) = x^a e^{-x} / Gamma(a) * sum_{n>=0} x^n / (a (a+1) ... (a+n))
// and Q = 1 - P.  Otherwise the continued fraction for Q converges:
//   Q(a, x) = x^a e^{-x} / Gamma(a) * 1/(x+1-a- 1*(1-a)/(x+3-a- 2*(2-a)/(...)))
// evaluated with the modified Lentz algorithm.
// ---------------------------------------------------------------------------
double gammq(double a, double x) {
    if (!(a > 0.0) || !(x >= 0.0)) {
        throw std::invalid_argument("gammq: require a > 0 and x >= 0");
    }
    if (x == 0.0) return 1.0;
    const double lg = std::lgamma(a);
    if (x < a + 1.0) {
        // Lower series.
        double ap = a;
        double sum = 1.0 / a;
        double term = sum;
        for (int n = 0; n < 500; ++n) {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if (std::abs(term) < std::abs(sum) * 1e-16) break;
        }
        const double p = sum * std::exp(-x + a * std::log(x) - lg);
        return 1.0 - p;
    }
    // Continued fraction (modified Lentz).
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double f = d;
    for (int n = 1; n <= 500; ++n) {
        const double an = -n * (n - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        f *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return f * std::exp(-x + a * std::log(x) - lg);
}

double chi2_survival(double x, double dof) {
    if (!(dof > 0.0)) {
        throw std::invalid_argument("chi2_survival: dof must be positive");
    }
    if (!(x >= 0.0)) {
        throw std::invalid_argument("chi2_survival: x must be non-negative");
    }
    return gammq(0.5 * dof, 0.5 * x);
}

// ---------------------------------------------------------------------------
// Gauss-Legendre rule: Newton iteration on P_n starting from the Chebyshev
// approximation cos(pi (i + 0.75) / (n + 0.5)) for the i-th root.  Legendre
// values come from the three-term recurrence; the derivative from
//   P_n'(x) = n (x P_n(x) - P_{n-1}(x)) / (x^2 - 1).
// Roots are symmetric, so only the upper half is iterated.
// ---------------------------------------------------------------------------
GaussLegendreRule gauss_legendre(std::size_t n) {
    if (n == 0) {
        throw std::invalid_argument("gauss_legendre: n must be positive");
    }
    GaussLegendreRule rule;
    rule.nodes.assign(n, 0.0);
    rule.weights.assign(n, 0.0);
    const std::size_t m = (n + 1) / 2;
    const double pi = 3.14159265358979323846;
    for (std::size_t i = 0; i < m; ++i) {
        double z = std::cos(pi * (static_cast<double>(i) + 0.75) /
                            (static_cast<double>(n) + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            // Recurrence (j+1) P_{j+1} = (2j+1) x P_j - j P_{j-1}.
            double p0 = 1.0;
            double p1 = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - static_cast<double>(j) * p2) /
                     (static_cast<double>(j) + 1.0);
            }
            pp = static_cast<double>(n) * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        rule.nodes[i] = -z;
        rule.nodes[n - 1 - i] = z;
        const double w = 2.0 / ((1.0 - z * z) * pp * pp);
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) rule.nodes[m - 1] = 0.0;
    return rule;
}

}  // namespace phasesim
