#pragma once

// ---------------------------------------------------------------------------
// special.hpp -- scalar special functions used throughout the library.
//
//   erfcx(x)          scaled complementary error function exp(x^2) erfc(x)
//   gammq(a, x)       regularized upper incomplete gamma Q(a, x)
//   chi2_survival     survival function of the chi-square distribution
//   gauss_legendre    nodes and weights of the n-point Gauss-Legendre rule
//
// Everything here is deterministic scalar math with no external state.
// ---------------------------------------------------------------------------

#include <cstddef>
#include <vector>

namespace phasesim {

// Scaled complementary error function, exp(x^2) * erfc(x).  Stable for all
// finite x: for large positive arguments the direct product would underflow/
// overflow, so a continued-fraction expansion takes over; for negative
// arguments the reflection erfcx(-x) = 2 exp(x^2) - erfcx(x) is used.
double erfcx(double x);

// Regularized upper incomplete gamma function Q(a, x) = Gamma(a, x)/Gamma(a)
// for a > 0, x >= 0.  Series expansion for x < a + 1, continued fraction
// otherwise.
double gammq(double a, double x);

// Survival function P(X > x) for a chi-square variable with `dof` degrees of
// freedom: chi2_survival(x, dof) = gammq(dof/2, x/2).
double chi2_survival(double x, double dof);

// n-point Gauss-Legendre rule on [-1, 1].  Nodes are the roots of the
// Legendre polynomial P_n, found by Newton iteration from the Chebyshev
// initial guess; weights are 2 / ((1 - x^2) P_n'(x)^2).
struct GaussLegendreRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
GaussLegendreRule gauss_legendre(std::size_t n);

}  // namespace phasesim
