#pragma once

#include <utility>

namespace invsub::specfun {

// Two-parameter Mittag-Leffler E_{a,b}; a > 0, b any real.
struct MLParams {
    double a = 1.0;
    double b = 1.0;
};

// eps_n(t) = t^{alpha*n + beta - 1} * E^{(n)}_{alpha,beta}(sign * a * t^alpha),
// the kernel whose Laplace transform is n! s^{alpha-beta} / (s^alpha - sign*a)^{n+1}.
struct EpsParams {
    int n = 0;        // derivative index, >= 0
    double a = 1.0;   // rate magnitude, > 0
    double alpha = 1.0;
    double beta = 1.0;
    int sign = -1;    // +1 or -1, sign of the series argument
};

// True when x sits on a Gamma pole (nonpositive integer within 1e-12).
bool is_gamma_pole(double x);

// Gamma(x) via Lanczos (g = 7, 9 coefficients) with reflection for x < 0.5.
// Throws PoleError at nonpositive integers.
double gamma_real(double x);

// 1/Gamma(x): exactly 0 at poles, 0 when Gamma overflows, 1/gamma_real otherwise.
double inv_gamma(double x);

// Gamma(p)/Gamma(q). Returns 0 when q is a pole and p is not; throws PoleError
// when p is a pole. Uses log-Gamma differences once either argument leaves the
// direct range of gamma_real.
double gamma_ratio(double p, double q);

// E_{a,b}(z) by direct series with compensated summation. Throws
// ConvergenceError when the series exceeds its term budget or when
// cancellation/overflow make the double-precision result untrustworthy.
double ml(const MLParams& p, double z);
double ml(double a, double b, double z);

// n-th z-derivative of E_{a,b}: sum_k (k+n)!/k! z^k / Gamma(a k + a n + b).
double ml_deriv(int n, const MLParams& p, double z);
double ml_deriv(int n, double a, double b, double z);

// eps_n at time t >= 0. At t = 0 the t-power decides: positive exponent gives 0,
// zero exponent gives the k = 0 series term, negative exponent is a DomainError.
double eps_fn(const EpsParams& p, double t);

struct Quadrature {
    double value = 0.0;
    double error_estimate = 0.0;
};

// int_0^T exp(-s t) eps_n(t) dt by adaptive Gauss-Kronrod 7/15.
// The overload without T truncates at T = 30/s (tail below ~1e-12 of scale).
Quadrature laplace_quadrature(const EpsParams& p, double s, double T);
Quadrature laplace_quadrature(const EpsParams& p, double s);

// The closed-form transform n! s^{alpha-beta} / (s^alpha - sign*a)^{n+1}.
double eps_laplace_exact(const EpsParams& p, double s);

// Compact invariant suite backing `selftest specfun`; returns failure count.
int selftest(bool verbose);

} // namespace invsub::specfun
