#pragma once

#include <optional>
#include <string>
#include <vector>

namespace invsub::fraccalc {

// One Mittag-Leffler factor in x: E_{order}(rate * x^order)^mult  (E_{b} = E_{b,1}).
struct MlFactor {
    double order = 1.0;
    double rate = 1.0;
    int mult = 1;
};

// coeff * x^power * prod of ML factors. ml kept sorted by (order, rate).
struct Monomial {
    double coeff = 0.0;
    double power = 0.0;
    std::vector<MlFactor> ml;
};

// Canonical sum of monomials: sorted by (power, ml), like terms merged,
// relative noise below 1e-14 pruned.
struct FuncExpr {
    std::vector<Monomial> terms;
};

// Strict weak ordering on the (power, ml) key, ignoring coeff. Exact
// dictionary comparison, suitable for sorting and ordered containers.
struct MonomialKeyLess {
    bool operator()(const Monomial& a, const Monomial& b) const;
};
// Key equality with the canonicalization tolerance (1e-9) on powers and
// ML parameters; multiplicities must match exactly.
bool monomial_key_equal(const Monomial& a, const Monomial& b);

// E^{(n)}_{a,b}(rate * t^a), the building block of the closed-form time factors.
struct MlDeriv {
    int n = 0;
    double a = 1.0;
    double b = 1.0;
    double rate = 1.0;
};

// coeff * t^power [* MlDeriv factor]
struct TimeTerm {
    double coeff = 0.0;
    double power = 0.0;
    std::optional<MlDeriv> ml;
};

// front * sum_k sign^k/k! * t^{p+qk} * E^{(k)}_{a, b0+rk}(rate * t), truncated at kmax.
struct TimeSeries {
    double front = 1.0;
    int sign = -1; // +1 or -1
    double p = 0.0;
    double q = 1.0; // > 0
    double a = 1.0;
    double b0 = 1.0;
    double r = 1.0;
    double rate = -1.0;
    int kmax = 40;
};

struct TimeExpr {
    std::vector<TimeTerm> terms;
    std::vector<TimeSeries> series;
};

// ---- construction / canonical form -------------------------------------------------

FuncExpr fe_power(double coeff, double power);
FuncExpr fe_ml(double coeff, double power, const MlFactor& f);
FuncExpr canonical(FuncExpr e);
FuncExpr fe_add(const FuncExpr& a, const FuncExpr& b);
FuncExpr fe_sub(const FuncExpr& a, const FuncExpr& b);
FuncExpr fe_mul(const FuncExpr& a, const FuncExpr& b);
FuncExpr fe_scale(const FuncExpr& a, double c);
bool fe_is_zero(const FuncExpr& a);

TimeExpr te_power(double coeff, double power);
TimeExpr te_ml(double coeff, double power, const MlDeriv& d);
TimeExpr te_canonical(TimeExpr e);
TimeExpr te_add(const TimeExpr& a, const TimeExpr& b);
TimeExpr te_scale(const TimeExpr& a, double c);
bool te_is_constant(const TimeExpr& a);       // single pure-power term t^0, or zero
double te_constant_value(const TimeExpr& a);
// product with at most one ML/series factor surviving per term;
// throws UnsupportedTermError on shapes outside the closed algebra
TimeExpr te_mul(const TimeExpr& a, const TimeExpr& b);

// ---- exact fractional rules --------------------------------------------------------

// Caputo d^beta in x. Handles pure powers (power rule, with the integer kill
// set giving exact zero) and single matching ML factors E_beta(rate x^beta).
FuncExpr caputo_x(const FuncExpr& e, double beta);

// Caputo d^mu in t on pure powers, plus the eigenrelation for order-matched
// ML factors E_mu(rate t^mu). UnsupportedTermError on other ML shapes and on
// series terms.
TimeExpr caputo_t(const TimeExpr& e, double mu);

// Riemann-Liouville I^mu in t on pure powers.
TimeExpr frac_integral_t(const TimeExpr& e, double mu);

// ---- evaluation --------------------------------------------------------------------

double eval_x(const FuncExpr& e, double x);

struct EvalResult {
    double value = 0.0;
    double series_error = 0.0; // bound from the first truncated terms
};
EvalResult eval_t_detail(const TimeExpr& e, double t, double series_tol = 1e-12);
double eval_t(const TimeExpr& e, double t, double series_tol = 1e-12);

// m-th analytic t-derivative (m = 0, 1, 2), evaluated termwise at t.
double eval_t_deriv(const TimeExpr& e, double t, int m, double series_tol = 1e-12);

// ---- numerical Caputo on a uniform grid --------------------------------------------

// d^mu g at node t_index from samples g[0..] on a grid of spacing dt.
// mu in (0,1): L1 scheme. mu in (1,2): central second differences interpolated
// piecewise linearly and integrated exactly against the kernel.
// DomainError at mu = 1, outside (0,2), for t_index < 1, or fewer than 32 samples.
double caputo_num(const std::vector<double>& g, double dt, double mu, int t_index);

// ---- rendering (canonical text form, documented in docs/formats.md) ----------------

std::string to_string(const FuncExpr& e);
std::string to_string(const TimeExpr& e);

int selftest(bool verbose);

} // namespace invsub::fraccalc
