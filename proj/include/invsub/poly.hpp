#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace invsub::subspace {

// Scalar that carries an exact long-long rational alongside its double value
// for as long as the inputs allow; operations fall back to double-only when an
// irrational value (Gamma factors) enters or the integers overflow 63 bits.
struct Coeff {
    double v = 0.0;
    bool exact = true;
    long long num = 0;
    long long den = 1;

    Coeff() = default;

    static Coeff integer(long long n);
    static Coeff rational(long long n, long long d);
    static Coeff approx(double d); // known-inexact
    // exact iff d is exactly a dyadic rational with a small denominator
    static Coeff from_double(double d);

    bool is_zero() const { return exact ? num == 0 : v == 0.0; }

    Coeff operator-() const;
    Coeff operator+(const Coeff& o) const;
    Coeff operator-(const Coeff& o) const;
    Coeff operator*(const Coeff& o) const;
    Coeff operator/(const Coeff& o) const; // DivisionBySymbolicZero on zero divisor

    std::string str() const;
};

// Ascending graded-lex: lower total degree first, then lexicographic in the
// exponent vector. Reverse iteration therefore prints leading term first.
struct GradedLexLess {
    bool operator()(const std::vector<int>& a, const std::vector<int>& b) const;
};

// Sparse multivariate polynomial in variables k_0 .. k_{nvars-1}.
class Polynomial {
public:
    using TermMap = std::map<std::vector<int>, Coeff, GradedLexLess>;

    explicit Polynomial(int nvars = 0) : nvars_(nvars) {}
    static Polynomial constant(int nvars, const Coeff& c);
    static Polynomial constant(int nvars, double c);
    static Polynomial variable(int nvars, int idx);

    int nvars() const { return nvars_; }
    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const;
    Coeff constant_value() const; // 0 if zero; requires is_constant()

    void add_term(const std::vector<int>& expo, const Coeff& c);

    Polynomial operator-() const;
    Polynomial operator+(const Polynomial& o) const;
    Polynomial operator-(const Polynomial& o) const;
    Polynomial operator*(const Polynomial& o) const;
    Polynomial scaled(const Coeff& c) const;
    Polynomial pow(int e) const;

    // exponent-wise minimum over all terms (the monomial content)
    std::vector<int> monomial_content() const;
    Polynomial divided_by_monomial(const std::vector<int>& expo) const;

    Coeff leading_coeff() const; // graded-lex leading term; 0 if zero
    int degree_in(int var) const;
    int total_degree() const;
    bool depends_on(int var) const;

    double eval(const std::vector<double>& ks) const;
    Polynomial substituted(int var, double value) const;

    // drop floating noise: inexact coefficients below 1e-12 of the magnitude peak
    void prune();

    // deterministic rendering, leading term first, variables named k0, k1, ...
    std::string str(const std::string& varname = "k") const;

    bool structurally_equal(const Polynomial& o, double tol = 1e-12) const;

private:
    int nvars_;
    TermMap terms_;
};

// Rational function num/den with the spec'd normal form: denominator monic by
// its graded-lex leading coefficient; monomial-denominator GCD reduction only.
struct CoeffRational {
    Polynomial num;
    Polynomial den;

    CoeffRational() : num(0), den(Polynomial::constant(0, 1.0)) {}
    explicit CoeffRational(Polynomial n);
    CoeffRational(Polynomial n, Polynomial d); // DivisionBySymbolicZero if d == 0

    static CoeffRational constant(int nvars, double c);
    static CoeffRational variable(int nvars, int idx);

    bool is_zero() const { return num.is_zero(); }
    bool is_polynomial() const;
    bool is_constant() const;
    double constant_value() const;

    CoeffRational operator-() const;
    CoeffRational operator+(const CoeffRational& o) const;
    CoeffRational operator-(const CoeffRational& o) const;
    CoeffRational operator*(const CoeffRational& o) const;
    CoeffRational operator/(const CoeffRational& o) const;
    CoeffRational recip() const;
    CoeffRational scaled(double c) const;

    // evaluation with denominator guard: |den(ks)| <= guard raises
    // DenominatorBlowupError (guard <= 0 disables the check)
    double eval(const std::vector<double>& ks, double guard = 1e-10) const;

    bool equal(const CoeffRational& o, double tol = 1e-12) const;

    std::string str(const std::string& varname = "k") const;

private:
    void normalize();
};

} // namespace invsub::subspace
