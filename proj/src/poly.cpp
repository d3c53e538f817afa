#include "invsub/poly.hpp"
#include "invsub/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace invsub::subspace {

namespace {

using int128 = __int128;

bool fits63(int128 x) {
    const int128 lim = (int128(1) << 62);
    return x > -lim && x < lim;
}

long long gcd_ll(long long a, long long b) {
    return std::gcd(a < 0 ? -a : a, b < 0 ? -b : b);
}

} // namespace

Coeff Coeff::integer(long long n) {
    Coeff c;
    c.exact = true;
    c.num = n;
    c.den = 1;
    c.v = static_cast<double>(n);
    return c;
}

Coeff Coeff::rational(long long n, long long d) {
    if (d == 0)
        throw DivisionBySymbolicZero("Coeff::rational: zero denominator");
    if (d < 0) {
        n = -n;
        d = -d;
    }
    const long long g = gcd_ll(n, d);
    if (g > 1) {
        n /= g;
        d /= g;
    }
    Coeff c;
    c.exact = true;
    c.num = n;
    c.den = d;
    c.v = static_cast<double>(n) / static_cast<double>(d);
    return c;
}

Coeff Coeff::approx(double d) {
    Coeff c;
    c.exact = false;
    c.v = d;
    return c;
}

Coeff Coeff::from_double(double d) {
    if (!std::isfinite(d))
        throw DomainError("Coeff::from_double: non-finite value");
    // exact only when d is a dyadic rational with denominator <= 2^20
    double scaled = d;
    long long den = 1;
    for (int k = 0; k <= 20; ++k) {
        if (scaled == std::floor(scaled) && std::abs(scaled) < 9e15)
            return rational(static_cast<long long>(scaled), den);
        scaled *= 2.0;
        den <<= 1;
    }
    return approx(d);
}

Coeff Coeff::operator-() const {
    Coeff r = *this;
    r.v = -r.v;
    r.num = -r.num;
    return r;
}

Coeff Coeff::operator+(const Coeff& o) const {
    if (exact && o.exact) {
        const int128 n = int128(num) * o.den + int128(o.num) * den;
        const int128 d = int128(den) * o.den;
        if (fits63(n) && fits63(d))
            return rational(static_cast<long long>(n), static_cast<long long>(d));
    }
    return approx(v + o.v);
}

Coeff Coeff::operator-(const Coeff& o) const { return *this + (-o); }

Coeff Coeff::operator*(const Coeff& o) const {
    if (exact && o.exact) {
        // cross-reduce before multiplying to keep integers small
        const long long g1 = gcd_ll(num, o.den);
        const long long g2 = gcd_ll(o.num, den);
        const int128 n = int128(num / g1) * (o.num / g2);
        const int128 d = int128(den / g2) * (o.den / g1);
        if (fits63(n) && fits63(d))
            return rational(static_cast<long long>(n), static_cast<long long>(d));
    }
    return approx(v * o.v);
}

Coeff Coeff::operator/(const Coeff& o) const {
    if (o.is_zero())
        throw DivisionBySymbolicZero("Coeff: division by zero");
    if (exact && o.exact) {
        Coeff inv = rational(o.den, o.num);
        return *this * inv;
    }
    return approx(v / o.v);
}

std::string Coeff::str() const {
    char buf[64];
    if (exact) {
        if (den == 1)
            std::snprintf(buf, sizeof buf, "%lld", num);
        else
            std::snprintf(buf, sizeof buf, "%lld/%lld", num, den);
    } else {
        std::snprintf(buf, sizeof buf, "%.10g", v);
    }
    return buf;
}

bool GradedLexLess::operator()(const std::vector<int>& a, const std::vector<int>& b) const {
    const int da = std::accumulate(a.begin(), a.end(), 0);
    const int db = std::accumulate(b.begin(), b.end(), 0);
    if (da != db)
        return da < db;
    return a < b; // same length by construction within one polynomial
}

Polynomial Polynomial::constant(int nvars, const Coeff& c) {
    Polynomial p(nvars);
    if (!c.is_zero())
        p.terms_.emplace(std::vector<int>(nvars, 0), c);
    return p;
}

Polynomial Polynomial::constant(int nvars, double c) {
    return constant(nvars, Coeff::from_double(c));
}

Polynomial Polynomial::variable(int nvars, int idx) {
    Polynomial p(nvars);
    std::vector<int> e(nvars, 0);
    e.at(idx) = 1;
    p.terms_.emplace(std::move(e), Coeff::integer(1));
    return p;
}

bool Polynomial::is_constant() const {
    if (terms_.empty())
        return true;
    return terms_.size() == 1 && terms_.begin()->first == std::vector<int>(nvars_, 0);
}

Coeff Polynomial::constant_value() const {
    if (terms_.empty())
        return Coeff::integer(0);
    if (!is_constant())
        throw DomainError("Polynomial::constant_value on non-constant polynomial");
    return terms_.begin()->second;
}

void Polynomial::add_term(const std::vector<int>& expo, const Coeff& c) {
    if (c.is_zero())
        return;
    auto it = terms_.find(expo);
    if (it == terms_.end()) {
        terms_.emplace(expo, c);
    } else {
        it->second = it->second + c;
        if (it->second.is_zero())
            terms_.erase(it);
    }
}

Polynomial Polynomial::operator-() const {
    Polynomial r(nvars_);
    for (const auto& [e, c] : terms_)
        r.terms_.emplace(e, -c);
    return r;
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
    Polynomial r = *this;
    for (const auto& [e, c] : o.terms_)
        r.add_term(e, c);
    r.prune();
    return r;
}

Polynomial Polynomial::operator-(const Polynomial& o) const { return *this + (-o); }

Polynomial Polynomial::operator*(const Polynomial& o) const {
    Polynomial r(nvars_);
    for (const auto& [ea, ca] : terms_) {
        for (const auto& [eb, cb] : o.terms_) {
            std::vector<int> e(nvars_);
            for (int i = 0; i < nvars_; ++i)
                e[i] = ea[i] + eb[i];
            r.add_term(e, ca * cb);
        }
    }
    r.prune();
    return r;
}

Polynomial Polynomial::scaled(const Coeff& c) const {
    Polynomial r(nvars_);
    if (c.is_zero())
        return r;
    for (const auto& [e, t] : terms_)
        r.terms_.emplace(e, t * c);
    return r;
}

Polynomial Polynomial::pow(int e) const {
    if (e < 0)
        throw DomainError("Polynomial::pow: negative exponent");
    Polynomial r = constant(nvars_, 1.0);
    for (int i = 0; i < e; ++i)
        r = r * *this;
    return r;
}

std::vector<int> Polynomial::monomial_content() const {
    std::vector<int> m(nvars_, 0);
    bool first = true;
    for (const auto& [e, c] : terms_) {
        if (first) {
            m = e;
            first = false;
        } else {
            for (int i = 0; i < nvars_; ++i)
                m[i] = std::min(m[i], e[i]);
        }
    }
    return m;
}

Polynomial Polynomial::divided_by_monomial(const std::vector<int>& expo) const {
    Polynomial r(nvars_);
    for (const auto& [e, c] : terms_) {
        std::vector<int> ne(nvars_);
        for (int i = 0; i < nvars_; ++i) {
            ne[i] = e[i] - expo[i];
            if (ne[i] < 0)
                throw DomainError("divided_by_monomial: exponent would go negative");
        }
        r.terms_.emplace(std::move(ne), c);
    }
    return r;
}

Coeff Polynomial::leading_coeff() const {
    if (terms_.empty())
        return Coeff::integer(0);
    return terms_.rbegin()->second;
}

int Polynomial::degree_in(int var) const {
    int d = 0;
    for (const auto& [e, c] : terms_)
        d = std::max(d, e[var]);
    return d;
}

int Polynomial::total_degree() const {
    int d = 0;
    for (const auto& [e, c] : terms_)
        d = std::max(d, std::accumulate(e.begin(), e.end(), 0));
    return d;
}

bool Polynomial::depends_on(int var) const { return degree_in(var) > 0; }

double Polynomial::eval(const std::vector<double>& ks) const {
    double acc = 0.0;
    for (const auto& [e, c] : terms_) {
        double t = c.v;
        for (int i = 0; i < nvars_; ++i)
            for (int j = 0; j < e[i]; ++j)
                t *= ks[i];
        acc += t;
    }
    return acc;
}

Polynomial Polynomial::substituted(int var, double value) const {
    Polynomial r(nvars_);
    for (const auto& [e, c] : terms_) {
        double f = 1.0;
        for (int j = 0; j < e[var]; ++j)
            f *= value;
        std::vector<int> ne = e;
        ne[var] = 0;
        r.add_term(ne, c * Coeff::from_double(f));
    }
    r.prune();
    return r;
}

void Polynomial::prune() {
    double peak = 0.0;
    for (const auto& [e, c] : terms_)
        peak = std::max(peak, std::abs(c.v));
    for (auto it = terms_.begin(); it != terms_.end();) {
        const Coeff& c = it->second;
        const bool noise = !c.exact && std::abs(c.v) <= 1e-12 * peak;
        if (c.is_zero() || noise)
            it = terms_.erase(it);
        else
            ++it;
    }
}

std::string Polynomial::str(const std::string& varname) const {
    if (terms_.empty())
        return "0";
    std::string out;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
        if (!out.empty())
            out += " + ";
        const auto& [e, c] = *it;
        std::string mono;
        for (int i = 0; i < nvars_; ++i) {
            if (e[i] == 0)
                continue;
            if (!mono.empty())
                mono += "*";
            mono += varname + std::to_string(i);
            if (e[i] > 1)
                mono += "^" + std::to_string(e[i]);
        }
        if (mono.empty())
            out += c.str();
        else if (c.exact && c.num == 1 && c.den == 1)
            out += mono;
        else if (c.exact && c.num == -1 && c.den == 1)
            out += "-" + mono;
        else
            out += c.str() + "*" + mono;
    }
    return out;
}

bool Polynomial::structurally_equal(const Polynomial& o, double tol) const {
    Polynomial d = *this - o;
    double peak = 0.0;
    for (const auto& [e, c] : terms_)
        peak = std::max(peak, std::abs(c.v));
    for (const auto& [e, c] : o.terms())
        peak = std::max(peak, std::abs(c.v));
    for (const auto& [e, c] : d.terms())
        if (std::abs(c.v) > tol * std::max(1.0, peak))
            return false;
    return true;
}

CoeffRational::CoeffRational(Polynomial n)
    : num(std::move(n)), den(Polynomial::constant(num.nvars(), 1.0)) {}

CoeffRational::CoeffRational(Polynomial n, Polynomial d)
    : num(std::move(n)), den(std::move(d)) {
    if (den.is_zero())
        throw DivisionBySymbolicZero("CoeffRational: identically zero denominator");
    normalize();
}

CoeffRational CoeffRational::constant(int nvars, double c) {
    return CoeffRational(Polynomial::constant(nvars, c));
}

CoeffRational CoeffRational::variable(int nvars, int idx) {
    return CoeffRational(Polynomial::variable(nvars, idx));
}

bool CoeffRational::is_polynomial() const { return den.is_constant(); }

bool CoeffRational::is_constant() const { return num.is_constant() && den.is_constant(); }

double CoeffRational::constant_value() const {
    return num.constant_value().v / den.constant_value().v;
}

void CoeffRational::normalize() {
    num.prune();
    den.prune();
    if (den.is_zero())
        throw DivisionBySymbolicZero("CoeffRational: denominator vanished");
    if (num.is_zero()) {
        den = Polynomial::constant(num.nvars(), 1.0);
        return;
    }
    // monomial-denominator GCD reduction
    if (den.terms().size() == 1) {
        std::vector<int> g = num.monomial_content();
        const std::vector<int>& dm = den.terms().begin()->first;
        for (std::size_t i = 0; i < g.size(); ++i)
            g[i] = std::min(g[i], dm[i]);
        bool nontrivial = false;
        for (int e : g)
            nontrivial = nontrivial || e > 0;
        if (nontrivial) {
            num = num.divided_by_monomial(g);
            den = den.divided_by_monomial(g);
        }
    }
    // monic denominator
    const Coeff lead = den.leading_coeff();
    if (!(lead.exact && lead.num == 1 && lead.den == 1)) {
        const Coeff inv = Coeff::integer(1) / lead;
        num = num.scaled(inv);
        den = den.scaled(inv);
    }
}

CoeffRational CoeffRational::operator-() const {
    CoeffRational r = *this;
    r.num = -r.num;
    return r;
}

CoeffRational CoeffRational::operator+(const CoeffRational& o) const {
    return CoeffRational(num * o.den + o.num * den, den * o.den);
}

CoeffRational CoeffRational::operator-(const CoeffRational& o) const {
    return *this + (-o);
}

CoeffRational CoeffRational::operator*(const CoeffRational& o) const {
    return CoeffRational(num * o.num, den * o.den);
}

CoeffRational CoeffRational::operator/(const CoeffRational& o) const {
    return *this * o.recip();
}

CoeffRational CoeffRational::recip() const {
    if (num.is_zero())
        throw DivisionBySymbolicZero("CoeffRational::recip of zero");
    return CoeffRational(den, num);
}

CoeffRational CoeffRational::scaled(double c) const {
    CoeffRational r = *this;
    r.num = r.num.scaled(Coeff::from_double(c));
    r.num.prune();
    return r;
}

double CoeffRational::eval(const std::vector<double>& ks, double guard) const {
    const double dn = den.eval(ks);
    if (guard > 0.0 && std::abs(dn) <= guard)
        throw DenominatorBlowupError("CoeffRational: denominator magnitude " +
                                     std::to_string(std::abs(dn)) + " below guard");
    return num.eval(ks) / dn;
}

bool CoeffRational::equal(const CoeffRational& o, double tol) const {
    return (num * o.den).structurally_equal(o.num * den, tol);
}

std::string CoeffRational::str(const std::string& varname) const {
    if (is_polynomial()) {
        const Coeff c = den.constant_value();
        if (c.exact && c.num == 1 && c.den == 1)
            return num.str(varname);
        Polynomial scaled = num.scaled(Coeff::integer(1) / c);
        return scaled.str(varname);
    }
    return "(" + num.str(varname) + ") / (" + den.str(varname) + ")";
}

} // namespace invsub::subspace
