#include <cmath>
#include <cstdio>
#include <numeric>
#include <vector>

#include "invsub/errors.hpp"
#include "invsub/fdesolve.hpp"
#include "invsub/specfun.hpp"

// Predictor-corrector time stepping for the reduced coefficient systems. The
// multi-order operator is first rewritten as a chain of equations of one
// common fractional order (a rational fit of every active order over a small
// common denominator), then integrated with the fractional Adams-Bashforth-
// Moulton scheme, one corrector pass per step.

namespace invsub::fdesolve {

namespace {

struct Frac {
    long long p = 0;
    long long q = 1;
};

Frac to_fraction(double x, long long maxden) {
    if (!(x > 0.0))
        throw DomainError("orders must be positive");
    long long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    double v = x;
    for (int it = 0; it < 64; ++it) {
        const long long a = static_cast<long long>(std::floor(v));
        const long long p2 = a * p1 + p0;
        const long long q2 = a * q1 + q0;
        if (q2 > maxden)
            break;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        if (std::fabs(x - static_cast<double>(p1) / static_cast<double>(q1)) <
            1e-12)
            break;
        const double rem = v - static_cast<double>(a);
        if (rem < 1e-15)
            break;
        v = 1.0 / rem;
    }
    if (q1 == 0 ||
        std::fabs(x - static_cast<double>(p1) / static_cast<double>(q1)) > 1e-9) {
        char buf[96];
        std::snprintf(buf, sizeof buf,
                      "order %.12g has no rational fit with denominator <= %lld",
                      x, maxden);
        throw CommensurabilityError(buf);
    }
    return {p1, q1};
}

}  // namespace

OracleResult adams_oracle(const subspace::ReducedSystem& sys,
                          const std::vector<std::vector<double>>& ics,
                          double T, int N) {
    if (!(T > 0.0))
        throw DomainError("horizon must be positive");
    if (N < 2)
        throw DomainError("need at least 2 steps");
    const int n = static_cast<int>(sys.psi.size());
    if (static_cast<int>(ics.size()) != n)
        throw DomainError("need one initial-data vector per component");
    subspace::validate(sys.time_op);

    // active (lambda, order) pairs
    std::vector<double> all_orders = subspace::op_orders(sys.time_op);
    std::vector<double> lambdas, orders;
    for (std::size_t i = 0; i < sys.time_op.lambdas.size(); ++i) {
        if (sys.time_op.lambdas[i] == 0.0)
            continue;
        lambdas.push_back(sys.time_op.lambdas[i]);
        orders.push_back(all_orders[i]);
    }

    // common fractional step delta: every active order is an integer multiple,
    // and, when more than one initial value is involved, so is 1
    constexpr long long kMaxDen = 64;
    long long L = 1;
    std::vector<Frac> fr(orders.size());
    for (std::size_t i = 0; i < orders.size(); ++i) {
        fr[i] = to_fraction(orders[i], kMaxDen);
        L = std::lcm(L, fr[i].q);
        if (L > kMaxDen)
            throw CommensurabilityError(
                "active orders share no common step with denominator <= 64");
    }
    std::vector<long long> mult(orders.size());
    long long g = 0;
    for (std::size_t i = 0; i < orders.size(); ++i) {
        mult[i] = fr[i].p * (L / fr[i].q);
        g = std::gcd(g, mult[i]);
    }
    const double top_order = orders.back();
    const int nic = static_cast<int>(std::ceil(top_order - 1e-9));
    long long d = nic > 1 ? std::gcd(g, L) : g;
    const double delta = static_cast<double>(d) / static_cast<double>(L);
    std::vector<int> chain_pos(orders.size());
    for (std::size_t i = 0; i < orders.size(); ++i)
        chain_pos[i] = static_cast<int>(mult[i] / d);
    const int mtop = chain_pos.back();
    const double top_lambda = lambdas.back();

    for (int j = 0; j < n; ++j)
        if (static_cast<int>(ics[j].size()) < nic)
            throw DomainError("component " + std::to_string(j) + " needs " +
                              std::to_string(nic) + " initial values");

    // flattened chain state: Y[j * mtop + k] carries the derivative of
    // component j at order k * delta
    const int S = n * mtop;
    std::vector<double> y0(S, 0.0);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < mtop; ++k) {
            const long long num = static_cast<long long>(k) * d;
            if (num % L == 0)
                y0[j * mtop + k] = ics[j][static_cast<int>(num / L)];
        }

    std::vector<double> kv(n);
    auto eval_rhs = [&](double t, const std::vector<double>& y,
                        std::vector<double>& f) {
        for (int j = 0; j < n; ++j)
            kv[j] = y[j * mtop];
        for (int j = 0; j < n; ++j) {
            for (int k = 0; k + 1 < mtop; ++k)
                f[j * mtop + k] = y[j * mtop + k + 1];
            double rhs;
            try {
                rhs = sys.psi[j].eval(kv);
            } catch (const DenominatorBlowupError& e) {
                char buf[64];
                std::snprintf(buf, sizeof buf, " at t = %.6g", t);
                throw DenominatorBlowupError(std::string(e.what()) + buf);
            }
            for (std::size_t i = 0; i + 1 < orders.size(); ++i)
                rhs -= lambdas[i] * y[j * mtop + chain_pos[i]];
            f[j * mtop + mtop - 1] = rhs / top_lambda;
        }
    };

    const double h = T / N;
    const double hd1 = std::pow(h, delta) / specfun::gamma_real(delta + 1.0);
    const double hd2 = std::pow(h, delta) / specfun::gamma_real(delta + 2.0);

    // predictor weights c[k] = (k+1)^d - k^d; interior corrector weights
    // e[k] = (k+1)^(d+1) + (k-1)^(d+1) - 2 k^(d+1)
    std::vector<double> c(N), e(N + 1, 0.0);
    for (int k = 0; k < N; ++k)
        c[k] = std::pow(k + 1.0, delta) - std::pow(static_cast<double>(k), delta);
    for (int k = 1; k <= N; ++k)
        e[k] = std::pow(k + 1.0, delta + 1.0) +
               std::pow(k - 1.0, delta + 1.0) -
               2.0 * std::pow(static_cast<double>(k), delta + 1.0);

    std::vector<std::vector<double>> fhist(N + 1, std::vector<double>(S));
    std::vector<double> y = y0, pred(S), fpred(S), acc(S);
    eval_rhs(0.0, y, fhist[0]);

    OracleResult out;
    out.t.resize(N + 1);
    out.K.assign(n, std::vector<double>(N + 1));
    out.t[0] = 0.0;
    for (int j = 0; j < n; ++j)
        out.K[j][0] = y0[j * mtop];

    for (int step = 0; step < N; ++step) {
        const double t1 = (step + 1) * h;
        std::fill(acc.begin(), acc.end(), 0.0);
        for (int j = 0; j <= step; ++j) {
            const double w = c[step - j];
            const std::vector<double>& fj = fhist[j];
            for (int s = 0; s < S; ++s)
                acc[s] += w * fj[s];
        }
        for (int s = 0; s < S; ++s)
            pred[s] = y0[s] + hd1 * acc[s];
        eval_rhs(t1, pred, fpred);

        const double a0 = std::pow(static_cast<double>(step), delta + 1.0) -
                          (step - delta) * std::pow(step + 1.0, delta);
        std::fill(acc.begin(), acc.end(), 0.0);
        for (int s = 0; s < S; ++s)
            acc[s] += a0 * fhist[0][s];
        for (int j = 1; j <= step; ++j) {
            const double w = e[step - j + 1];
            const std::vector<double>& fj = fhist[j];
            for (int s = 0; s < S; ++s)
                acc[s] += w * fj[s];
        }
        for (int s = 0; s < S; ++s)
            y[s] = y0[s] + hd2 * (acc[s] + fpred[s]);
        eval_rhs(t1, y, fhist[step + 1]);

        out.t[step + 1] = t1;
        for (int j = 0; j < n; ++j)
            out.K[j][step + 1] = y[j * mtop];
    }
    return out;
}

}  // namespace invsub::fdesolve
