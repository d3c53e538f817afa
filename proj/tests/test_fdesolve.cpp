#include <doctest.h>

#include "invsub/errors.hpp"
#include "invsub/fdesolve.hpp"
#include "invsub/fraccalc.hpp"
#include "invsub/registry.hpp"
#include "invsub/specfun.hpp"
#include "invsub/subspace.hpp"

#include <cmath>
#include <map>
#include <string>
#include <vector>

using namespace invsub;
using namespace invsub::fdesolve;
namespace fc = invsub::fraccalc;
namespace sf = invsub::specfun;
namespace sub = invsub::subspace;
namespace reg = invsub::registry;

namespace {

double G(double x) { return sf::gamma_real(x); }

bool close(double a, double b, double tol = 1e-12) {
    return std::fabs(a - b) <= tol * std::max({1.0, std::fabs(a), std::fabs(b)});
}

// coefficient of the pure power t^p in a canonical expression (0 if absent)
double coeff_of(const fc::TimeExpr& e, double p) {
    for (const fc::TimeTerm& t : e.terms)
        if (!t.ml && std::fabs(t.power - p) < 1e-9)
            return t.coeff;
    return 0.0;
}

sub::ReducedSystem make_system(const std::string& id, const reg::ParamSet& p) {
    const reg::ExampleSpec* ex = reg::find(id);
    REQUIRE(ex != nullptr);
    return sub::reduce(ex->op(p), ex->time_op(p), ex->basis(p));
}

// residual of sum_i lambda_i d^(alpha+i) g - rhs at node `idx` of a uniform
// grid over [0, T], using sampled analytic derivatives for the integer shifts
double chain_residual(const fc::TimeExpr& g, const sub::TimeOperatorSpec& tsp,
                      const fc::TimeExpr& rhs, double T, int N, int idx) {
    REQUIRE(tsp.mode == sub::TimeOperatorSpec::Mode::A);
    const double dt = T / N;
    double lhs = 0.0;
    for (std::size_t i = 0; i < tsp.lambdas.size(); ++i) {
        if (tsp.lambdas[i] == 0.0)
            continue;
        std::vector<double> samples(N + 1);
        for (int k = 0; k <= N; ++k)
            samples[k] = fc::eval_t_deriv(g, k * dt, static_cast<int>(i));
        lhs += tsp.lambdas[i] * fc::caputo_num(samples, dt, tsp.alpha, idx);
    }
    return lhs - fc::eval_t(rhs, idx * dt);
}

}  // namespace

TEST_CASE("fractional integration of the forcing reproduces polynomial profiles") {
    sub::TimeOperatorSpec half;
    half.alpha = 0.5;
    half.lambdas = {1.0};

    SUBCASE("no forcing keeps the initial value") {
        SolveOutcome s = solve_forced_power(half, {}, {4.0});
        CHECK(s.provenance == "forced-power");
        CHECK(close(coeff_of(s.expr, 0.0), 4.0));
        CHECK(s.expr.terms.size() == 1);
    }
    SUBCASE("constant forcing grows like t^alpha") {
        SolveOutcome s = solve_forced_power(half, fc::te_power(2.0, 0.0), {4.0});
        CHECK(close(coeff_of(s.expr, 0.5), 2.0 / G(1.5)));
        CHECK(close(fc::eval_t(s.expr, 0.81),
                    4.0 + 2.0 * std::pow(0.81, 0.5) / G(1.5)));
    }
    SUBCASE("higher order carries a full initial polynomial") {
        sub::TimeOperatorSpec op;
        op.alpha = 1.5;
        op.lambdas = {1.0};
        SolveOutcome s = solve_forced_power(op, fc::te_power(1.0, 1.0), {1.0, 2.0});
        CHECK(close(coeff_of(s.expr, 0.0), 1.0));
        CHECK(close(coeff_of(s.expr, 1.0), 2.0));
        CHECK(close(coeff_of(s.expr, 2.5), G(2.0) / G(3.5)));
    }
    SUBCASE("operator coefficient rescales the forcing") {
        sub::TimeOperatorSpec op;
        op.alpha = 0.5;
        op.lambdas = {2.0};
        SolveOutcome s = solve_forced_power(op, fc::te_power(3.0, 0.0), {0.0});
        CHECK(close(coeff_of(s.expr, 0.5), 1.5 / G(1.5)));
    }
    SUBCASE("missing initial data is rejected") {
        sub::TimeOperatorSpec op;
        op.alpha = 1.5;
        op.lambdas = {1.0};
        CHECK_THROWS_AS(solve_forced_power(op, {}, {1.0}), DomainError);
    }
}

TEST_CASE("linear self-coupling yields the one-parameter eigenfunction") {
    SolveOutcome s = solve_linear_ml(-3.0, 2.5, 0.8);
    CHECK(s.provenance == "linear-ml");
    REQUIRE(s.expr.terms.size() == 1);
    const fc::TimeTerm& t = s.expr.terms[0];
    REQUIRE(t.ml.has_value());
    CHECK(close(t.coeff, 2.5));
    CHECK(close(t.ml->a, 0.8));
    CHECK(close(t.ml->rate, -3.0));
    for (double tt : {0.2, 0.7, 1.0})
        CHECK(close(fc::eval_t(s.expr, tt),
                    2.5 * sf::ml(0.8, 1.0, -3.0 * std::pow(tt, 0.8))));

    SUBCASE("zero rate or zero start collapse to a constant") {
        CHECK(fc::te_is_constant(solve_linear_ml(0.0, 5.0, 0.5).expr));
        CHECK(fc::eval_t(solve_linear_ml(-2.0, 0.0, 0.5).expr, 0.3) == 0.0);
    }
    SUBCASE("orders beyond one are not covered") {
        CHECK_THROWS_AS(solve_linear_ml(-1.0, 1.0, 1.3), UnsupportedSystemError);
    }
}

TEST_CASE("power self-coupling resolves to a single fractional power") {
    SUBCASE("quadratic coupling with a negative coefficient") {
        const double a = 0.3, b = 0.8;
        SolveOutcome s = solve_power_ansatz(-G(b + 1.0), 2, a);
        REQUIRE(s.expr.terms.size() == 1);
        CHECK(close(s.expr.terms[0].power, -a));
        const double want = -G(1.0 - a) / (G(1.0 + b) * G(1.0 - 2.0 * a));
        CHECK(close(s.expr.terms[0].coeff, want));
        CHECK(s.branches.size() == 1);
        bool excl_half = false, excl_one = false;
        for (const std::string& v : s.validity) {
            if (v == "alpha != 0.5")
                excl_half = true;
            if (v == "alpha != 1")
                excl_one = true;
        }
        CHECK(excl_half);
        CHECK(excl_one);
    }
    SUBCASE("quadratic coupling with a positive coefficient") {
        const double a = 0.3, b = 0.8;
        SolveOutcome s = solve_power_ansatz(6.0 * G(b + 1.0), 2, a);
        const double want = G(1.0 - a) / (6.0 * G(1.0 + b) * G(1.0 - 2.0 * a));
        CHECK(close(s.expr.terms[0].coeff, want));
    }
    SUBCASE("reciprocal coupling gives a plus-minus pair") {
        const double a = 0.6;
        SolveOutcome s = solve_power_ansatz(1.0, -1, a);
        REQUIRE(s.branches.size() == 2);
        const double eta = std::sqrt(G(1.0 - a / 2.0) / G(1.0 + a / 2.0));
        CHECK(close(s.expr.terms[0].coeff, eta));
        CHECK(close(s.expr.terms[0].power, a / 2.0));
        CHECK(close(s.branches[1].terms[0].coeff, -eta));
        SolveOutcome neg = solve_power_ansatz(1.0, -1, a, -1);
        CHECK(close(neg.expr.terms[0].coeff, -eta));
    }
    SUBCASE("excluded orders raise the pole guard") {
        CHECK_THROWS_AS(solve_power_ansatz(-1.0, 2, 0.5), PoleError);
        CHECK_THROWS_AS(solve_power_ansatz(-1.0, 2, 1.0), PoleError);
    }
    SUBCASE("negative right side with an even root order has no real branch") {
        CHECK_THROWS_AS(solve_power_ansatz(-1.0, -1, 0.6), NoRealSolutionError);
    }
    SUBCASE("exponents 0 and 1 belong to other strategies") {
        CHECK_THROWS_AS(solve_power_ansatz(1.0, 0, 0.5), DomainError);
        CHECK_THROWS_AS(solve_power_ansatz(1.0, 1, 0.5), DomainError);
    }
}

TEST_CASE("diffusion-type chains solve component by component") {
    const reg::ExampleSpec* ex = reg::find("EX3a");
    REQUIRE(ex != nullptr);
    const double a = 0.6, b = 1.7, C = 1.3;
    reg::ParamSet p = ex->defaults.with({{"C", C}}, a, b);
    sub::ReducedSystem sys = make_system("EX3a", p);
    std::vector<SolveOutcome> sol =
        solve_sequential(sys, {{0.9}, {1.1}, {1.3}});
    REQUIRE(sol.size() == 3);

    CHECK(fc::te_is_constant(sol[2].expr));
    CHECK(close(fc::te_constant_value(sol[2].expr), 1.3));

    CHECK(close(coeff_of(sol[1].expr, 0.0), 1.1));
    CHECK(close(coeff_of(sol[1].expr, a),
                1.3 * C * G(2.0 * b + 1.0) / (G(b + 1.0) * G(a + 1.0))));

    CHECK(close(coeff_of(sol[0].expr, 0.0), 0.9));
    CHECK(close(coeff_of(sol[0].expr, a), 1.1 * C * G(b + 1.0) / G(a + 1.0)));
    CHECK(close(coeff_of(sol[0].expr, 2.0 * a),
                1.3 * C * C * G(2.0 * b + 1.0) / G(2.0 * a + 1.0)));

    SUBCASE("quadratic-profile initial data reproduces the known solution") {
        std::vector<SolveOutcome> ivp =
            solve_sequential(sys, {{1.0}, {0.0}, {-0.5}});
        CHECK(close(coeff_of(ivp[0].expr, 0.0), 1.0));
        CHECK(close(coeff_of(ivp[0].expr, 2.0 * a),
                    -0.5 * C * C * G(2.0 * b + 1.0) / G(2.0 * a + 1.0)));
        CHECK(close(coeff_of(ivp[1].expr, a),
                    -0.5 * C * G(2.0 * b + 1.0) / (G(b + 1.0) * G(a + 1.0))));
        CHECK(coeff_of(ivp[1].expr, 0.0) == 0.0);
    }
}

TEST_CASE("triple-flux chain threads the quadratic coupling downward") {
    const reg::ExampleSpec* ex = reg::find("EX9");
    REQUIRE(ex != nullptr);
    const double a = ex->defaults.alpha, b = ex->defaults.beta;
    sub::ReducedSystem sys = make_system("EX9", ex->defaults);
    std::vector<SolveOutcome> sol =
        solve_sequential(sys, {{0.8}, {1.2}, {0.7}});

    CHECK(close(fc::te_constant_value(sol[2].expr), 0.7));
    CHECK(close(coeff_of(sol[1].expr, a),
                0.7 * 0.7 * G(4.0 * b + 1.0) / (2.0 * G(b + 1.0) * G(a + 1.0))));
    CHECK(close(coeff_of(sol[0].expr, 0.0), 0.8));
    CHECK(close(coeff_of(sol[0].expr, a),
                1.2 * 0.7 * G(3.0 * b + 1.0) / G(a + 1.0)));
    CHECK(close(coeff_of(sol[0].expr, 2.0 * a),
                0.7 * 0.7 * 0.7 * G(4.0 * b + 1.0) * G(3.0 * b + 1.0) /
                    (2.0 * G(b + 1.0) * G(2.0 * a + 1.0))));
}

TEST_CASE("eigenfunction chains pick up constants solved upstream") {
    SUBCASE("product coupling against a constant component") {
        const reg::ExampleSpec* ex = reg::find("EX6");
        REQUIRE(ex != nullptr);
        sub::ReducedSystem sys = make_system("EX6", ex->defaults);
        std::vector<SolveOutcome> sol = solve_sequential(sys, {{3.0}, {2.5}});
        CHECK(close(fc::te_constant_value(sol[0].expr), 3.0));
        REQUIRE(sol[1].expr.terms.size() == 1);
        REQUIRE(sol[1].expr.terms[0].ml.has_value());
        CHECK(close(sol[1].expr.terms[0].coeff, 2.5));
        CHECK(close(sol[1].expr.terms[0].ml->rate, -3.0));
        CHECK(close(sol[1].expr.terms[0].ml->a, ex->defaults.alpha));
        CHECK(sol[1].provenance == "linear-ml");
    }
    SUBCASE("plain linear coupling keeps the equation coefficient") {
        const reg::ExampleSpec* ex = reg::find("EX3b");
        REQUIRE(ex != nullptr);
        reg::ParamSet p = ex->defaults.with({{"C", 1.7}}, 0.45, 1.6);
        sub::ReducedSystem sys = make_system("EX3b", p);
        std::vector<SolveOutcome> sol = solve_sequential(sys, {{1.0}, {0.9}});
        CHECK(close(fc::te_constant_value(sol[0].expr), 1.0));
        CHECK(close(sol[1].expr.terms[0].ml->rate, 1.7));
        CHECK(close(fc::eval_t(sol[1].expr, 0.6),
                    0.9 * sf::ml(0.45, 1.0, 1.7 * std::pow(0.6, 0.45))));
    }
}

TEST_CASE("reciprocal flux balance fixes the power amplitude up to sign") {
    const reg::ExampleSpec* ex = reg::find("EX11");
    REQUIRE(ex != nullptr);
    const double a = ex->defaults.alpha;
    sub::ReducedSystem sys = make_system("EX11", ex->defaults);

    std::vector<SolveOutcome> sol = solve_sequential(sys, {{0.0}, {1.0}});
    const double eta = std::sqrt(G(1.0 - a / 2.0) / G(1.0 + a / 2.0));
    REQUIRE(sol[0].expr.terms.size() == 1);
    CHECK(close(sol[0].expr.terms[0].coeff, eta));
    CHECK(close(sol[0].expr.terms[0].power, a / 2.0));
    CHECK(sol[0].branches.size() == 2);
    CHECK(sol[0].provenance == "power-ansatz");

    CHECK(close(sol[1].expr.terms[0].ml->rate, -1.0));
    CHECK(close(sol[1].expr.terms[0].coeff, 1.0));

    std::map<int, ComponentOptions> opts;
    opts[0].branch_sign = -1;
    std::vector<SolveOutcome> neg = solve_sequential(sys, {{0.0}, {1.0}}, opts);
    CHECK(close(neg[0].expr.terms[0].coeff, -eta));
}

TEST_CASE("inverse-power pairs close the quadratic balance as a scale family") {
    for (const char* id : {"EX2", "EX8"}) {
        CAPTURE(id);
        const reg::ExampleSpec* ex = reg::find(id);
        REQUIRE(ex != nullptr);
        const double a = ex->defaults.alpha, b = ex->defaults.beta;
        sub::ReducedSystem sys = make_system(id, ex->defaults);

        std::map<int, ComponentOptions> opts;
        opts[0].family_scale = 1.4;
        std::vector<SolveOutcome> sol =
            solve_sequential(sys, {{0.0}, {0.0}}, opts);

        const double mag = G(1.0 - a) / (G(1.0 + b) * G(1.0 - 2.0 * a));
        const double want1 = std::string(id) == "EX2" ? -mag : mag / 6.0;
        REQUIRE(sol[1].expr.terms.size() == 1);
        CHECK(close(sol[1].expr.terms[0].coeff, want1));
        CHECK(close(sol[1].expr.terms[0].power, -a));
        CHECK(sol[1].provenance == "power-ansatz");

        REQUIRE(sol[0].expr.terms.size() == 1);
        CHECK(close(sol[0].expr.terms[0].coeff, 1.4));
        CHECK(close(sol[0].expr.terms[0].power, -a));
        CHECK(sol[0].provenance == "scaling-linear");
        REQUIRE(sol[0].free_parameter.has_value());
        CHECK(*sol[0].free_parameter == "family scale");
        bool excl = false;
        for (const std::string& v : sol[0].validity)
            if (v == "alpha != 0.5")
                excl = true;
        CHECK(excl);

        reg::ParamSet at_half = ex->defaults.with({}, 0.5, b);
        sub::ReducedSystem bad = make_system(id, at_half);
        CHECK_THROWS_AS(solve_sequential(bad, {{0.0}, {0.0}}, opts), PoleError);
    }
}

TEST_CASE("damped two-order chain produces the convolution series") {
    const reg::ExampleSpec* ex = reg::find("EX4");
    REQUIRE(ex != nullptr);
    sub::ReducedSystem sys = make_system("EX4", ex->defaults);
    std::vector<SolveOutcome> sol =
        solve_sequential(sys, {{1.0, 0.5}, {1.0, 0.5}});

    SUBCASE("undriven component is constant plus a saturating mode") {
        const fc::TimeExpr& k1 = sol[1].expr;
        CHECK(k1.series.empty());
        CHECK(close(coeff_of(k1, 0.0), 1.0));
        for (double t : {0.3, 0.9})
            CHECK(close(fc::eval_t(k1, t), 1.0 + 0.5 * (1.0 - std::exp(-t)), 1e-10));
    }
    SUBCASE("self-damped component starts from its initial data") {
        const fc::TimeExpr& k0 = sol[0].expr;
        CHECK(k0.series.size() == 2);
        CHECK(sol[0].provenance == "multiterm-series");
        CHECK(close(fc::eval_t(k0, 0.0), 1.0));
        CHECK(close(fc::eval_t_deriv(k0, 1e-8, 1), 0.5, 1e-3));
    }
}

TEST_CASE("three-order chains assemble the staircase series blocks") {
    const reg::ExampleSpec* ex = reg::find("EX1");
    REQUIRE(ex != nullptr);
    sub::ReducedSystem sys = make_system("EX1", ex->defaults);
    const std::vector<std::vector<double>> ics = {{0.5, 0.2, 0.1},
                                                  {1.0, 0.7, -0.4}};
    std::vector<SolveOutcome> sol = solve_sequential(sys, ics);

    const fc::TimeExpr& k1 = sol[1].expr;
    CHECK(k1.series.size() == 6);
    CHECK(close(fc::eval_t(k1, 0.0), 1.0));
    CHECK(close(fc::eval_t_deriv(k1, 1e-8, 1), 0.7, 1e-4));
    CHECK(close(fc::eval_t_deriv(k1, 1e-8, 2), -0.4, 5e-2));

    const fc::TimeExpr& k0 = sol[0].expr;
    CHECK(k0.series.size() == 12);
    CHECK(close(fc::eval_t(k0, 0.0), 0.5));
    CHECK(close(fc::eval_t_deriv(k0, 1e-8, 1), 0.2, 1e-4));
}

TEST_CASE("series solutions satisfy their chains on a sampled grid") {
    // homogeneous chains must balance to the quadrature tolerance; the driven
    // first component of the three-order chain is flagged downstream instead
    const int N = 800;
    const double T = 1.0;
    for (double a : {0.3, 0.7}) {
        CAPTURE(a);

        sub::TimeOperatorSpec two;
        two.alpha = a;
        two.lambdas = {1.0, 1.0};
        SolveOutcome damped =
            solve_multiterm_series(two, -1.0, {1.0, 0.5}, std::nullopt, 40);
        SolveOutcome plain =
            solve_multiterm_series(two, 0.0, {1.0, 0.5}, std::nullopt, 40);

        sub::TimeOperatorSpec three;
        three.alpha = a;
        three.lambdas = {1.0, 1.0, 1.0};
        SolveOutcome chain = solve_multiterm_series(three, 0.0,
                                                    {1.0, 0.7, -0.4},
                                                    std::nullopt, 40);

        for (int idx : {80, 240, 400, 640, 800}) {
            CAPTURE(idx);
            const double rd = chain_residual(
                damped.expr, two, fc::te_scale(damped.expr, -1.0), T, N, idx);
            CHECK(std::fabs(rd) <= 1e-3);
            const double rp = chain_residual(plain.expr, two, {}, T, N, idx);
            CHECK(std::fabs(rp) <= 1e-3);
            const double rc = chain_residual(chain.expr, three, {}, T, N, idx);
            CHECK(std::fabs(rc) <= 1e-3);
        }
    }

    SUBCASE("printed coupled blocks do not balance the driven equation") {
        const reg::ExampleSpec* ex = reg::find("EX1");
        sub::ReducedSystem sys = make_system("EX1", ex->defaults);
        const std::vector<std::vector<double>> ics = {{0.5, 0.2, 0.1},
                                                      {1.0, 0.7, -0.4}};
        std::vector<SolveOutcome> sol = solve_sequential(sys, ics);
        const double gb2 = G(ex->defaults.beta + 2.0);
        sub::TimeOperatorSpec three = ex->time_op(ex->defaults);
        const double r =
            chain_residual(sol[0].expr, three,
                           fc::te_scale(sol[1].expr, gb2), T, N, 400);
        CHECK(std::fabs(r) > 1e-2);
    }
}

TEST_CASE("classification matches the shape of each right side") {
    using Kind = ScalarRhs::Kind;
    sub::TimeOperatorSpec half;
    half.alpha = 0.5;
    half.lambdas = {1.0};

    SUBCASE("product of unsolved partners") {
        const reg::ExampleSpec* ex = reg::find("EX9");
        sub::ReducedSystem sys = make_system("EX9", ex->defaults);
        ScalarFDE eq = classify(sys, 0, {});
        CHECK(eq.rhs.kind == Kind::ProductCoupling);
        REQUIRE(eq.rhs.indices.size() == 2);
        CHECK(eq.rhs.indices[0] == 1);
        CHECK(eq.rhs.indices[1] == 2);
        CHECK(close(eq.rhs.c, G(3.0 * ex->defaults.beta + 1.0)));
    }
    SUBCASE("substituted partners become forcing") {
        sub::ReducedSystem sys;
        sys.time_op = half;
        sys.psi = {sub::CoeffRational::variable(2, 1) *
                       sub::CoeffRational::variable(2, 1),
                   sub::CoeffRational::constant(2, 0.0)};
        std::map<int, fc::TimeExpr> solved;
        solved[1] = fc::te_power(2.0, 0.3);
        ScalarFDE eq = classify(sys, 0, solved);
        CHECK(eq.rhs.kind == Kind::Forcing);
        CHECK(close(coeff_of(eq.rhs.forcing, 0.6), 4.0));
    }
    SUBCASE("affine self-coupling") {
        sub::ReducedSystem sys;
        sys.time_op = half;
        sys.psi = {sub::CoeffRational::variable(1, 0).scaled(2.0) +
                   sub::CoeffRational::constant(1, 3.0)};
        ScalarFDE eq = classify(sys, 0, {});
        CHECK(eq.rhs.kind == Kind::LinearSelfPlusForcing);
        CHECK(close(eq.rhs.lambda, 2.0));
        CHECK(close(fc::te_constant_value(eq.rhs.forcing), 3.0));
    }
    SUBCASE("zero, constant, linear, power") {
        sub::ReducedSystem sys;
        sys.time_op = half;
        sys.psi = {sub::CoeffRational::constant(4, 0.0),
                   sub::CoeffRational::constant(4, 2.5),
                   sub::CoeffRational::variable(4, 2).scaled(-4.0),
                   sub::CoeffRational::variable(4, 3) *
                       sub::CoeffRational::variable(4, 3)};
        CHECK(classify(sys, 0, {}).rhs.kind == Kind::Zero);
        CHECK(classify(sys, 1, {}).rhs.kind == Kind::Constant);
        ScalarFDE lin = classify(sys, 2, {});
        CHECK(lin.rhs.kind == Kind::LinearSelf);
        CHECK(close(lin.rhs.lambda, -4.0));
        ScalarFDE pw = classify(sys, 3, {});
        CHECK(pw.rhs.kind == Kind::PowerSelf);
        CHECK(pw.rhs.p == 2);
        CHECK(close(pw.rhs.c, 1.0));
    }
    SUBCASE("unsupported shapes name the component") {
        sub::ReducedSystem sys;
        sys.time_op = half;
        // quadratic plus linear self-coupling has no shipped closed form
        sys.psi = {sub::CoeffRational::variable(1, 0) *
                       sub::CoeffRational::variable(1, 0) +
                   sub::CoeffRational::variable(1, 0)};
        try {
            solve_sequential(sys, {{1.0}});
            FAIL("expected a strategy failure");
        } catch (const UnsupportedSystemError& e) {
            CHECK(std::string(e.what()).find("K0") != std::string::npos);
        }
    }
}

TEST_CASE("time stepping tracks constants exactly and eigenfunctions closely") {
    sub::TimeOperatorSpec op;
    op.alpha = 0.5;
    op.lambdas = {1.0};

    SUBCASE("flat right side keeps the state constant") {
        sub::ReducedSystem sys;
        sys.time_op = op;
        sys.psi = {sub::CoeffRational::constant(1, 0.0)};
        OracleResult r = adams_oracle(sys, {{3.0}}, 1.0, 64);
        for (double v : r.K[0])
            CHECK(v == 3.0);
    }
    SUBCASE("linear decay matches the eigenfunction") {
        sub::TimeOperatorSpec op8;
        op8.alpha = 0.8;
        op8.lambdas = {1.0};
        sub::ReducedSystem sys;
        sys.time_op = op8;
        sys.psi = {sub::CoeffRational::variable(1, 0).scaled(-1.0)};
        OracleResult r = adams_oracle(sys, {{1.0}}, 1.0, 1000);
        double worst = 0.0;
        for (std::size_t i = 0; i < r.t.size(); ++i) {
            const double exact = sf::ml(0.8, 1.0, -std::pow(r.t[i], 0.8));
            worst = std::max(worst, std::fabs(r.K[0][i] - exact));
        }
        CHECK(worst <= 1e-4);
    }
    SUBCASE("diffusion chain against its closed form") {
        // the very first node keeps the one-pass scheme's startup error
        // (linear interpolation of the t^alpha forcing over the first panel,
        // size ~ h^(2 alpha)); everything past it sits well under 1e-4
        const reg::ExampleSpec* ex = reg::find("EX3a");
        reg::ParamSet p = ex->defaults.with({}, 0.6, 1.5);
        sub::ReducedSystem sys = make_system("EX3a", p);
        std::vector<std::vector<double>> ics = {{1.0}, {1.0}, {1.0}};
        std::vector<SolveOutcome> sol = solve_sequential(sys, ics);
        OracleResult r = adams_oracle(sys, ics, 1.0, 1000);
        double worst = 0.0, worst_startup = 0.0;
        for (std::size_t i = 0; i < r.t.size(); ++i)
            for (int j = 0; j < 3; ++j) {
                const double err = std::fabs(r.K[j][i] -
                                             fc::eval_t(sol[j].expr, r.t[i]));
                (r.t[i] < 0.01 ? worst_startup : worst) =
                    std::max(r.t[i] < 0.01 ? worst_startup : worst, err);
            }
        CHECK(worst <= 1e-4);
        CHECK(worst_startup <= 2e-4);
    }
}

TEST_CASE("time stepping agrees with every regular closed form") {
    const int N = 2000;
    for (const char* id : {"EX3a", "EX6", "EX9", "EX10"}) {
        CAPTURE(id);
        const reg::ExampleSpec* ex = reg::find(id);
        REQUIRE(ex != nullptr);
        sub::ReducedSystem sys = make_system(id, ex->defaults);
        const int n = static_cast<int>(sys.psi.size());
        std::vector<std::vector<double>> ics;
        if (std::string(id) == "EX6")
            ics = {{3.0}, {2.5}};
        else
            ics.assign(n, {1.0});
        std::vector<SolveOutcome> sol = solve_sequential(sys, ics);
        OracleResult r = adams_oracle(sys, ics, 1.0, N);
        double worst = 0.0;
        for (std::size_t i = 1; i < r.t.size(); ++i) {
            for (int j = 0; j < n; ++j) {
                const double exact = fc::eval_t(sol[j].expr, r.t[i]);
                const double rel = std::fabs(r.K[j][i] - exact) /
                                   std::max(1e-12, std::fabs(exact));
                worst = std::max(worst, rel);
            }
        }
        CHECK(worst <= 5e-4);
    }
}

TEST_CASE("time stepping rejects what it cannot represent") {
    SUBCASE("incommensurable order") {
        sub::TimeOperatorSpec op;
        op.alpha = 1.0 / 3.14159265358979323846;
        op.lambdas = {1.0};
        sub::ReducedSystem sys;
        sys.time_op = op;
        sys.psi = {sub::CoeffRational::constant(1, 0.0)};
        CHECK_THROWS_AS(adams_oracle(sys, {{1.0}}, 1.0, 100),
                        CommensurabilityError);
    }
    SUBCASE("degenerate denominator reports the failure time") {
        const reg::ExampleSpec* ex = reg::find("EX11");
        sub::ReducedSystem sys = make_system("EX11", ex->defaults);
        try {
            adams_oracle(sys, {{0.0}, {1.0}}, 1.0, 100);
            FAIL("expected a denominator failure");
        } catch (const DenominatorBlowupError& e) {
            CHECK(std::string(e.what()).find("at t") != std::string::npos);
        }
    }
}

TEST_CASE("classical limit of the flux chains is a quartic profile") {
    for (const char* id : {"EX7-I", "EX7-II"}) {
        CAPTURE(id);
        const reg::ExampleSpec* ex = reg::find(id);
        REQUIRE(ex != nullptr);
        reg::ParamSet p = ex->defaults.with({}, 1.0, 1.0);
        sub::ReducedSystem sys = make_system(id, p);
        const double a1 = p.at("a1"), a2 = p.at("a2");
        const double b1 = p.at("b1"), b2 = p.at("b2");
        std::vector<SolveOutcome> sol =
            solve_sequential(sys, {{a1, a2}, {b1, b2}});

        CHECK(close(coeff_of(sol[1].expr, 0.0), b1));
        CHECK(close(coeff_of(sol[1].expr, 1.0), b2));

        CHECK(close(coeff_of(sol[0].expr, 0.0), a1));
        CHECK(close(coeff_of(sol[0].expr, 1.0), a2));
        CHECK(close(coeff_of(sol[0].expr, 2.0), (b1 * b1 - 1.0) / 2.0));
        CHECK(close(coeff_of(sol[0].expr, 3.0), b1 * b2 / 3.0));
        CHECK(close(coeff_of(sol[0].expr, 4.0), b2 * b2 / 12.0));
    }
}

TEST_CASE("flux chains away from the classical limit keep their exponents") {
    const reg::ExampleSpec* ex = reg::find("EX7-II");
    REQUIRE(ex != nullptr);
    const double a = ex->defaults.alpha, b = ex->defaults.beta;
    const double gb = G(b + 1.0);
    sub::ReducedSystem sys = make_system("EX7-II", ex->defaults);
    const double a1 = 1.0, a2 = 1.0, b1 = 1.0, b2 = -1.0;
    std::vector<SolveOutcome> sol = solve_sequential(sys, {{a1, a2}, {b1, b2}});

    CHECK(close(coeff_of(sol[0].expr, a + 1.0),
                (b1 * b1 * gb * gb - 1.0) / G(a + 2.0)));
    CHECK(close(coeff_of(sol[0].expr, a + 2.0),
                2.0 * b1 * b2 * gb * gb / G(a + 3.0)));
    CHECK(close(coeff_of(sol[0].expr, a + 3.0),
                2.0 * b2 * b2 * gb * gb / G(a + 4.0)));
}

TEST_CASE("fdesolve selftest is green") { CHECK(fdesolve::selftest(false) == 0); }
