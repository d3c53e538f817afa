#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "invsub/fraccalc.hpp"
#include "invsub/subspace.hpp"

namespace invsub::fdesolve {

// ---- scalar equation classification ------------------------------------------------

// Right side of one coefficient equation after substituting already-solved
// components, expressed against its own unknown K.
struct ScalarRhs {
    enum class Kind {
        Zero,                   // 0
        Constant,               // c
        LinearSelf,             // lambda * K
        PowerSelf,              // c * K^p, p integer != 0, 1
        Forcing,                // f(t), pure powers
        LinearSelfPlusForcing,  // lambda * K + f(t)
        ProductCoupling,        // c * prod of other components (pre-substitution)
    };
    Kind kind = Kind::Zero;
    double c = 0.0;                 // Constant / PowerSelf / ProductCoupling coefficient
    double lambda = 0.0;            // LinearSelf coefficient
    int p = 0;                      // PowerSelf exponent
    fraccalc::TimeExpr forcing;     // Forcing / LinearSelfPlusForcing
    std::vector<int> indices;       // ProductCoupling partner components
};

struct ScalarFDE {
    subspace::TimeOperatorSpec time_op;
    int component = 0;
    ScalarRhs rhs;
};

// Classify component `j` of the system against the solved components provided
// (map from index to its TimeExpr). Components appearing in psi_j but absent
// from `solved` are reported as ProductCoupling when the shape allows it;
// otherwise UnsupportedSystemError.
ScalarFDE classify(const subspace::ReducedSystem& sys, int j,
                   const std::map<int, fraccalc::TimeExpr>& solved);

// ---- outcomes ----------------------------------------------------------------------

struct SolveOutcome {
    int component = 0;
    fraccalc::TimeExpr expr;
    // all real solutions when a root choice exists (expr is the chosen one)
    std::vector<fraccalc::TimeExpr> branches;
    // recorded parameter exclusions, e.g. "alpha != 0.5"
    std::vector<std::string> validity;
    std::string provenance;
    // name of a free family constant whose chosen value is folded into expr
    std::optional<std::string> free_parameter;
};

// ---- strategies --------------------------------------------------------------------

// K(t) = K0 * E_alpha(lambda t^alpha) for the single-term equation
// d^alpha K = lambda K, alpha in (0,1].
SolveOutcome solve_linear_ml(double lambda, double K0, double alpha);

// K(t) = eta t^gamma for d^alpha K = c K^p (p != 0, 1): gamma = alpha/(1-p),
// eta^(p-1) = gamma_ratio(gamma+1, gamma-alpha+1)/c. branch_sign picks the
// root when p-1 is even (EX-style +/- pairs land in `branches`).
// PoleError at excluded alpha; NoRealSolutionError when no real root exists.
SolveOutcome solve_power_ansatz(double c, int p, double alpha, int branch_sign = +1);

// K(t) = sum_{i < ceil(mu)} ics[i] t^i / i!  +  I^mu forcing, for the
// single-term operator of order mu with pure-power forcing.
SolveOutcome solve_forced_power(const subspace::TimeOperatorSpec& single_term,
                                const fraccalc::TimeExpr& forcing,
                                const std::vector<double>& ics);

// Forcing of a three-order chain by `c` times the homogeneous solution of the
// partner component with initial data partner_ics.
struct SeriesCoupling {
    double c = 0.0;
    std::vector<double> partner_ics;
};

// The two shipped multi-term families (unit coefficients, mode A):
//   orders {alpha, alpha+1, alpha+2}: rhs_self = 0, optional coupling forcing
//   orders {alpha, alpha+1}:          rhs_self = 0 or -1
// Anything else: UnsupportedSystemError.
SolveOutcome solve_multiterm_series(const subspace::TimeOperatorSpec& lhs,
                                    double rhs_self,
                                    const std::vector<double>& ics,
                                    const std::optional<SeriesCoupling>& coupling =
                                        std::nullopt,
                                    int kmax = 40);

// ---- system driver -----------------------------------------------------------------

struct ComponentOptions {
    int branch_sign = +1;       // root choice for +/- pairs
    double family_scale = 1.0;  // value of the free constant in scale families
};

// Solve every component, last-depends-first, substituting solved components
// upward. ics[j] holds the initial data of component j (ceil(top order)
// values; ignored by strategies without free initial data). Each closed-form
// outcome is back-substituted into its equation and rejected unless the
// residual is below 1e-12. UnsupportedSystemError names the first component
// with no matching strategy.
std::vector<SolveOutcome> solve_sequential(
    const subspace::ReducedSystem& sys,
    const std::vector<std::vector<double>>& ics,
    const std::map<int, ComponentOptions>& opts = {});

// Max canonical-coefficient residual of (time_op applied to expr) - rhs,
// relative to the larger side's peak coefficient. Pure powers and
// order-matched ML factors only (UnsupportedTermError otherwise).
double backsub_residual(const subspace::TimeOperatorSpec& time_op,
                        const fraccalc::TimeExpr& expr,
                        const fraccalc::TimeExpr& rhs);

// ---- numerical oracle --------------------------------------------------------------

struct OracleResult {
    std::vector<double> t;                  // N+1 uniform nodes on [0, T]
    std::vector<std::vector<double>> K;     // K[j][i] = component j at t[i]
};

// Fractional Adams-Bashforth-Moulton predictor-corrector (one corrector pass)
// after commensurate conversion of all active orders to a common step
// (rational approximations, denominator <= 64). CommensurabilityError when no
// common step exists; DenominatorBlowupError (with the failure time) when a
// rational right side degenerates along the trajectory.
OracleResult adams_oracle(const subspace::ReducedSystem& sys,
                          const std::vector<std::vector<double>>& ics,
                          double T, int N);

int selftest(bool verbose);

}  // namespace invsub::fdesolve
