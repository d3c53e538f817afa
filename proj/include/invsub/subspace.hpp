#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "invsub/fraccalc.hpp"
#include "invsub/poly.hpp"

namespace invsub::subspace {

// ---- operator AST ------------------------------------------------------------------

// Immutable expression tree for the x-side operator N[f]. Built through the
// op_* factories below; shared subtrees are fine.
struct OpNode;
using OpPtr = std::shared_ptr<const OpNode>;

struct OpNode {
    enum class Kind { F, FracDx, Add, Mul, Scale, IntPow, Const, Recip };
    Kind kind = Kind::F;
    double value = 0.0;        // Const payload, Scale factor
    double order = 0.0;        // FracDx order (> 0)
    int exponent = 0;          // IntPow exponent (>= 2)
    std::vector<OpPtr> children;
};

OpPtr op_f();
OpPtr op_const(double c);
OpPtr op_fracdx(double order, OpPtr child);
OpPtr op_add(std::vector<OpPtr> children);
OpPtr op_mul(std::vector<OpPtr> children);
OpPtr op_scale(double c, OpPtr child);
OpPtr op_intpow(OpPtr child, int exponent);
OpPtr op_recip(OpPtr child);

std::string to_string(const OpPtr& op);

// ---- basis -------------------------------------------------------------------------

// Span of structurally distinct monomial keys phi_0..phi_n. Coefficients are
// normally 1; a nonunit coefficient means the element is a scaled key c*phi.
struct SubspaceBasis {
    std::vector<fraccalc::Monomial> elements;
};

// {x^{p_0}, x^{p_1}, ...}
SubspaceBasis power_basis(const std::vector<double>& powers);
// single elements
fraccalc::Monomial basis_power(double p);
fraccalc::Monomial basis_ml(double order, double rate);  // E_order(rate * x^order)

// DomainError if empty or elements repeat a key.
void validate(const SubspaceBasis& basis);

// ---- symbolic expansion ------------------------------------------------------------

// One monomial key carrying a rational-function coefficient in k_0..k_n.
struct SymTerm {
    fraccalc::Monomial key;  // coeff field is 1 and ignored
    CoeffRational coeff;
};

// Canonical: keys sorted, like keys merged, zero coefficients dropped.
struct SymFuncExpr {
    std::vector<SymTerm> terms;
};

std::string to_string(const SymFuncExpr& e, const std::string& varname = "k");

// N applied to the generic element sum_j k_j phi_j, expanded over monomial keys.
SymFuncExpr apply_generic(const OpPtr& op, const SubspaceBasis& basis);

// Same evaluation with concrete coefficients; used as the numeric cross-check
// path (plain double arithmetic end to end, no symbolic coefficients).
fraccalc::FuncExpr apply_numeric(const OpPtr& op, const SubspaceBasis& basis,
                                 const std::vector<double>& ks);

// ---- invariance --------------------------------------------------------------------

struct InvarianceReport {
    bool invariant = false;
    // invariant: psi[j] multiplies phi_j in the expansion (size = basis size)
    std::vector<CoeffRational> psi;
    // not invariant: surviving keys outside the basis, in key order
    std::vector<fraccalc::Monomial> offending_keys;
    SymFuncExpr expansion;
};

InvarianceReport check_invariance(const OpPtr& op, const SubspaceBasis& basis);

// ---- time operator and reduction ---------------------------------------------------

// Left side sum of Caputo time derivatives acting on each coefficient K_j(t).
//   mode A: lambdas[i] multiplies order alpha + i   (i = 0..m)
//   mode B: lambdas[i] multiplies order (i+1)*alpha (i = 0..m-1)
struct TimeOperatorSpec {
    enum class Mode { A, B };
    Mode mode = Mode::A;
    double alpha = 0.5;
    std::vector<double> lambdas;
};

// The derivative orders the spec pairs with its lambdas, lowest first.
std::vector<double> op_orders(const TimeOperatorSpec& spec);
// DomainError unless alpha > 0, some lambda != 0, and the highest-order
// lambda != 0.
void validate(const TimeOperatorSpec& spec);
std::string to_string(const TimeOperatorSpec& spec);

// d^orders K_j = psi_j(K_0..K_n), one component per basis element.
struct ReducedSystem {
    TimeOperatorSpec time_op;
    std::vector<CoeffRational> psi;
    SubspaceBasis basis;
};

// NotInvariantError (listing the offending keys) when the basis is not
// invariant under op.
ReducedSystem reduce(const OpPtr& op, const TimeOperatorSpec& time_op,
                     const SubspaceBasis& basis);
std::string to_string(const ReducedSystem& sys);

// ---- initial conditions ------------------------------------------------------------

// Coordinates of ic in the basis, to be assigned to K_j^(derivative_level)(0).
// NotInBasisError (listing offending keys) if ic leaves the span.
std::vector<double> fit_initial_conditions(const SubspaceBasis& basis,
                                           const fraccalc::FuncExpr& ic,
                                           int derivative_level = 0);

int selftest(bool verbose);

}  // namespace invsub::subspace
