#include "invsub/subspace.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <utility>

#include "invsub/errors.hpp"

namespace invsub::subspace {

using fraccalc::FuncExpr;
using fraccalc::MlFactor;
using fraccalc::Monomial;

namespace {

constexpr double kPowerTol = 1e-9;  // same key tolerance as fraccalc

std::string fmt(double v, const char* spec = "%.6g") {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

bool is_const_key(const Monomial& m) {
    return m.ml.empty() && std::fabs(m.power) <= kPowerTol;
}

Monomial unit_key(const Monomial& m) {
    Monomial k = m;
    k.coeff = 1.0;
    return k;
}

// single-key product through the numeric algebra (merges ML multiplicities)
Monomial key_mul(const Monomial& a, const Monomial& b) {
    FuncExpr fa{{unit_key(a)}};
    FuncExpr fb{{unit_key(b)}};
    FuncExpr p = fraccalc::fe_mul(fa, fb);
    if (p.terms.size() != 1)
        throw DomainError("monomial key product did not stay a single key");
    return unit_key(p.terms[0]);
}

std::string key_str(const Monomial& m) {
    FuncExpr one{{unit_key(m)}};
    return fraccalc::to_string(one);
}

std::string keys_str(const std::vector<Monomial>& keys) {
    std::string out;
    for (const Monomial& m : keys) {
        if (!out.empty())
            out += ", ";
        out += key_str(m);
    }
    return out;
}

// ---- symbolic expansion algebra ----------------------------------------------------

SymFuncExpr sym_canonical(SymFuncExpr e) {
    std::sort(e.terms.begin(), e.terms.end(),
              [](const SymTerm& a, const SymTerm& b) {
                  return fraccalc::MonomialKeyLess{}(a.key, b.key);
              });
    std::vector<SymTerm> out;
    for (SymTerm& t : e.terms) {
        if (!out.empty() && fraccalc::monomial_key_equal(out.back().key, t.key))
            out.back().coeff = out.back().coeff + t.coeff;
        else
            out.push_back(std::move(t));
    }
    std::vector<SymTerm> kept;
    for (SymTerm& t : out)
        if (!t.coeff.is_zero())
            kept.push_back(std::move(t));
    e.terms = std::move(kept);
    return e;
}

SymFuncExpr sym_add(const SymFuncExpr& a, const SymFuncExpr& b) {
    SymFuncExpr out = a;
    out.terms.insert(out.terms.end(), b.terms.begin(), b.terms.end());
    return sym_canonical(std::move(out));
}

SymFuncExpr sym_mul(const SymFuncExpr& a, const SymFuncExpr& b) {
    SymFuncExpr out;
    for (const SymTerm& ta : a.terms)
        for (const SymTerm& tb : b.terms)
            out.terms.push_back({key_mul(ta.key, tb.key), ta.coeff * tb.coeff});
    return sym_canonical(std::move(out));
}

SymFuncExpr sym_scale(const SymFuncExpr& a, double c) {
    SymFuncExpr out;
    for (const SymTerm& t : a.terms)
        out.terms.push_back({t.key, t.coeff.scaled(c)});
    return sym_canonical(std::move(out));
}

SymFuncExpr apply_sym(const OpPtr& op, const SubspaceBasis& basis) {
    const int nvars = static_cast<int>(basis.elements.size());
    switch (op->kind) {
    case OpNode::Kind::F: {
        SymFuncExpr out;
        for (int j = 0; j < nvars; ++j) {
            const Monomial& el = basis.elements[j];
            out.terms.push_back(
                {unit_key(el), CoeffRational::variable(nvars, j).scaled(el.coeff)});
        }
        return sym_canonical(std::move(out));
    }
    case OpNode::Kind::Const: {
        SymFuncExpr out;
        out.terms.push_back({Monomial{1.0, 0.0, {}},
                             CoeffRational::constant(nvars, op->value)});
        return sym_canonical(std::move(out));
    }
    case OpNode::Kind::Add: {
        SymFuncExpr out;
        for (const OpPtr& ch : op->children)
            out = sym_add(out, apply_sym(ch, basis));
        return out;
    }
    case OpNode::Kind::Mul: {
        SymFuncExpr out = apply_sym(op->children[0], basis);
        for (std::size_t i = 1; i < op->children.size(); ++i)
            out = sym_mul(out, apply_sym(op->children[i], basis));
        return out;
    }
    case OpNode::Kind::Scale:
        return sym_scale(apply_sym(op->children[0], basis), op->value);
    case OpNode::Kind::IntPow: {
        SymFuncExpr base = apply_sym(op->children[0], basis);
        SymFuncExpr out = base;
        for (int i = 1; i < op->exponent; ++i)
            out = sym_mul(out, base);
        return out;
    }
    case OpNode::Kind::FracDx: {
        SymFuncExpr in = apply_sym(op->children[0], basis);
        SymFuncExpr out;
        for (const SymTerm& t : in.terms) {
            FuncExpr d = fraccalc::caputo_x(FuncExpr{{t.key}}, op->order);
            for (const Monomial& m : d.terms)
                out.terms.push_back({unit_key(m), t.coeff.scaled(m.coeff)});
        }
        return sym_canonical(std::move(out));
    }
    case OpNode::Kind::Recip: {
        SymFuncExpr in = apply_sym(op->children[0], basis);
        if (in.terms.empty())
            throw DivisionBySymbolicZero(
                "reciprocal of an identically zero operand: " +
                to_string(op->children[0]));
        if (in.terms.size() != 1 || !is_const_key(in.terms[0].key)) {
            std::vector<Monomial> left;
            for (const SymTerm& t : in.terms)
                if (!is_const_key(t.key))
                    left.push_back(t.key);
            throw RecipOnNonConstant(
                "reciprocal of the non-constant operand " +
                to_string(op->children[0]) + ", which expands with keys " +
                keys_str(left));
        }
        SymFuncExpr out;
        out.terms.push_back({Monomial{1.0, 0.0, {}}, in.terms[0].coeff.recip()});
        return out;
    }
    }
    throw DomainError("unhandled operator node");
}

FuncExpr apply_num(const OpPtr& op, const SubspaceBasis& basis,
                   const std::vector<double>& ks) {
    switch (op->kind) {
    case OpNode::Kind::F: {
        FuncExpr out;
        for (std::size_t j = 0; j < basis.elements.size(); ++j) {
            Monomial m = basis.elements[j];
            m.coeff *= ks[j];
            out.terms.push_back(m);
        }
        return fraccalc::canonical(std::move(out));
    }
    case OpNode::Kind::Const:
        return fraccalc::fe_power(op->value, 0.0);
    case OpNode::Kind::Add: {
        FuncExpr out;
        for (const OpPtr& ch : op->children)
            out = fraccalc::fe_add(out, apply_num(ch, basis, ks));
        return out;
    }
    case OpNode::Kind::Mul: {
        FuncExpr out = apply_num(op->children[0], basis, ks);
        for (std::size_t i = 1; i < op->children.size(); ++i)
            out = fraccalc::fe_mul(out, apply_num(op->children[i], basis, ks));
        return out;
    }
    case OpNode::Kind::Scale:
        return fraccalc::fe_scale(apply_num(op->children[0], basis, ks), op->value);
    case OpNode::Kind::IntPow: {
        FuncExpr base = apply_num(op->children[0], basis, ks);
        FuncExpr out = base;
        for (int i = 1; i < op->exponent; ++i)
            out = fraccalc::fe_mul(out, base);
        return out;
    }
    case OpNode::Kind::FracDx:
        return fraccalc::caputo_x(apply_num(op->children[0], basis, ks), op->order);
    case OpNode::Kind::Recip: {
        FuncExpr in = apply_num(op->children[0], basis, ks);
        if (in.terms.empty())
            throw DomainError("reciprocal of a zero operand value");
        if (in.terms.size() != 1 || !is_const_key(in.terms[0]))
            throw RecipOnNonConstant(
                "reciprocal of the non-constant operand " +
                to_string(op->children[0]));
        double c = in.terms[0].coeff;
        if (std::fabs(c) < 1e-13)
            throw DomainError("reciprocal of a vanishing operand value");
        return fraccalc::fe_power(1.0 / c, 0.0);
    }
    }
    throw DomainError("unhandled operator node");
}

}  // namespace

// ---- factories ---------------------------------------------------------------------

namespace {
OpPtr make(OpNode n) { return std::make_shared<const OpNode>(std::move(n)); }

void require_child(const OpPtr& p, const char* what) {
    if (!p)
        throw DomainError(std::string(what) + " requires a non-null operand");
}
}  // namespace

OpPtr op_f() {
    OpNode n;
    n.kind = OpNode::Kind::F;
    return make(std::move(n));
}

OpPtr op_const(double c) {
    OpNode n;
    n.kind = OpNode::Kind::Const;
    n.value = c;
    return make(std::move(n));
}

OpPtr op_fracdx(double order, OpPtr child) {
    require_child(child, "FracDx");
    if (!(order > 0.0))
        throw DomainError("FracDx order must be positive, got " + fmt(order));
    OpNode n;
    n.kind = OpNode::Kind::FracDx;
    n.order = order;
    n.children = {std::move(child)};
    return make(std::move(n));
}

OpPtr op_add(std::vector<OpPtr> children) {
    if (children.empty())
        throw DomainError("Add requires at least one operand");
    for (const OpPtr& c : children)
        require_child(c, "Add");
    OpNode n;
    n.kind = OpNode::Kind::Add;
    n.children = std::move(children);
    return make(std::move(n));
}

OpPtr op_mul(std::vector<OpPtr> children) {
    if (children.empty())
        throw DomainError("Mul requires at least one operand");
    for (const OpPtr& c : children)
        require_child(c, "Mul");
    OpNode n;
    n.kind = OpNode::Kind::Mul;
    n.children = std::move(children);
    return make(std::move(n));
}

OpPtr op_scale(double c, OpPtr child) {
    require_child(child, "Scale");
    OpNode n;
    n.kind = OpNode::Kind::Scale;
    n.value = c;
    n.children = {std::move(child)};
    return make(std::move(n));
}

OpPtr op_intpow(OpPtr child, int exponent) {
    require_child(child, "IntPow");
    if (exponent < 2)
        throw DomainError("IntPow exponent must be at least 2, got " +
                          std::to_string(exponent));
    OpNode n;
    n.kind = OpNode::Kind::IntPow;
    n.exponent = exponent;
    n.children = {std::move(child)};
    return make(std::move(n));
}

OpPtr op_recip(OpPtr child) {
    require_child(child, "Recip");
    OpNode n;
    n.kind = OpNode::Kind::Recip;
    n.children = {std::move(child)};
    return make(std::move(n));
}

std::string to_string(const OpPtr& op) {
    if (!op)
        return "<null>";
    auto join = [](const std::vector<OpPtr>& cs) {
        std::string out;
        for (const OpPtr& c : cs) {
            if (!out.empty())
                out += ", ";
            out += to_string(c);
        }
        return out;
    };
    switch (op->kind) {
    case OpNode::Kind::F:
        return "F";
    case OpNode::Kind::Const:
        return "Const[" + fmt(op->value) + "]";
    case OpNode::Kind::FracDx:
        return "FracDx[" + fmt(op->order) + "](" + to_string(op->children[0]) + ")";
    case OpNode::Kind::Add:
        return "Add(" + join(op->children) + ")";
    case OpNode::Kind::Mul:
        return "Mul(" + join(op->children) + ")";
    case OpNode::Kind::Scale:
        return "Scale[" + fmt(op->value) + "](" + to_string(op->children[0]) + ")";
    case OpNode::Kind::IntPow:
        return "IntPow[" + std::to_string(op->exponent) + "](" +
               to_string(op->children[0]) + ")";
    case OpNode::Kind::Recip:
        return "Recip(" + to_string(op->children[0]) + ")";
    }
    return "<bad>";
}

// ---- basis -------------------------------------------------------------------------

fraccalc::Monomial basis_power(double p) { return Monomial{1.0, p, {}}; }

fraccalc::Monomial basis_ml(double order, double rate) {
    Monomial m;
    m.coeff = 1.0;
    m.power = 0.0;
    m.ml = {MlFactor{order, rate, 1}};
    return m;
}

SubspaceBasis power_basis(const std::vector<double>& powers) {
    SubspaceBasis b;
    for (double p : powers)
        b.elements.push_back(basis_power(p));
    validate(b);
    return b;
}

void validate(const SubspaceBasis& basis) {
    if (basis.elements.empty())
        throw DomainError("a subspace basis needs at least one element");
    for (std::size_t i = 0; i < basis.elements.size(); ++i) {
        if (basis.elements[i].coeff == 0.0)
            throw DomainError("basis element " + std::to_string(i) +
                              " has zero coefficient");
        for (std::size_t j = i + 1; j < basis.elements.size(); ++j)
            if (fraccalc::monomial_key_equal(basis.elements[i], basis.elements[j]))
                throw DomainError("basis elements " + std::to_string(i) + " and " +
                                  std::to_string(j) + " share the key " +
                                  key_str(basis.elements[i]));
    }
}

// ---- expansion entry points --------------------------------------------------------

SymFuncExpr apply_generic(const OpPtr& op, const SubspaceBasis& basis) {
    require_child(op, "apply_generic");
    validate(basis);
    return apply_sym(op, basis);
}

fraccalc::FuncExpr apply_numeric(const OpPtr& op, const SubspaceBasis& basis,
                                 const std::vector<double>& ks) {
    require_child(op, "apply_numeric");
    validate(basis);
    if (ks.size() != basis.elements.size())
        throw DomainError("coefficient count does not match the basis size");
    return apply_num(op, basis, ks);
}

std::string to_string(const SymFuncExpr& e, const std::string& varname) {
    if (e.terms.empty())
        return "0";
    std::string out;
    for (const SymTerm& t : e.terms) {
        if (!out.empty())
            out += " + ";
        out += "(" + t.coeff.str(varname) + ")";
        if (!is_const_key(t.key))
            out += "*" + key_str(t.key);
    }
    return out;
}

// ---- invariance --------------------------------------------------------------------

InvarianceReport check_invariance(const OpPtr& op, const SubspaceBasis& basis) {
    InvarianceReport rep;
    rep.expansion = apply_generic(op, basis);
    const int nvars = static_cast<int>(basis.elements.size());
    rep.psi.assign(basis.elements.size(), CoeffRational::constant(nvars, 0.0));
    rep.invariant = true;
    for (const SymTerm& t : rep.expansion.terms) {
        bool matched = false;
        for (std::size_t j = 0; j < basis.elements.size(); ++j) {
            if (fraccalc::monomial_key_equal(t.key, basis.elements[j])) {
                rep.psi[j] = t.coeff.scaled(1.0 / basis.elements[j].coeff);
                matched = true;
                break;
            }
        }
        if (!matched) {
            rep.invariant = false;
            rep.offending_keys.push_back(t.key);
        }
    }
    if (!rep.invariant)
        rep.psi.clear();
    return rep;
}

// ---- time operator and reduction ---------------------------------------------------

std::vector<double> op_orders(const TimeOperatorSpec& spec) {
    std::vector<double> orders;
    for (std::size_t i = 0; i < spec.lambdas.size(); ++i)
        orders.push_back(spec.mode == TimeOperatorSpec::Mode::A
                             ? spec.alpha + static_cast<double>(i)
                             : spec.alpha * static_cast<double>(i + 1));
    return orders;
}

void validate(const TimeOperatorSpec& spec) {
    if (!(spec.alpha > 0.0))
        throw DomainError("time operator needs a positive base order");
    if (spec.lambdas.empty())
        throw DomainError("time operator needs at least one coefficient");
    bool any = false;
    for (double l : spec.lambdas)
        if (l != 0.0)
            any = true;
    if (!any)
        throw DomainError("time operator coefficients are all zero");
    if (spec.lambdas.back() == 0.0)
        throw DomainError("the highest-order time coefficient must be nonzero");
}

std::string to_string(const TimeOperatorSpec& spec) {
    std::vector<double> orders = op_orders(spec);
    std::string out;
    for (std::size_t i = 0; i < spec.lambdas.size(); ++i) {
        if (spec.lambdas[i] == 0.0)
            continue;
        if (!out.empty())
            out += " + ";
        if (spec.lambdas[i] != 1.0)
            out += fmt(spec.lambdas[i]) + "*";
        out += "d^" + fmt(orders[i]);
    }
    return out;
}

ReducedSystem reduce(const OpPtr& op, const TimeOperatorSpec& time_op,
                     const SubspaceBasis& basis) {
    validate(time_op);
    InvarianceReport rep = check_invariance(op, basis);
    if (!rep.invariant)
        throw NotInvariantError("the basis is not invariant under the operator; "
                                "surviving keys outside the span: " +
                                keys_str(rep.offending_keys));
    ReducedSystem sys;
    sys.time_op = time_op;
    sys.psi = std::move(rep.psi);
    sys.basis = basis;
    return sys;
}

std::string to_string(const ReducedSystem& sys) {
    std::string lhs = to_string(sys.time_op);
    std::string out;
    for (std::size_t j = 0; j < sys.psi.size(); ++j) {
        if (!out.empty())
            out += "\n";
        out += "(" + lhs + ") K" + std::to_string(j) + " = " + sys.psi[j].str("K");
    }
    return out;
}

// ---- initial conditions ------------------------------------------------------------

std::vector<double> fit_initial_conditions(const SubspaceBasis& basis,
                                           const fraccalc::FuncExpr& ic,
                                           int derivative_level) {
    validate(basis);
    if (derivative_level < 0)
        throw DomainError("derivative level must be nonnegative");
    FuncExpr prof = fraccalc::canonical(ic);
    std::vector<double> coords(basis.elements.size(), 0.0);
    std::vector<Monomial> outside;
    for (const Monomial& m : prof.terms) {
        bool matched = false;
        for (std::size_t j = 0; j < basis.elements.size(); ++j) {
            if (fraccalc::monomial_key_equal(m, basis.elements[j])) {
                coords[j] = m.coeff / basis.elements[j].coeff;
                matched = true;
                break;
            }
        }
        if (!matched)
            outside.push_back(m);
    }
    if (!outside.empty())
        throw NotInBasisError("initial profile has terms outside the basis span: " +
                              keys_str(outside));
    return coords;
}

// ---- selftest ----------------------------------------------------------------------

int selftest(bool verbose) {
    auto note = [&](const char* msg) {
        if (verbose)
            std::printf("subspace: %s\n", msg);
    };
    const double beta = 0.8;
    // product-flux operator keeps the two-element power span
    OpPtr heat = op_fracdx(beta, op_mul({op_f(), op_fracdx(beta, op_f())}));
    SubspaceBasis two = power_basis({0.0, beta});
    InvarianceReport rep = check_invariance(heat, two);
    if (!rep.invariant || rep.expansion.terms.size() != 1)
        return 1;
    note("product-flux operator maps the power span into itself");
    // squaring leaves the affine span
    InvarianceReport sq = check_invariance(op_intpow(op_f(), 2), power_basis({0.0, 1.0}));
    if (sq.invariant || sq.offending_keys.size() != 1 ||
        std::fabs(sq.offending_keys[0].power - 2.0) > 1e-12)
        return 2;
    note("squaring is flagged with the quadratic key");
    // reciprocal legality is decided after cancellation
    OpPtr balanced = op_recip(op_add({op_fracdx(beta, op_f()), op_f()}));
    SubspaceBasis mlb;
    mlb.elements = {basis_power(0.0), basis_ml(beta, -1.0)};
    InvarianceReport rec = check_invariance(balanced, mlb);
    if (!rec.invariant)
        return 3;
    bool threw = false;
    try {
        apply_generic(op_recip(op_f()), two);
    } catch (const RecipOnNonConstant&) {
        threw = true;
    }
    if (!threw)
        return 4;
    note("reciprocal accepts the cancelling span and rejects the generic one");
    // reduction carries one component per element
    TimeOperatorSpec tspec;
    tspec.alpha = 0.6;
    tspec.lambdas = {1.0};
    ReducedSystem sys = reduce(heat, tspec, two);
    if (sys.psi.size() != 2 || !sys.psi[1].is_zero())
        return 5;
    note("reduction yields one component per basis element");
    return 0;
}

}  // namespace invsub::subspace
