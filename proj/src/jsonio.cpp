#include "invsub/jsonio.hpp"

#include <algorithm>
#include <cstdio>

#include <json.hpp>

#include "invsub/errors.hpp"
#include "invsub/registry.hpp"

namespace invsub::jsonio {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw SchemaError(where + ": " + what);
}

const json& field(const json& o, const std::string& where, const char* key) {
    if (!o.is_object())
        fail(where, "expected an object");
    auto it = o.find(key);
    if (it == o.end())
        fail(where, std::string("missing key '") + key + "'");
    return *it;
}

double num(const json& v, const std::string& where) {
    if (!v.is_number())
        fail(where, "expected a number");
    return v.get<double>();
}

int integer(const json& v, const std::string& where) {
    if (!v.is_number_integer())
        fail(where, "expected an integer");
    return v.get<int>();
}

subspace::OpPtr parse_op(const json& v, const std::string& where) {
    const json& tag_v = field(v, where, "node");
    if (!tag_v.is_string())
        fail(where + ".node", "expected a string tag");
    const std::string tag = tag_v.get<std::string>();
    auto child = [&](const char* key) {
        return parse_op(field(v, where, key), where + "." + key);
    };
    auto children = [&]() {
        const json& arr = field(v, where, "children");
        if (!arr.is_array() || arr.empty())
            fail(where + ".children", "expected a nonempty array");
        std::vector<subspace::OpPtr> out;
        for (std::size_t i = 0; i < arr.size(); ++i)
            out.push_back(parse_op(arr[i], where + ".children[" +
                                               std::to_string(i) + "]"));
        return out;
    };
    if (tag == "F")
        return subspace::op_f();
    if (tag == "Const")
        return subspace::op_const(num(field(v, where, "value"), where + ".value"));
    if (tag == "FracDx") {
        const double order = num(field(v, where, "order"), where + ".order");
        if (!(order > 0.0))
            fail(where + ".order", "derivative order must be positive");
        return subspace::op_fracdx(order, child("child"));
    }
    if (tag == "Add")
        return subspace::op_add(children());
    if (tag == "Mul")
        return subspace::op_mul(children());
    if (tag == "Scale")
        return subspace::op_scale(num(field(v, where, "factor"), where + ".factor"),
                                  child("child"));
    if (tag == "IntPow") {
        const int e = integer(field(v, where, "exponent"), where + ".exponent");
        if (e < 2)
            fail(where + ".exponent", "integer power must be at least 2");
        return subspace::op_intpow(child("child"), e);
    }
    if (tag == "Recip")
        return subspace::op_recip(child("child"));
    fail(where, "unknown node tag '" + tag + "'");
}

std::vector<fraccalc::MlFactor> parse_ml(const json& v,
                                         const std::string& where) {
    std::vector<fraccalc::MlFactor> out;
    if (v.is_null())
        return out;
    if (!v.is_array())
        fail(where, "expected an array of ML factors");
    for (std::size_t i = 0; i < v.size(); ++i) {
        const std::string at = where + "[" + std::to_string(i) + "]";
        fraccalc::MlFactor f;
        f.order = num(field(v[i], at, "order"), at + ".order");
        f.rate = num(field(v[i], at, "rate"), at + ".rate");
        f.mult = 1;
        if (v[i].contains("mult"))
            f.mult = integer(v[i]["mult"], at + ".mult");
        if (!(f.order > 0.0))
            fail(at + ".order", "ML order must be positive");
        if (f.mult < 1)
            fail(at + ".mult", "ML multiplicity must be at least 1");
        out.push_back(f);
    }
    std::sort(out.begin(), out.end(),
              [](const fraccalc::MlFactor& a, const fraccalc::MlFactor& b) {
                  return a.order != b.order ? a.order < b.order
                                            : a.rate < b.rate;
              });
    return out;
}

fraccalc::Monomial parse_term(const json& v, const std::string& where,
                              bool with_coeff) {
    fraccalc::Monomial m;
    m.coeff = with_coeff ? num(field(v, where, "coeff"), where + ".coeff") : 1.0;
    m.power = num(field(v, where, "power"), where + ".power");
    if (v.is_object() && v.contains("ml"))
        m.ml = parse_ml(v["ml"], where + ".ml");
    return m;
}

}  // namespace

Problem parse_problem(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw SchemaError(std::string("not valid JSON: ") + e.what());
    }
    const json& schema = field(doc, "$", "schema");
    if (!schema.is_string() || schema.get<std::string>() != "invsub-problem/1")
        fail("$.schema", "expected \"invsub-problem/1\"");

    Problem p;
    const json& top = field(doc, "$", "time_op");
    const json& mode = field(top, "$.time_op", "mode");
    if (!mode.is_string() ||
        (mode.get<std::string>() != "A" && mode.get<std::string>() != "B"))
        fail("$.time_op.mode", "expected \"A\" or \"B\"");
    p.time_op.mode = mode.get<std::string>() == "A"
                         ? subspace::TimeOperatorSpec::Mode::A
                         : subspace::TimeOperatorSpec::Mode::B;
    p.time_op.alpha = num(field(top, "$.time_op", "alpha"), "$.time_op.alpha");
    const json& lam = field(top, "$.time_op", "lambdas");
    if (!lam.is_array() || lam.empty())
        fail("$.time_op.lambdas", "expected a nonempty array");
    for (std::size_t i = 0; i < lam.size(); ++i)
        p.time_op.lambdas.push_back(
            num(lam[i], "$.time_op.lambdas[" + std::to_string(i) + "]"));

    p.op = parse_op(field(doc, "$", "operator"), "$.operator");

    const json& basis = field(doc, "$", "basis");
    if (!basis.is_array() || basis.empty())
        fail("$.basis", "expected a nonempty array");
    for (std::size_t i = 0; i < basis.size(); ++i)
        p.basis.elements.push_back(parse_term(
            basis[i], "$.basis[" + std::to_string(i) + "]", false));

    if (doc.contains("ic") && !doc["ic"].is_null()) {
        const json& ic = doc["ic"];
        if (!ic.is_array())
            fail("$.ic", "expected an array of terms");
        fraccalc::FuncExpr fe;
        for (std::size_t i = 0; i < ic.size(); ++i)
            fe.terms.push_back(
                parse_term(ic[i], "$.ic[" + std::to_string(i) + "]", true));
        p.ic = fraccalc::canonical(std::move(fe));
    }
    return p;
}

std::string report_json(const verify::RunResult& r) {
    ordered_json j;
    j["schema"] = "invsub-report/1";
    j["id"] = r.id;
    ordered_json params;
    params["alpha"] = r.params.alpha;
    params["beta"] = r.params.beta;
    params["consts"] = ordered_json::object();
    for (const auto& [k, v] : r.params.consts)
        params["consts"][k] = v;
    j["params"] = params;
    j["route"] = registry::to_string(r.report.route);
    const verify::GridSpec& g = r.report.grid;
    j["grid"] = {{"xmin", g.xmin}, {"xmax", g.xmax}, {"nx", g.nx},
                 {"tmin", g.tmin}, {"tmax", g.tmax}, {"nt", g.nt}};
    j["tolerance"] = r.report.tolerance;
    j["max_abs"] = r.report.max_abs;
    j["max_rel"] = r.report.max_rel;
    j["worst"] = {{"x", r.report.worst_x}, {"t", r.report.worst_t}};
    j["pass"] = r.report.pass;
    j["flagged_blocks"] = r.report.flagged_blocks;
    if (r.oracle_max_rel)
        j["oracle_max_rel"] = *r.oracle_max_rel;
    else
        j["oracle_max_rel"] = nullptr;
    j["solution"] = verify::render(r.solution);
    ordered_json coeffs = ordered_json::array();
    for (const auto& k : r.solution.coeffs)
        coeffs.push_back(fraccalc::to_string(k));
    j["coefficients"] = coeffs;
    j["metadata"] = {{"runtime_seconds", r.report.runtime_seconds}};
    return j.dump(2) + "\n";
}

int selftest(bool verbose) {
    auto note = [&](const char* msg) {
        if (verbose)
            std::printf("jsonio: %s\n", msg);
    };
    const char* doc = R"({
      "schema": "invsub-problem/1",
      "time_op": {"mode": "A", "alpha": 0.6, "lambdas": [1.0]},
      "operator": {"node": "FracDx", "order": 0.8,
                   "child": {"node": "Mul", "children": [
                       {"node": "F"},
                       {"node": "FracDx", "order": 0.8, "child": {"node": "F"}}]}},
      "basis": [{"power": 0.0}, {"power": 0.8}, {"power": 1.6}]
    })";
    Problem p;
    try {
        p = parse_problem(doc);
    } catch (const SchemaError&) {
        return 1;
    }
    if (p.basis.elements.size() != 3 || p.time_op.lambdas.size() != 1)
        return 2;
    if (!subspace::check_invariance(p.op, p.basis).invariant)
        return 3;
    note("parsed quadratic-flux problem and confirmed invariance");
    try {
        parse_problem("{\"schema\": \"invsub-problem/2\"}");
        return 4;
    } catch (const SchemaError&) {
    }
    note("wrong schema version rejected");
    return 0;
}

}  // namespace invsub::jsonio
