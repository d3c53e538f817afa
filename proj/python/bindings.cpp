// Python bindings: the catalog, the run pipeline (reports as JSON text so the
// serialization stays single-sourced), problem checking, and the special
// functions that are useful on their own.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "invsub/errors.hpp"
#include "invsub/fraccalc.hpp"
#include "invsub/jsonio.hpp"
#include "invsub/registry.hpp"
#include "invsub/selftest.hpp"
#include "invsub/specfun.hpp"
#include "invsub/subspace.hpp"
#include "invsub/verify.hpp"

namespace py = pybind11;
using namespace invsub;

namespace {

std::string unit_key(fraccalc::Monomial m) {
    m.coeff = 1.0;
    fraccalc::FuncExpr e;
    e.terms.push_back(std::move(m));
    std::string s = fraccalc::to_string(e);
    if (s.rfind("1*", 0) == 0)
        s = s.substr(2);
    return s;
}

verify::RunOptions options_from(const std::map<std::string, double>& consts,
                                std::optional<double> alpha,
                                std::optional<double> beta, int kmax,
                                bool oracle) {
    verify::RunOptions opt;
    opt.consts = consts;
    opt.alpha = alpha;
    opt.beta = beta;
    opt.kmax = kmax;
    opt.with_oracle = oracle;
    return opt;
}

}  // namespace

PYBIND11_MODULE(_invsub, m) {
    m.doc() = "invariant-subspace solutions of time-fractional PDEs";

    py::register_exception<Error>(m, "InvsubError");

    m.def("examples", [] {
        std::vector<std::pair<std::string, std::string>> out;
        for (const auto& ex : registry::all())
            out.emplace_back(ex.id, ex.summary);
        return out;
    }, "catalog of example ids with one-line descriptions");

    m.def(
        "run",
        [](const std::string& id, const std::map<std::string, double>& consts,
           std::optional<double> alpha, std::optional<double> beta, int kmax,
           bool oracle) {
            return jsonio::report_json(
                verify::run_example(id, options_from(consts, alpha, beta, kmax, oracle)));
        },
        py::arg("id"), py::kw_only(), py::arg("consts") = std::map<std::string, double>{},
        py::arg("alpha") = std::nullopt, py::arg("beta") = std::nullopt,
        py::arg("kmax") = 40, py::arg("oracle") = true,
        "solve and verify one example; returns the verification report as JSON text");

    m.def(
        "solution",
        [](const std::string& id, const std::map<std::string, double>& consts,
           std::optional<double> alpha, std::optional<double> beta, int kmax) {
            verify::RunOptions opt = options_from(consts, alpha, beta, kmax, false);
            return verify::render(verify::run_example(id, opt).solution);
        },
        py::arg("id"), py::kw_only(), py::arg("consts") = std::map<std::string, double>{},
        py::arg("alpha") = std::nullopt, py::arg("beta") = std::nullopt,
        py::arg("kmax") = 40, "closed-form (or series) solution rendered as text");

    m.def(
        "check_problem",
        [](const std::string& text) {
            jsonio::Problem pb = jsonio::parse_problem(text);
            subspace::validate(pb.basis);
            subspace::validate(pb.time_op);
            auto inv = subspace::check_invariance(pb.op, pb.basis);
            py::dict out;
            out["invariant"] = inv.invariant;
            if (inv.invariant) {
                out["system"] =
                    subspace::to_string(subspace::reduce(pb.op, pb.time_op, pb.basis));
            } else {
                std::vector<std::string> keys;
                for (const auto& k : inv.offending_keys)
                    keys.push_back(unit_key(k));
                out["offending_keys"] = keys;
            }
            return out;
        },
        py::arg("problem_json"),
        "parse a problem file (schema invsub-problem/1) and check basis invariance");

    m.def("gamma", &specfun::gamma_real, py::arg("x"),
          "Gamma function on the real line (poles raise)");
    m.def(
        "mittag_leffler",
        [](double a, double b, double z, int deriv) {
            return deriv == 0 ? specfun::ml(a, b, z) : specfun::ml_deriv(deriv, a, b, z);
        },
        py::arg("a"), py::arg("b") = 1.0, py::arg("z") = 0.0, py::arg("deriv") = 0,
        "two-parameter Mittag-Leffler function E_{a,b}(z), optionally its derivative");

    m.def("selftest", &run_selftests, py::arg("verbose") = false,
          "run every module's self checks; 0 means all passed");
}
