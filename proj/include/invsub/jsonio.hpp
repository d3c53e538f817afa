#pragma once

#include <optional>
#include <string>

#include "invsub/subspace.hpp"
#include "invsub/verify.hpp"

namespace invsub::jsonio {

// A user-supplied problem: the time operator, the spatial operator AST, the
// candidate subspace, and an optional initial profile expanded in the basis.
struct Problem {
    subspace::TimeOperatorSpec time_op;
    subspace::OpPtr op;
    subspace::SubspaceBasis basis;
    std::optional<fraccalc::FuncExpr> ic;
};

// Parse an "invsub-problem/1" document (see docs/formats.md). SchemaError
// names the offending key: unknown node tags, missing or mistyped fields,
// out-of-range orders and exponents.
Problem parse_problem(const std::string& text);

// Canonical JSON for a finished run: the ResidualReport without its samples
// (those are the CSV), plus parameters and the rendered solution. The
// runtime lives in a "metadata" object, the single nondeterministic block.
std::string report_json(const verify::RunResult& r);

int selftest(bool verbose);

}  // namespace invsub::jsonio
