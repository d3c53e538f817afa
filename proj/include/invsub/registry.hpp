#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "invsub/fraccalc.hpp"
#include "invsub/subspace.hpp"

namespace invsub::registry {

// Named parameters for one problem instance: the two fractional orders plus
// the example's free constants (equation coefficients and initial data).
struct ParamSet {
    double alpha = 0.5;
    double beta = 0.5;
    std::map<std::string, double> consts;

    // DomainError when the constant is missing.
    double at(const std::string& name) const;
    double at_or(const std::string& name, double fallback) const;
    // defaults overlaid with the entries of `over` (unknown names rejected)
    ParamSet with(const std::map<std::string, double>& over, double alpha_over,
                  double beta_over) const;
};

enum class Route { GridResidual, ReducedSymbolic, SeriesNumeric };

std::string to_string(Route r);

// One catalog entry: everything needed to build the operator, the candidate
// subspace, and the time operator for a parameter choice.
struct ExampleSpec {
    std::string id;
    std::string summary;
    Route route = Route::GridResidual;
    subspace::TimeOperatorSpec::Mode mode = subspace::TimeOperatorSpec::Mode::A;
    std::vector<double> lambdas;
    ParamSet defaults;
    std::function<subspace::OpPtr(const ParamSet&)> op;
    std::function<subspace::SubspaceBasis(const ParamSet&)> basis;
    // initial profile pinned by the problem itself; null for the generic cases
    std::function<fraccalc::FuncExpr(const ParamSet&)> ic;

    subspace::TimeOperatorSpec time_op(const ParamSet& p) const;
};

const std::vector<ExampleSpec>& all();
// nullptr when the id is unknown
const ExampleSpec* find(const std::string& id);

}  // namespace invsub::registry
