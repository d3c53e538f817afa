#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "invsub/fdesolve.hpp"
#include "invsub/fraccalc.hpp"
#include "invsub/registry.hpp"
#include "invsub/subspace.hpp"

namespace invsub::verify {

// ---- full solutions ----------------------------------------------------------------

// f(x, t) = sum_j coeffs[j](t) * basis element j (x)
struct SolutionExpr {
    std::vector<fraccalc::TimeExpr> coeffs;
    subspace::SubspaceBasis basis;
};

double eval_xt(const SolutionExpr& f, double x, double t);
std::string render(const SolutionExpr& f);

// ---- residual evaluation -----------------------------------------------------------

struct GridSpec {
    double xmin = 0.2;
    double xmax = 2.0;
    int nx = 20;
    double tmin = 0.05;
    double tmax = 1.0;
    int nt = 400;  // time steps over [0, tmax]; rows start at tmin
};

struct SampleRow {
    double x = 0.0;  // grid route: the x node; other routes: the component index
    double t = 0.0;
    double lhs = 0.0;
    double rhs = 0.0;
    double residual = 0.0;
};

struct ResidualReport {
    std::string id;
    registry::Route route = registry::Route::GridResidual;
    GridSpec grid;
    double tolerance = 0.0;
    // grid/series routes: worst pointwise residual of the equations of record;
    // reduced route: worst canonical-coefficient mismatch
    double max_abs = 0.0;
    // pointwise residual relative to max(|lhs|, |rhs|, 1e-8)
    double max_rel = 0.0;
    double worst_x = 0.0;
    double worst_t = 0.0;
    bool pass = false;
    // series blocks that exceed tolerance are reported here (with their own
    // residual) instead of widening the tolerance; pass covers the rest
    std::vector<std::string> flagged_blocks;
    std::vector<SampleRow> samples;
    double runtime_seconds = 0.0;
};

std::string to_csv(const ResidualReport& r);
std::string csv_filename(const std::string& id, double alpha, double beta);

// ---- the end-to-end pipeline -------------------------------------------------------

struct RunOptions {
    std::map<std::string, double> consts;  // overlaid on the catalog defaults
    std::optional<double> alpha;
    std::optional<double> beta;
    std::optional<GridSpec> grid;
    int kmax = 40;
    bool with_oracle = true;  // compare against time stepping where applicable
    int oracle_n = 2000;
};

struct RunResult {
    std::string id;
    registry::ParamSet params;
    subspace::ReducedSystem system;
    std::vector<fdesolve::SolveOutcome> outcomes;
    SolutionExpr solution;
    ResidualReport report;
    // when the time-stepping cross-check ran: worst per-component deviation
    // over the report window, relative to that component's peak magnitude
    std::optional<double> oracle_max_rel;
};

// check invariance, reduce, solve, and verify by the example's route.
// Unknown ids raise DomainError; parameter and solver errors propagate.
RunResult run_example(const std::string& id, const RunOptions& opt = {});

// initial data vectors and per-component solver options implied by a
// parameter set (free constants, family scales, branch signs)
struct ComponentData {
    std::vector<std::vector<double>> ics;
    std::map<int, fdesolve::ComponentOptions> opts;
};
ComponentData component_data(const registry::ExampleSpec& ex,
                             const registry::ParamSet& p);

// empirical convergence order of the grid residual across nt in {200,400,800}
// (the smaller of the two observed orders); grid-route examples only
double refinement_order(const std::string& id, RunOptions opt = {});

int selftest(bool verbose);

}  // namespace invsub::verify
