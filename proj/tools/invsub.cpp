// invsub: batch front end for the invariant-subspace solver.
//
// Subcommands: list (catalog), run (solve + verify one example, emit CSV/JSON),
// check (invariance of a user-supplied problem file), selftest (module suites).
// Exit codes: 0 success, 2 verification failure (reports still written),
// 1 usage or domain errors.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "invsub/errors.hpp"
#include "invsub/fraccalc.hpp"
#include "invsub/jsonio.hpp"
#include "invsub/registry.hpp"
#include "invsub/selftest.hpp"
#include "invsub/subspace.hpp"
#include "invsub/verify.hpp"

namespace fs = std::filesystem;
using namespace invsub;

namespace {

// Offending monomial keys rendered the way the basis stores them: a unit
// coefficient, so "x^2" rather than "1*x^2".
std::string key_str(fraccalc::Monomial m) {
    m.coeff = 1.0;
    fraccalc::FuncExpr e;
    e.terms.push_back(std::move(m));
    std::string s = fraccalc::to_string(e);
    if (s.rfind("1*", 0) == 0)
        s = s.substr(2);
    return s;
}

struct RunFlags {
    std::string id;
    std::vector<std::string> consts;  // k=v entries, comma lists already split
    double alpha = 0.0;
    double beta = 0.0;
    std::vector<double> grid;  // nx,nt,xmin,xmax,tmin,tmax when given
    int kmax = 40;
    std::string out_dir = ".";
    std::string format = "both";
};

// CliConfig invariant: overrides are validated before any solve starts.
verify::RunOptions make_options(const CLI::App& run, const RunFlags& f) {
    verify::RunOptions opt;
    opt.kmax = f.kmax;
    if (opt.kmax < 1)
        throw DomainError("--kmax must be at least 1");
    if (run.count("--alpha")) {
        if (!(f.alpha > 0.0))
            throw DomainError("--alpha must be a positive order");
        opt.alpha = f.alpha;
    }
    if (run.count("--beta")) {
        if (!(f.beta > 0.0))
            throw DomainError("--beta must be a positive order");
        opt.beta = f.beta;
    }
    for (const std::string& kv : f.consts) {
        auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0)
            throw DomainError("--const entries take the form name=value; got '" + kv + "'");
        std::string name = kv.substr(0, eq);
        std::string val = kv.substr(eq + 1);
        try {
            std::size_t used = 0;
            double v = std::stod(val, &used);
            if (used != val.size())
                throw std::invalid_argument(val);
            opt.consts[name] = v;
        } catch (const std::exception&) {
            throw DomainError("--const " + name + " needs a numeric value; got '" + val + "'");
        }
    }
    if (!f.grid.empty()) {
        if (f.grid.size() != 6)
            throw DomainError("--grid takes nx,nt,xmin,xmax,tmin,tmax (6 values)");
        verify::GridSpec g;
        g.nx = static_cast<int>(f.grid[0]);
        g.nt = static_cast<int>(f.grid[1]);
        g.xmin = f.grid[2];
        g.xmax = f.grid[3];
        g.tmin = f.grid[4];
        g.tmax = f.grid[5];
        if (g.nx != f.grid[0] || g.nt != f.grid[1])
            throw DomainError("--grid sizes nx and nt must be integers");
        if (g.nx < 8 || g.nt < 8)
            throw DomainError("--grid sizes must be at least 8 in each direction");
        if (!(g.xmin < g.xmax) || !(g.tmin < g.tmax))
            throw DomainError("--grid ranges must be nonempty (xmin < xmax, tmin < tmax)");
        if (!(g.tmax > 0.0))
            throw DomainError("--grid needs tmax > 0");
        opt.grid = g;
    }
    if (f.format != "csv" && f.format != "json" && f.format != "both")
        throw DomainError("--format must be csv, json, or both");
    return opt;
}

int cmd_list() {
    std::size_t width = 0;
    for (const auto& ex : registry::all())
        width = std::max(width, ex.id.size());
    for (const auto& ex : registry::all())
        std::printf("%-*s  %s\n", static_cast<int>(width), ex.id.c_str(), ex.summary.c_str());
    return 0;
}

int cmd_run(const CLI::App& run, const RunFlags& f) {
    verify::RunOptions opt = make_options(run, f);
    verify::RunResult r = verify::run_example(f.id, opt);
    const verify::ResidualReport& rep = r.report;

    fs::path out(f.out_dir);
    fs::create_directories(out);
    fs::path csv = out / verify::csv_filename(r.id, r.params.alpha, r.params.beta);
    fs::path json = csv;
    json.replace_extension(".json");

    if (f.format == "csv" || f.format == "both") {
        std::ofstream os(csv, std::ios::binary);
        os << verify::to_csv(rep);
        if (!os)
            throw DomainError("cannot write " + csv.string());
        std::printf("wrote %s\n", csv.string().c_str());
    }
    if (f.format == "json" || f.format == "both") {
        std::ofstream os(json, std::ios::binary);
        os << jsonio::report_json(r);
        if (!os)
            throw DomainError("cannot write " + json.string());
        std::printf("wrote %s\n", json.string().c_str());
    }

    std::printf("%s  route %s\n", r.id.c_str(), registry::to_string(rep.route).c_str());
    std::printf("  solution      %s\n", verify::render(r.solution).c_str());
    std::printf("  max residual  %.3e  (tolerance %.0e)\n", rep.max_abs, rep.tolerance);
    if (r.oracle_max_rel)
        std::printf("  oracle        max relative deviation %.3e\n", *r.oracle_max_rel);
    for (const std::string& fl : rep.flagged_blocks)
        std::printf("  flag          %s\n", fl.c_str());
    std::printf("%s\n", rep.pass ? "PASS" : "FAIL");
    return rep.pass ? 0 : 2;
}

int cmd_check(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw DomainError("cannot read problem file " + path);
    std::stringstream buf;
    buf << is.rdbuf();

    jsonio::Problem pb = jsonio::parse_problem(buf.str());
    subspace::validate(pb.basis);
    subspace::validate(pb.time_op);
    subspace::InvarianceReport inv = subspace::check_invariance(pb.op, pb.basis);
    if (!inv.invariant) {
        std::string keys;
        for (const auto& m : inv.offending_keys) {
            if (!keys.empty())
                keys += ", ";
            keys += key_str(m);
        }
        std::printf("not invariant; surviving keys outside the span: %s\n", keys.c_str());
        return 2;
    }
    std::printf("invariant\n");
    subspace::ReducedSystem sys = subspace::reduce(pb.op, pb.time_op, pb.basis);
    std::string rendered = subspace::to_string(sys);
    if (!rendered.empty() && rendered.back() != '\n')
        rendered += '\n';
    std::printf("%s", rendered.c_str());
    if (pb.ic) {
        std::vector<double> ks = subspace::fit_initial_conditions(pb.basis, *pb.ic);
        std::string line = "initial coordinates:";
        char tmp[64];
        for (double k : ks) {
            std::snprintf(tmp, sizeof tmp, " %g", k);
            line += tmp;
        }
        std::printf("%s\n", line.c_str());
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"invariant-subspace solutions of time-fractional PDEs"};
    app.require_subcommand(1);
    app.failure_message(CLI::FailureMessage::help);

    CLI::App* list = app.add_subcommand("list", "show the example catalog");

    RunFlags f;
    CLI::App* run = app.add_subcommand("run", "solve one example, verify it, and write reports");
    run->add_option("id", f.id, "example id (see `invsub list`)")->required();
    run->add_option("--alpha", f.alpha, "override the time-fractional order");
    run->add_option("--beta", f.beta, "override the space-fractional order");
    run->add_option("--const", f.consts, "free constants as name=value[,name=value...]")
        ->delimiter(',');
    run->add_option("--grid", f.grid, "residual grid as nx,nt,xmin,xmax,tmin,tmax")
        ->delimiter(',');
    run->add_option("--kmax", f.kmax, "series truncation for series-route examples");
    run->add_option("--out", f.out_dir, "output directory (created if missing)");
    run->add_option("--format", f.format, "report files to write: csv, json, or both");

    std::string problem_path;
    CLI::App* check = app.add_subcommand("check", "check a problem file for invariance");
    check->add_option("file", problem_path, "problem JSON (schema invsub-problem/1)")->required();

    CLI::App* selftest = app.add_subcommand("selftest", "run every module's self checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (*list)
            return cmd_list();
        if (*run)
            return cmd_run(*run, f);
        if (*check)
            return cmd_check(problem_path);
        if (*selftest)
            return run_selftests(true) == 0 ? 0 : 2;
    } catch (const Error& e) {
        std::cerr << "invsub: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "invsub: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
