#include "invsub/registry.hpp"

#include "invsub/errors.hpp"
#include "invsub/specfun.hpp"

namespace invsub::registry {

using subspace::basis_ml;
using subspace::basis_power;
using subspace::op_add;
using subspace::op_const;
using subspace::op_f;
using subspace::op_fracdx;
using subspace::op_intpow;
using subspace::op_mul;
using subspace::op_recip;
using subspace::op_scale;
using subspace::OpPtr;
using subspace::SubspaceBasis;
using subspace::TimeOperatorSpec;

double ParamSet::at(const std::string& name) const {
    auto it = consts.find(name);
    if (it == consts.end())
        throw DomainError("missing constant '" + name + "'");
    return it->second;
}

double ParamSet::at_or(const std::string& name, double fallback) const {
    auto it = consts.find(name);
    return it == consts.end() ? fallback : it->second;
}

ParamSet ParamSet::with(const std::map<std::string, double>& over,
                        double alpha_over, double beta_over) const {
    ParamSet p = *this;
    p.alpha = alpha_over;
    p.beta = beta_over;
    for (const auto& [name, value] : over) {
        if (p.consts.find(name) == p.consts.end())
            throw DomainError("unknown constant '" + name + "' for this example");
        p.consts[name] = value;
    }
    return p;
}

std::string to_string(Route r) {
    switch (r) {
    case Route::GridResidual:
        return "GridResidual";
    case Route::ReducedSymbolic:
        return "ReducedSymbolic";
    case Route::SeriesNumeric:
        return "SeriesNumeric";
    }
    return "?";
}

TimeOperatorSpec ExampleSpec::time_op(const ParamSet& p) const {
    TimeOperatorSpec spec;
    spec.mode = mode;
    spec.alpha = p.alpha;
    spec.lambdas = lambdas;
    return spec;
}

namespace {

SubspaceBasis ml_span(double order, double rate) {
    SubspaceBasis b;
    b.elements = {basis_power(0.0), basis_ml(order, rate)};
    return b;
}

std::vector<ExampleSpec> build_catalog() {
    std::vector<ExampleSpec> v;

    {
        ExampleSpec e;
        e.id = "EX1";
        e.summary = "linear three-term time-fractional equation driven by a "
                    "space derivative of order beta+1";
        e.route = Route::SeriesNumeric;
        e.mode = TimeOperatorSpec::Mode::A;
        e.lambdas = {1.0, 1.0, 1.0};
        e.defaults.alpha = 0.3;
        e.defaults.beta = 0.5;
        e.defaults.consts = {{"K00", 0.5}, {"K01", 0.2},  {"K02", 0.1},
                             {"K10", 1.0}, {"K11", 0.7}, {"K12", -0.4}};
        e.op = [](const ParamSet& p) { return op_fracdx(p.beta + 1.0, op_f()); };
        e.basis = [](const ParamSet& p) {
            return subspace::power_basis({0.0, p.beta + 1.0});
        };
        v.push_back(std::move(e));
    }
    {
        ExampleSpec e;
        e.id = "EX2";
        e.summary = "fractional Burgers equation with viscosity d";
        e.route = Route::ReducedSymbolic;
        e.mode = TimeOperatorSpec::Mode::A;
        e.lambdas = {1.0};
        e.defaults.alpha = 0.3;
        e.defaults.beta = 0.8;
        e.defaults.consts = {{"d", 1.0}, {"a", 1.0}};
        e.op = [](const ParamSet& p) {
            return op_add({op_scale(-1.0, op_mul({op_f(), op_fracdx(p.beta, op_f())})),
                           op_scale(p.at("d"),
                                    op_fracdx(p.beta, op_fracdx(p.beta, op_f())))});
        };
        e.basis = [](const ParamSet& p) {
            return subspace::power_basis({0.0, p.beta});
        };
        v.push_back(std::move(e));
    }

    auto diffusion_op = [](const ParamSet& p) {
        return op_scale(p.at("C"), op_fracdx(p.beta, op_f()));
    };
    {
        ExampleSpec e;
        e.id = "EX3a";
        e.summary = "fractional diffusion on the span of 1, x^beta, x^(2 beta)";
        e.route = Route::GridResidual;
        e.mode = TimeOperatorSpec::Mode::A;
        e.lambdas = {1.0};
        e.defaults.alpha = 0.5;
        e.defaults.beta = 1.5;
        e.defaults.consts = {{"C", 1.0}, {"a", 1.0}, {"b", 1.0}, {"d", 1.0}};
        e.op = diffusion_op;
        e.basis = [](const ParamSet& p) {
            return subspace::power_basis({0.0, p.beta, 2.0 * p.beta});
        };
        v.push_back(std::move(e));
    }
    {
        ExampleSpec e;
        e.id = "EX3b";
        e.summary = "fractional diffusion on a Mittag-Leffler span";
        e.route = Route::GridResidual;
        e.mode = TimeOperatorSpec::Mode::A;
        e.lambdas = {1.0};
        e.defaults.alpha = 0.5;
        e.defaults.beta = 1.5;
        e.defaults.consts = {{"C", 1.0}, {"a", 1.0}, {"b", 1.0}};
        e.op = diffusion_op;
        e.basis = [](const ParamSet& p) { return ml_span(p.beta, 1.0); };
        v.push_back(std::move(e));
    }
    {
        ExampleSpec e;
        e.id = "EX3c";
        e.summary = "fractional diffusion on the span of 1 and x^beta";
        e.route = Route::GridResidual;
        e.mode = TimeOperatorSpec::Mode::A;
        e.lambdas = {1.0};
        e.defaults.alpha = 0.5;
        e.defaults.beta = 1.5;
        e.defaults.consts = {{"C", 1.0}, {"a", 1.0}, {"b", 1.0}};
        e.op = diffusion_op;
        e.basis = [](const ParamSet& p) {
            return subspace::power_basis({0.0, p.beta});
        };
        v.push_back(std::move(e));
    }
    {
        ExampleSpec e;
        e.id = "EX3-IVP1";
        e.summary = "fractional diffusion started from a pure power profile";
        e.route = Route::GridResidual;
        e.mode = TimeOperatorSpec::Mode::A;
        e.lambdas = {1.0};
        e.defaults.alpha = 0.5;
        e.defaults.beta = 1.5;
        e.defaults.consts = {{"C", 1.0}};
        e.op = diffusion_op;
        e.basis = [](const ParamSet& p) {
            return subspace::power_basis({0.0, p.beta});
        };
        e.ic = [](const ParamSet& p) {
            return fraccalc::fe_power(3.0 / specfun::gamma_real(p.beta + 1.0), p.beta);
        };
        v.push_back(std::move(e));
    }
    {
        ExampleSpec e;
        e.id = "EX3-IVP2";
        e.summary = "fractional diffusion started from a constant minus half "
                    "the squared power";
        e.route = Route::GridResidual;
        e.mode = TimeOperatorSpec::Mode::A;
        e.lambdas = {1.0};
        e.defaults.alpha = 0.5;
        e.defaults.beta = 1.5;
        e.defaults.consts = {{"C", 1.0}};
        e.op = diffusion_op;
        e.basis = [](const ParamSet& p) {
            return subspace::power_basis({0.0, p.beta, 2.0 * p.beta});
        };
        e.ic = [](const ParamSet& p) {
            return fraccalc::fe_add(fraccalc::fe_power(1.0, 0.0),
                                    fraccalc::fe_power(-0.5, 2.0 * p.beta));
        };
        v.push_back(std::move(e));
    }
    {
        ExampleSpec e;
        e.id = "EX4";
        e.summary = "fractional telegraph-type equation on a Mittag-Leffler span";
        e.route = Route::SeriesNumeric;
        e.mode = TimeOperatorSpec::Mode::A;
        e.lambdas = {1.0, 1.0};
        e.defaults.alpha = 0.5;
        e.defaults.beta = 1.5;
        e.defaults.consts = {{"a1", 1.0}, {"a2", 0.5}, {"b1", 1.0}, {"b2", 0.5}};
        e.op = [](const ParamSet& p) {
            return op_add({op_fracdx(p.beta, op_f()), op_scale(-1.0, op_f())});
        };
        e.basis = [](const ParamSet& p) { return ml_span(p.beta, 1.0); };
        v.push_back(std::move(e));
    }
    {
        ExampleSpec e;
        e.id = "EX6";
        e.summary = "quadratic gradient-coupling equation on a Mittag-Leffler span";
        e.route = Route::GridResidual;
        e.mode = TimeOperatorSpec::Mode::A;
        e.lambdas = {1.0};
        e.defaults.alpha = 0.8;
        e.defaults.beta = 0.9;
        e.defaults.consts = {{"K00", 3.0}, {"K10", 2.5}};
        e.op = [](const ParamSet& p) {
            return op_add(
                {op_intpow(op_fracdx(p.beta, op_f()), 2),
                 op_scale(-1.0, op_mul({op_f(), op_fracdx(p.beta, op_f())}))});
        };
        e.basis = [](const ParamSet& p) { return ml_span(p.beta, 1.0); };
        v.push_back(std::move(e));
    }

    auto product_flux = [](const ParamSet& p) {
        return op_add({op_fracdx(p.beta, op_mul({op_f(), op_fracdx(p.beta, op_f())})),
                       op_const(-1.0)});
    };
    {
        ExampleSpec e;
        e.id = "EX7-I";
        e.summary = "wave-type product-flux equation with doubled base order";
        e.route = Route::GridResidual;
        e.mode = TimeOperatorSpec::Mode::B;
        e.lambdas = {0.0, 1.0};
        e.defaults.alpha = 0.4;
        e.defaults.beta = 0.9;
        e.defaults.consts = {{"a1", 1.0}, {"a2", 0.5}, {"b1", 1.0}, {"b2", -0.5}};
        e.op = product_flux;
        e.basis = [](const ParamSet& p) {
            return subspace::power_basis({0.0, p.beta});
        };
        v.push_back(std::move(e));
    }
    {
        ExampleSpec e;
        e.id = "EX7-II";
        e.summary = "wave-type product-flux equation with base order alpha+1";
        e.route = Route::GridResidual;
        e.mode = TimeOperatorSpec::Mode::A;
        e.lambdas = {0.0, 1.0};
        e.defaults.alpha = 0.8;
        e.defaults.beta = 0.9;
        e.defaults.consts = {{"a1", 1.0}, {"a2", 1.0}, {"b1", 1.0}, {"b2", -1.0}};
        e.op = product_flux;
        e.basis = [](const ParamSet& p) {
            return subspace::power_basis({0.0, p.beta});
        };
        v.push_back(std::move(e));
    }
    {
        ExampleSpec e;
        e.id = "EX8";
        e.summary = "fractional KdV-type equation";
        e.route = Route::ReducedSymbolic;
        e.mode = TimeOperatorSpec::Mode::B;
        e.lambdas = {1.0};
        e.defaults.alpha = 0.3;
        e.defaults.beta = 0.8;
        e.defaults.consts = {{"a", 1.0}};
        e.op = [](const ParamSet& p) {
            return op_add(
                {op_scale(6.0, op_mul({op_f(), op_fracdx(p.beta, op_f())})),
                 op_scale(-1.0,
                          op_fracdx(2.0 * p.beta, op_fracdx(p.beta, op_f())))});
        };
        e.basis = [](const ParamSet& p) {
            return subspace::power_basis({0.0, p.beta});
        };
        v.push_back(std::move(e));
    }
    {
        ExampleSpec e;
        e.id = "EX9";
        e.summary = "fractional dispersion equation: triple space derivative of "
                    "half the square";
        e.route = Route::GridResidual;
        e.mode = TimeOperatorSpec::Mode::A;
        e.lambdas = {1.0};
        e.defaults.alpha = 0.6;
        e.defaults.beta = 0.8;
        e.defaults.consts = {{"a", 1.0}, {"b", 1.0}, {"c", 1.0}};
        e.op = [](const ParamSet& p) {
            return op_fracdx(
                p.beta,
                op_fracdx(p.beta,
                          op_fracdx(p.beta, op_scale(0.5, op_intpow(op_f(), 2)))));
        };
        e.basis = [](const ParamSet& p) {
            return subspace::power_basis({0.0, p.beta, 2.0 * p.beta});
        };
        v.push_back(std::move(e));
    }
    {
        ExampleSpec e;
        e.id = "EX10";
        e.summary = "nonlinear heat-type product-flux equation";
        e.route = Route::GridResidual;
        e.mode = TimeOperatorSpec::Mode::A;
        e.lambdas = {1.0};
        e.defaults.alpha = 0.6;
        e.defaults.beta = 0.8;
        e.defaults.consts = {{"a", 1.0}, {"b", 1.0}};
        e.op = [](const ParamSet& p) {
            return op_fracdx(p.beta, op_mul({op_f(), op_fracdx(p.beta, op_f())}));
        };
        e.basis = [](const ParamSet& p) {
            return subspace::power_basis({0.0, p.beta});
        };
        v.push_back(std::move(e));
    }
    {
        ExampleSpec e;
        e.id = "EX11";
        e.summary = "reaction equation with a reciprocal term on a decaying "
                    "Mittag-Leffler span";
        e.route = Route::ReducedSymbolic;
        e.mode = TimeOperatorSpec::Mode::A;
        e.lambdas = {1.0};
        e.defaults.alpha = 0.6;
        e.defaults.beta = 0.8;
        e.defaults.consts = {{"b", 1.0}, {"sign", 1.0}};
        e.op = [](const ParamSet& p) {
            return op_add({op_fracdx(p.beta, op_f()),
                           op_recip(op_add({op_fracdx(p.beta, op_f()), op_f()}))});
        };
        e.basis = [](const ParamSet& p) { return ml_span(p.beta, -1.0); };
        v.push_back(std::move(e));
    }
    return v;
}

}  // namespace

const std::vector<ExampleSpec>& all() {
    static const std::vector<ExampleSpec> catalog = build_catalog();
    return catalog;
}

const ExampleSpec* find(const std::string& id) {
    for (const ExampleSpec& e : all())
        if (e.id == id)
            return &e;
    return nullptr;
}

}  // namespace invsub::registry
