#include "gkaw/compile.hpp"

#include <cmath>

namespace gkaw {

namespace {

double to_double(const Rational& r) { return r.convert_to<double>(); }

// validation walk; rejects anything without a numeric form
void validate(const Expr& e) {
    switch (e.kind()) {
    case Kind::Number:
        return;
    case Kind::Param:
        throw UnboundSymbol("parameter '" + e.n().name + "' has no bound value");
    case Kind::Var:
        return;
    case Kind::Jet:
        if (e.n().jet.dep == Dep::V)
            throw UnsupportedConstruct("potential jets have no numeric form");
        return;
    case Kind::Func:
        throw UnsupportedConstruct("function symbol '" + e.n().name +
                                   "' has no numeric form");
    case Kind::Int:
        throw UnsupportedConstruct("unevaluated antiderivative marker has no numeric form");
    case Kind::Ln:
    case Kind::Pow:
    case Kind::Prod:
    case Kind::Sum:
        for (const Expr& kid : e.n().kids) validate(kid);
        return;
    }
}

double eval_node(const Expr& e, const EvalFrame& f) {
    switch (e.kind()) {
    case Kind::Number:
        return to_double(e.n().num);
    case Kind::Var:
        return e.n().var == VarTag::T ? f.t : f.x;
    case Kind::Jet: {
        int k = e.n().jet.x_ord;
        if (k > f.max_jet)
            throw UnboundSymbol("evaluation frame provides no jet of order " +
                                std::to_string(k));
        return f.jets[k];
    }
    case Kind::Ln:
        return std::log(eval_node(e.n().kids[0], f));
    case Kind::Pow: {
        double base = eval_node(e.n().kids[0], f);
        const Expr& ex = e.n().kids[1];
        if (auto r = rational_value(ex)) {
            // integer exponents multiply out exactly
            if (denominator(*r) == 1 && abs(numerator(*r)) <= 64) {
                long n = numerator(*r).convert_to<long>();
                double acc = 1.0;
                double b = n < 0 ? 1.0 / base : base;
                for (long i = 0, m = n < 0 ? -n : n; i < m; ++i) acc *= b;
                return acc;
            }
            return std::pow(base, to_double(*r));
        }
        return std::pow(base, eval_node(ex, f));
    }
    case Kind::Prod: {
        double acc = to_double(e.n().num);
        for (const Expr& kid : e.n().kids) acc *= eval_node(kid, f);
        return acc;
    }
    case Kind::Sum: {
        double acc = 0.0;
        for (const Expr& kid : e.n().kids) acc += eval_node(kid, f);
        return acc;
    }
    default:
        throw UnsupportedConstruct("expression node has no numeric form");
    }
}

} // namespace

CompiledExpr::CompiledExpr(const Expr& e, const Registry& reg, const ParamValues& params) {
    Bindings b;
    for (const auto& [name, value] : params) b.params.emplace(name, number(value));
    folded_ = params.empty() ? e : substitute(e, b, reg);
    validate(folded_);
    Dependencies deps = dependencies(folded_);
    uses_t_ = deps.on_t;
    uses_x_ = deps.on_x;
    max_jet_ = max_u_order(folded_);
}

double CompiledExpr::operator()(const EvalFrame& frame) const {
    return eval_node(folded_, frame);
}

double CompiledExpr::at_t(double t) const {
    EvalFrame f;
    f.t = t;
    return eval_node(folded_, f);
}

double CompiledExpr::at_u(double u) const {
    EvalFrame f;
    f.jets = &u;
    f.max_jet = 0;
    return eval_node(folded_, f);
}

} // namespace gkaw
