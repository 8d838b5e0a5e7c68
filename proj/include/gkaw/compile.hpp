#pragma once

#include "gkaw/parse.hpp"

#include <vector>

namespace gkaw {

// Point of the jet space at which a compiled expression is evaluated; jets[k]
// holds u_{x^k} for k = 0..max_jet.
struct EvalFrame {
    double t = 0.0;
    double x = 0.0;
    const double* jets = nullptr;
    int max_jet = -1;
};

// Lowers an expression to a double-precision evaluator. Parameters are bound
// exactly (as rationals) at compile time; the folded tree may then contain
// only numbers, t, x, u-jets, ln, powers, products and sums. Deterministic;
// each arithmetic node contributes at most 2 ulp against exact rational
// evaluation.
//
// Throws UnboundSymbol for parameters left unbound and UnsupportedConstruct
// for function symbols, unevaluated antiderivative markers and v-jets, which
// have no numeric form.
class CompiledExpr {
public:
    CompiledExpr() = default;
    CompiledExpr(const Expr& e, const Registry& reg, const ParamValues& params = {});

    double operator()(const EvalFrame& frame) const;
    // coefficient shape: expression in t only
    double at_t(double t) const;
    // nonlinearity shape: expression in u only
    double at_u(double u) const;

    // highest u-jet order referenced, -1 if none
    int max_u_deriv() const { return max_jet_; }
    bool uses_t() const { return uses_t_; }
    bool uses_x() const { return uses_x_; }

    const Expr& folded() const { return folded_; }

private:
    Expr folded_;
    int max_jet_ = -1;
    bool uses_t_ = false;
    bool uses_x_ = false;
};

} // namespace gkaw
