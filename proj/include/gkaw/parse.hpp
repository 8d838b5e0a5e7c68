#pragma once

#include "gkaw/expr.hpp"
#include "gkaw/registry.hpp"

#include <map>
#include <string>

namespace gkaw {

// Exact values substituted for parameters at parse time.
using ParamValues = std::map<std::string, Rational>;

// Grammar (docs/grammar.md): '+','-','*','/' and right-associative '^' with
// the usual precedence; nonnegative integer literals (rationals are built by
// division); jets u, u_x, u_xx, ..., v, v_t, v_tx, ...; the variables t and
// x; parameters and function symbols resolved against the registry, function
// calls spelled with their registered argument atoms (u-arguments may all be
// read at v_x instead); ln(e); Int(e, u|t) antiderivative markers; and
// diff(e, atom, ...) for repeated partial derivatives.
Expr parse_expression(const std::string& text, const Registry& reg,
                      const ParamValues* bind = nullptr);

} // namespace gkaw
