#pragma once

#include "gkaw/expr.hpp"
#include "gkaw/registry.hpp"

namespace gkaw {

// u_t = a(t) u_xxxxx + b(t) u_xxx + c(t) f(u) u_x
struct PDEInstance {
    Expr a, b, c, f;

    Expr rhs() const {
        return sum({mul(a, jet(ujet(5))), mul(b, jet(ujet(3))), mul(c, f, jet(ujet(1)))});
    }
};

// coefficients left as the opaque symbols a(t), b(t), c(t), f(u)
inline PDEInstance symbolic_pde() {
    return PDEInstance{func("a", t_signature()), func("b", t_signature()),
                       func("c", t_signature()), func("f", u_signature())};
}

} // namespace gkaw
