#pragma once

#include "gkaw/pde.hpp"

namespace gkaw {

// Total derivative D_x on the jet space; works for u- and v-expressions.
Expr total_x(const Expr& e, const Registry& reg);
// D_x applied k times.
Expr total_x_n(const Expr& e, int k, const Registry& reg);

// Total derivative D_t of a u-expression with every u_t-jet replaced through
// the equation: D_t = d/dt + sum_k D_x^k(rhs) d/du_k.
Expr total_t_on_solutions(const Expr& e, const PDEInstance& pde, const Registry& reg);

// Free total derivative D_t for v-expressions (t-jets exist for v).
Expr total_t_free(const Expr& e, const Registry& reg);

// Variational derivative: E_u(e) = sum_k (-D_x)^k de/du_k.
Expr euler_u(const Expr& e, const Registry& reg);
// Higher Euler operator: E^(j)(e) = sum_{k>=j} C(k,j) (-D_x)^{k-j} de/du_k.
Expr higher_euler(const Expr& e, int j, const Registry& reg);
// Variational derivative in v over mixed t/x multi-indices.
Expr euler_v(const Expr& e, const Registry& reg);

// Whether e = D_x(theta) for some theta on the jet space.
bool is_total_x_divergence(const Expr& e, const Registry& reg);
// A theta with D_x(theta) = e; throws NotADivergence when none exists and
// NonPolynomialResidue when the jet-free remainder has no closed
// antiderivative in x.
Expr invert_total_x(const Expr& e, const Registry& reg);

// Density of the conservation law with multiplier q, reconstructed along the
// linear homotopy u -> base + lambda*(u - base):
//   T = int_0^1 (u - base) * q[u_k -> base_k + lambda*(u_k - base_k)] dlambda.
// base is an expression in t, x. Throws NonIntegrable when q does not admit
// the substitution and SingularHomotopy when an endpoint is singular.
Expr homotopy_density(const Expr& q, const Registry& reg, const Expr& base);

// Flux X with D_t T + D_x X = 0 on solutions.
Expr flux_from_density(const Expr& density, const PDEInstance& pde, const Registry& reg);

} // namespace gkaw
