#pragma once

#include "gkaw/calculus.hpp"

#include <array>
#include <optional>

namespace gkaw {

// point-symmetry generator xi d/dx + tau d/dt + eta d/du with components
// depending on (x,t,u) only
struct SymmetryGenerator {
    Expr xi, tau, eta;
};

// characteristic P = eta - xi*u_x - tau*rhs (u_t eliminated via the PDE)
Expr characteristic(const SymmetryGenerator& g, const PDEInstance& pde, const Registry& reg);

// linearized determining expression on solutions:
// D_t P - a D_x^5 P - b D_x^3 P - c D_x(f P); zero iff P generates a symmetry
Expr symmetry_residual(const Expr& p, const PDEInstance& pde, const Registry& reg);

// adjoint determining expression on solutions:
// -D_t Q + a D_x^5 Q + b D_x^3 Q + c f D_x Q
Expr adjoint_residual(const Expr& q, const PDEInstance& pde, const Registry& reg);

// residuals of the four variational identities
// Q_u - E(Q), Q_{u_x} + E1(Q), Q_{u_xx} - E2(Q), Q_{u_xxx} + E3(Q)
std::array<Expr, 4> helmholtz_residuals(const Expr& q, const Registry& reg);

// adjoint residual and all four variational residuals vanish
bool is_multiplier(const Expr& q, const PDEInstance& pde, const Registry& reg);

// E(T) - Q; zero when the density's variational derivative recovers the
// multiplier that produced it
Expr euler_match_residual(const Expr& density, const Expr& q, const Registry& reg);

// D_t T + D_x X on solutions
Expr divergence_residual(const Expr& density, const Expr& flux, const PDEInstance& pde,
                         const Registry& reg);

// symmetry characteristic generated by a conserved-integral multiplier:
// P = D_x Q (the Hamiltonian operator is D_x)
Expr hamiltonian_map(const Expr& q, const Registry& reg);

// a characteristic lies in the image of the Hamiltonian map iff E(P) = 0
bool is_hamiltonian_form(const Expr& p, const Registry& reg);

// density of the Hamiltonian H = int h dx with u_t = D_x(E(h)):
// h = 1/2 a u_xx^2 - 1/2 b u_x^2 + c (u Int(f,u) - Int(u f,u))
Expr hamiltonian_density(const PDEInstance& pde);
// rhs - D_x(E(hamiltonian_density)); zero certifies the structure
Expr hamiltonian_form_residual(const PDEInstance& pde, const Registry& reg);

// E_v(L) minus the potential-form equation v_tx - a v_6 - b v_4 - c f(v_x) v_2
// for L = 1/2(-v_t v_x + a v_xxx^2 - b v_xx^2) + c F(v_x), F'' = f; an
// optional perturbation (in v-jets) is added to L before varying
Expr potential_euler_lagrange(const PDEInstance& pde, const Registry& reg,
                              const Expr& perturbation = {});

// r with lhs = r*rhs, when such a rational constant exists
std::optional<Rational> proportionality_factor(const Expr& lhs, const Expr& rhs);

// hamiltonian_map(q) proportional to characteristic(g) by a nonzero rational
// and both characteristics satisfy the symmetry condition
bool noether_correspondence_check(const Expr& q, const SymmetryGenerator& g,
                                  const PDEInstance& pde, const Registry& reg);

} // namespace gkaw
