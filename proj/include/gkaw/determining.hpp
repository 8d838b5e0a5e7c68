#pragma once

#include "gkaw/verify.hpp"

#include <string>
#include <vector>

namespace gkaw {

// overdetermined system obtained by splitting a residual over monomials in
// the jets the unknowns may not depend on; equations[i] is the collected
// coefficient of split_basis[i] and must vanish identically
struct DeterminingSystem {
    std::vector<FunctionSymbol> unknowns;
    std::vector<Expr> equations;
    std::vector<std::string> split_basis; // printed monomial keys, ascending
};

// splits the linearized symmetry condition for P = eta - xi*u_x - tau*rhs
// over monomials in the jets of order >= 1; unknowns xi, tau, eta are opaque
// functions of (x,t,u) taken from the registry
DeterminingSystem generate_symmetry_system(const PDEInstance& pde, const Registry& reg);

// splits the adjoint condition together with the four variational identities
// for the opaque ansatz Q(t,x,u,...,u_k), k = order, over monomials in the
// jets of order > k; keys are prefixed adjoint: / helmholtz0: .. helmholtz3:
DeterminingSystem generate_multiplier_system(const PDEInstance& pde, const Registry& reg,
                                             int order = 4);

enum class ExportFormat { Text, Json };

// deterministic serialization, equations ordered by split monomial;
// JSON schema: { "unknowns": [...], "equations": [...], "monomials": [...] }
std::string export_system(const DeterminingSystem& sys, ExportFormat format);

} // namespace gkaw
