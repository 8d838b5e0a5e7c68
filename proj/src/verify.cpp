#include "gkaw/verify.hpp"

#include "gkaw/errors.hpp"

#include <map>

namespace gkaw {

namespace {

bool is_zero(const Expr& e) { return e.is_zero(); }

} // namespace

Expr characteristic(const SymmetryGenerator& g, const PDEInstance& pde, const Registry&) {
    return sum({g.eta, neg(mul(g.xi, jet(ujet(1)))), neg(mul(g.tau, pde.rhs()))});
}

Expr symmetry_residual(const Expr& p, const PDEInstance& pde, const Registry& reg) {
    return collect_powers(sum({total_t_on_solutions(p, pde, reg),
                               neg(mul(pde.a, total_x_n(p, 5, reg))),
                               neg(mul(pde.b, total_x_n(p, 3, reg))),
                               neg(mul(pde.c, total_x(mul(pde.f, p), reg)))}));
}

Expr adjoint_residual(const Expr& q, const PDEInstance& pde, const Registry& reg) {
    return collect_powers(sum({neg(total_t_on_solutions(q, pde, reg)),
                               mul(pde.a, total_x_n(q, 5, reg)),
                               mul(pde.b, total_x_n(q, 3, reg)),
                               mul(pde.c, pde.f, total_x(q, reg))}));
}

std::array<Expr, 4> helmholtz_residuals(const Expr& q, const Registry& reg) {
    std::array<Expr, 4> out;
    for (int j = 0; j < 4; ++j) {
        Expr direct = partial(q, ujet(j), reg);
        Expr variational = higher_euler(q, j, reg);
        out[j] = collect_powers((j % 2 == 0) ? sub(direct, variational)
                                              : add(direct, variational));
    }
    return out;
}

bool is_multiplier(const Expr& q, const PDEInstance& pde, const Registry& reg) {
    if (!is_zero(adjoint_residual(q, pde, reg))) return false;
    for (const Expr& r : helmholtz_residuals(q, reg))
        if (!is_zero(r)) return false;
    return true;
}

Expr euler_match_residual(const Expr& density, const Expr& q, const Registry& reg) {
    return collect_powers(sub(euler_u(density, reg), q));
}

Expr divergence_residual(const Expr& density, const Expr& flux, const PDEInstance& pde,
                         const Registry& reg) {
    return collect_powers(add(total_t_on_solutions(density, pde, reg), total_x(flux, reg)));
}

Expr hamiltonian_map(const Expr& q, const Registry& reg) { return total_x(q, reg); }

bool is_hamiltonian_form(const Expr& p, const Registry& reg) {
    return is_zero(euler_u(p, reg));
}

Expr hamiltonian_density(const PDEInstance& pde) {
    Expr u = jet(ujet(0));
    Expr second_antiderivative =
        sub(mul(u, integral(pde.f, IntVar::U)), integral(mul(u, pde.f), IntVar::U));
    return sum({mul(number(Rational(1, 2)), pde.a, pow(jet(ujet(2)), number(2))),
                neg(mul(number(Rational(1, 2)), pde.b, pow(jet(ujet(1)), number(2)))),
                mul(pde.c, second_antiderivative)});
}

Expr hamiltonian_form_residual(const PDEInstance& pde, const Registry& reg) {
    Expr gradient = euler_u(hamiltonian_density(pde), reg);
    return collect_powers(sub(pde.rhs(), total_x(gradient, reg)));
}

Expr potential_euler_lagrange(const PDEInstance& pde, const Registry& reg,
                              const Expr& perturbation) {
    Expr u = jet(ujet(0));
    Expr second_antiderivative =
        sub(mul(u, integral(pde.f, IntVar::U)), integral(mul(u, pde.f), IntVar::U));
    Expr half = number(Rational(1, 2));
    Expr lagrangian =
        sum({neg(mul(half, jet(vjet(1, 0)), jet(vjet(0, 1)))),
             mul(half, pde.a, pow(jet(vjet(0, 3)), number(2))),
             neg(mul(half, pde.b, pow(jet(vjet(0, 2)), number(2)))),
             mul(pde.c, to_potential(second_antiderivative)), perturbation});
    Expr target = sum({jet(vjet(1, 1)),
                       neg(mul(pde.a, jet(vjet(0, 6)))),
                       neg(mul(pde.b, jet(vjet(0, 4)))),
                       neg(mul(pde.c, to_potential(pde.f), jet(vjet(0, 2))))});
    return collect_powers(sub(euler_v(lagrangian, reg), target));
}

std::optional<Rational> proportionality_factor(const Expr& lhs, const Expr& rhs) {
    const bool lz = is_zero(lhs), rz = is_zero(rhs);
    if (lz && rz) return Rational(1);
    if (lz != rz) return std::nullopt;
    auto coefficient_map = [](const Expr& e) {
        std::map<Expr, Rational, decltype([](const Expr& a, const Expr& b) {
                     return cmp(a, b) < 0;
                 })>
            m;
        for (const Expr& term : terms(e)) {
            auto [c, monic] = split_coefficient(term);
            m.emplace(monic, c);
        }
        return m;
    };
    auto lm = coefficient_map(lhs);
    auto rm = coefficient_map(rhs);
    if (lm.size() != rm.size()) return std::nullopt;
    std::optional<Rational> ratio;
    auto it = rm.begin();
    for (const auto& [monic, c] : lm) {
        if (!equal(monic, it->first)) return std::nullopt;
        Rational r = c / it->second;
        if (ratio && *ratio != r) return std::nullopt;
        ratio = r;
        ++it;
    }
    return ratio;
}

bool noether_correspondence_check(const Expr& q, const SymmetryGenerator& g,
                                  const PDEInstance& pde, const Registry& reg) {
    Expr from_multiplier = hamiltonian_map(q, reg);
    Expr from_generator = characteristic(g, pde, reg);
    auto r = proportionality_factor(from_multiplier, from_generator);
    if (!r || *r == 0) return false;
    return is_zero(symmetry_residual(from_multiplier, pde, reg)) &&
           is_zero(symmetry_residual(from_generator, pde, reg));
}

} // namespace gkaw
