#include "gkaw/calculus.hpp"

#include <vector>

namespace gkaw {

namespace {

JetVar next_x(const JetVar& j) {
    int cap = kJetCap + (j.dep == Dep::V ? 1 : 0);
    if (j.x_ord + 1 > cap)
        throw JetOrderOverflow("total x-derivative beyond the supported jet order");
    return JetVar{j.dep, j.t_ord, j.x_ord + 1};
}

Rational binomial(int n, int k) {
    Rational r = 1;
    for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
    return r;
}

} // namespace

Expr total_x(const Expr& e, const Registry& reg) {
    Dependencies d = dependencies(e);
    std::vector<Expr> parts;
    if (d.on_x) parts.push_back(partial(e, VarTag::X, reg));
    for (const JetVar& j : d.jets)
        parts.push_back(mul(partial(e, j, reg), jet(next_x(j))));
    return sum(std::move(parts));
}

Expr total_x_n(const Expr& e, int k, const Registry& reg) {
    Expr r = e;
    for (int i = 0; i < k; ++i) r = total_x(r, reg);
    return r;
}

Expr total_t_on_solutions(const Expr& e, const PDEInstance& pde, const Registry& reg) {
    Dependencies d = dependencies(e);
    for (const JetVar& j : d.jets)
        if (j.dep == Dep::V)
            throw UnsupportedConstruct("on-solution time derivative is defined for u-expressions");
    std::vector<Expr> parts;
    if (d.on_t) parts.push_back(partial(e, VarTag::T, reg));
    std::vector<Expr> dxk{pde.rhs()}; // D_x^k(rhs)
    for (const JetVar& j : d.jets) {
        while (static_cast<int>(dxk.size()) <= j.x_ord) dxk.push_back(total_x(dxk.back(), reg));
        parts.push_back(mul(partial(e, j, reg), dxk[j.x_ord]));
    }
    return sum(std::move(parts));
}

Expr total_t_free(const Expr& e, const Registry& reg) {
    Dependencies d = dependencies(e);
    for (const JetVar& j : d.jets)
        if (j.dep == Dep::U)
            throw UnsupportedConstruct("free time derivative is defined for v-expressions");
    std::vector<Expr> parts;
    if (d.on_t) parts.push_back(partial(e, VarTag::T, reg));
    for (const JetVar& j : d.jets)
        parts.push_back(mul(partial(e, j, reg), jet(JetVar{j.dep, j.t_ord + 1, j.x_ord})));
    return sum(std::move(parts));
}

Expr higher_euler(const Expr& e, int j, const Registry& reg) {
    int m = max_u_order(e);
    std::vector<Expr> parts;
    for (int k = j; k <= m; ++k) {
        Expr dk = partial(e, ujet(k), reg);
        if (dk.is_zero()) continue;
        dk = total_x_n(dk, k - j, reg);
        Rational coef = binomial(k, j);
        if ((k - j) % 2 != 0) coef = -coef;
        parts.push_back(mul(number(coef), dk));
    }
    return collect_powers(sum(std::move(parts)));
}

Expr euler_u(const Expr& e, const Registry& reg) { return higher_euler(e, 0, reg); }

Expr euler_v(const Expr& e, const Registry& reg) {
    Dependencies d = dependencies(e);
    std::vector<Expr> parts;
    for (const JetVar& j : d.jets) {
        if (j.dep == Dep::U)
            throw UnsupportedConstruct("variational derivative in v needs a v-expression");
        Expr w = partial(e, j, reg);
        for (int s = 0; s < j.t_ord; ++s) w = total_t_free(w, reg);
        w = total_x_n(w, j.x_ord, reg);
        if ((j.t_ord + j.x_ord) % 2 != 0) w = neg(w);
        parts.push_back(w);
    }
    return collect_powers(sum(std::move(parts)));
}

Expr invert_total_x(const Expr& e, const Registry& reg) {
    Dependencies d0 = dependencies(e);
    for (const JetVar& j : d0.jets)
        if (j.dep == Dep::V)
            throw UnsupportedConstruct("x-antiderivative is defined for u-expressions");
    Expr theta;
    Expr rem = collect_powers(e);
    for (;;) {
        rem = collect_powers(rem);
        int m = max_u_order(rem);
        if (m <= 0) break;
        Expr a = collect_powers(partial(rem, ujet(m), reg));
        if (depends_on_jet(a, ujet(m)))
            throw NotADivergence("nonlinear in the top jet " + print_jet(ujet(m)));
        Expr s = m == 1 ? integral(a, IntVar::U) : antiderivative_closed(a, jet(ujet(m - 1)));
        theta = add(theta, s);
        rem = sub(rem, total_x(s, reg));
    }
    if (depends_on_jet(rem, ujet(0)))
        throw NotADivergence("remainder still depends on u: " + print(rem));
    if (!rem.is_zero()) {
        try {
            theta = add(theta, antiderivative_closed(rem, variable(VarTag::X)));
        } catch (const NonIntegrable&) {
            throw NonPolynomialResidue("jet-free remainder has no closed x-antiderivative: " +
                                       print(rem));
        }
    }
    return theta;
}

bool is_total_x_divergence(const Expr& e, const Registry& reg) {
    try {
        invert_total_x(e, reg);
        return true;
    } catch (const NotADivergence&) {
        return false;
    } catch (const NonPolynomialResidue&) {
        return false;
    }
}

Expr homotopy_density(const Expr& q, const Registry& reg, const Expr& base) {
    Dependencies bd = dependencies(base);
    if (!bd.jets.empty())
        throw UnsupportedConstruct("homotopy base point must be jet-free");
    Expr lam = parameter("lambda");
    if (depends_on_param(q, "lambda") || depends_on_param(base, "lambda"))
        throw UnsupportedConstruct("lambda is reserved for the homotopy variable");
    Bindings b;
    Expr base_k = base;
    int m = std::max(max_u_order(q), 0);
    for (int k = 0; k <= m; ++k) {
        Expr uk = jet(ujet(k));
        b.jets[ujet(k)] = add(base_k, mul(lam, sub(uk, base_k)));
        base_k = total_x(base_k, reg);
    }
    try {
        Expr integrand = mul(sub(jet(ujet(0)), base), substitute(q, b, reg));
        Expr anti = antiderivative_closed(integrand, lam);
        Bindings at1, at0;
        at1.params["lambda"] = number(1);
        at0.params["lambda"] = number(0);
        return sub(substitute(anti, at1, reg), substitute(anti, at0, reg));
    } catch (const DomainError& ex) {
        throw SingularHomotopy(std::string("singular homotopy endpoint: ") + ex.what());
    } catch (const UnsupportedConstruct& ex) {
        throw NonIntegrable(std::string("multiplier does not admit the homotopy: ") + ex.what());
    }
}

Expr flux_from_density(const Expr& density, const PDEInstance& pde, const Registry& reg) {
    return invert_total_x(neg(total_t_on_solutions(density, pde, reg)), reg);
}

} // namespace gkaw
