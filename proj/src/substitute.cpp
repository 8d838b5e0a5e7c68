#include "gkaw/expr.hpp"
#include "gkaw/registry.hpp"

namespace gkaw {

namespace {

DiffAtom slot_diff_atom(const ArgSlot& slot) {
    switch (slot.tag) {
    case ArgSlot::Tag::T:
        return wrt_var(VarTag::T);
    case ArgSlot::Tag::X:
        return wrt_var(VarTag::X);
    case ArgSlot::Tag::Jet:
        return wrt_jet(slot.jet);
    }
    throw Error("bad argument slot");
}

Expr slot_atom(const ArgSlot& slot, bool potential) {
    switch (slot.tag) {
    case ArgSlot::Tag::T:
        return variable(VarTag::T);
    case ArgSlot::Tag::X:
        return variable(VarTag::X);
    case ArgSlot::Tag::Jet: {
        JetVar j = slot.jet;
        if (potential && j.dep == Dep::U) j = potential_image(j);
        return jet(j);
    }
    }
    throw Error("bad argument slot");
}

// non-identity binding of the given atom expression
bool rebinds(const Bindings& b, const Expr& atom) {
    const Node& n = atom.n();
    if (n.kind == Kind::Var) {
        auto it = b.vars.find(n.var);
        return it != b.vars.end() && !equal(it->second, atom);
    }
    auto it = b.jets.find(n.jet);
    return it != b.jets.end() && !equal(it->second, atom);
}

Expr subst(const Expr& e, const Bindings& b, const Registry& reg, int depth) {
    if (depth > 64) throw UnsupportedConstruct("function bindings nested too deeply");
    const Node& n = e.n();
    switch (n.kind) {
    case Kind::Number:
        return e;
    case Kind::Param: {
        auto it = b.params.find(n.name);
        return it == b.params.end() ? e : it->second;
    }
    case Kind::Var: {
        auto it = b.vars.find(n.var);
        return it == b.vars.end() ? e : it->second;
    }
    case Kind::Jet: {
        auto it = b.jets.find(n.jet);
        return it == b.jets.end() ? e : it->second;
    }
    case Kind::Func: {
        const FunctionSymbol* fs = reg.find_func(n.name);
        if (!fs) throw Error("unregistered function symbol: " + n.name);
        auto it = b.funcs.find(n.name);
        if (it == b.funcs.end()) {
            // no composition into opaque symbols
            for (const auto& a : n.args)
                if (rebinds(b, slot_atom(a, n.potential)))
                    throw UnsupportedConstruct(
                        "cannot substitute into an argument of unbound symbol " + n.name);
            return e;
        }
        const Expr& body = it->second;
        if (uses_func(body, n.name))
            throw UnsupportedConstruct("function binding references itself: " + n.name);
        if (fs->closed) {
            Expr lhs = partial(body, slot_diff_atom(fs->args[0]), reg);
            Expr rhs = subst(fs->rule, b, reg, depth + 1);
            if (!equal(lhs, rhs))
                throw UnsupportedConstruct("binding for closed symbol " + n.name +
                                           " violates its rewrite rule");
        }
        Expr r = body;
        for (std::size_t i = 0; i < n.args.size(); ++i)
            for (int k = 0; k < n.derivs[i]; ++k) r = partial(r, slot_diff_atom(n.args[i]), reg);
        if (n.potential) r = to_potential(r);
        return subst(r, b, reg, depth + 1);
    }
    case Kind::Ln:
        return ln(subst(n.kids[0], b, reg, depth));
    case Kind::Int: {
        Expr dummy = n.ivar == IntVar::U
                         ? jet(n.potential ? potential_image(ujet(0)) : ujet(0))
                         : variable(VarTag::T);
        if (rebinds(b, dummy))
            throw UnsupportedConstruct("cannot substitute the integration variable of a marker");
        // marker integrands depend only on their dummy, parameters and
        // function symbols, so only those bindings reach inside
        Bindings inner;
        inner.params = b.params;
        inner.funcs = b.funcs;
        Expr integrand = subst(n.kids[0], inner, reg, depth);
        Expr rebuilt = integral(integrand, n.ivar);
        return n.potential ? to_potential(rebuilt) : rebuilt;
    }
    case Kind::Pow:
        return pow(subst(n.kids[0], b, reg, depth), subst(n.kids[1], b, reg, depth));
    case Kind::Prod: {
        std::vector<Expr> fs{number(n.num)};
        for (const auto& k : n.kids) fs.push_back(subst(k, b, reg, depth));
        return prod(std::move(fs));
    }
    case Kind::Sum: {
        std::vector<Expr> ts;
        ts.reserve(n.kids.size());
        for (const auto& k : n.kids) ts.push_back(subst(k, b, reg, depth));
        return sum(std::move(ts));
    }
    }
    throw Error("unhandled node kind in substitution");
}

} // namespace

Expr substitute(const Expr& e, const Bindings& b, const Registry& reg) {
    return subst(e, b, reg, 0);
}

} // namespace gkaw
