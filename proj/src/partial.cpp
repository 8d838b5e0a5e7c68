#include "gkaw/expr.hpp"
#include "gkaw/registry.hpp"

namespace gkaw {

namespace {

// The atom a function-argument slot is read at, accounting for u = v_x.
bool slot_matches(const DiffAtom& wrt, const ArgSlot& slot, bool potential) {
    switch (slot.tag) {
    case ArgSlot::Tag::T:
        return wrt.tag == DiffAtom::Tag::Var && wrt.var == VarTag::T;
    case ArgSlot::Tag::X:
        return wrt.tag == DiffAtom::Tag::Var && wrt.var == VarTag::X;
    case ArgSlot::Tag::Jet: {
        JetVar j = slot.jet;
        if (potential && j.dep == Dep::U) j = potential_image(j);
        return wrt.tag == DiffAtom::Tag::Jet && wrt.jet == j;
    }
    }
    return false;
}

bool matches_int_dummy(const DiffAtom& wrt, IntVar v, bool potential) {
    if (v == IntVar::T) return wrt.tag == DiffAtom::Tag::Var && wrt.var == VarTag::T;
    JetVar dummy = potential ? potential_image(ujet(0)) : ujet(0);
    return wrt.tag == DiffAtom::Tag::Jet && wrt.jet == dummy;
}

} // namespace

Expr partial(const Expr& e, const DiffAtom& wrt, const Registry& reg) {
    const Node& n = e.n();
    switch (n.kind) {
    case Kind::Number:
        return {};
    case Kind::Param:
        return (wrt.tag == DiffAtom::Tag::Param && wrt.param == n.name) ? number(1) : Expr{};
    case Kind::Var:
        return (wrt.tag == DiffAtom::Tag::Var && wrt.var == n.var) ? number(1) : Expr{};
    case Kind::Jet:
        return (wrt.tag == DiffAtom::Tag::Jet && wrt.jet == n.jet) ? number(1) : Expr{};
    case Kind::Func: {
        const FunctionSymbol* fs = reg.find_func(n.name);
        if (!fs) throw Error("unregistered function symbol: " + n.name);
        std::vector<Expr> out;
        for (std::size_t i = 0; i < n.args.size(); ++i) {
            if (!slot_matches(wrt, n.args[i], n.potential)) continue;
            if (fs->closed) {
                out.push_back(n.potential ? to_potential(fs->rule) : fs->rule);
            } else {
                std::vector<int> d = n.derivs;
                ++d[i];
                out.push_back(func(n.name, n.args, std::move(d), n.potential));
            }
        }
        return sum(std::move(out));
    }
    case Kind::Ln:
        return mul(partial(n.kids[0], wrt, reg), pow(n.kids[0], -1));
    case Kind::Int: {
        if (matches_int_dummy(wrt, n.ivar, n.potential))
            return n.potential ? to_potential(n.kids[0]) : n.kids[0];
        // differentiate under the marker (zero integration constant choice)
        Expr inner = partial(n.kids[0], wrt, reg);
        if (inner.is_zero()) return {};
        Expr rebuilt = integral(inner, n.ivar);
        return n.potential ? to_potential(rebuilt) : rebuilt;
    }
    case Kind::Pow: {
        const Expr& base = n.kids[0];
        const Expr& ex = n.kids[1];
        Expr de = partial(ex, wrt, reg);
        Expr db = partial(base, wrt, reg);
        if (de.is_zero())
            return mul(ex, pow(base, sub(ex, number(1))), db);
        return mul(e, add(mul(de, ln(base)), mul(ex, db, pow(base, -1))));
    }
    case Kind::Prod: {
        std::vector<Expr> out;
        for (std::size_t i = 0; i < n.kids.size(); ++i) {
            Expr di = partial(n.kids[i], wrt, reg);
            if (di.is_zero()) continue;
            std::vector<Expr> fs{number(n.num), di};
            for (std::size_t j = 0; j < n.kids.size(); ++j)
                if (j != i) fs.push_back(n.kids[j]);
            out.push_back(prod(std::move(fs)));
        }
        return sum(std::move(out));
    }
    case Kind::Sum: {
        std::vector<Expr> out;
        out.reserve(n.kids.size());
        for (const auto& k : n.kids) out.push_back(partial(k, wrt, reg));
        return sum(std::move(out));
    }
    }
    throw Error("unhandled node kind in partial derivative");
}

Expr partial(const Expr& e, VarTag v, const Registry& reg) { return partial(e, wrt_var(v), reg); }
Expr partial(const Expr& e, const JetVar& j, const Registry& reg) {
    return partial(e, wrt_jet(j), reg);
}

} // namespace gkaw
