#pragma once

#include "gkaw/expr.hpp"

#include <map>
#include <set>
#include <string>

namespace gkaw {

// A function symbol is OPAQUE (derivatives accumulate as multi-indices) or
// CLOSED (the derivative with respect to its argument rewrites through a
// registered rule, e.g. d'(t) = D(t)^5).
struct FunctionSymbol {
    std::string name;
    std::vector<ArgSlot> args;
    bool closed = false;
    Expr rule; // derivative w.r.t. the single argument; closed symbols only
};

class Registry {
public:
    void add_param(const std::string& name);
    bool has_param(const std::string& name) const;

    void add_func(FunctionSymbol fs);
    // Attach a rewrite rule after registration so rules may reference other
    // symbols (including each other).
    void set_rule(const std::string& name, const Expr& rule);
    const FunctionSymbol* find_func(const std::string& name) const;

    const std::set<std::string>& params() const { return params_; }
    const std::map<std::string, FunctionSymbol>& funcs() const { return funcs_; }

private:
    std::set<std::string> params_;
    std::map<std::string, FunctionSymbol> funcs_;
};

// Parameters alpha, beta, gamma, delta, mu, f0..f3 and the homotopy variable
// lambda; opaque coefficients a(t), b(t), c(t), nonlinearity f(u), the double
// antiderivative F(u) with F' = Int(f,u), and the determining-system unknowns
// xi(x,t,u), tau(x,t,u), eta(x,t,u), Q(t,x,u,u_x,...,u_xxxx).
Registry standard_registry();

std::vector<ArgSlot> t_signature();
std::vector<ArgSlot> u_signature();
std::vector<ArgSlot> point_signature();            // (x,t,u)
std::vector<ArgSlot> multiplier_signature(int order); // (t,x,u,u_x,...)

} // namespace gkaw
