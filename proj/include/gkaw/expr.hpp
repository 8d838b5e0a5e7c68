#pragma once

#include "gkaw/errors.hpp"
#include "gkaw/rational.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

namespace gkaw {

// Expressions live on the jet space (t, x, u, u_x, u_xx, ...) of a single
// dependent variable u, extended with t-jets of a potential variable v where
// u = v_x. Normal forms are sums of rational-coefficient monomials over a
// deterministic total order; building an Expr through the constructors below
// always yields the normal form, so normalization is idempotent by
// construction.

enum class Kind : std::uint8_t {
    Number, // exact rational
    Param,  // named constant (alpha, beta, gamma, delta, mu, f0..f3, lambda)
    Var,    // t or x
    Jet,    // u_{x^k} or v_{t^a x^b}
    Func,   // registered function symbol application, possibly differentiated
    Ln,     // natural logarithm of a subexpression
    Int,    // antiderivative marker Int(e, u) or Int(e, t)
    Pow,    // base^exponent with non-collapsing exponent
    Prod,   // rational coefficient times nontrivial power-product
    Sum,    // two or more collected, ordered terms
};

// Highest x-order of u-jets the toolkit works with (v-jets may go one past
// it, since u = v_x).
inline constexpr int kJetCap = 12;

enum class VarTag : std::uint8_t { T, X };
enum class Dep : std::uint8_t { U, V };
enum class IntVar : std::uint8_t { U, T };

struct JetVar {
    Dep dep = Dep::U;
    int t_ord = 0; // always 0 for u
    int x_ord = 0;
    friend auto operator<=>(const JetVar&, const JetVar&) = default;
};

inline JetVar ujet(int k) { return JetVar{Dep::U, 0, k}; }
inline JetVar vjet(int t_ord, int x_ord) { return JetVar{Dep::V, t_ord, x_ord}; }

// Image of a u-jet under u = v_x.
inline JetVar potential_image(const JetVar& j) { return JetVar{Dep::V, j.t_ord, j.x_ord + 1}; }

// A function-symbol argument slot: t, x, or a jet variable (u counts as the
// order-0 jet).
struct ArgSlot {
    enum class Tag : std::uint8_t { T, X, Jet } tag = Tag::T;
    JetVar jet{};
    friend auto operator<=>(const ArgSlot&, const ArgSlot&) = default;
};

inline ArgSlot arg_t() { return ArgSlot{ArgSlot::Tag::T, {}}; }
inline ArgSlot arg_x() { return ArgSlot{ArgSlot::Tag::X, {}}; }
inline ArgSlot arg_jet(JetVar j) { return ArgSlot{ArgSlot::Tag::Jet, j}; }

class Expr;

struct Node {
    Kind kind = Kind::Number;
    Rational num;              // Number value; Prod coefficient
    std::string name;          // Param, Func
    VarTag var = VarTag::T;    // Var
    JetVar jet{};              // Jet
    std::vector<ArgSlot> args; // Func signature as registered
    std::vector<int> derivs;   // Func: per-argument derivative counts
    bool potential = false;    // Func/Int: u-arguments read at u = v_x
    IntVar ivar = IntVar::U;   // Int
    std::vector<Expr> kids;    // Ln{e}, Int{e}, Pow{base,exp}, Prod, Sum
    std::size_t hash = 0;
};

class Expr {
public:
    Expr(); // zero
    explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

    const Node& n() const { return *node_; }
    const std::shared_ptr<const Node>& ptr() const { return node_; }

    Kind kind() const { return node_->kind; }
    bool is_zero() const { return kind() == Kind::Number && node_->num == 0; }
    bool is_one() const { return kind() == Kind::Number && node_->num == 1; }
    bool is_number() const { return kind() == Kind::Number; }

private:
    std::shared_ptr<const Node> node_;
};

// Deterministic total order; 0 iff structurally equal.
int cmp(const Expr& a, const Expr& b);
bool equal(const Expr& a, const Expr& b);

// --- constructors (normalizing) -------------------------------------------

Expr number(const Rational& r);
Expr number(long n);
Expr parameter(const std::string& name);
Expr variable(VarTag v);
Expr jet(const JetVar& j);
Expr func(const std::string& name, std::vector<ArgSlot> args,
          std::vector<int> derivs = {}, bool potential = false);
Expr ln(const Expr& e);
// Antiderivative with zero integration constant. Evaluates closed forms
// (polynomials in the integration variable, powers and logs of affine
// arguments); otherwise keeps an opaque marker whose derivative is the
// integrand.
Expr integral(const Expr& e, IntVar v, bool potential = false);
// Closed-form antiderivative with respect to an arbitrary atom (variable,
// jet or parameter); no marker fallback, throws NonIntegrable outside the
// supported class.
Expr antiderivative_closed(const Expr& e, const Expr& atom);
Expr pow(const Expr& base, const Expr& exponent);
Expr pow(const Expr& base, long exponent);
Expr prod(std::vector<Expr> factors);
Expr sum(std::vector<Expr> terms);

Expr add(const Expr& a, const Expr& b);
Expr sub(const Expr& a, const Expr& b);
Expr mul(const Expr& a, const Expr& b);
Expr mul(const Expr& a, const Expr& b, const Expr& c);
Expr div(const Expr& a, const Expr& b);
Expr neg(const Expr& a);

// --- structure queries ------------------------------------------------------

// Atoms an expression depends on, through function arguments and markers.
struct Dependencies {
    bool on_t = false;
    bool on_x = false;
    std::set<JetVar> jets;
    std::set<std::string> params;
    std::set<std::string> funcs;
};
Dependencies dependencies(const Expr& e);

bool depends_on_jet(const Expr& e, const JetVar& j);
bool depends_on_var(const Expr& e, VarTag v);
bool depends_on_param(const Expr& e, const std::string& name);
bool uses_func(const Expr& e, const std::string& name);

// Highest x-order among u-jets, -1 if none.
int max_u_order(const Expr& e);

// Terms of a sum (single-element vector otherwise).
std::vector<Expr> terms(const Expr& e);
// Split a term into (rational coefficient, monic part).
std::pair<Rational, Expr> split_coefficient(const Expr& term);
// Factors of a monic term as (base, exponent) pairs.
std::vector<std::pair<Expr, Expr>> factors(const Expr& monic);

// Value-preserving cross-term cancellation: factors the lowest power of a sum
// base out of every group of terms whose exponents differ by integers, so that
// e.g. f2*(f2 + u)^(-1) + u*(f2 + u)^(-1) - 1 collapses to 0.  Needed because
// products distribute over sums eagerly, which separates a sum from its own
// inverse powers across terms.
Expr collect_powers(const Expr& e);

// If e is affine in the given atom (p*atom + q with p, q free of it),
// return {p, q}.
struct AffineParts {
    Expr scale;
    Expr shift;
};
std::optional<AffineParts> affine_in(const Expr& e, const Expr& atom);

// Exact rational value if e is a plain number.
std::optional<Rational> rational_value(const Expr& e);

// --- printing ---------------------------------------------------------------

// Deterministic, parse-compatible rendering.
std::string print(const Expr& e);
std::string print_jet(const JetVar& j);

class Registry;

// --- derivatives and substitution (expression core) -------------------------

struct DiffAtom {
    enum class Tag : std::uint8_t { Var, Jet, Param } tag = Tag::Var;
    VarTag var = VarTag::T;
    JetVar jet{};
    std::string param;
};
inline DiffAtom wrt_var(VarTag v) { return DiffAtom{DiffAtom::Tag::Var, v, {}, {}}; }
inline DiffAtom wrt_jet(JetVar j) { return DiffAtom{DiffAtom::Tag::Jet, VarTag::T, j, {}}; }
inline DiffAtom wrt_param(std::string p) {
    return DiffAtom{DiffAtom::Tag::Param, VarTag::T, {}, std::move(p)};
}

// Partial derivative treating jets as independent coordinates. Closed
// function symbols rewrite through their registered rule.
Expr partial(const Expr& e, const DiffAtom& wrt, const Registry& reg);
Expr partial(const Expr& e, VarTag v, const Registry& reg);
Expr partial(const Expr& e, const JetVar& j, const Registry& reg);

struct Bindings {
    std::map<std::string, Expr> params;
    std::map<JetVar, Expr> jets;
    std::map<VarTag, Expr> vars;
    // Function symbol -> body written in the symbol's own arguments.
    std::map<std::string, Expr> funcs;
};

// Simultaneous substitution followed by renormalization. Derivative symbols
// of a bound function substitute to the corresponding derivative of its
// body; binding a closed symbol inconsistently with its rewrite rule throws.
Expr substitute(const Expr& e, const Bindings& b, const Registry& reg);

// Potential image: u_{x^k} -> v_{x^{k+1}}; function symbols and markers with
// u-arguments are marked as read at u = v_x.
Expr to_potential(const Expr& e);

} // namespace gkaw
