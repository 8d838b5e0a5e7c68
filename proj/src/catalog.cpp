#include "gkaw/catalog.hpp"

#include "gkaw/errors.hpp"

#include "nlohmann/json.hpp"

#include <initializer_list>

namespace gkaw {

namespace {

constexpr const char* kAsPrinted = "as-printed";
constexpr const char* kAltRule = "alt-rule";
constexpr const char* kCorrected = "corrected";
constexpr const char* kSwapped = "swapped";

Expr parse_t(const std::string& text, const Registry& reg, const ParamValues* bind) {
    return parse_expression(text, reg, bind);
}

void require_variant(const std::string& id, const std::string& variant,
                     const std::vector<std::string>& allowed) {
    for (const auto& v : allowed)
        if (v == variant) return;
    throw Error("case " + id + " has no variant '" + variant + "'");
}

// The catalog's D(t) is shorthand for its printed definition alpha*d(t)^q + beta.
// Inlining it (instead of registering an opaque symbol) exposes the relation
// between d(t)^q and D(t) to power collection, which the residual algebra needs.
std::string expand_aux(std::string text, const std::string& d_exp) {
    const std::string from = "D(t)";
    const std::string to = "(alpha*d(t)^" + d_exp + " + beta)";
    for (std::size_t pos = 0; (pos = text.find(from, pos)) != std::string::npos; pos += to.size())
        text.replace(pos, from.size(), to);
    return text;
}

// registers the auxiliary symbol d(t) with the rewrite rule of the requested
// variant; d_rule is the printed right-hand side of d'(t), D(t) already inlined
void add_aux_symbols(Registry& reg, const std::string& d_rule, const ParamValues* bind) {
    reg.add_func(FunctionSymbol{"d", t_signature(), false, {}});
    reg.set_rule("d", parse_t(d_rule, reg, bind));
}

std::vector<CaseConstraint> check_constraints(const std::string& id, const Registry& reg,
                                              const ParamValues* bind,
                                              std::initializer_list<const char*> nonzero) {
    std::vector<CaseConstraint> out;
    for (const char* text : nonzero) {
        CaseConstraint c{std::string(text) + " != 0", parse_t(text, reg, bind)};
        if (c.value.is_zero())
            throw ConstraintViolated(id + ": requires " + c.label);
        out.push_back(std::move(c));
    }
    return out;
}

// family condition text for the coefficient slots; nullptr means arbitrary
std::vector<std::string> family_lines(const char* f, const char* b, const char* c) {
    auto line = [](const char* lhs, const char* rhs) {
        return rhs ? std::string(lhs) + " = " + rhs : std::string(lhs) + " arbitrary";
    };
    return {line("f(u)", f), line("b(t)", b), line("c(t)", c)};
}

struct FamilySpec {
    const char* f = nullptr; // nullptr = arbitrary (opaque symbol)
    const char* b = nullptr;
    const char* c = nullptr;
};

PDEInstance build_pde(const FamilySpec& fam, const Registry& reg, const ParamValues* bind,
                      const std::string* d_exp = nullptr) {
    auto text = [&](const char* s) { return d_exp ? expand_aux(s, *d_exp) : std::string(s); };
    PDEInstance pde;
    pde.a = number(1); // classification gauge: time reparametrization fixes a
    pde.b = fam.b ? parse_t(text(fam.b), reg, bind) : func("b", t_signature());
    pde.c = fam.c ? parse_t(text(fam.c), reg, bind) : func("c", t_signature());
    pde.f = fam.f ? parse_t(text(fam.f), reg, bind) : func("f", u_signature());
    return pde;
}

// ---- case tables -----------------------------------------------------------

const char* kS3C = "gamma*(alpha*t + beta)^(delta - 4/5)";
const char* kC3F = "(f1*(u + f2)^f3 + f0)";
const char* kC5IntC = "Int(gamma*d(t)^(-3/5),t)";

struct SymmetryDef {
    const char* id;
    const char* interpretation;
    FamilySpec fam;
    const char* xi;
    const char* tau;
    const char* eta;
    std::initializer_list<const char*> nonzero;
    bool aux = false; // uses d(t), D(t)
    // non-null when the printed generator leaves a nonzero residual and a
    // single-token repair closes it; selected by the "corrected" variant
    const char* xi_fix = nullptr;
    const char* eta_fix = nullptr;
    const char* interpretation_fix = nullptr;
};

const SymmetryDef kSymmetryDefs[] = {
    {"S1", "a space-translation", {}, "1", "0", "0", {}, false},
    {"S2", "a time-translation (beta) combined with a scaling (alpha)",
     {nullptr, "(alpha*t + beta)^(-2/5)", "gamma*(alpha*t + beta)^(-4/5)"},
     "1/5*alpha*x", "alpha*t + beta", "0", {}, false},
    {"S3",
     "a time-translation (beta) combined with the composition of a scaling (alpha), "
     "a shift (delta*alpha*f2/f3), and a Galilean boost (-delta*gamma*f0) with relative "
     "speed c(t)",
     {"f1*(u + f2)^f3 + f0", "(alpha*t + beta)^(-2/5)", kS3C},
     "1/5*alpha*x - delta*gamma*f0*Int(gamma*(alpha*t + beta)^(delta - 4/5),t)",
     "alpha*t + beta", "-(alpha*delta/f3)*(u + f2)", {"f1", "f3"}, false,
     // printed boost strength -delta*gamma*f0 leaves the residual
     // delta*(gamma - alpha)*f0*c(t)*u_x; strength -delta*alpha*f0 closes it
     "1/5*alpha*x - delta*alpha*f0*Int(gamma*(alpha*t + beta)^(delta - 4/5),t)", nullptr,
     "a time-translation (beta) combined with the composition of a scaling (alpha), "
     "a shift (delta*alpha*f2/f3), and a Galilean boost (-delta*alpha*f0) with relative "
     "speed c(t)"},
    {"S4", "a shift (1/f1) combined with a Galilean boost with relative speed c(t)",
     {"f1*u + f0", nullptr, nullptr}, "Int(c(t),t)", "0", "-1/f1", {"f1"}, false},
    {"S5", "the composition of an x-dependent shift and a time-dependent dilation",
     {"f1*u + f0", "gamma^2*d(t)^(-2/5)*D(t)^2", "gamma^3*d(t)^(delta - 1)*D(t)^3"},
     "(1/5 - delta + delta*beta/D(t))*x", "d(t)/D(t)^5",
     "(alpha*beta*delta^2/(gamma^3*f1))*x - (1/5 - delta*beta/D(t))*(u + f0/f1)",
     {"f1", "gamma", "delta"}, true, nullptr,
     // the printed u-component sign leaves a nonzero residual under either
     // d'(t) printing; flipping it closes the residual with the printed rule
     "(alpha*beta*delta^2/(gamma^3*f1))*x + (1/5 - delta*beta/D(t))*(u + f0/f1)", nullptr},
    {"S6",
     "a shift (f2/f1) combined with a scaling and a Galilean boost with relative speed c(t)",
     {"f1*ln(u + f2) + f0", nullptr, nullptr}, "Int(c(t),t)", "0", "-(1/f1)*(u + f2)",
     {"f1"}, false},
};

struct ConservationDef {
    const char* id;
    const char* interpretation;
    FamilySpec fam;
    std::string q;
    std::string t;
    std::initializer_list<const char*> nonzero;
    bool aux = false;
    // non-empty when the printed pair leaves a nonzero adjoint residual and a
    // coefficient-level repair closes it; selected by the "corrected" variant
    std::string q_fix;
    std::string t_fix;
};

const ConservationDef& conservation_def(std::size_t i) {
    static const ConservationDef defs[] = {
        {"C1a", "the mass; generates no symmetry (Casimir)", {}, "1", "u", {}, false},
        {"C1b", "the L^2-norm; produces a space-translation", {}, "u", "1/2*u^2", {}, false},
        {"C2", "the gradient-energy; produces a time-translation",
         {nullptr, "alpha", "beta"}, "u_xxxx + alpha*u_xx + beta*Int(f(u),u)",
         "1/2*u_xx^2 - 1/2*alpha*u_x^2 + beta*(u*Int(f(u),u) - Int(u*f(u),u))", {}, false},
        {"C3",
         "a dilational Galilean energy; produces a scaling combined with a Galilean boost",
         {"f1*(u + f2)^f3 + f0", "(alpha*t + beta)^(-2/5)",
          "gamma*(alpha*t + beta)^((f3 - 4)/5)"},
         std::string("(alpha*t + beta)*u_xxxx + (alpha*t + beta)^(3/5)*u_xx"
                     " + 1/5*alpha*x*(u + f2)"
                     " + (gamma/(f3 + 1))*(alpha*t + beta)^((f3 + 1)/5)*(u + f2)*") + kC3F,
         std::string("1/2*(alpha*t + beta)*u_xx^2 - 1/2*(alpha*t + beta)^(3/5)*u_x^2"
                     " + 1/10*alpha*x*(u + f2)^2"
                     " + (gamma/(f3 + 1))*(alpha*t + beta)^((f3 + 1)/5)*Int((u + f2)*") +
             kC3F + ",u)",
         {"f1", "f3 + 1"}, false},
        {"C4", "a Galilean momentum; produces a shift combined with a Galilean boost",
         {"f1*u + f0", nullptr, nullptr}, "Int(c(t),t)*(f1*u + f0) + x",
         "1/2*Int(c(t),t)*(f1*u^2 + 2*f0*u) + x*u", {}, false},
        {"C5",
         "a generalized dilational Galilean energy-momentum; produces a Galilean boost "
         "combined with an x-dependent shift and a time-dependent dilation",
         {"f1*u + f0", "d(t)^(-2/5)", "gamma*d(t)^(-3/5)"},
         std::string("25*gamma*f1*(d(t)*u_xxxx + d(t)^(3/5)*u_xx + 1/5*x*D(t)*u)"
                     " + 1/2*alpha*x^2 + alpha*f0*x*") + kC5IntC +
             " + 25/2*gamma^2*f1*f0*d(t)^(2/5)*u*(f1*u + f0)"
             " + 1/2*alpha*f0*" + kC5IntC + "^2*(f1*u + f0)",
         std::string("25/2*gamma*f1*(d(t)*u_xx^2 - d(t)^(3/5)*u_x^2 + 1/5*x*D(t)*u^2)"
                     " + 1/2*alpha*x^2*u + alpha*f0*x*") + kC5IntC + "*u" +
             " + 25/2*gamma^2*f1*f0*d(t)^(2/5)*Int(u*(f1*u + f0),u)"
             " + 1/2*alpha*f0*" + kC5IntC + "^2*Int(f1*u + f0,u)",
         {}, true,
         // two printed coefficients break the divergence identity under either
         // d'(t) printing: the multiplier pair closes exactly with the printed
         // rule d'(t) = D(t)^(1/2) once the x-weighted group carries x*d'(t)*u
         // (the analog of the x-weighted group of C3) instead of x*D(t)*u, and
         // the quadratic group drops its extra factor f0
         std::string("25*gamma*f1*(d(t)*u_xxxx + d(t)^(3/5)*u_xx + 1/5*x*D(t)^(1/2)*u)"
                     " + 1/2*alpha*x^2 + alpha*f0*x*") + kC5IntC +
             " + 25/2*gamma^2*f1*d(t)^(2/5)*u*(f1*u + f0)"
             " + 1/2*alpha*f0*" + kC5IntC + "^2*(f1*u + f0)",
         std::string("25/2*gamma*f1*(d(t)*u_xx^2 - d(t)^(3/5)*u_x^2 + 1/5*x*D(t)^(1/2)*u^2)"
                     " + 1/2*alpha*x^2*u + alpha*f0*x*") + kC5IntC + "*u" +
             " + 25/2*gamma^2*f1*d(t)^(2/5)*Int(u*(f1*u + f0),u)"
             " + 1/2*alpha*f0*" + kC5IntC + "^2*Int(f1*u + f0,u)"},
    };
    return defs[i];
}
constexpr std::size_t kConservationCount = 6;

const SymmetryDef* find_symmetry_def(const std::string& id) {
    for (const auto& d : kSymmetryDefs)
        if (id == d.id) return &d;
    return nullptr;
}

const ConservationDef* find_conservation_def(const std::string& id) {
    for (std::size_t i = 0; i < kConservationCount; ++i)
        if (id == conservation_def(i).id) return &conservation_def(i);
    return nullptr;
}

// d'(t) right-hand side for each catalog printing; the corrected variants
// keep the printed rule and repair the generator/multiplier instead
std::string s5_rule(const std::string& variant) {
    return variant == kAltRule ? "D(t)^(1/2)" : "D(t)^5";
}
std::string c5_rule(const std::string& variant) {
    return variant == kAltRule ? "D(t)^5" : "D(t)^(1/2)";
}

std::vector<std::string> variants_for(bool aux, bool has_fix) {
    std::vector<std::string> v{kAsPrinted};
    if (aux) v.push_back(kAltRule);
    if (has_fix) v.push_back(kCorrected);
    return v;
}

std::vector<std::string> aux_lines_s5(const std::string& variant) {
    return {"D(t) = alpha*d(t)^delta + beta", "d'(t) = " + s5_rule(variant)};
}
std::vector<std::string> aux_lines_c5(const std::string& variant) {
    return {"D(t) = alpha*d(t)^(2/5) + beta", "d'(t) = " + c5_rule(variant)};
}

} // namespace

std::vector<std::string> case_variants(const std::string& id) {
    if (const SymmetryDef* def = find_symmetry_def(id))
        return variants_for(def->aux, def->xi_fix || def->eta_fix);
    if (const ConservationDef* def = find_conservation_def(id))
        return variants_for(def->aux, !def->q_fix.empty());
    if (id == "C6") return case_variants("C5"); // integral of the C5 density
    if (id == "C1") return {kAsPrinted};
    throw Error("unknown catalog case id '" + id + "'");
}

SymmetryCase instantiate_symmetry(const std::string& id, const std::string& variant,
                                  const ParamValues* bind) {
    const SymmetryDef* def = find_symmetry_def(id);
    if (!def) throw Error("unknown symmetry case id '" + id + "'");
    require_variant(id, variant, case_variants(id));
    const bool fixed = variant == kCorrected;
    SymmetryCase out;
    out.id = id;
    out.variant = variant;
    out.interpretation =
        fixed && def->interpretation_fix ? def->interpretation_fix : def->interpretation;
    out.reg = standard_registry();
    const std::string d_exp = "delta";
    if (def->aux)
        add_aux_symbols(out.reg, expand_aux(s5_rule(variant), d_exp), bind);
    out.constraints = check_constraints(id, out.reg, bind, def->nonzero);
    out.family = family_lines(def->fam.f, def->fam.b, def->fam.c);
    if (def->aux)
        for (auto& line : aux_lines_s5(variant)) out.family.push_back(line);
    out.pde = build_pde(def->fam, out.reg, bind, def->aux ? &d_exp : nullptr);
    auto text = [&](const char* s) { return def->aux ? expand_aux(s, d_exp) : std::string(s); };
    const char* xi = fixed && def->xi_fix ? def->xi_fix : def->xi;
    const char* eta = fixed && def->eta_fix ? def->eta_fix : def->eta;
    out.gen = SymmetryGenerator{parse_t(text(xi), out.reg, bind),
                                parse_t(text(def->tau), out.reg, bind),
                                parse_t(text(eta), out.reg, bind)};
    return out;
}

ConservationCase instantiate_conservation(const std::string& id, const std::string& variant,
                                          const ParamValues* bind) {
    const ConservationDef* def = find_conservation_def(id);
    if (!def) throw Error("unknown conservation case id '" + id + "'");
    require_variant(id, variant, case_variants(id));
    const bool fixed = variant == kCorrected && !def->q_fix.empty();
    ConservationCase out;
    out.id = id;
    out.variant = variant;
    out.interpretation = def->interpretation;
    out.reg = standard_registry();
    const std::string d_exp = "(2/5)";
    if (def->aux)
        add_aux_symbols(out.reg, expand_aux(c5_rule(variant), d_exp), bind);
    out.constraints = check_constraints(id, out.reg, bind, def->nonzero);
    out.family = family_lines(def->fam.f, def->fam.b, def->fam.c);
    if (def->aux)
        for (auto& line : aux_lines_c5(variant)) out.family.push_back(line);
    out.pde = build_pde(def->fam, out.reg, bind, def->aux ? &d_exp : nullptr);
    auto text = [&](const std::string& s) { return def->aux ? expand_aux(s, d_exp) : s; };
    out.multiplier = parse_t(text(fixed ? def->q_fix : def->q), out.reg, bind);
    out.density = parse_t(text(fixed ? def->t_fix : def->t), out.reg, bind);
    return out;
}

ConservedIntegral conserved_integral_formula(const std::string& id, const std::string& variant,
                                             const ParamValues* bind) {
    ConservedIntegral out;
    out.id = id;
    out.variant = variant;
    out.reg = standard_registry();
    if (id == "C1") {
        require_variant(id, variant, {kAsPrinted});
        out.interpretation = "the mass";
        out.integrand = parse_t("u", out.reg, bind);
    } else if (id == "C2") {
        require_variant(id, variant, {kAsPrinted});
        out.interpretation = "the L^2-norm";
        out.integrand = parse_t("1/2*u^2", out.reg, bind);
    } else if (id == "C3") {
        require_variant(id, variant, {kAsPrinted});
        out.interpretation = "the gradient-energy";
        out.integrand = parse_t(
            "1/2*u_xx^2 - 1/2*alpha*u_x^2 + beta*(u*Int(f(u),u) - Int(u*f(u),u))", out.reg, bind);
    } else if (id == "C4") {
        require_variant(id, variant, {kAsPrinted});
        out.interpretation = "a dilational Galilean energy";
        out.integrand = instantiate_conservation("C3", kAsPrinted, bind).density;
        out.reg = standard_registry();
    } else if (id == "C5") {
        require_variant(id, variant, {kAsPrinted, kSwapped});
        out.interpretation = "a Galilean momentum";
        // the printed integrand swaps f1/f0 into f2/f1 relative to the local
        // density it integrates; the swapped variant restores that density
        out.integrand = parse_t(variant == kAsPrinted
                                    ? "1/2*Int(c(t),t)*(f2*u^2 + 2*f1*u) + x*u"
                                    : "1/2*Int(c(t),t)*(f1*u^2 + 2*f0*u) + x*u",
                                out.reg, bind);
    } else if (id == "C6") {
        require_variant(id, variant, case_variants("C5"));
        out.interpretation = "a generalized dilational Galilean energy-momentum";
        ConservationCase c5 = instantiate_conservation("C5", variant, bind);
        out.reg = c5.reg;
        out.integrand = c5.density;
    } else {
        throw Error("unknown conserved integral id '" + id + "'");
    }
    return out;
}

std::vector<CaseSummary> list_cases(CaseKind kind) {
    std::vector<CaseSummary> out;
    if (kind == CaseKind::Symmetry) {
        for (const auto& def : kSymmetryDefs) {
            SymmetryCase sc = instantiate_symmetry(def.id, kAsPrinted, nullptr);
            CaseSummary s{sc.id, case_variants(sc.id), sc.interpretation, sc.family, {}};
            for (const auto& c : sc.constraints) s.constraints.push_back(c.label);
            out.push_back(std::move(s));
        }
    } else {
        for (std::size_t i = 0; i < kConservationCount; ++i) {
            ConservationCase cc =
                instantiate_conservation(conservation_def(i).id, kAsPrinted, nullptr);
            CaseSummary s{cc.id, case_variants(cc.id), cc.interpretation, cc.family, {}};
            for (const auto& c : cc.constraints) s.constraints.push_back(c.label);
            out.push_back(std::move(s));
        }
    }
    return out;
}

std::string catalog_json() {
    nlohmann::ordered_json doc;
    doc["symmetries"] = nlohmann::ordered_json::array();
    for (const auto& def : kSymmetryDefs) {
        for (const auto& variant : case_variants(def.id)) {
            SymmetryCase sc = instantiate_symmetry(def.id, variant, nullptr);
            nlohmann::ordered_json e;
            e["id"] = sc.id;
            e["variant"] = sc.variant;
            e["interpretation"] = sc.interpretation;
            e["family"] = sc.family;
            e["xi"] = print(sc.gen.xi);
            e["tau"] = print(sc.gen.tau);
            e["eta"] = print(sc.gen.eta);
            e["constraints"] = nlohmann::ordered_json::array();
            for (const auto& c : sc.constraints) e["constraints"].push_back(c.label);
            doc["symmetries"].push_back(std::move(e));
        }
    }
    doc["conservation_laws"] = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < kConservationCount; ++i) {
        const std::string id = conservation_def(i).id;
        for (const auto& variant : case_variants(id)) {
            ConservationCase cc = instantiate_conservation(id, variant, nullptr);
            nlohmann::ordered_json e;
            e["id"] = cc.id;
            e["variant"] = cc.variant;
            e["interpretation"] = cc.interpretation;
            e["family"] = cc.family;
            e["multiplier"] = print(cc.multiplier);
            e["density"] = print(cc.density);
            e["constraints"] = nlohmann::ordered_json::array();
            for (const auto& c : cc.constraints) e["constraints"].push_back(c.label);
            doc["conservation_laws"].push_back(std::move(e));
        }
    }
    doc["conserved_integrals"] = nlohmann::ordered_json::array();
    auto integral_variants = [](const std::string& id) -> std::vector<std::string> {
        if (id == "C5") return {kAsPrinted, kSwapped};
        if (id == "C6") return case_variants("C5");
        return {kAsPrinted};
    };
    for (const char* id : {"C1", "C2", "C3", "C4", "C5", "C6"}) {
        for (const auto& variant : integral_variants(id)) {
            ConservedIntegral ci = conserved_integral_formula(id, variant, nullptr);
            nlohmann::ordered_json e;
            e["id"] = ci.id;
            e["variant"] = ci.variant;
            e["interpretation"] = ci.interpretation;
            e["integrand"] = print(ci.integrand);
            doc["conserved_integrals"].push_back(std::move(e));
        }
    }
    return doc.dump(2) + "\n";
}

} // namespace gkaw
