#include "gkaw/determining.hpp"

#include "gkaw/errors.hpp"

#include "nlohmann/json.hpp"

#include <map>

namespace gkaw {

namespace {

std::string slot_text(const ArgSlot& slot) {
    switch (slot.tag) {
    case ArgSlot::Tag::T: return "t";
    case ArgSlot::Tag::X: return "x";
    default: return print_jet(slot.jet);
    }
}

std::string signature_text(const FunctionSymbol& fs) {
    std::string out = fs.name + "(";
    for (std::size_t i = 0; i < fs.args.size(); ++i) {
        if (i) out += ",";
        out += slot_text(fs.args[i]);
    }
    return out + ")";
}

bool is_high_jet(const Expr& e, int min_order) {
    return e.kind() == Kind::Jet && e.n().jet.dep == Dep::U && e.n().jet.x_ord >= min_order;
}

// Collects coefficients of monomials in jets of order >= min_order into the
// keyed map; keys get the given prefix. Coefficients must stay free of those
// jets or the split is unsound.
void split_residual(const Expr& residual, int min_order, const std::string& prefix,
                    std::map<std::string, std::vector<Expr>>& groups) {
    for (const Expr& term : terms(residual)) {
        auto [coeff, monic] = split_coefficient(term);
        std::vector<Expr> jet_part;
        std::vector<Expr> base_part{number(coeff)};
        for (const auto& [base, exponent] : factors(monic)) {
            if (is_high_jet(base, min_order)) {
                auto n = rational_value(exponent);
                if (!n || !is_integer(*n) || *n <= 0)
                    throw UnsupportedConstruct("split monomial with non-integer jet power: " +
                                               print(term));
                jet_part.push_back(pow(base, exponent));
            } else {
                base_part.push_back(pow(base, exponent));
            }
        }
        Expr coefficient = prod(std::move(base_part));
        for (const auto& j : dependencies(coefficient).jets)
            if (j.dep == Dep::U && j.x_ord >= min_order)
                throw UnsupportedConstruct("coefficient not free of split jets: " + print(term));
        std::string key = jet_part.empty() ? "1" : print(prod(std::move(jet_part)));
        groups[prefix + key].push_back(coefficient);
    }
}

DeterminingSystem assemble(std::vector<FunctionSymbol> unknowns,
                           const std::map<std::string, std::vector<Expr>>& groups) {
    DeterminingSystem sys;
    sys.unknowns = std::move(unknowns);
    for (const auto& [key, parts] : groups) {
        Expr equation = collect_powers(sum(parts));
        if (equation.is_zero()) continue;
        sys.split_basis.push_back(key);
        sys.equations.push_back(equation);
    }
    return sys;
}

const FunctionSymbol& lookup(const Registry& reg, const std::string& name) {
    const FunctionSymbol* fs = reg.find_func(name);
    if (!fs) throw UnboundSymbol("unknown function '" + name + "' not registered");
    return *fs;
}

} // namespace

DeterminingSystem generate_symmetry_system(const PDEInstance& pde, const Registry& reg) {
    const FunctionSymbol& xi = lookup(reg, "xi");
    const FunctionSymbol& tau = lookup(reg, "tau");
    const FunctionSymbol& eta = lookup(reg, "eta");
    SymmetryGenerator g{func(xi.name, xi.args), func(tau.name, tau.args),
                        func(eta.name, eta.args)};
    Expr residual = symmetry_residual(characteristic(g, pde, reg), pde, reg);
    std::map<std::string, std::vector<Expr>> groups;
    split_residual(residual, 1, "", groups);
    return assemble({xi, tau, eta}, groups);
}

DeterminingSystem generate_multiplier_system(const PDEInstance& pde, const Registry& reg,
                                             int order) {
    if (order < 1 || order + 6 > kJetCap)
        throw UnsupportedConstruct("multiplier ansatz order out of range");
    const FunctionSymbol& qs = lookup(reg, "Q");
    if (static_cast<int>(qs.args.size()) != order + 3)
        throw UnsupportedConstruct("registered Q does not match the requested ansatz order");
    Expr q = func(qs.name, qs.args);
    std::map<std::string, std::vector<Expr>> groups;
    split_residual(adjoint_residual(q, pde, reg), order + 1, "adjoint:", groups);
    auto hh = helmholtz_residuals(q, reg);
    for (int j = 0; j < 4; ++j)
        split_residual(hh[j], order + 1, "helmholtz" + std::to_string(j) + ":", groups);
    return assemble({qs}, groups);
}

std::string export_system(const DeterminingSystem& sys, ExportFormat format) {
    if (format == ExportFormat::Json) {
        nlohmann::ordered_json doc;
        doc["unknowns"] = nlohmann::ordered_json::array();
        for (const auto& fs : sys.unknowns) doc["unknowns"].push_back(signature_text(fs));
        doc["equations"] = nlohmann::ordered_json::array();
        for (const auto& eq : sys.equations) doc["equations"].push_back(print(eq));
        doc["monomials"] = nlohmann::ordered_json::array();
        for (const auto& key : sys.split_basis) doc["monomials"].push_back(key);
        return doc.dump(2) + "\n";
    }
    std::string out = "unknowns:";
    for (std::size_t i = 0; i < sys.unknowns.size(); ++i)
        out += (i ? ", " : " ") + signature_text(sys.unknowns[i]);
    out += "\nequations: " + std::to_string(sys.equations.size()) + "\n";
    for (std::size_t i = 0; i < sys.equations.size(); ++i)
        out += "[" + sys.split_basis[i] + "] " + print(sys.equations[i]) + " = 0\n";
    return out;
}

} // namespace gkaw
