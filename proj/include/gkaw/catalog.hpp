#pragma once

#include "gkaw/parse.hpp"
#include "gkaw/verify.hpp"

#include <string>
#include <vector>

namespace gkaw {

// a quantity that must remain nonzero for the case formulas to be defined
struct CaseConstraint {
    std::string label; // e.g. "f1 != 0"
    Expr value;        // params-only expression
};

struct SymmetryCase {
    std::string id;      // S1..S6
    std::string variant; // "as-printed"; S5 also "alt-rule"; S3/S5 also "corrected"
    std::string interpretation;
    std::vector<std::string> family; // coefficient conditions, printed form
    Registry reg;
    PDEInstance pde;
    SymmetryGenerator gen;
    std::vector<CaseConstraint> constraints;
};

struct ConservationCase {
    std::string id;      // C1a, C1b, C2, C3, C4, C5
    std::string variant; // "as-printed"; C5 also "alt-rule" and "corrected"
    std::string interpretation;
    std::vector<std::string> family;
    Registry reg;
    PDEInstance pde;
    Expr multiplier;
    Expr density;
    std::vector<CaseConstraint> constraints;
};

// integrand of a global conserved integral over a fixed spatial domain
struct ConservedIntegral {
    std::string id;      // C1..C6
    std::string variant; // C5: "as-printed"/"swapped"; C6: follows the C5 law
    std::string interpretation;
    Registry reg;
    Expr integrand;
};

enum class CaseKind { Symmetry, Conservation };

struct CaseSummary {
    std::string id;
    std::vector<std::string> variants;
    std::string interpretation;
    std::vector<std::string> family;
    std::vector<std::string> constraints;
};

// deterministic order by id
std::vector<CaseSummary> list_cases(CaseKind kind);

// Variants available for a case id, "as-printed" always first. "alt-rule"
// swaps the printed d'(t) rewrite rule of S5/C5 with its sibling; "corrected"
// applies the minimal coefficient repair that closes an otherwise nonzero
// printed residual (S3, S5, C5) while keeping the printed d'(t) rule.
std::vector<std::string> case_variants(const std::string& id);

// Instantiates a case; parameters in bind are fixed to rationals, the rest
// stay symbolic. Throws ConstraintViolated when a bound value breaks a
// nonzero condition and Error for an unknown id or variant.
SymmetryCase instantiate_symmetry(const std::string& id,
                                  const std::string& variant = "as-printed",
                                  const ParamValues* bind = nullptr);
ConservationCase instantiate_conservation(const std::string& id,
                                          const std::string& variant = "as-printed",
                                          const ParamValues* bind = nullptr);

ConservedIntegral conserved_integral_formula(const std::string& id,
                                             const std::string& variant = "as-printed",
                                             const ParamValues* bind = nullptr);

// full catalog as a JSON document (ids, printed expressions, families,
// constraints, interpretations), deterministic
std::string catalog_json();

} // namespace gkaw
