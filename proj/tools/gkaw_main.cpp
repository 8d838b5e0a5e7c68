#include "gkaw/catalog.hpp"
#include "gkaw/determining.hpp"
#include "gkaw/runconfig.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace gkaw;
using nlohmann::json;

// exit codes: 0 all residuals zero / success, 1 nonzero residual,
// 2 usage or configuration error, 3 numerical failure

ParamValues parse_binds(const std::vector<std::string>& kvs) {
    Registry reg = standard_registry();
    ParamValues out;
    for (const std::string& kv : kvs) {
        size_t eq = kv.find('=');
        if (eq == std::string::npos)
            throw ConfigError("--bind expects name=value, got '" + kv + "'");
        std::string name = kv.substr(0, eq);
        if (!reg.has_param(name))
            throw ConfigError("--bind: unknown parameter '" + name + "'");
        Expr v = parse_expression(kv.substr(eq + 1), reg);
        std::optional<Rational> r = rational_value(v);
        if (!r)
            throw ConfigError("--bind " + name + ": value must be rational");
        out[name] = *r;
    }
    return out;
}

size_t term_count(const Expr& e) { return terms(e).size(); }

struct CheckRow {
    std::string id, variant, status;       // status: ZERO | NONZERO
    std::optional<std::string> residual;   // normal form when NONZERO
};

void print_row(const CheckRow& row) {
    std::printf("%-4s [%s]%*s %s\n", row.id.c_str(), row.variant.c_str(),
                int(10 - row.variant.size()), "", row.status.c_str());
    if (row.residual) std::printf("     residual: %s\n", row.residual->c_str());
}

CheckRow check_symmetry(const std::string& id, const std::string& variant,
                        const ParamValues& binds) {
    SymmetryCase sc = instantiate_symmetry(id, variant, &binds);
    Expr p = characteristic(sc.gen, sc.pde, sc.reg);
    Expr r = symmetry_residual(p, sc.pde, sc.reg);
    CheckRow row{id, variant, "ZERO", std::nullopt};
    if (!r.is_zero()) {
        row.status = "NONZERO";
        row.residual = print(r) + "  [" + std::to_string(term_count(r)) + " terms]";
    }
    return row;
}

CheckRow check_conservation(const std::string& id, const std::string& variant,
                            const ParamValues& binds) {
    ConservationCase cc = instantiate_conservation(id, variant, &binds);
    CheckRow row{id, variant, "ZERO", std::nullopt};
    auto fail = [&](const std::string& what, const Expr& r) {
        row.status = "NONZERO";
        if (!row.residual)
            row.residual =
                what + ": " + print(r) + "  [" + std::to_string(term_count(r)) + " terms]";
    };
    std::array<Expr, 4> h = helmholtz_residuals(cc.multiplier, cc.reg);
    for (int i = 0; i < 4; ++i)
        if (!h[i].is_zero()) fail("helmholtz[" + std::to_string(i) + "]", h[i]);
    Expr adj = adjoint_residual(cc.multiplier, cc.pde, cc.reg);
    if (!adj.is_zero()) fail("adjoint", adj);
    Expr em = euler_match_residual(cc.density, cc.multiplier, cc.reg);
    if (!em.is_zero()) fail("euler(T) - Q", em);
    try {
        Expr flux = flux_from_density(cc.density, cc.pde, cc.reg);
        Expr div = divergence_residual(cc.density, flux, cc.pde, cc.reg);
        if (!div.is_zero()) fail("divergence", div);
    } catch (const NotADivergence&) {
        row.status = "NONZERO";
        if (!row.residual) row.residual = "divergence: D_t T is not a total x-derivative";
    }
    return row;
}

// --variant wins; --all-variants sweeps; default prefers the repaired form
// when one exists so the verified identity is checked
std::vector<std::string> pick_variants(const std::string& id, const std::string& wanted,
                                       bool all_variants) {
    std::vector<std::string> avail = case_variants(id);
    if (!wanted.empty()) {
        for (const std::string& v : avail)
            if (v == wanted) return {wanted};
        throw ConfigError("case " + id + " has no variant '" + wanted + "'");
    }
    if (all_variants) return avail;
    for (const std::string& v : avail)
        if (v == "corrected") return {v};
    return {avail.front()};
}

int cmd_verify(const std::string& kind, const std::string& case_id,
               const std::string& variant, bool all_variants,
               const std::string& json_path, const std::vector<std::string>& bind_kvs) {
    ParamValues binds = parse_binds(bind_kvs);
    std::vector<std::pair<CaseKind, std::string>> targets;
    auto gather = [&](CaseKind k) {
        for (const CaseSummary& cs : list_cases(k))
            if (case_id.empty() || cs.id == case_id) targets.emplace_back(k, cs.id);
    };
    if (kind == "symmetry" || kind == "all") gather(CaseKind::Symmetry);
    if (kind == "conservation" || kind == "all") gather(CaseKind::Conservation);
    if (targets.empty())
        throw ConfigError("no case named '" + case_id + "' under --kind " + kind);

    std::vector<CheckRow> rows;
    for (const auto& [k, id] : targets)
        for (const std::string& v : pick_variants(id, variant, all_variants))
            rows.push_back(k == CaseKind::Symmetry ? check_symmetry(id, v, binds)
                                                   : check_conservation(id, v, binds));

    bool all_zero = true;
    json report = json::array();
    for (const CheckRow& row : rows) {
        print_row(row);
        all_zero = all_zero && row.status == "ZERO";
        report.push_back({{"case", row.id},
                          {"variant", row.variant},
                          {"status", row.status},
                          {"residual", row.residual ? json(*row.residual) : json(nullptr)}});
    }
    std::ofstream out(json_path);
    if (!out) throw ConfigError("cannot write JSON report to '" + json_path + "'");
    out << report.dump(2) << "\n";
    std::printf("%zu check(s), report written to %s\n", rows.size(), json_path.c_str());
    return all_zero ? 0 : 1;
}

PDEInstance parse_pde(const std::string& a, const std::string& b, const std::string& c,
                      const std::string& f, const Registry& reg, const ParamValues& binds) {
    PDEInstance pde = symbolic_pde();
    if (!a.empty()) pde.a = parse_expression(a, reg, &binds);
    if (!b.empty()) pde.b = parse_expression(b, reg, &binds);
    if (!c.empty()) pde.c = parse_expression(c, reg, &binds);
    if (!f.empty()) pde.f = parse_expression(f, reg, &binds);
    return pde;
}

int cmd_derive(const std::string& multiplier, const std::string& a, const std::string& b,
               const std::string& c, const std::string& f, const std::string& base_text,
               const std::vector<std::string>& bind_kvs) {
    ParamValues binds = parse_binds(bind_kvs);
    Registry reg = standard_registry();
    PDEInstance pde = parse_pde(a, b, c, f, reg, binds);
    Expr q = parse_expression(multiplier, reg, &binds);

    if (!is_multiplier(q, pde, reg)) {
        std::printf("NOT A MULTIPLIER: Q = %s\n", print(q).c_str());
        std::array<Expr, 4> h = helmholtz_residuals(q, reg);
        for (int i = 0; i < 4; ++i)
            if (!h[i].is_zero())
                std::printf("  helmholtz[%d] residual: %s\n", i, print(h[i]).c_str());
        Expr adj = adjoint_residual(q, pde, reg);
        if (!adj.is_zero())
            std::printf("  adjoint residual: %s\n", print(adj).c_str());
        return 1;
    }

    Expr base = parse_expression(base_text, reg, &binds);
    Expr density = homotopy_density(q, reg, base);
    Expr flux = flux_from_density(density, pde, reg);
    std::printf("Q = %s\n", print(q).c_str());
    std::printf("T = %s\n", print(density).c_str());
    std::printf("X = %s\n", print(flux).c_str());

    Expr em = euler_match_residual(density, q, reg);
    Expr div = divergence_residual(density, flux, pde, reg);
    std::printf("euler(T) - Q: %s\n", em.is_zero() ? "ZERO" : print(em).c_str());
    std::printf("D_t T + D_x X on solutions: %s\n",
                div.is_zero() ? "ZERO" : print(div).c_str());
    return em.is_zero() && div.is_zero() ? 0 : 1;
}

int cmd_detgen(const std::string& target, int order, const std::string& a,
               const std::string& b, const std::string& c, const std::string& f,
               const std::string& out_path, const std::string& format,
               const std::vector<std::string>& bind_kvs) {
    ParamValues binds = parse_binds(bind_kvs);
    Registry reg = standard_registry();
    PDEInstance pde = parse_pde(a, b, c, f, reg, binds);
    DeterminingSystem sys = target == "symmetry"
                                ? generate_symmetry_system(pde, reg)
                                : generate_multiplier_system(pde, reg, order);
    std::string doc =
        export_system(sys, format == "text" ? ExportFormat::Text : ExportFormat::Json);
    if (out_path.empty()) {
        std::fputs(doc.c_str(), stdout);
    } else {
        std::ofstream out(out_path);
        if (!out) throw ConfigError("cannot write to '" + out_path + "'");
        out << doc;
    }
    std::printf("%zu determining equation(s) for target '%s'%s%s\n", sys.equations.size(),
                target.c_str(), out_path.empty() ? "" : ", written to ",
                out_path.c_str());
    return 0;
}

int cmd_simulate(const std::string& config_path) {
    RunConfig rc = load_run_config(config_path);
    Solver solver(make_solver_config(rc));
    auto [state, records] = solver.evolve(initial_field(rc));

    std::string csv_path = rc.csv_path.empty() ? "diagnostics.csv" : rc.csv_path;
    std::string csv = diagnostics_csv(records, solver.monitor_names());
    std::ofstream out(csv_path, std::ios::binary);
    if (!out) throw ConfigError("cannot write CSV to '" + csv_path + "'");
    out << csv;

    std::string summary;
    {
        char line[160];
        std::snprintf(line, sizeof line, "t_final = %.17g\n", state.t);
        summary += line;
        const std::vector<std::string>& names = solver.monitor_names();
        for (size_t m = 0; m < names.size(); ++m) {
            double base = records.front().integrals[m];
            double drift = 0;
            for (const DiagnosticsRecord& r : records)
                drift = std::max(drift, std::fabs(r.integrals[m] - base));
            double rel = drift / std::max(std::fabs(base), 1e-30);
            std::snprintf(line, sizeof line, "%s: max relative drift = %.6e\n",
                          names[m].c_str(), rel);
            summary += line;
        }
        std::snprintf(line, sizeof line, "umax = %.17g\nl2 = %.17g\n",
                      records.back().umax, records.back().l2);
        summary += line;
    }
    std::fputs(summary.c_str(), stdout);
    std::printf("diagnostics written to %s\n", csv_path.c_str());
    if (!rc.summary_path.empty()) {
        std::ofstream sout(rc.summary_path, std::ios::binary);
        if (!sout) throw ConfigError("cannot write summary to '" + rc.summary_path + "'");
        sout << summary;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"symmetry and conservation-law toolkit for fifth-order dispersive "
                 "wave equations u_t = a(t)u_xxxxx + b(t)u_xxx + c(t)f(u)u_x"};
    app.require_subcommand(1);

    std::string kind = "all", case_id, variant, json_path = "verify_report.json";
    bool all_variants = false;
    std::vector<std::string> binds;
    CLI::App* verify = app.add_subcommand("verify", "re-check catalogued identities");
    verify->add_option("--kind", kind, "symmetry | conservation | all")
        ->check(CLI::IsMember({"symmetry", "conservation", "all"}));
    verify->add_option("--case", case_id, "restrict to one case id (e.g. S3, C1b)");
    verify->add_option("--variant", variant, "check one printed variant");
    verify->add_flag("--all-variants", all_variants, "check every variant of each case");
    verify->add_option("--json", json_path, "JSON report path");
    verify->add_option("--bind", binds, "fix a parameter, name=rational");

    std::string multiplier, pde_a, pde_b, pde_c, pde_f, base = "0";
    CLI::App* derive =
        app.add_subcommand("derive", "reconstruct density and flux from a multiplier");
    derive->add_option("--multiplier", multiplier, "multiplier expression Q")->required();
    derive->add_option("--a", pde_a, "dispersion coefficient a(t), opaque a(t) if unset");
    derive->add_option("--b", pde_b, "dispersion coefficient b(t), opaque b(t) if unset");
    derive->add_option("--c", pde_c, "convection coefficient c(t), opaque c(t) if unset");
    derive->add_option("--f", pde_f, "nonlinearity f(u), opaque f(u) if unset");
    derive->add_option("--base", base, "homotopy base point expression in t, x");
    derive->add_option("--bind", binds, "fix a parameter, name=rational");

    std::string target, out_path, format = "json";
    int order = 4;
    CLI::App* detgen =
        app.add_subcommand("detgen", "export the split determining system");
    detgen->add_option("--target", target, "symmetry | multiplier")
        ->required()
        ->check(CLI::IsMember({"symmetry", "multiplier"}));
    detgen->add_option("--order", order, "highest jet order of the multiplier ansatz")
        ->check(CLI::Range(0, 8));
    detgen->add_option("--a", pde_a, "coefficient a(t), opaque if unset");
    detgen->add_option("--b", pde_b, "coefficient b(t), opaque if unset");
    detgen->add_option("--c", pde_c, "coefficient c(t), opaque if unset");
    detgen->add_option("--f", pde_f, "nonlinearity f(u), opaque if unset");
    detgen->add_option("--out", out_path, "output path (stdout if unset)");
    detgen->add_option("--format", format, "text | json")
        ->check(CLI::IsMember({"text", "json"}));
    detgen->add_option("--bind", binds, "fix a parameter, name=rational");

    std::string config_path;
    CLI::App* simulate =
        app.add_subcommand("simulate", "run a pseudospectral evolution from a config");
    simulate->add_option("--config", config_path, "run configuration file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (verify->parsed())
            return cmd_verify(kind, case_id, variant, all_variants, json_path, binds);
        if (derive->parsed())
            return cmd_derive(multiplier, pde_a, pde_b, pde_c, pde_f, base, binds);
        if (detgen->parsed())
            return cmd_detgen(target, order, pde_a, pde_b, pde_c, pde_f, out_path, format,
                              binds);
        return cmd_simulate(config_path);
    } catch (const BlowUp& e) {
        std::fprintf(stderr, "numerical failure: %s (t = %.6g)\n", e.what(), e.time);
        return 3;
    } catch (const ParseError& e) {
        std::fprintf(stderr, "parse error: %s\n", e.what());
        return 2;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const ConstraintViolated& e) {
        std::fprintf(stderr, "constraint violated: %s\n", e.what());
        return 2;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
