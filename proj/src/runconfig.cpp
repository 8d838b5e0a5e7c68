#include "gkaw/runconfig.hpp"

#include "gkaw/errors.hpp"
#include "gkaw/parse.hpp"
#include "gkaw/verify.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace gkaw {

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string piece;
    while (std::getline(ss, piece, sep)) out.push_back(trim(piece));
    if (!s.empty() && s.back() == sep) out.push_back("");
    return out;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value,
                            const std::string& want) {
    throw ConfigError("key '" + key + "': cannot read '" + value + "' as " + want);
}

double parse_double(const std::string& key, const std::string& value) {
    const char* s = value.c_str();
    char* end = nullptr;
    double v = std::strtod(s, &end);
    if (end == s || *end != '\0' || !std::isfinite(v))
        bad_value(key, value, "a finite number");
    return v;
}

// Grid length: a plain number, "pi" or "<number>*pi".
double parse_length(const std::string& key, const std::string& value) {
    const double pi = 3.14159265358979323846;
    std::string v = trim(value);
    if (v == "pi") return pi;
    size_t star = v.find('*');
    if (star != std::string::npos && trim(v.substr(star + 1)) == "pi")
        return parse_double(key, trim(v.substr(0, star))) * pi;
    return parse_double(key, v);
}

long parse_int(const std::string& key, const std::string& value) {
    const char* s = value.c_str();
    char* end = nullptr;
    long v = std::strtol(s, &end, 10);
    if (end == s || *end != '\0') bad_value(key, value, "an integer");
    return v;
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "on" || value == "1") return true;
    if (value == "false" || value == "off" || value == "0") return false;
    bad_value(key, value, "a boolean (true/false)");
}

// Exact rational from "p/q", an integer, or a plain decimal like "0.25".
Rational parse_rational(const std::string& key, const std::string& value) {
    std::string v = trim(value);
    if (v.empty()) bad_value(key, value, "a rational number");
    try {
        size_t slash = v.find('/');
        if (slash != std::string::npos) {
            cpp_int num(trim(v.substr(0, slash)));
            cpp_int den(trim(v.substr(slash + 1)));
            if (den == 0) bad_value(key, value, "a rational with nonzero denominator");
            if (den < 0) { num = -num; den = -den; }
            return Rational(num, den);
        }
        size_t dot = v.find('.');
        if (dot != std::string::npos) {
            std::string digits = v.substr(0, dot) + v.substr(dot + 1);
            size_t places = v.size() - dot - 1;
            if (digits.empty() || digits == "-" || digits == "+")
                bad_value(key, value, "a rational number");
            cpp_int den = 1;
            for (size_t i = 0; i < places; ++i) den *= 10;
            return Rational(cpp_int(digits), den);
        }
        return Rational(cpp_int(v));
    } catch (const std::exception&) {
        bad_value(key, value, "a rational number (integer, p/q or plain decimal)");
    }
}

RunConfig::Harmonic parse_harmonic(const std::string& key, const std::string& item) {
    std::vector<std::string> f = split(item, ':');
    if (f.size() < 2 || f.size() > 3)
        bad_value(key, item, "'mode:amplitude[:phase]'");
    RunConfig::Harmonic h;
    h.k = static_cast<int>(parse_int(key, f[0]));
    if (h.k <= 0) bad_value(key, item, "a positive integer mode");
    h.amp = parse_double(key, f[1]);
    h.phase = f.size() == 3 ? parse_double(key, f[2]) : 0.0;
    return h;
}

struct Entry {
    std::string section, key, value;
    int line;
};

std::vector<Entry> scan(const std::string& text) {
    static const std::set<std::string> sections{"pde", "solver", "initial", "output"};
    std::vector<Entry> out;
    std::stringstream ss(text);
    std::string line, section;
    int lineno = 0;
    std::set<std::string> seen;
    while (std::getline(ss, line)) {
        ++lineno;
        size_t hash = line.find_first_of("#;");
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("line " + std::to_string(lineno) +
                                  ": unterminated section header '" + line + "'");
            section = trim(line.substr(1, line.size() - 2));
            if (!sections.count(section))
                throw ConfigError("line " + std::to_string(lineno) +
                                  ": unknown section '[" + section + "]'");
            continue;
        }
        size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) +
                              ": expected 'key = value', got '" + line + "'");
        if (section.empty())
            throw ConfigError("line " + std::to_string(lineno) +
                              ": key outside any section");
        Entry e{section, trim(line.substr(0, eq)), trim(line.substr(eq + 1)), lineno};
        if (e.key.empty())
            throw ConfigError("line " + std::to_string(lineno) + ": empty key");
        if (!seen.insert(e.section + "." + e.key).second)
            throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" +
                              e.key + "' in section [" + e.section + "]");
        out.push_back(std::move(e));
    }
    return out;
}

} // namespace

RunConfig parse_run_config(const std::string& text) {
    RunConfig rc;
    rc.reg = standard_registry();

    std::vector<Entry> entries = scan(text);

    // Parameter values first: expressions bind them at parse time so that
    // branch selection (antiderivatives, powers) sees concrete exponents.
    std::string a_text = "1", b_text, c_text, f_text;
    for (const Entry& e : entries) {
        if (e.section != "pde") continue;
        if (e.key == "a") a_text = e.value;
        else if (e.key == "b") b_text = e.value;
        else if (e.key == "c") c_text = e.value;
        else if (e.key == "f") f_text = e.value;
        else if (rc.reg.has_param(e.key)) rc.params[e.key] = parse_rational(e.key, e.value);
        else
            throw ConfigError("line " + std::to_string(e.line) + ": unknown key '" +
                              e.key + "' in section [pde]");
    }
    if (b_text.empty() || c_text.empty() || f_text.empty())
        throw ConfigError("section [pde] must set b, c and f");

    auto parse_coeff = [&](const char* key, const std::string& s) {
        Expr e = parse_expression(s, rc.reg, &rc.params);
        Dependencies d = dependencies(e);
        if (d.on_x || !d.jets.empty())
            throw ConfigError(std::string("key '") + key +
                              "': coefficient may depend on t only");
        if (!d.params.empty())
            throw ConfigError(std::string("key '") + key + "': parameter '" +
                              *d.params.begin() + "' has no value in [pde]");
        if (!d.funcs.empty())
            throw ConfigError(std::string("key '") + key + "': function symbol '" +
                              *d.funcs.begin() + "' has no numeric form");
        return e;
    };
    rc.a = parse_coeff("a", a_text);
    rc.b = parse_coeff("b", b_text);
    rc.c = parse_coeff("c", c_text);
    rc.f = parse_expression(f_text, rc.reg, &rc.params);
    {
        Dependencies d = dependencies(rc.f);
        if (d.on_t || d.on_x)
            throw ConfigError("key 'f': nonlinearity may depend on u only");
        for (const JetVar& j : d.jets)
            if (j.order != 0 || j.var != Dep::U)
                throw ConfigError("key 'f': nonlinearity may depend on u only");
        if (!d.params.empty())
            throw ConfigError("key 'f': parameter '" + *d.params.begin() +
                              "' has no value in [pde]");
        if (!d.funcs.empty())
            throw ConfigError("key 'f': function symbol '" + *d.funcs.begin() +
                              "' has no numeric form");
    }

    for (const Entry& e : entries) {
        if (e.section == "pde") continue;
        if (e.section == "solver") {
            if (e.key == "L") rc.grid.L = parse_length(e.key, e.value);
            else if (e.key == "N") rc.grid.N = static_cast<int>(parse_int(e.key, e.value));
            else if (e.key == "dt") rc.dt = parse_double(e.key, e.value);
            else if (e.key == "t_end") rc.t_end = parse_double(e.key, e.value);
            else if (e.key == "dealias") rc.dealias = parse_bool(e.key, e.value);
            else if (e.key == "diagnostics_stride")
                rc.diagnostics_stride = static_cast<int>(parse_int(e.key, e.value));
            else if (e.key == "monitors") {
                rc.monitors.clear();
                if (!trim(e.value).empty())
                    for (const std::string& m : split(e.value, ',')) {
                        if (m != "C1" && m != "C2" && m != "C3")
                            bad_value(e.key, m, "one of C1, C2, C3");
                        rc.monitors.push_back(m);
                    }
            } else
                throw ConfigError("line " + std::to_string(e.line) + ": unknown key '" +
                                  e.key + "' in section [solver]");
        } else if (e.section == "initial") {
            if (e.key == "offset") rc.offset = parse_double(e.key, e.value);
            else if (e.key == "sin" || e.key == "cos") {
                auto& dst = e.key == "sin" ? rc.sines : rc.cosines;
                if (!trim(e.value).empty())
                    for (const std::string& item : split(e.value, ','))
                        dst.push_back(parse_harmonic(e.key, item));
            } else
                throw ConfigError("line " + std::to_string(e.line) + ": unknown key '" +
                                  e.key + "' in section [initial]");
        } else { // output
            if (e.key == "csv") rc.csv_path = e.value;
            else if (e.key == "summary") rc.summary_path = e.value;
            else
                throw ConfigError("line " + std::to_string(e.line) + ": unknown key '" +
                                  e.key + "' in section [output]");
        }
    }
    return rc;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_run_config(ss.str());
}

Eigen::VectorXd initial_field(const RunConfig& rc) {
    const double two_pi = 6.28318530717958647692;
    Eigen::VectorXd u = Eigen::VectorXd::Constant(rc.grid.N, rc.offset);
    for (int j = 0; j < rc.grid.N; ++j) {
        double theta = two_pi * j / rc.grid.N;
        for (const auto& h : rc.sines) u[j] += h.amp * std::sin(h.k * theta + h.phase);
        for (const auto& h : rc.cosines) u[j] += h.amp * std::cos(h.k * theta + h.phase);
    }
    return u;
}

SolverConfig make_solver_config(const RunConfig& rc) {
    SolverConfig sc;
    sc.grid = rc.grid;
    sc.dt = rc.dt;
    sc.t_end = rc.t_end;
    sc.a = rc.a;
    sc.b = rc.b;
    sc.c = rc.c;
    sc.f = rc.f;
    sc.params = rc.params;
    sc.reg = rc.reg;
    sc.dealias = rc.dealias;
    sc.diagnostics_stride = rc.diagnostics_stride;
    for (const std::string& name : rc.monitors) {
        Monitor m;
        m.name = name;
        if (name == "C1") {
            m.integrand = jet(ujet(0));
        } else if (name == "C2") {
            m.integrand = prod({number(Rational(1, 2)), pow(jet(ujet(0)), 2L)});
        } else {
            // The energy integral is conserved only when a, b, c are constant.
            if (dependencies(rc.a).on_t || dependencies(rc.b).on_t ||
                dependencies(rc.c).on_t)
                throw ConfigError(
                    "monitor C3 needs t-independent a, b, c; drop C3 from "
                    "'monitors' for time-dependent coefficients");
            PDEInstance pde{rc.a, rc.b, rc.c, rc.f};
            m.integrand = hamiltonian_density(pde);
        }
        sc.monitors.push_back(std::move(m));
    }
    return sc;
}

} // namespace gkaw
