#include "gkaw/parse.hpp"

#include <cctype>
#include <optional>
#include <vector>

namespace gkaw {

namespace {

struct Token {
    enum class Kind { Number, Ident, Punct, End } kind = Kind::End;
    std::string text;
    Rational value;
    std::size_t pos = 0;
};

std::vector<Token> tokenize(const std::string& s) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < s.size()) {
        char c = s[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
            Token t;
            t.kind = Token::Kind::Number;
            t.text = s.substr(i, j - i);
            t.value = Rational(Integer(t.text));
            t.pos = i;
            out.push_back(std::move(t));
            i = j;
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < s.size() &&
                   (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_'))
                ++j;
            out.push_back({Token::Kind::Ident, s.substr(i, j - i), {}, i});
            i = j;
            continue;
        }
        if (std::string("+-*/^(),@").find(c) != std::string::npos) {
            out.push_back({Token::Kind::Punct, std::string(1, c), {}, i});
            ++i;
            continue;
        }
        throw ParseError(std::string("unexpected character '") + c + "'", i);
    }
    out.push_back({Token::Kind::End, "", {}, s.size()});
    return out;
}

// jet spelled as in print_jet: u, v, u_xx, v_txx (t's before x's)
std::optional<JetVar> jet_name(const std::string& name) {
    if (name.empty() || (name[0] != 'u' && name[0] != 'v')) return std::nullopt;
    Dep dep = name[0] == 'u' ? Dep::U : Dep::V;
    if (name.size() == 1) return JetVar{dep, 0, 0};
    if (name[1] != '_' || name.size() == 2) return std::nullopt;
    int t_ord = 0, x_ord = 0;
    std::size_t i = 2;
    while (i < name.size() && name[i] == 't') ++t_ord, ++i;
    while (i < name.size() && name[i] == 'x') ++x_ord, ++i;
    if (i != name.size() || (t_ord == 0 && x_ord == 0)) return std::nullopt;
    if (dep == Dep::U && t_ord != 0) return std::nullopt;
    return JetVar{dep, t_ord, x_ord};
}

class Parser {
public:
    Parser(const std::string& text, const Registry& reg, const ParamValues* bind)
        : toks_(tokenize(text)), reg_(reg), bind_(bind) {}

    Expr run() {
        Expr e = parse_sum();
        expect_end();
        return e;
    }

private:
    const Token& peek() const { return toks_[i_]; }
    const Token& next() { return toks_[i_++]; }

    bool accept_punct(const char* p) {
        if (peek().kind == Token::Kind::Punct && peek().text == p) {
            ++i_;
            return true;
        }
        return false;
    }

    void expect_punct(const char* p) {
        if (!accept_punct(p))
            throw ParseError(std::string("expected '") + p + "'", peek().pos);
    }

    void expect_end() {
        if (peek().kind != Token::Kind::End)
            throw ParseError("unexpected trailing input", peek().pos);
    }

    Expr parse_sum() {
        Expr e = parse_term();
        for (;;) {
            if (accept_punct("+"))
                e = add(e, parse_term());
            else if (accept_punct("-"))
                e = sub(e, parse_term());
            else
                return e;
        }
    }

    Expr parse_term() {
        Expr e = parse_unary();
        for (;;) {
            if (accept_punct("*"))
                e = mul(e, parse_unary());
            else if (accept_punct("/"))
                e = div(e, parse_unary());
            else
                return e;
        }
    }

    Expr parse_unary() {
        if (accept_punct("-")) return neg(parse_unary());
        if (accept_punct("+")) return parse_unary();
        return parse_power();
    }

    Expr parse_power() {
        Expr base = parse_primary();
        if (!accept_punct("^")) return base;
        bool negated = accept_punct("-");
        Expr e = parse_power();
        return pow(base, negated ? neg(e) : e);
    }

    Expr parse_primary() {
        const Token& t = peek();
        if (t.kind == Token::Kind::Number) {
            ++i_;
            return number(t.value);
        }
        if (t.kind == Token::Kind::Punct && t.text == "(") {
            ++i_;
            Expr e = parse_sum();
            expect_punct(")");
            return e;
        }
        if (t.kind == Token::Kind::Ident) return parse_ident();
        throw ParseError("expected an expression", t.pos);
    }

    Expr parse_ident() {
        Token t = next();
        const std::string& name = t.text;
        if (name == "ln") {
            expect_punct("(");
            Expr e = parse_sum();
            expect_punct(")");
            return ln(e);
        }
        if (name == "Int") return parse_int_marker(t.pos);
        if (name == "diff") return parse_diff(t.pos);
        if (name == "t") return variable(VarTag::T);
        if (name == "x") return variable(VarTag::X);
        if (auto j = jet_name(name)) {
            if (j->x_ord > kJetCap + (j->dep == Dep::V ? 1 : 0) || j->t_ord > kJetCap)
                throw JetOrderOverflow("jet order beyond the supported cap: " + name);
            return jet(*j);
        }
        if (const FunctionSymbol* fs = reg_.find_func(name)) return parse_call(*fs, t.pos);
        if (reg_.has_param(name)) {
            if (bind_) {
                auto it = bind_->find(name);
                if (it != bind_->end()) return number(it->second);
            }
            return parameter(name);
        }
        throw UnknownIdentifier(name, t.pos);
    }

    // an argument atom of a function call or diff(); returns t, x or a jet
    Expr parse_atom() {
        const Token& t = peek();
        if (t.kind != Token::Kind::Ident)
            throw ParseError("expected a variable or jet name", t.pos);
        ++i_;
        if (t.text == "t") return variable(VarTag::T);
        if (t.text == "x") return variable(VarTag::X);
        if (auto j = jet_name(t.text)) return jet(*j);
        throw ParseError("expected a variable or jet name, got '" + t.text + "'", t.pos);
    }

    Expr parse_int_marker(std::size_t pos) {
        expect_punct("(");
        Expr e = parse_sum();
        expect_punct(",");
        const Token& v = peek();
        if (v.kind != Token::Kind::Ident || (v.text != "u" && v.text != "t"))
            throw ParseError("antiderivative variable must be u or t", v.pos);
        ++i_;
        IntVar iv = v.text == "u" ? IntVar::U : IntVar::T;
        bool potential = false;
        if (accept_punct("@")) {
            const Token& w = peek();
            if (iv != IntVar::U || w.kind != Token::Kind::Ident || w.text != "v_x")
                throw ParseError("only the reading u = v_x is supported here", w.pos);
            ++i_;
            potential = true;
        }
        expect_punct(")");
        try {
            Expr built = integral(e, iv);
            return potential ? to_potential(built) : built;
        } catch (const UnsupportedConstruct& ex) {
            throw ParseError(ex.what(), pos);
        }
    }

    Expr parse_diff(std::size_t pos) {
        expect_punct("(");
        Expr e = parse_sum();
        int count = 0;
        while (accept_punct(",")) {
            Expr atom = parse_atom();
            const Node& a = atom.n();
            e = a.kind == Kind::Var ? partial(e, a.var, reg_) : partial(e, a.jet, reg_);
            ++count;
        }
        expect_punct(")");
        if (count == 0) throw ParseError("diff needs at least one variable", pos);
        return e;
    }

    // call of a registered symbol; arguments must be its registered atoms,
    // with all u-arguments optionally read at v_x
    Expr parse_call(const FunctionSymbol& fs, std::size_t pos) {
        expect_punct("(");
        int plain = 0, shifted = 0;
        for (std::size_t k = 0; k < fs.args.size(); ++k) {
            if (k) expect_punct(",");
            const Token& t = peek();
            Expr atom = parse_atom();
            const Node& a = atom.n();
            const ArgSlot& slot = fs.args[k];
            bool ok = false;
            switch (slot.tag) {
            case ArgSlot::Tag::T:
                ok = a.kind == Kind::Var && a.var == VarTag::T;
                break;
            case ArgSlot::Tag::X:
                ok = a.kind == Kind::Var && a.var == VarTag::X;
                break;
            case ArgSlot::Tag::Jet:
                if (a.kind != Kind::Jet) break;
                if (a.jet == slot.jet) {
                    ok = true;
                    if (slot.jet.dep == Dep::U) ++plain;
                } else if (slot.jet.dep == Dep::U && a.jet == potential_image(slot.jet)) {
                    ok = true;
                    ++shifted;
                }
                break;
            }
            if (!ok)
                throw ParseError("argument " + std::to_string(k + 1) + " of " + fs.name +
                                     " must be its registered atom",
                                 t.pos);
        }
        expect_punct(")");
        if (plain > 0 && shifted > 0)
            throw ParseError("cannot mix plain and v_x readings in one call of " + fs.name, pos);
        return func(fs.name, fs.args, {}, shifted > 0);
    }

    std::vector<Token> toks_;
    std::size_t i_ = 0;
    const Registry& reg_;
    const ParamValues* bind_;
};

} // namespace

Expr parse_expression(const std::string& text, const Registry& reg, const ParamValues* bind) {
    return Parser(text, reg, bind).run();
}

} // namespace gkaw
