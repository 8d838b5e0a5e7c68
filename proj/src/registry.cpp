#include "gkaw/registry.hpp"

namespace gkaw {

void Registry::add_param(const std::string& name) {
    if (funcs_.count(name)) throw Error("name already registered as a function: " + name);
    params_.insert(name);
}

bool Registry::has_param(const std::string& name) const { return params_.count(name) > 0; }

void Registry::add_func(FunctionSymbol fs) {
    if (params_.count(fs.name)) throw Error("name already registered as a parameter: " + fs.name);
    auto it = funcs_.find(fs.name);
    if (it != funcs_.end()) {
        if (it->second.args != fs.args)
            throw Error("function symbol re-registered with a different signature: " + fs.name);
        return;
    }
    if (fs.closed && fs.args.size() != 1)
        throw Error("closed function symbols take exactly one argument: " + fs.name);
    funcs_.emplace(fs.name, std::move(fs));
}

void Registry::set_rule(const std::string& name, const Expr& rule) {
    auto it = funcs_.find(name);
    if (it == funcs_.end()) throw Error("cannot attach rule to unregistered symbol: " + name);
    if (it->second.args.size() != 1)
        throw Error("closed function symbols take exactly one argument: " + name);
    if (it->second.closed) throw Error("rewrite rule already attached: " + name);
    it->second.closed = true;
    it->second.rule = rule;
}

const FunctionSymbol* Registry::find_func(const std::string& name) const {
    auto it = funcs_.find(name);
    return it == funcs_.end() ? nullptr : &it->second;
}

std::vector<ArgSlot> t_signature() { return {arg_t()}; }
std::vector<ArgSlot> u_signature() { return {arg_jet(ujet(0))}; }
std::vector<ArgSlot> point_signature() { return {arg_x(), arg_t(), arg_jet(ujet(0))}; }

std::vector<ArgSlot> multiplier_signature(int order) {
    std::vector<ArgSlot> s{arg_t(), arg_x()};
    for (int k = 0; k <= order; ++k) s.push_back(arg_jet(ujet(k)));
    return s;
}

Registry standard_registry() {
    Registry r;
    for (const char* p : {"alpha", "beta", "gamma", "delta", "mu", "f0", "f1", "f2", "f3", "lambda"})
        r.add_param(p);
    r.add_func({"a", t_signature(), false, {}});
    r.add_func({"b", t_signature(), false, {}});
    r.add_func({"c", t_signature(), false, {}});
    r.add_func({"f", u_signature(), false, {}});
    r.add_func({"F", u_signature(), false, {}});
    r.set_rule("F", integral(func("f", u_signature()), IntVar::U));
    r.add_func({"xi", point_signature(), false, {}});
    r.add_func({"tau", point_signature(), false, {}});
    r.add_func({"eta", point_signature(), false, {}});
    r.add_func({"Q", multiplier_signature(4), false, {}});
    return r;
}

} // namespace gkaw
