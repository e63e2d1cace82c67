#include "tfl/cli/problem.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <fstream>
#include <regex>
#include <sstream>

#include "tfl/error.hpp"
#include "tfl/sym/parser.hpp"

namespace tfl::cli {

using sym::Expr;

namespace {

[[noreturn]] void fail(const YAML::Node& n, const std::string& what) {
    const auto m = n.Mark();
    throw ParseError(static_cast<std::size_t>(m.line + 1), static_cast<std::size_t>(m.column + 1), what);
}

[[noreturn]] void fail_at(const YAML::Node& n, std::size_t offset, const std::string& what) {
    const auto m = n.Mark();
    throw ParseError(static_cast<std::size_t>(m.line + 1), static_cast<std::size_t>(m.column + 1) + offset, what);
}

const std::vector<std::string> kSections = {"system", "target", "hints", "options"};

void check_keys(const YAML::Node& map, const std::vector<std::string>& allowed, const std::string& where) {
    if (!map.IsMap()) fail(map, where + " must be a mapping");
    for (const auto& kv : map) {
        const auto key = kv.first.as<std::string>();
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            fail(kv.first, "unknown key '" + key + "' in " + where);
    }
}

YAML::Node required(const YAML::Node& map, const std::string& key, const std::string& where) {
    YAML::Node n = map[key];
    if (!n) fail(map, "missing key '" + key + "' in " + where);
    return n;
}

std::string scalar(const YAML::Node& n, const std::string& what) {
    if (!n.IsScalar()) fail(n, what + " must be a scalar");
    return n.Scalar();
}

std::vector<YAML::Node> sequence(const YAML::Node& n, const std::string& what) {
    if (!n.IsSequence()) fail(n, what + " must be a list");
    return {n.begin(), n.end()};
}

Expr expression(const YAML::Node& n, const sym::VariableSpace& vs, const std::string& what) {
    const std::string text = scalar(n, what);
    // Quoted scalars start one column after their mark.
    const std::size_t shift = n.Tag() == "!" ? 1 : 0;
    try {
        return sym::parse_expr(text, vs);
    } catch (const SyntaxError& e) {
        fail_at(n, shift + e.position(), what + ": expected " + e.expected());
    } catch (const UnknownVariable& e) {
        fail_at(n, shift + e.position(), what + ": unknown variable '" + e.name() + "'");
    } catch (const Error& e) {
        fail(n, what + ": " + e.what());
    }
}

std::vector<Expr> expressions(const YAML::Node& n, const sym::VariableSpace& vs, const std::string& what) {
    std::vector<Expr> out;
    for (const auto& item : sequence(n, what)) out.push_back(expression(item, vs, what));
    return out;
}

std::vector<std::string> names(const YAML::Node& n, const std::string& what) {
    static const std::regex ident("[A-Za-z_][A-Za-z0-9_]*");
    std::vector<std::string> out;
    for (const auto& item : sequence(n, what)) {
        auto s = scalar(item, what);
        if (!std::regex_match(s, ident)) fail(item, what + ": '" + s + "' is not an identifier");
        out.push_back(std::move(s));
    }
    return out;
}

template <class T>
T number(const YAML::Node& n, const std::string& what) {
    try {
        return n.as<T>();
    } catch (const YAML::Exception&) {
        fail(n, what + " has the wrong type");
    }
}

} // namespace

Problem parse_problem(const std::string& text, const std::string& name) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ParseError(static_cast<std::size_t>(e.mark.line + 1), static_cast<std::size_t>(e.mark.column + 1), e.msg);
    }
    if (!root || root.IsNull()) throw ParseError(1, 1, "empty problem file");
    check_keys(root, kSections, "the problem file");

    Problem p;
    p.name = name;
    auto system = required(root, "system", "the problem file");
    check_keys(system, {"states", "inputs", "f", "g"}, "system");
    auto target = required(root, "target", "the problem file");
    check_keys(target, {"N", "x0", "u_star", "parametrization"}, "target");

    const auto states = names(required(system, "states", "system"), "states");
    const auto inputs = names(required(system, "inputs", "system"), "inputs");
    auto& s = p.sys;
    try {
        s.vars = sym::VariableSpace(inputs, states);
    } catch (const Error& e) {
        fail(system, e.what());
    }

    const auto fnode = required(system, "f", "system");
    s.f = expressions(fnode, s.vars, "f");
    if (s.f.size() != states.size())
        throw DimensionMismatch("f has " + std::to_string(s.f.size()) + " components for " + std::to_string(states.size()) +
                                " states (line " + std::to_string(fnode.Mark().line + 1) + ")");
    const auto gnode = required(system, "g", "system");
    for (const auto& col : sequence(gnode, "g")) {
        s.g.push_back(expressions(col, s.vars, "g"));
        if (s.g.back().size() != states.size())
            throw DimensionMismatch("input field has " + std::to_string(s.g.back().size()) + " components for " +
                                    std::to_string(states.size()) + " states (line " +
                                    std::to_string(col.Mark().line + 1) + ")");
    }
    if (s.g.size() != inputs.size())
        throw DimensionMismatch("g has " + std::to_string(s.g.size()) + " input fields for " +
                                std::to_string(inputs.size()) + " inputs (line " + std::to_string(gnode.Mark().line + 1) + ")");

    s.N_defs = expressions(required(target, "N", "target"), s.vars, "N");
    const auto x0node = required(target, "x0", "target");
    for (const auto& item : sequence(x0node, "x0")) {
        auto q = expression(item, s.vars, "x0").rational_value();
        if (!q) fail(item, "x0 entries must be rational numbers");
        s.x0.push_back(*q);
    }
    if (s.x0.size() != states.size())
        throw DimensionMismatch("x0 has " + std::to_string(s.x0.size()) + " entries for " + std::to_string(states.size()) +
                                " states (line " + std::to_string(x0node.Mark().line + 1) + ")");
    if (auto u = target["u_star"]) {
        s.u_star = expressions(u, s.vars, "u_star");
        if (s.u_star.size() != inputs.size())
            throw DimensionMismatch("u_star has " + std::to_string(s.u_star.size()) + " entries for " +
                                    std::to_string(inputs.size()) + " inputs (line " + std::to_string(u.Mark().line + 1) + ")");
    } else {
        s.u_star.assign(inputs.size(), Expr(0));
    }
    if (auto par = target["parametrization"]) {
        if (!par.IsMap()) fail(par, "parametrization must map states to expressions");
        sym::Bindings b;
        for (const auto& kv : par) {
            auto var = s.vars.lookup(kv.first.as<std::string>());
            if (!var) fail(kv.first, "parametrization binds an unknown variable");
            b.emplace_back(*var, expression(kv.second, s.vars, "parametrization"));
        }
        s.parametrization = std::move(b);
    }

    if (auto hints = root["hints"]) {
        if (!hints.IsMap()) fail(hints, "hints must map closure indices to lists of expressions");
        for (const auto& kv : hints) {
            const auto k = number<long>(kv.first, "hint index");
            if (k < 0 || static_cast<std::size_t>(k) > states.size()) fail(kv.first, "hint index out of range");
            auto& list = p.options.hints[static_cast<std::size_t>(k)];
            for (auto& e : expressions(kv.second, s.vars, "hints")) list.push_back(std::move(e));
        }
    }

    if (auto opt = root["options"]) {
        check_keys(opt, {"seed", "samples", "radius", "ansatz_degree"}, "options");
        auto& o = p.options;
        if (opt["seed"]) o.conditions.seed = number<std::uint64_t>(opt["seed"], "seed");
        if (opt["samples"]) o.conditions.samples = number<std::size_t>(opt["samples"], "samples");
        if (opt["radius"]) o.conditions.radius = number<double>(opt["radius"], "radius");
        if (opt["ansatz_degree"]) o.adapt.degree = number<unsigned>(opt["ansatz_degree"], "ansatz_degree");
        if (o.conditions.samples == 0) fail(opt["samples"], "samples must be positive");
        if (!(o.conditions.radius > 0)) fail(opt["radius"], "radius must be positive");
        if (o.adapt.degree == 0) fail(opt["ansatz_degree"], "ansatz_degree must be positive");
    }

    // Structural validation: x0 on N, rank of N, invariance under u*.
    lift::lift_system(s);
    return p;
}

Problem load_problem(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidProblem("cannot open " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    auto slash = path.find_last_of('/');
    std::string stem = path.substr(slash == std::string::npos ? 0 : slash + 1);
    if (auto dot = stem.rfind('.'); dot != std::string::npos) stem.resize(dot);
    return parse_problem(buf.str(), stem);
}

} // namespace tfl::cli
