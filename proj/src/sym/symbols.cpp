#include "tfl/sym/symbols.hpp"

#include <deque>
#include <mutex>
#include <shared_mutex>
#include <unordered_map>

#include "tfl/error.hpp"
#include "tfl/sym/expr.hpp"

namespace tfl::sym {

const char* kernel_name(KernelFn fn) {
    switch (fn) {
        case KernelFn::Exp: return "exp";
        case KernelFn::Sin: return "sin";
        case KernelFn::Cos: return "cos";
        case KernelFn::Ln: return "ln";
    }
    return "?";
}

namespace {

struct Table {
    std::shared_mutex mu;
    std::unordered_map<std::string, SymbolId> by_name;
    std::deque<std::string> names;
    std::deque<Expr> args;
    std::deque<KernelInfo> kernels;
    std::unordered_multimap<std::size_t, SymbolId> by_hash;
};

Table& table() {
    static Table t;
    return t;
}

std::size_t kernel_key(KernelFn fn, const Expr& arg) {
    return arg.hash() * 8 + static_cast<std::size_t>(fn);
}

} // namespace

namespace symbols {

SymbolId variable(std::string_view name) {
    Table& t = table();
    std::string key(name);
    {
        std::shared_lock lock(t.mu);
        auto it = t.by_name.find(key);
        if (it != t.by_name.end()) return it->second;
    }
    std::unique_lock lock(t.mu);
    auto it = t.by_name.find(key);
    if (it != t.by_name.end()) return it->second;
    auto id = static_cast<SymbolId>(t.names.size());
    t.names.push_back(key);
    t.by_name.emplace(key, id);
    return id;
}

bool has_variable(std::string_view name) {
    Table& t = table();
    std::shared_lock lock(t.mu);
    return t.by_name.count(std::string(name)) > 0;
}

const std::string& name(SymbolId var) {
    Table& t = table();
    std::shared_lock lock(t.mu);
    if (is_kernel(var) || var >= t.names.size()) throw InternalError("not a variable symbol");
    return t.names[var];
}

SymbolId kernel(KernelFn fn, const Expr& arg) {
    Table& t = table();
    const std::size_t key = kernel_key(fn, arg);
    auto find = [&]() -> std::optional<SymbolId> {
        auto [lo, hi] = t.by_hash.equal_range(key);
        for (auto it = lo; it != hi; ++it) {
            const KernelInfo& k = t.kernels[it->second & ~kKernelBit];
            if (k.fn == fn && *k.arg == arg) return it->second;
        }
        return std::nullopt;
    };
    {
        std::shared_lock lock(t.mu);
        if (auto s = find()) return *s;
    }
    std::vector<SymbolId> deps = arg.variables();
    std::unique_lock lock(t.mu);
    if (auto s = find()) return *s;
    auto id = static_cast<SymbolId>(t.kernels.size()) | kKernelBit;
    t.args.push_back(arg);
    t.kernels.push_back({fn, &t.args.back(), std::move(deps)});
    t.by_hash.emplace(key, id);
    return id;
}

const KernelInfo& kernel_info(SymbolId k) {
    Table& t = table();
    std::shared_lock lock(t.mu);
    SymbolId idx = k & ~kKernelBit;
    if (!is_kernel(k) || idx >= t.kernels.size()) throw InternalError("not a kernel symbol");
    return t.kernels[idx];
}

std::vector<SymbolId> variables_of(SymbolId s) {
    if (!is_kernel(s)) return {s};
    return kernel_info(s).depends_on;
}

} // namespace symbols
} // namespace tfl::sym
