#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace tfl::sym {

class Expr;

// Kernel symbols carry the high bit, so numeric order of ids puts every
// variable before every kernel.
using SymbolId = std::uint32_t;
inline constexpr SymbolId kKernelBit = 0x80000000u;

inline bool is_kernel(SymbolId s) { return (s & kKernelBit) != 0; }

enum class KernelFn { Exp, Sin, Cos, Ln };

const char* kernel_name(KernelFn fn);

struct KernelInfo {
    KernelFn fn;
    const Expr* arg;                   // owned by the table, never moves
    std::vector<SymbolId> depends_on;  // variables reachable through the argument
};

// Process-wide symbol registry. Interning is thread-safe; entries are never
// removed, so references returned here stay valid.
namespace symbols {

SymbolId variable(std::string_view name);
bool has_variable(std::string_view name);
const std::string& name(SymbolId var);

// Returns the kernel symbol for fn(arg), creating it on first use.
SymbolId kernel(KernelFn fn, const Expr& arg);
const KernelInfo& kernel_info(SymbolId k);

// Variables that s depends on: itself for a variable, the argument's variables for a kernel.
std::vector<SymbolId> variables_of(SymbolId s);

} // namespace symbols
} // namespace tfl::sym
