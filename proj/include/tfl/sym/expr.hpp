#pragma once

#include <gmpxx.h>

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tfl/sym/poly.hpp"
#include "tfl/sym/varspace.hpp"

namespace tfl::sym {

// Immutable rational function num/den over exact rationals. Kernels
// (exp, sin, cos, ln of a canonical argument) are independent indeterminates.
// Canonical form: gcd(num, den) = 1 and den is monic.
class Expr {
public:
    Expr();
    Expr(long c);
    Expr(int c) : Expr(static_cast<long>(c)) {}
    Expr(const mpq_class& c);

    static Expr symbol(SymbolId s);
    static Expr fraction(Poly num, Poly den);
    static Expr polynomial(Poly p);

    const Poly& num() const { return rep_->num; }
    const Poly& den() const { return rep_->den; }

    bool is_zero() const { return rep_->num.is_zero(); }
    bool is_polynomial() const { return rep_->den.is_one(); }
    bool is_constant() const { return rep_->num.is_constant() && rep_->den.is_one(); }
    bool has_kernels() const { return rep_->kernels; }
    std::optional<mpq_class> rational_value() const;

    // Variables reachable from the expression, including through kernel arguments.
    std::vector<SymbolId> variables() const;
    bool depends_on(SymbolId var) const;

    bool operator==(const Expr& o) const;
    bool operator!=(const Expr& o) const { return !(*this == o); }
    std::size_t hash() const { return rep_->hash; }

    Expr operator-() const;
    friend Expr operator+(const Expr& a, const Expr& b);
    friend Expr operator-(const Expr& a, const Expr& b);
    friend Expr operator*(const Expr& a, const Expr& b);
    friend Expr operator/(const Expr& a, const Expr& b);
    Expr& operator+=(const Expr& o) { return *this = *this + o; }
    Expr& operator-=(const Expr& o) { return *this = *this - o; }
    Expr& operator*=(const Expr& o) { return *this = *this * o; }
    Expr& operator/=(const Expr& o) { return *this = *this / o; }

private:
    struct Rep {
        Poly num, den;
        bool kernels = false;
        std::size_t hash = 0;
    };
    std::shared_ptr<const Rep> rep_;
    explicit Expr(std::shared_ptr<const Rep> r) : rep_(std::move(r)) {}
    static Expr make_canonical(Poly num, Poly den);
};

Expr pow(const Expr& base, long e);
Expr exp(const Expr& a);
Expr sin(const Expr& a);
Expr cos(const Expr& a);
Expr ln(const Expr& a);
Expr apply_kernel(KernelFn fn, const Expr& a);

// Canonical form; idempotent.
Expr simplify(const Expr& e);

Expr diff(const Expr& e, SymbolId var);

using Bindings = std::vector<std::pair<SymbolId, Expr>>;
// Simultaneous substitution of variables.
Expr substitute(const Expr& e, const Bindings& b);

double eval_at(const Expr& e, const Point& p);
// Exact value when e has no kernels and p is exact.
std::optional<mpq_class> eval_exact(const Expr& e, const Point& p);

enum class ZeroTest { Zero, NonZero, Inconclusive };
const char* to_string(ZeroTest z);

struct ZeroTestConfig {
    unsigned samples = 16;
    std::uint64_t seed = 0x5eed;
    double tolerance = 1e-9;
};
ZeroTest is_zero(const Expr& e, const ZeroTestConfig& cfg = {});

std::string to_string(const Expr& e);
std::string to_string(const Poly& p);

struct ExprHash {
    std::size_t operator()(const Expr& e) const { return e.hash(); }
};

} // namespace tfl::sym
