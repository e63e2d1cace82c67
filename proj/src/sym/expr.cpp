#include "tfl/sym/expr.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <unordered_map>

#include "tfl/error.hpp"

namespace tfl::sym {

namespace {

bool poly_has_kernels(const Poly& p) {
    for (const auto& t : p.terms())
        for (const auto& f : t.m.factors())
            if (is_kernel(f.sym)) return true;
    return false;
}

} // namespace

Expr Expr::make_canonical(Poly num, Poly den) {
    if (den.is_zero()) throw DomainError("division by zero");
    if (num.is_zero()) return Expr();
    if (den.is_constant()) {
        if (!den.is_one()) num *= mpq_class(1 / den.constant_value());
        den = Poly(1);
    } else {
        Poly g = gcd(num, den);
        if (!g.is_constant()) {
            num = divide_exact(num, g);
            den = divide_exact(den, g);
        }
        mpq_class lc = den.leading_coeff();
        if (lc != 1) {
            mpq_class inv = 1 / lc;
            num *= inv;
            den *= inv;
        }
        if (den.is_constant()) den = Poly(1);
    }
    auto r = std::make_shared<Rep>();
    r->kernels = poly_has_kernels(num) || poly_has_kernels(den);
    r->hash = num.hash() * 1000003u ^ den.hash();
    r->num = std::move(num);
    r->den = std::move(den);
    return Expr(std::shared_ptr<const Rep>(std::move(r)));
}

Expr::Expr() {
    static const std::shared_ptr<const Rep> zero = [] {
        auto r = std::make_shared<Rep>();
        r->den = Poly(1);
        r->hash = r->num.hash() * 1000003u ^ r->den.hash();
        return std::shared_ptr<const Rep>(r);
    }();
    rep_ = zero;
}

Expr::Expr(long c) : Expr(mpq_class(c)) {}

Expr::Expr(const mpq_class& c) {
    if (c == 0) {
        *this = Expr();
        return;
    }
    *this = make_canonical(Poly(c), Poly(1));
}

Expr Expr::symbol(SymbolId s) { return make_canonical(Poly::symbol(s), Poly(1)); }

Expr Expr::fraction(Poly num, Poly den) { return make_canonical(std::move(num), std::move(den)); }

Expr Expr::polynomial(Poly p) { return make_canonical(std::move(p), Poly(1)); }

std::optional<mpq_class> Expr::rational_value() const {
    if (!is_constant()) return std::nullopt;
    return num().constant_value();
}

std::vector<SymbolId> Expr::variables() const {
    std::vector<SymbolId> out;
    for (const Poly* p : {&num(), &den()})
        for (SymbolId s : p->symbols()) {
            if (is_kernel(s)) {
                const auto& d = symbols::kernel_info(s).depends_on;
                out.insert(out.end(), d.begin(), d.end());
            } else {
                out.push_back(s);
            }
        }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

bool Expr::depends_on(SymbolId var) const {
    for (const Poly* p : {&num(), &den()})
        for (SymbolId s : p->symbols()) {
            if (s == var) return true;
            if (is_kernel(s)) {
                const auto& d = symbols::kernel_info(s).depends_on;
                if (std::binary_search(d.begin(), d.end(), var)) return true;
            }
        }
    return false;
}

bool Expr::operator==(const Expr& o) const {
    if (rep_ == o.rep_) return true;
    return rep_->hash == o.rep_->hash && rep_->num == o.rep_->num && rep_->den == o.rep_->den;
}

Expr Expr::operator-() const {
    if (is_zero()) return *this;
    auto r = std::make_shared<Rep>(*rep_);
    r->num = -r->num;
    r->hash = r->num.hash() * 1000003u ^ r->den.hash();
    return Expr(std::shared_ptr<const Rep>(std::move(r)));
}

Expr operator+(const Expr& a, const Expr& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    if (a.is_polynomial() && b.is_polynomial()) return Expr::make_canonical(a.num() + b.num(), Poly(1));
    if (a.den() == b.den()) return Expr::make_canonical(a.num() + b.num(), a.den());
    if (b.is_polynomial()) return Expr::make_canonical(a.num() + b.num() * a.den(), a.den());
    if (a.is_polynomial()) return Expr::make_canonical(a.num() * b.den() + b.num(), b.den());
    Poly g = gcd(a.den(), b.den());
    Poly bd = divide_exact(b.den(), g), ad = divide_exact(a.den(), g);
    return Expr::make_canonical(a.num() * bd + b.num() * ad, a.den() * bd);
}

Expr operator-(const Expr& a, const Expr& b) { return a + (-b); }

Expr operator*(const Expr& a, const Expr& b) {
    if (a.is_zero() || b.is_zero()) return Expr();
    if (a.is_polynomial() && b.is_polynomial()) return Expr::make_canonical(a.num() * b.num(), Poly(1));
    Poly g1 = gcd(a.num(), b.den()), g2 = gcd(b.num(), a.den());
    Poly an = g1.is_one() ? a.num() : divide_exact(a.num(), g1);
    Poly bd = g1.is_one() ? b.den() : divide_exact(b.den(), g1);
    Poly bn = g2.is_one() ? b.num() : divide_exact(b.num(), g2);
    Poly ad = g2.is_one() ? a.den() : divide_exact(a.den(), g2);
    return Expr::make_canonical(an * bn, ad * bd);
}

Expr operator/(const Expr& a, const Expr& b) {
    if (b.is_zero()) throw DomainError("division by zero");
    return a * Expr::make_canonical(b.den(), b.num());
}

Expr pow(const Expr& base, long e) {
    if (e == 0) return Expr(1);
    if (e < 0) return Expr(1) / pow(base, -e);
    if (base.is_polynomial()) return Expr::polynomial(base.num().pow(static_cast<unsigned>(e)));
    // Powers of a canonical fraction stay coprime.
    return Expr::fraction(base.num().pow(static_cast<unsigned>(e)), base.den().pow(static_cast<unsigned>(e)));
}

Expr apply_kernel(KernelFn fn, const Expr& a) {
    if (auto c = a.rational_value()) {
        switch (fn) {
            case KernelFn::Exp:
                if (*c == 0) return Expr(1);
                break;
            case KernelFn::Sin:
                if (*c == 0) return Expr(0);
                break;
            case KernelFn::Cos:
                if (*c == 0) return Expr(1);
                break;
            case KernelFn::Ln:
                if (*c <= 0) throw DomainError("ln of non-positive constant");
                if (*c == 1) return Expr(0);
                break;
        }
    }
    return Expr::symbol(symbols::kernel(fn, a));
}

Expr exp(const Expr& a) { return apply_kernel(KernelFn::Exp, a); }
Expr sin(const Expr& a) { return apply_kernel(KernelFn::Sin, a); }
Expr cos(const Expr& a) { return apply_kernel(KernelFn::Cos, a); }
Expr ln(const Expr& a) { return apply_kernel(KernelFn::Ln, a); }

Expr simplify(const Expr& e) { return Expr::fraction(e.num(), e.den()); }

namespace {

Expr kernel_derivative(SymbolId k) {
    const KernelInfo& info = symbols::kernel_info(k);
    switch (info.fn) {
        case KernelFn::Exp: return Expr::symbol(k);
        case KernelFn::Sin: return cos(*info.arg);
        case KernelFn::Cos: return -sin(*info.arg);
        case KernelFn::Ln: return Expr(1) / *info.arg;
    }
    return Expr();
}

Expr poly_diff(const Poly& p, SymbolId var) {
    Expr out = Expr::polynomial(p.formal_diff(var));
    for (SymbolId s : p.symbols()) {
        if (!is_kernel(s)) continue;
        const auto& deps = symbols::kernel_info(s).depends_on;
        if (!std::binary_search(deps.begin(), deps.end(), var)) continue;
        Expr inner = diff(*symbols::kernel_info(s).arg, var);
        out += Expr::polynomial(p.formal_diff(s)) * kernel_derivative(s) * inner;
    }
    return out;
}

} // namespace

Expr diff(const Expr& e, SymbolId var) {
    if (e.is_constant()) return Expr();
    Expr dn = poly_diff(e.num(), var);
    if (e.is_polynomial()) return dn;
    Expr dd = poly_diff(e.den(), var);
    if (dd.is_zero()) return dn / Expr::polynomial(e.den());
    Expr n = Expr::polynomial(e.num()), d = Expr::polynomial(e.den());
    return (dn * d - n * dd) / (d * d);
}

namespace {

struct SubstContext {
    const Bindings& b;
    std::unordered_map<SymbolId, Expr> memo;

    const Expr* binding(SymbolId v) const {
        for (const auto& [s, e] : b)
            if (s == v) return &e;
        return nullptr;
    }

    bool touches(SymbolId s) const {
        for (SymbolId v : symbols::variables_of(s))
            if (binding(v)) return true;
        return false;
    }

    const Expr& replacement(SymbolId s) {
        auto it = memo.find(s);
        if (it != memo.end()) return it->second;
        Expr r;
        if (!is_kernel(s)) {
            const Expr* e = binding(s);
            r = e ? *e : Expr::symbol(s);
        } else if (touches(s)) {
            const KernelInfo& info = symbols::kernel_info(s);
            r = apply_kernel(info.fn, run(*info.arg));
        } else {
            r = Expr::symbol(s);
        }
        return memo.emplace(s, std::move(r)).first->second;
    }

    // Substitutes into a polynomial; returns a polynomial when every replacement is one.
    Expr poly(const Poly& p) {
        bool need = false;
        for (SymbolId s : p.symbols())
            if (touches(s)) need = true;
        if (!need) return Expr::polynomial(p);
        bool all_poly = true;
        for (SymbolId s : p.symbols())
            if (!replacement(s).is_polynomial()) all_poly = false;
        if (all_poly) {
            std::map<std::pair<SymbolId, std::uint32_t>, Poly> powers;
            auto power = [&](SymbolId s, std::uint32_t e) -> const Poly& {
                auto key = std::make_pair(s, e);
                auto it = powers.find(key);
                if (it != powers.end()) return it->second;
                return powers.emplace(key, replacement(s).num().pow(e)).first->second;
            };
            std::vector<Term> acc;
            Poly sum;
            for (const auto& t : p.terms()) {
                Poly term(t.c);
                for (const auto& f : t.m.factors()) term = term * power(f.sym, f.exp);
                for (const auto& tt : term.terms()) acc.push_back(tt);
            }
            return Expr::polynomial(Poly::from_terms(std::move(acc)));
        }
        Expr out;
        for (const auto& t : p.terms()) {
            Expr term(t.c);
            for (const auto& f : t.m.factors()) term *= pow(replacement(f.sym), f.exp);
            out += term;
        }
        return out;
    }

    Expr run(const Expr& e) {
        Expr n = poly(e.num());
        if (e.is_polynomial()) return n;
        return n / poly(e.den());
    }
};

} // namespace

Expr substitute(const Expr& e, const Bindings& b) {
    if (b.empty() || e.is_constant()) return e;
    SubstContext ctx{b, {}};
    return ctx.run(e);
}

namespace {

double apply_fn(KernelFn fn, double v) {
    switch (fn) {
        case KernelFn::Exp: return std::exp(v);
        case KernelFn::Sin: return std::sin(v);
        case KernelFn::Cos: return std::cos(v);
        case KernelFn::Ln:
            if (!(v > 0)) throw DomainError("ln of non-positive argument");
            return std::log(v);
    }
    return 0;
}

// Evaluates a polynomial exactly in the given symbol values.
mpq_class eval_poly(const Poly& p, std::unordered_map<SymbolId, mpq_class>& vals) {
    return p.eval_exact([&](SymbolId s) { return vals.at(s); });
}

void bind_symbols(const Expr& e, const Point& p, std::unordered_map<SymbolId, mpq_class>& vals);

void bind_symbol(SymbolId s, const Point& p, std::unordered_map<SymbolId, mpq_class>& vals) {
    if (vals.count(s)) return;
    if (!is_kernel(s)) {
        if (p.is_exact()) {
            vals.emplace(s, p.exact(s));
        } else {
            vals.emplace(s, mpq_class(p.value(s)));
        }
        return;
    }
    const KernelInfo& info = symbols::kernel_info(s);
    double a = eval_at(*info.arg, p);
    double v = apply_fn(info.fn, a);
    if (!std::isfinite(v)) throw DomainError("non-finite kernel value");
    vals.emplace(s, mpq_class(v));
}

void bind_symbols(const Expr& e, const Point& p, std::unordered_map<SymbolId, mpq_class>& vals) {
    for (const Poly* q : {&e.num(), &e.den()})
        for (SymbolId s : q->symbols()) bind_symbol(s, p, vals);
}

} // namespace

double eval_at(const Expr& e, const Point& p) {
    if (e.is_constant()) return e.num().constant_value().get_d();
    std::unordered_map<SymbolId, mpq_class> vals;
    bind_symbols(e, p, vals);
    mpq_class n = eval_poly(e.num(), vals);
    if (e.is_polynomial()) return n.get_d();
    mpq_class d = eval_poly(e.den(), vals);
    if (d == 0) throw DomainError("denominator vanishes at evaluation point");
    return mpq_class(n / d).get_d();
}

std::optional<mpq_class> eval_exact(const Expr& e, const Point& p) {
    if (e.has_kernels() || !p.is_exact()) return std::nullopt;
    std::unordered_map<SymbolId, mpq_class> vals;
    bind_symbols(e, p, vals);
    mpq_class n = eval_poly(e.num(), vals);
    mpq_class d = eval_poly(e.den(), vals);
    if (d == 0) throw DomainError("denominator vanishes at evaluation point");
    return mpq_class(n / d);
}

const char* to_string(ZeroTest z) {
    switch (z) {
        case ZeroTest::Zero: return "Zero";
        case ZeroTest::NonZero: return "NonZero";
        case ZeroTest::Inconclusive: return "Inconclusive";
    }
    return "?";
}

namespace {

std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

std::uint64_t fnv(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) h = (h ^ c) * 1099511628211ull;
    return h;
}

// Deterministic rational in [-3, 3] with denominator at most 8.
mpq_class sample_coordinate(std::uint64_t seed, unsigned index, SymbolId var) {
    std::uint64_t r = splitmix(seed ^ splitmix(index * 0x1000193ull ^ fnv(symbols::name(var))));
    long den = 1 + static_cast<long>(r % 8);
    long span = 6 * den + 1;
    long num = static_cast<long>((r >> 8) % static_cast<std::uint64_t>(span)) - 3 * den;
    mpq_class q(num, den);
    q.canonicalize();
    return q;
}

// Evaluates with each variable bound through a lookup function; returns false on domain errors.
bool sample_eval(const Expr& e, const std::function<mpq_class(SymbolId)>& coord, double* out) {
    std::unordered_map<SymbolId, mpq_class> vals;
    std::function<double(const Expr&)> evald;
    std::function<void(SymbolId)> bind = [&](SymbolId s) {
        if (vals.count(s)) return;
        if (!is_kernel(s)) {
            vals.emplace(s, coord(s));
            return;
        }
        const KernelInfo& info = symbols::kernel_info(s);
        double v = apply_fn(info.fn, evald(*info.arg));
        if (!std::isfinite(v)) throw DomainError("non-finite");
        vals.emplace(s, mpq_class(v));
    };
    evald = [&](const Expr& x) -> double {
        for (const Poly* q : {&x.num(), &x.den()})
            for (SymbolId s : q->symbols()) bind(s);
        mpq_class n = eval_poly(x.num(), vals), d = eval_poly(x.den(), vals);
        if (d == 0) throw DomainError("pole");
        return mpq_class(n / d).get_d();
    };
    try {
        *out = evald(e);
        return std::isfinite(*out);
    } catch (const DomainError&) {
        return false;
    }
}

} // namespace

ZeroTest is_zero(const Expr& e, const ZeroTestConfig& cfg) {
    if (e.is_zero()) return ZeroTest::Zero;
    if (e.is_constant()) return std::abs(e.num().constant_value().get_d()) > cfg.tolerance ? ZeroTest::NonZero
                                                                                         : ZeroTest::Inconclusive;
    for (unsigned i = 0; i < cfg.samples; ++i) {
        double v = 0;
        auto coord = [&](SymbolId s) { return sample_coordinate(cfg.seed, i, s); };
        if (sample_eval(e, coord, &v) && std::abs(v) > cfg.tolerance) return ZeroTest::NonZero;
    }
    return ZeroTest::Inconclusive;
}

// ---------------------------------------------------------------------------

namespace {

std::string symbol_text(SymbolId s) {
    if (!is_kernel(s)) return symbols::name(s);
    const KernelInfo& info = symbols::kernel_info(s);
    return std::string(kernel_name(info.fn)) + "(" + to_string(*info.arg) + ")";
}

std::string monomial_text(const Monomial& m) {
    std::string out;
    for (const auto& f : m.factors()) {
        if (!out.empty()) out += "*";
        out += symbol_text(f.sym);
        if (f.exp > 1) out += "^" + std::to_string(f.exp);
    }
    return out;
}

std::string rational_text(const mpq_class& q) { return q.get_str(); }

bool single_factor(const Poly& p) {
    return p.size() == 1 && p.leading_coeff() == 1 && p.leading().m.factors().size() == 1;
}

} // namespace

std::string to_string(const Poly& p) {
    if (p.is_zero()) return "0";
    std::string out;
    bool first = true;
    for (const auto& t : p.terms()) {
        bool neg = t.c < 0;
        mpq_class mag = abs(t.c);
        if (first) {
            if (neg) out += "-";
        } else {
            out += neg ? " - " : " + ";
        }
        first = false;
        if (t.m.is_one()) {
            out += rational_text(mag);
        } else if (mag == 1) {
            out += monomial_text(t.m);
        } else {
            out += rational_text(mag) + "*" + monomial_text(t.m);
        }
    }
    return out;
}

std::string to_string(const Expr& e) {
    std::string n = to_string(e.num());
    if (e.is_polynomial()) return n;
    if (e.num().size() > 1) n = "(" + n + ")";
    std::string d = to_string(e.den());
    if (!single_factor(e.den())) d = "(" + d + ")";
    return n + "/" + d;
}

} // namespace tfl::sym
