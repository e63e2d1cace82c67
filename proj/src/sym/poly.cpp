#include "tfl/sym/poly.hpp"

#include <algorithm>
#include <optional>

#include "tfl/error.hpp"

namespace tfl::sym {

Monomial::Monomial(SymbolId s, std::uint32_t e) {
    if (e > 0) {
        f_.push_back({s, e});
        deg_ = e;
    }
}

std::uint32_t Monomial::degree_in(SymbolId s) const {
    for (const auto& f : f_)
        if (f.sym == s) return f.exp;
    return 0;
}

Monomial Monomial::operator*(const Monomial& o) const {
    Monomial r;
    r.f_.reserve(f_.size() + o.f_.size());
    std::size_t i = 0, j = 0;
    while (i < f_.size() && j < o.f_.size()) {
        if (f_[i].sym == o.f_[j].sym) {
            r.f_.push_back({f_[i].sym, f_[i].exp + o.f_[j].exp});
            ++i;
            ++j;
        } else if (f_[i].sym < o.f_[j].sym) {
            r.f_.push_back(f_[i++]);
        } else {
            r.f_.push_back(o.f_[j++]);
        }
    }
    for (; i < f_.size(); ++i) r.f_.push_back(f_[i]);
    for (; j < o.f_.size(); ++j) r.f_.push_back(o.f_[j]);
    r.deg_ = deg_ + o.deg_;
    return r;
}

bool Monomial::divides(const Monomial& o) const {
    if (deg_ > o.deg_) return false;
    std::size_t j = 0;
    for (const auto& f : f_) {
        while (j < o.f_.size() && o.f_[j].sym < f.sym) ++j;
        if (j == o.f_.size() || o.f_[j].sym != f.sym || o.f_[j].exp < f.exp) return false;
    }
    return true;
}

Monomial Monomial::operator/(const Monomial& o) const {
    Monomial r;
    std::size_t j = 0;
    for (const auto& f : f_) {
        std::uint32_t e = f.exp;
        if (j < o.f_.size() && o.f_[j].sym == f.sym) e -= o.f_[j++].exp;
        if (e > 0) r.f_.push_back({f.sym, e});
    }
    r.deg_ = deg_ - o.deg_;
    return r;
}

Monomial Monomial::without(SymbolId s) const {
    Monomial r;
    for (const auto& f : f_) {
        if (f.sym == s) continue;
        r.f_.push_back(f);
        r.deg_ += f.exp;
    }
    return r;
}

Monomial Monomial::gcd(const Monomial& a, const Monomial& b) {
    Monomial r;
    std::size_t i = 0, j = 0;
    while (i < a.f_.size() && j < b.f_.size()) {
        if (a.f_[i].sym == b.f_[j].sym) {
            std::uint32_t e = std::min(a.f_[i].exp, b.f_[j].exp);
            r.f_.push_back({a.f_[i].sym, e});
            r.deg_ += e;
            ++i;
            ++j;
        } else if (a.f_[i].sym < b.f_[j].sym) {
            ++i;
        } else {
            ++j;
        }
    }
    return r;
}

std::size_t Monomial::hash() const {
    std::size_t h = 0x9e3779b97f4a7c15ull;
    for (const auto& f : f_) h = (h ^ (f.sym * 0x100000001b3ull + f.exp)) * 0x100000001b3ull;
    return h;
}

int Monomial::compare(const Monomial& a, const Monomial& b) {
    if (a.deg_ != b.deg_) return a.deg_ > b.deg_ ? 1 : -1;
    std::size_t i = 0, j = 0;
    while (i < a.f_.size() && j < b.f_.size()) {
        if (a.f_[i].sym == b.f_[j].sym) {
            if (a.f_[i].exp != b.f_[j].exp) return a.f_[i].exp > b.f_[j].exp ? 1 : -1;
            ++i;
            ++j;
        } else {
            return a.f_[i].sym < b.f_[j].sym ? 1 : -1;
        }
    }
    if (i < a.f_.size()) return 1;
    if (j < b.f_.size()) return -1;
    return 0;
}

// ---------------------------------------------------------------------------

Poly::Poly(const mpq_class& c) {
    if (c != 0) t_.push_back({Monomial(), c});
}

Poly Poly::symbol(SymbolId s) {
    Poly p;
    p.t_.push_back({Monomial(s), mpq_class(1)});
    return p;
}

Poly Poly::from_terms(std::vector<Term> terms) {
    std::sort(terms.begin(), terms.end(),
              [](const Term& a, const Term& b) { return Monomial::compare(a.m, b.m) > 0; });
    Poly p;
    p.t_.reserve(terms.size());
    for (auto& t : terms) {
        if (!p.t_.empty() && p.t_.back().m == t.m) {
            p.t_.back().c += t.c;
        } else {
            if (!p.t_.empty() && p.t_.back().c == 0) p.t_.pop_back();
            p.t_.push_back(std::move(t));
        }
    }
    if (!p.t_.empty() && p.t_.back().c == 0) p.t_.pop_back();
    return p;
}

void Poly::normalize_sorted() {
    std::erase_if(t_, [](const Term& t) { return t.c == 0; });
}

mpq_class Poly::constant_value() const {
    if (t_.empty()) return 0;
    if (!t_[0].m.is_one()) throw InternalError("constant_value of non-constant polynomial");
    return t_[0].c;
}

std::uint32_t Poly::degree_in(SymbolId s) const {
    std::uint32_t d = 0;
    for (const auto& t : t_) d = std::max(d, t.m.degree_in(s));
    return d;
}

std::uint32_t Poly::total_degree() const { return t_.empty() ? 0 : t_.front().m.degree(); }

std::vector<SymbolId> Poly::symbols() const {
    std::vector<SymbolId> out;
    for (const auto& t : t_)
        for (const auto& f : t.m.factors()) out.push_back(f.sym);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

bool Poly::contains(SymbolId s) const {
    for (const auto& t : t_)
        if (t.m.degree_in(s) > 0) return true;
    return false;
}

Poly Poly::operator-() const {
    Poly r = *this;
    for (auto& t : r.t_) t.c = -t.c;
    return r;
}

Poly Poly::merge(const Poly& a, const Poly& b, bool subtract) {
    std::vector<Term> out;
    const auto& x = a.terms();
    const auto& y = b.terms();
    out.reserve(x.size() + y.size());
    std::size_t i = 0, j = 0;
    while (i < x.size() && j < y.size()) {
        int c = Monomial::compare(x[i].m, y[j].m);
        if (c > 0) {
            out.push_back(x[i++]);
        } else if (c < 0) {
            out.push_back(y[j++]);
            if (subtract) out.back().c = -out.back().c;
        } else {
            mpq_class s = subtract ? mpq_class(x[i].c - y[j].c) : mpq_class(x[i].c + y[j].c);
            if (s != 0) out.push_back({x[i].m, s});
            ++i;
            ++j;
        }
    }
    for (; i < x.size(); ++i) out.push_back(x[i]);
    for (; j < y.size(); ++j) {
        out.push_back(y[j]);
        if (subtract) out.back().c = -out.back().c;
    }
    Poly p;
    p.t_ = std::move(out);
    return p;
}

Poly& Poly::operator+=(const Poly& o) {
    if (o.t_.empty()) return *this;
    if (t_.empty()) return *this = o;
    *this = merge(*this, o, false);
    return *this;
}

Poly& Poly::operator-=(const Poly& o) {
    if (o.t_.empty()) return *this;
    *this = merge(*this, o, true);
    return *this;
}

Poly& Poly::operator*=(const mpq_class& c) {
    if (c == 0) {
        t_.clear();
        return *this;
    }
    for (auto& t : t_) t.c *= c;
    return *this;
}

Poly operator*(const Poly& a, const Poly& b) {
    if (a.t_.empty() || b.t_.empty()) return Poly();
    if (a.is_constant()) return b * a.t_[0].c;
    if (b.is_constant()) return a * b.t_[0].c;
    std::vector<Term> out;
    out.reserve(a.t_.size() * b.t_.size());
    for (const auto& x : a.t_)
        for (const auto& y : b.t_) out.push_back({x.m * y.m, x.c * y.c});
    return Poly::from_terms(std::move(out));
}

Poly Poly::mul_term(const Monomial& m, const mpq_class& c) const {
    Poly r;
    if (c == 0) return r;
    r.t_.reserve(t_.size());
    for (const auto& t : t_) r.t_.push_back({t.m * m, t.c * c});
    return r;  // multiplication by a monomial preserves the order
}

Poly Poly::pow(unsigned e) const {
    Poly result(1), base = *this;
    while (e) {
        if (e & 1u) result = result * base;
        e >>= 1u;
        if (e) base = base * base;
    }
    return result;
}

bool Poly::operator==(const Poly& o) const {
    if (t_.size() != o.t_.size()) return false;
    for (std::size_t i = 0; i < t_.size(); ++i)
        if (!(t_[i].m == o.t_[i].m) || t_[i].c != o.t_[i].c) return false;
    return true;
}

std::size_t Poly::hash() const {
    std::size_t h = t_.size();
    for (const auto& t : t_) {
        h = h * 31 + t.m.hash();
        h = h * 31 + std::hash<double>{}(t.c.get_d());
    }
    return h;
}

std::vector<Poly> Poly::coefficients_in(SymbolId s) const {
    std::vector<Poly> out(degree_in(s) + 1);
    for (const auto& t : t_) {
        std::uint32_t e = t.m.degree_in(s);
        out[e].t_.push_back({e ? t.m.without(s) : t.m, t.c});
    }
    return out;
}

Poly Poly::from_coefficients(const std::vector<Poly>& coeffs, SymbolId s) {
    std::vector<Term> all;
    for (std::size_t d = 0; d < coeffs.size(); ++d) {
        Monomial m(s, static_cast<std::uint32_t>(d));
        for (const auto& t : coeffs[d].t_) all.push_back({t.m * m, t.c});
    }
    return from_terms(std::move(all));
}

Poly Poly::formal_diff(SymbolId s) const {
    Poly r;
    for (const auto& t : t_) {
        std::uint32_t e = t.m.degree_in(s);
        if (e == 0) continue;
        r.t_.push_back({t.m / Monomial(s), t.c * e});
    }
    return r;
}

Poly Poly::monic() const {
    if (t_.empty() || t_[0].c == 1) return *this;
    Poly r = *this;
    mpq_class inv = 1 / t_[0].c;
    for (auto& t : r.t_) t.c *= inv;
    return r;
}

Poly Poly::integer_primitive(mpq_class* factor) const {
    if (t_.empty()) {
        if (factor) *factor = 1;
        return *this;
    }
    mpz_class l = 1, g = 0;
    for (const auto& t : t_) {
        mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), t.c.get_den_mpz_t());
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), t.c.get_num_mpz_t());
    }
    mpq_class scale(l, g);
    scale.canonicalize();
    if (t_[0].c < 0) scale = -scale;
    if (factor) *factor = 1 / scale;
    return *this * scale;
}

Monomial Poly::monomial_content() const {
    if (t_.empty()) return Monomial();
    Monomial g = t_[0].m;
    for (std::size_t i = 1; i < t_.size() && !g.is_one(); ++i) g = Monomial::gcd(g, t_[i].m);
    return g;
}

double Poly::eval(const std::function<double(SymbolId)>& value) const {
    double s = 0;
    for (const auto& t : t_) {
        double v = t.c.get_d();
        for (const auto& f : t.m.factors()) {
            double b = value(f.sym);
            double p = 1;
            for (std::uint32_t k = 0; k < f.exp; ++k) p *= b;
            v *= p;
        }
        s += v;
    }
    return s;
}

mpq_class Poly::eval_exact(const std::function<mpq_class(SymbolId)>& value) const {
    mpq_class s = 0;
    for (const auto& t : t_) {
        mpq_class v = t.c;
        for (const auto& f : t.m.factors()) {
            mpq_class b = value(f.sym);
            for (std::uint32_t k = 0; k < f.exp; ++k) v *= b;
        }
        s += v;
    }
    return s;
}

// ---------------------------------------------------------------------------

bool try_divide(const Poly& a, const Poly& b, Poly* q) {
    if (b.is_zero()) throw DomainError("division by zero polynomial");
    if (b.is_constant()) {
        if (q) *q = a * mpq_class(1 / b.leading_coeff());
        return true;
    }
    const Term& lb = b.leading();
    std::vector<Term> quot;
    Poly r = a;
    while (!r.is_zero()) {
        const Term& lr = r.leading();
        if (!lb.m.divides(lr.m)) return false;
        Monomial m = lr.m / lb.m;
        mpq_class c = lr.c / lb.c;
        quot.push_back({m, c});
        r -= b.mul_term(m, c);
    }
    if (q) *q = Poly::from_terms(std::move(quot));
    return true;
}

Poly divide_exact(const Poly& a, const Poly& b) {
    Poly q;
    if (!try_divide(a, b, &q)) throw InternalError("inexact polynomial division");
    return q;
}

namespace {

using UPoly = std::vector<Poly>;

void trim(UPoly& u) {
    while (!u.empty() && u.back().is_zero()) u.pop_back();
}

UPoly scale(const UPoly& u, const Poly& c) {
    UPoly r(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) r[i] = u[i] * c;
    return r;
}

UPoly pseudo_remainder(UPoly a, const UPoly& b) {
    const std::size_t db = b.size() - 1;
    const Poly& lcb = b.back();
    if (a.size() < b.size()) return a;
    int e = static_cast<int>(a.size() - b.size()) + 1;
    while (!a.empty() && a.size() >= b.size()) {
        Poly lca = a.back();
        std::size_t shift = a.size() - 1 - db;
        a = scale(a, lcb);
        for (std::size_t i = 0; i <= db; ++i) a[i + shift] -= b[i] * lca;
        a.pop_back();
        trim(a);
        --e;
    }
    if (e > 0) {
        Poly f = lcb.pow(static_cast<unsigned>(e));
        a = scale(a, f);
    }
    return a;
}

Poly content_in(const Poly& p, SymbolId x) {
    Poly g;
    for (const auto& c : p.coefficients_in(x)) {
        if (c.is_zero()) continue;
        g = g.is_zero() ? c.monic() : gcd(g, c);
        if (g.is_constant()) return Poly(1);
    }
    return g;
}

Poly prs_gcd(const Poly& pa, const Poly& pb, SymbolId x) {
    UPoly a = pa.coefficients_in(x), b = pb.coefficients_in(x);
    if (a.size() < b.size()) std::swap(a, b);
    Poly g(1), h(1);
    for (;;) {
        const std::size_t d = a.size() - b.size();
        UPoly r = pseudo_remainder(a, b);
        if (r.empty()) break;
        if (r.size() == 1) return Poly(1);
        a = std::move(b);
        Poly div = g * h.pow(static_cast<unsigned>(d));
        b.resize(r.size());
        for (std::size_t i = 0; i < r.size(); ++i) b[i] = divide_exact(r[i], div);
        g = a.back();
        if (d == 1) {
            h = g;
        } else if (d > 1) {
            h = divide_exact(g.pow(static_cast<unsigned>(d)), h.pow(static_cast<unsigned>(d - 1)));
        }
    }
    Poly res = Poly::from_coefficients(b, x);
    Poly c = content_in(res, x);
    if (!c.is_constant()) res = divide_exact(res, c);
    return res.monic();
}

// Arithmetic modulo the Mersenne prime 2^61 - 1.
namespace modp {

constexpr std::uint64_t P = (1ull << 61) - 1;

std::uint64_t mul(std::uint64_t a, std::uint64_t b) {
    unsigned __int128 r = static_cast<unsigned __int128>(a) * b;
    std::uint64_t lo = static_cast<std::uint64_t>(r & P), hi = static_cast<std::uint64_t>(r >> 61);
    std::uint64_t s = lo + hi;
    return s >= P ? s - P : s;
}
std::uint64_t add(std::uint64_t a, std::uint64_t b) {
    std::uint64_t s = a + b;
    return s >= P ? s - P : s;
}
std::uint64_t sub(std::uint64_t a, std::uint64_t b) { return a >= b ? a - b : a + P - b; }
std::uint64_t power(std::uint64_t a, std::uint64_t e) {
    std::uint64_t r = 1;
    while (e) {
        if (e & 1) r = mul(r, a);
        a = mul(a, a);
        e >>= 1;
    }
    return r;
}
std::uint64_t inv(std::uint64_t a) { return power(a, P - 2); }

bool from_rational(const mpq_class& q, std::uint64_t* out) {
    std::uint64_t n = mpz_fdiv_ui(q.get_num_mpz_t(), P);
    std::uint64_t d = mpz_fdiv_ui(q.get_den_mpz_t(), P);
    if (d == 0) return false;
    *out = mul(n, inv(d));
    return true;
}

using UPoly = std::vector<std::uint64_t>;

void trim(UPoly& u) {
    while (!u.empty() && u.back() == 0) u.pop_back();
}

// Degree of the monic gcd, -1 when both are zero.
int gcd_degree(UPoly a, UPoly b) {
    trim(a);
    trim(b);
    while (!b.empty()) {
        // a mod b
        std::uint64_t ib = inv(b.back());
        while (a.size() >= b.size()) {
            std::uint64_t f = mul(a.back(), ib);
            std::size_t shift = a.size() - b.size();
            for (std::size_t i = 0; i < b.size(); ++i) a[i + shift] = sub(a[i + shift], mul(f, b[i]));
            a.pop_back();
            trim(a);
        }
        std::swap(a, b);
    }
    return static_cast<int>(a.size()) - 1;
}

std::uint64_t next_random() {
    thread_local std::uint64_t state = 0x243f6a8885a308d3ull;
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return (z ^ (z >> 31)) % P;
}

// Image of p as a univariate polynomial in x after evaluating the other symbols.
bool image(const Poly& p, SymbolId x, const std::vector<std::pair<SymbolId, std::uint64_t>>& vals, UPoly* out) {
    out->assign(p.degree_in(x) + 1, 0);
    for (const auto& t : p.terms()) {
        std::uint64_t c;
        if (!from_rational(t.c, &c)) return false;
        std::uint32_t e = 0;
        for (const auto& f : t.m.factors()) {
            if (f.sym == x) {
                e = f.exp;
                continue;
            }
            auto it = std::lower_bound(vals.begin(), vals.end(), f.sym,
                                       [](const auto& kv, SymbolId s) { return kv.first < s; });
            c = mul(c, power(it->second, f.exp));
        }
        (*out)[e] = add((*out)[e], c);
    }
    return true;
}

} // namespace modp

// Upper bound on deg_x gcd(a, b) from a modular image; -1 when no usable image was found.
int gcd_degree_bound(const Poly& a, const Poly& b, SymbolId x, const std::vector<SymbolId>& syms) {
    for (int attempt = 0; attempt < 4; ++attempt) {
        std::vector<std::pair<SymbolId, std::uint64_t>> vals;
        for (SymbolId s : syms)
            if (s != x) vals.emplace_back(s, modp::next_random());
        modp::UPoly ia, ib;
        if (!modp::image(a, x, vals, &ia) || !modp::image(b, x, vals, &ib)) continue;
        // Leading coefficients must survive for the bound to hold.
        if (ia.back() == 0 || ib.back() == 0) continue;
        return modp::gcd_degree(ia, ib);
    }
    return -1;
}

// Heuristic gcd over the integers: evaluate the first symbol at a large
// integer, recurse, rebuild by xi-adic expansion and confirm by division.
mpz_class max_norm(const Poly& p) {
    mpz_class m = 0;
    for (const auto& t : p.terms()) {
        mpz_class v = abs(t.c.get_num());
        if (v > m) m = v;
    }
    return m;
}

mpz_class integer_content(const Poly& p) {
    mpz_class g = 0;
    for (const auto& t : p.terms()) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), t.c.get_num_mpz_t());
    return g;
}

Poly evaluate_at_integer(const Poly& p, SymbolId x, const mpz_class& xi) {
    std::vector<Term> out;
    out.reserve(p.size());
    for (const auto& t : p.terms()) {
        std::uint32_t e = t.m.degree_in(x);
        mpz_class pw;
        mpz_pow_ui(pw.get_mpz_t(), xi.get_mpz_t(), e);
        out.push_back({e ? t.m.without(x) : t.m, t.c * mpq_class(pw)});
    }
    return Poly::from_terms(std::move(out));
}

Poly interpolate(Poly h, SymbolId x, const mpz_class& xi) {
    std::vector<Term> out;
    mpz_class half = xi / 2;
    for (std::uint32_t i = 0; !h.is_zero(); ++i) {
        std::vector<Term> g;
        for (const auto& t : h.terms()) {
            mpz_class c = t.c.get_num();
            mpz_class r;
            mpz_fdiv_r(r.get_mpz_t(), c.get_mpz_t(), xi.get_mpz_t());
            if (r > half) r -= xi;
            if (r != 0) g.push_back({t.m, mpq_class(r)});
        }
        Poly gp = Poly::from_terms(g);
        for (const auto& t : gp.terms()) out.push_back({t.m * Monomial(x, i), t.c});
        h = (h - gp) * mpq_class(mpz_class(1), xi);
        if (i > 4096) break;
    }
    return Poly::from_terms(std::move(out));
}

Poly primitive_integer(const Poly& p) {
    if (p.is_zero()) return p;
    mpz_class c = integer_content(p);
    mpq_class s(mpz_class(1), c);
    if (p.leading_coeff() < 0) s = -s;
    return p * s;
}

std::optional<Poly> heuristic_gcd(const Poly& f0, const Poly& g0, int depth) {
    if (f0.is_zero() || g0.is_zero()) return std::nullopt;
    mpz_class cf = integer_content(f0), cg = integer_content(g0), c;
    mpz_gcd(c.get_mpz_t(), cf.get_mpz_t(), cg.get_mpz_t());
    Poly f = f0 * mpq_class(mpz_class(1), cf), g = g0 * mpq_class(mpz_class(1), cg);
    auto sf = f.symbols(), sg = g.symbols();
    std::vector<SymbolId> syms;
    std::set_union(sf.begin(), sf.end(), sg.begin(), sg.end(), std::back_inserter(syms));
    if (syms.empty()) return Poly(mpq_class(c));
    if (depth > 32) return std::nullopt;
    SymbolId x = syms[0];
    mpz_class nf = max_norm(f), ng = max_norm(g);
    mpz_class B = 2 * (nf < ng ? nf : ng) + 29;
    mpz_class sq = sqrt(B);
    mpz_class xi = B < 99 * sq ? B : mpz_class(99 * sq);
    mpz_class lf = abs(f.coefficients_in(x).back().leading_coeff().get_num());
    mpz_class lg = abs(g.coefficients_in(x).back().leading_coeff().get_num());
    mpz_class alt = 2 * std::min(mpz_class(nf / lf), mpz_class(ng / lg)) + 2;
    if (alt > xi) xi = alt;
    for (int attempt = 0; attempt < 6; ++attempt) {
        Poly ff = evaluate_at_integer(f, x, xi), gg = evaluate_at_integer(g, x, xi);
        if (!ff.is_zero() && !gg.is_zero()) {
            auto h = heuristic_gcd(ff, gg, depth + 1);
            if (!h) return std::nullopt;
            Poly cand = primitive_integer(interpolate(*h, x, xi));
            Poly q;
            if (!cand.is_zero() && try_divide(f, cand, &q) && try_divide(g, cand, &q))
                return cand * mpq_class(c);
            Poly cff;
            if (try_divide(ff, *h, &cff)) {
                Poly cr = primitive_integer(interpolate(cff, x, xi));
                Poly hh;
                if (!cr.is_zero() && try_divide(f, cr, &hh) && try_divide(g, hh, &q))
                    return primitive_integer(hh) * mpq_class(c);
            }
            Poly cfg;
            if (try_divide(gg, *h, &cfg)) {
                Poly cr = primitive_integer(interpolate(cfg, x, xi));
                Poly hh;
                if (!cr.is_zero() && try_divide(g, cr, &hh) && try_divide(f, hh, &q))
                    return primitive_integer(hh) * mpq_class(c);
            }
        }
        mpz_class r = sqrt(mpz_class(sqrt(xi)));
        xi = 73794 * xi * r / 27011;
    }
    return std::nullopt;
}

Poly gcd_core(const Poly& a, const Poly& b) {
    if (a.is_constant() || b.is_constant()) return Poly(1);
    if (a == b) return a.monic();
    auto sa = a.symbols(), sb = b.symbols();
    for (SymbolId y : sa)
        if (!std::binary_search(sb.begin(), sb.end(), y)) return gcd(content_in(a, y), b);
    for (SymbolId y : sb)
        if (!std::binary_search(sa.begin(), sa.end(), y)) return gcd(a, content_in(b, y));
    // A variable absent from the gcd reduces the problem to contents in it.
    bool all_zero = true;
    std::optional<SymbolId> absent;
    for (SymbolId x : sa) {
        int d = gcd_degree_bound(a, b, x, sa);
        if (d != 0) {
            all_zero = false;
        } else if (!absent) {
            absent = x;
        }
    }
    if (all_zero) return Poly(1);
    if (absent) return gcd(content_in(a, *absent), content_in(b, *absent));
    {
        Poly ia = a.integer_primitive(), ib = b.integer_primitive();
        if (auto h = heuristic_gcd(ia, ib, 0)) return h->monic();
    }
    // Cheap divisibility shortcuts.
    Poly q;
    if (b.size() <= a.size() && try_divide(a, b, &q)) return b.monic();
    if (a.size() < b.size() && try_divide(b, a, &q)) return a.monic();

    SymbolId x = sa[0];
    std::uint32_t best = ~0u;
    for (SymbolId s : sa) {
        std::uint32_t d = std::max(a.degree_in(s), b.degree_in(s));
        if (d < best) {
            best = d;
            x = s;
        }
    }
    Poly ca = content_in(a, x), cb = content_in(b, x);
    Poly c = gcd(ca, cb);
    Poly pa = ca.is_constant() ? a : divide_exact(a, ca);
    Poly pb = cb.is_constant() ? b : divide_exact(b, cb);
    return (c * prs_gcd(pa, pb, x)).monic();
}

} // namespace

Poly gcd(const Poly& a, const Poly& b) {
    if (a.is_zero()) return b.monic();
    if (b.is_zero()) return a.monic();
    if (a.is_constant() || b.is_constant()) return Poly(1);
    Monomial ma = a.monomial_content(), mb = b.monomial_content();
    Monomial mg = Monomial::gcd(ma, mb);
    Poly a1 = ma.is_one() ? a : divide_exact(a, Poly::from_terms({{ma, mpq_class(1)}}));
    Poly b1 = mb.is_one() ? b : divide_exact(b, Poly::from_terms({{mb, mpq_class(1)}}));
    Poly g = gcd_core(a1, b1);
    return g.mul_term(mg, 1).monic();
}

} // namespace tfl::sym
