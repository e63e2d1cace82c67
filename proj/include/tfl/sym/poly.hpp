#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "tfl/sym/symbols.hpp"

namespace tfl::sym {

struct Factor {
    SymbolId sym;
    std::uint32_t exp;
    bool operator==(const Factor&) const = default;
};

// Power product with factors sorted by symbol id.
class Monomial {
public:
    Monomial() = default;
    explicit Monomial(SymbolId s, std::uint32_t e = 1);

    const std::vector<Factor>& factors() const { return f_; }
    std::uint32_t degree() const { return deg_; }
    std::uint32_t degree_in(SymbolId s) const;
    bool is_one() const { return f_.empty(); }

    Monomial operator*(const Monomial& o) const;
    bool divides(const Monomial& o) const;
    // Requires divides(o, *this).
    Monomial operator/(const Monomial& o) const;
    Monomial without(SymbolId s) const;
    static Monomial gcd(const Monomial& a, const Monomial& b);

    bool operator==(const Monomial& o) const { return deg_ == o.deg_ && f_ == o.f_; }
    std::size_t hash() const;

    // Graded lexicographic order; the smaller symbol id is the more significant.
    static int compare(const Monomial& a, const Monomial& b);

private:
    std::vector<Factor> f_;
    std::uint32_t deg_ = 0;
    friend class Poly;
};

struct Term {
    Monomial m;
    mpq_class c;
};

// Sparse multivariate polynomial with rational coefficients. Terms are kept
// strictly decreasing in graded-lex order with nonzero coefficients.
class Poly {
public:
    Poly() = default;
    Poly(const mpq_class& c);
    Poly(long c) : Poly(mpq_class(c)) {}
    static Poly symbol(SymbolId s);
    static Poly from_terms(std::vector<Term> terms);  // any order, duplicates merged

    const std::vector<Term>& terms() const { return t_; }
    bool is_zero() const { return t_.empty(); }
    bool is_constant() const { return t_.empty() || (t_.size() == 1 && t_[0].m.is_one()); }
    bool is_one() const { return t_.size() == 1 && t_[0].m.is_one() && t_[0].c == 1; }
    mpq_class constant_value() const;  // requires is_constant()
    const Term& leading() const { return t_.front(); }
    const mpq_class& leading_coeff() const { return t_.front().c; }
    std::size_t size() const { return t_.size(); }

    std::uint32_t degree_in(SymbolId s) const;
    std::uint32_t total_degree() const;
    std::vector<SymbolId> symbols() const;  // sorted
    bool contains(SymbolId s) const;

    Poly operator-() const;
    Poly& operator+=(const Poly& o);
    Poly& operator-=(const Poly& o);
    Poly& operator*=(const mpq_class& c);
    friend Poly operator+(Poly a, const Poly& b) { return a += b; }
    friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
    friend Poly operator*(const Poly& a, const Poly& b);
    friend Poly operator*(Poly a, const mpq_class& c) { return a *= c; }
    Poly mul_term(const Monomial& m, const mpq_class& c) const;
    Poly pow(unsigned e) const;

    bool operator==(const Poly& o) const;
    std::size_t hash() const;

    // Dense coefficients in s: result[d] multiplies s^d.
    std::vector<Poly> coefficients_in(SymbolId s) const;
    static Poly from_coefficients(const std::vector<Poly>& coeffs, SymbolId s);

    // Partial derivative treating every symbol as independent.
    Poly formal_diff(SymbolId s) const;

    // Divides every coefficient by the leading one.
    Poly monic() const;
    // Primitive integer-coefficient multiple with positive leading coefficient,
    // together with the rational factor q such that *this = q * result.
    Poly integer_primitive(mpq_class* factor = nullptr) const;
    Monomial monomial_content() const;

    double eval(const std::function<double(SymbolId)>& value) const;
    mpq_class eval_exact(const std::function<mpq_class(SymbolId)>& value) const;

private:
    std::vector<Term> t_;
    void normalize_sorted();
    static Poly merge(const Poly& a, const Poly& b, bool subtract);
};

// Exact quotient; throws InternalError when b does not divide a.
Poly divide_exact(const Poly& a, const Poly& b);
// Quotient if b divides a.
bool try_divide(const Poly& a, const Poly& b, Poly* q);
// Monic greatest common divisor (zero only when both inputs are zero).
Poly gcd(const Poly& a, const Poly& b);

} // namespace tfl::sym
