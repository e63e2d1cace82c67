#include "tfl/ext/forms.hpp"

#include <algorithm>

#include "tfl/error.hpp"

namespace tfl::ext {

VectorField::VectorField(const VariableSpace& vs) : vs_(vs), c_(vs.dim()) {}

VectorField::VectorField(const VariableSpace& vs, std::vector<Expr> components)
    : vs_(vs), c_(std::move(components)) {
    if (c_.size() != vs.dim()) throw DimensionMismatch("vector field component count differs from 1 + m + n");
}

VectorField VectorField::coordinate(const VariableSpace& vs, std::size_t i) {
    VectorField v(vs);
    v.c_[i] = Expr(1);
    return v;
}

VectorField VectorField::operator+(const VectorField& o) const {
    VectorField r = *this;
    for (std::size_t i = 0; i < c_.size(); ++i) r.c_[i] += o.c_[i];
    return r;
}

VectorField VectorField::operator-(const VectorField& o) const {
    VectorField r = *this;
    for (std::size_t i = 0; i < c_.size(); ++i) r.c_[i] -= o.c_[i];
    return r;
}

VectorField VectorField::operator*(const Expr& s) const {
    VectorField r = *this;
    for (auto& c : r.c_) c *= s;
    return r;
}

bool VectorField::is_zero() const {
    return std::all_of(c_.begin(), c_.end(), [](const Expr& e) { return e.is_zero(); });
}

KForm KForm::function(const VariableSpace& vs, const Expr& f) {
    KForm k(vs, 0);
    k.add({}, f);
    return k;
}

KForm KForm::one_form(const VariableSpace& vs, const std::vector<Expr>& coeffs) {
    if (coeffs.size() != vs.dim()) throw DimensionMismatch("one-form coefficient count differs from 1 + m + n");
    KForm k(vs, 1);
    for (std::size_t i = 0; i < coeffs.size(); ++i) k.add({static_cast<std::uint16_t>(i)}, coeffs[i]);
    return k;
}

KForm KForm::differential(const VariableSpace& vs, std::size_t i) {
    KForm k(vs, 1);
    k.add({static_cast<std::uint16_t>(i)}, Expr(1));
    return k;
}

Expr KForm::coefficient(const Index& idx) const {
    auto it = terms_.find(idx);
    return it == terms_.end() ? Expr() : it->second;
}

void KForm::add(const Index& idx, const Expr& c) {
    if (c.is_zero()) return;
    auto it = terms_.find(idx);
    if (it == terms_.end()) {
        terms_.emplace(idx, c);
        return;
    }
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
}

void KForm::add_unsorted(Index idx, const Expr& c) {
    bool odd = false;
    for (std::size_t i = 1; i < idx.size(); ++i)
        for (std::size_t j = i; j > 0 && idx[j - 1] >= idx[j]; --j) {
            if (idx[j - 1] == idx[j]) return;
            std::swap(idx[j - 1], idx[j]);
            odd = !odd;
        }
    add(idx, odd ? -c : c);
}

std::vector<Expr> KForm::as_row() const {
    if (degree_ != 1) throw DimensionMismatch("as_row requires a one-form");
    std::vector<Expr> r(vs_.dim());
    for (const auto& [idx, c] : terms_) r[idx[0]] = c;
    return r;
}

Expr KForm::as_function() const {
    if (degree_ != 0) throw DimensionMismatch("as_function requires a 0-form");
    return coefficient({});
}

KForm KForm::operator+(const KForm& o) const {
    if (degree_ != o.degree_) throw DimensionMismatch("adding forms of different degree");
    KForm r = *this;
    for (const auto& [idx, c] : o.terms_) r.add(idx, c);
    return r;
}

KForm KForm::operator-(const KForm& o) const { return *this + o * Expr(-1); }

KForm KForm::operator*(const Expr& s) const {
    KForm r(vs_, degree_);
    for (const auto& [idx, c] : terms_) r.add(idx, c * s);
    return r;
}

KForm wedge(const KForm& a, const KForm& b) {
    unsigned deg = a.degree() + b.degree();
    if (deg > a.space().dim()) throw DegreeOverflow("wedge degree exceeds the manifold dimension");
    KForm r(a.space(), deg);
    for (const auto& [ia, ca] : a.terms())
        for (const auto& [ib, cb] : b.terms()) {
            Index idx = ia;
            idx.insert(idx.end(), ib.begin(), ib.end());
            r.add_unsorted(std::move(idx), ca * cb);
        }
    return r;
}

KForm exterior_derivative(const KForm& a) {
    const VariableSpace& vs = a.space();
    KForm r(vs, a.degree() + 1);
    if (a.degree() + 1 > vs.dim()) return r;
    for (const auto& [idx, c] : a.terms()) {
        for (std::size_t v = 0; v < vs.dim(); ++v) {
            if (std::find(idx.begin(), idx.end(), v) != idx.end()) continue;
            Expr dc = sym::diff(c, vs[v]);
            if (dc.is_zero()) continue;
            Index full{static_cast<std::uint16_t>(v)};
            full.insert(full.end(), idx.begin(), idx.end());
            r.add_unsorted(std::move(full), dc);
        }
    }
    return r;
}

KForm contract(const VectorField& X, const KForm& a) {
    if (a.degree() == 0) throw DimensionMismatch("contraction of a 0-form");
    KForm r(a.space(), a.degree() - 1);
    for (const auto& [idx, c] : a.terms()) {
        for (std::size_t pos = 0; pos < idx.size(); ++pos) {
            const Expr& xi = X[idx[pos]];
            if (xi.is_zero()) continue;
            Index rest;
            for (std::size_t j = 0; j < idx.size(); ++j)
                if (j != pos) rest.push_back(idx[j]);
            Expr term = xi * c;
            r.add(rest, pos % 2 ? -term : term);
        }
    }
    return r;
}

Expr lie_derivative(const VectorField& X, const Expr& h) {
    const VariableSpace& vs = X.space();
    Expr s;
    for (std::size_t i = 0; i < vs.dim(); ++i) {
        if (X[i].is_zero()) continue;
        Expr d = sym::diff(h, vs[i]);
        if (!d.is_zero()) s += X[i] * d;
    }
    return s;
}

KForm lie_derivative(const VectorField& X, const KForm& a) {
    if (a.degree() == 0) return KForm::function(a.space(), lie_derivative(X, a.as_function()));
    // Coordinate formula: (L_X a)_I = X(a_I) + sum over slots of a with dX substituted.
    const VariableSpace& vs = a.space();
    KForm r(vs, a.degree());
    for (const auto& [idx, c] : a.terms()) {
        r.add(idx, lie_derivative(X, c));
        for (std::size_t pos = 0; pos < idx.size(); ++pos) {
            const Expr& comp = X[idx[pos]];
            if (comp.is_constant()) continue;
            for (std::size_t v = 0; v < vs.dim(); ++v) {
                Expr d = sym::diff(comp, vs[v]);
                if (d.is_zero()) continue;
                Index moved = idx;
                moved[pos] = static_cast<std::uint16_t>(v);
                r.add_unsorted(std::move(moved), c * d);
            }
        }
    }
    return r;
}

VectorField lie_bracket(const VectorField& X, const VectorField& Y) {
    VectorField r(X.space());
    for (std::size_t i = 0; i < X.size(); ++i) r[i] = lie_derivative(X, Y[i]) - lie_derivative(Y, X[i]);
    return r;
}

std::vector<Expr> gradient(const VariableSpace& vs, const Expr& h) {
    std::vector<Expr> r(vs.dim());
    for (std::size_t i = 0; i < vs.dim(); ++i) r[i] = sym::diff(h, vs[i]);
    return r;
}

Expr evaluate2(const KForm& beta, const std::vector<Expr>& X, const std::vector<Expr>& Y) {
    if (beta.degree() != 2) throw DimensionMismatch("evaluate2 requires a 2-form");
    Expr s;
    for (const auto& [idx, c] : beta.terms()) {
        const Expr& xi = X[idx[0]];
        const Expr& xj = X[idx[1]];
        const Expr& yi = Y[idx[0]];
        const Expr& yj = Y[idx[1]];
        Expr m = xi * yj - xj * yi;
        if (!m.is_zero()) s += c * m;
    }
    return s;
}

} // namespace tfl::ext
