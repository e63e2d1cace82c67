#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "tfl/sym/expr.hpp"
#include "tfl/sym/varspace.hpp"

namespace tfl::ext {

using sym::Expr;
using sym::VariableSpace;

// Components along the coordinate fields of a VariableSpace.
class VectorField {
public:
    VectorField() = default;
    explicit VectorField(const VariableSpace& vs);
    VectorField(const VariableSpace& vs, std::vector<Expr> components);
    static VectorField coordinate(const VariableSpace& vs, std::size_t i);

    const VariableSpace& space() const { return vs_; }
    std::size_t size() const { return c_.size(); }
    const Expr& operator[](std::size_t i) const { return c_[i]; }
    Expr& operator[](std::size_t i) { return c_[i]; }
    const std::vector<Expr>& components() const { return c_; }

    VectorField operator+(const VectorField& o) const;
    VectorField operator-(const VectorField& o) const;
    VectorField operator*(const Expr& s) const;
    bool is_zero() const;
    bool operator==(const VectorField& o) const { return c_ == o.c_; }

private:
    VariableSpace vs_;
    std::vector<Expr> c_;
};

using Index = std::vector<std::uint16_t>;

// Sparse k-form: strictly increasing index tuples mapped to nonzero coefficients.
class KForm {
public:
    KForm() = default;
    KForm(const VariableSpace& vs, unsigned degree) : vs_(vs), degree_(degree) {}
    static KForm function(const VariableSpace& vs, const Expr& f);
    static KForm one_form(const VariableSpace& vs, const std::vector<Expr>& coeffs);
    static KForm differential(const VariableSpace& vs, std::size_t i);  // dv_i

    const VariableSpace& space() const { return vs_; }
    unsigned degree() const { return degree_; }
    const std::map<Index, Expr>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    Expr coefficient(const Index& idx) const;
    // Adds c to the coefficient of an increasing tuple.
    void add(const Index& idx, const Expr& c);
    // Adds c * dv_{i1}∧...∧dv_{ik} for an arbitrary tuple (sorted with sign, dropped when repeated).
    void add_unsorted(Index idx, const Expr& c);

    // Dense coefficients of a one-form.
    std::vector<Expr> as_row() const;
    Expr as_function() const;

    KForm operator+(const KForm& o) const;
    KForm operator-(const KForm& o) const;
    KForm operator*(const Expr& s) const;
    bool operator==(const KForm& o) const { return degree_ == o.degree_ && terms_ == o.terms_; }

private:
    VariableSpace vs_;
    unsigned degree_ = 0;
    std::map<Index, Expr> terms_;
};

KForm wedge(const KForm& a, const KForm& b);
KForm exterior_derivative(const KForm& a);
KForm contract(const VectorField& X, const KForm& a);
KForm lie_derivative(const VectorField& X, const KForm& a);
Expr lie_derivative(const VectorField& X, const Expr& h);
VectorField lie_bracket(const VectorField& X, const VectorField& Y);

// d of a function as a dense row.
std::vector<Expr> gradient(const VariableSpace& vs, const Expr& h);
// β(X, Y) for a 2-form β.
Expr evaluate2(const KForm& beta, const std::vector<Expr>& X, const std::vector<Expr>& Y);

} // namespace tfl::ext
