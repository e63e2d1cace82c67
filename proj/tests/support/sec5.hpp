#pragma once

#include <vector>

#include "tfl/ext/ideal.hpp"
#include "tfl/sym/parser.hpp"

namespace tfl::test {

// The seven-state, two-input worked example, built directly on the lifted space.
struct Sec5 {
    sym::VariableSpace vs = sym::VariableSpace::standard(2, 7);
    std::vector<const char*> f = {"-x2", "x1", "x3*x4", "0", "x6", "x7+x6-x3*x5", "x5"};
    std::vector<const char*> g1 = {"0", "0", "x3", "1", "0", "0", "0"};
    std::vector<const char*> g2 = {"-x2", "0", "0", "0", "-x1", "x1", "x1"};
    sym::Point p0{vs, std::vector<mpq_class>{0, 0, 0, 2, 0, 4, 0, 0, 0, 0}};

    sym::Expr P(const char* s) const { return sym::parse_expr(s, vs); }

    ext::VectorField state_field(const std::vector<const char*>& c) const {
        ext::VectorField X(vs);
        for (std::size_t i = 0; i < c.size(); ++i) X[vs.x_index(i)] = P(c[i]);
        return X;
    }
    ext::VectorField drift() const { return state_field(f); }
    ext::VectorField input(int j) const { return state_field(j == 0 ? g1 : g2); }
    ext::VectorField trajectory() const {
        ext::VectorField Y = drift() + input(0) * P("u1") + input(1) * P("u2");
        Y[0] = sym::Expr(1);
        return Y;
    }

    ext::Row omega(std::size_t i) const {
        ext::Row r(vs.dim());
        r[vs.x_index(i)] = sym::Expr(1);
        r[0] = -(P(f[i]) + P(g1[i]) * P("u1") + P(g2[i]) * P("u2"));
        return r;
    }
    ext::PfaffianIdeal I0() const {
        ext::Matrix rows;
        for (std::size_t i = 0; i < 7; ++i) rows.push_back(omega(i));
        return ext::PfaffianIdeal::make(vs, rows, p0, ext::Provenance::System);
    }
    // Dense row from a one-form written as text coefficients keyed by variable name.
    ext::Row row(std::initializer_list<std::pair<const char*, const char*>> entries) const {
        ext::Row r(vs.dim());
        for (const auto& [v, c] : entries) r[*vs.index_of(*vs.lookup(v))] = P(c);
        return r;
    }
};

inline const ext::Flag& sec5_flag() {
    static const ext::Flag flag = ext::derived_flag(Sec5{}.I0());
    return flag;
}

} // namespace tfl::test
