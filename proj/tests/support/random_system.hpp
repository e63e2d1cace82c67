#pragma once

#include <random>
#include <vector>

#include "random_expr.hpp"
#include "tfl/ext/ideal.hpp"
#include "tfl/lift/system.hpp"

namespace tfl::test {

// Random control-affine polynomial system on the lifted space, with a
// random rational base point.
struct RandomSystem {
    sym::VariableSpace vs;
    std::vector<sym::Expr> f;               // n
    std::vector<std::vector<sym::Expr>> g;  // m columns of n
    sym::Point p0;

    ext::VectorField lifted(const std::vector<sym::Expr>& c) const {
        ext::VectorField X(vs);
        for (std::size_t i = 0; i < c.size(); ++i) X[vs.x_index(i)] = c[i];
        return X;
    }
    ext::VectorField trajectory() const {
        ext::VectorField Y = lifted(f);
        for (std::size_t j = 0; j < g.size(); ++j) Y = Y + lifted(g[j]) * sym::Expr::symbol(vs.u(j));
        Y[0] = sym::Expr(1);
        return Y;
    }
    ext::Matrix omega() const {
        ext::VectorField Y = trajectory();
        ext::Matrix rows;
        for (std::size_t i = 0; i < vs.n(); ++i) {
            ext::Row r(vs.dim());
            r[vs.x_index(i)] = sym::Expr(1);
            r[0] = -Y[vs.x_index(i)];
            rows.push_back(r);
        }
        return rows;
    }
    ext::PfaffianIdeal I0() const { return ext::PfaffianIdeal::make(vs, omega(), p0, ext::Provenance::System); }
};

// Coefficients are sparse polynomials in the states of degree at most 2.
inline RandomSystem random_system(std::mt19937_64& rng, std::size_t m, std::size_t n) {
    RandomSystem s;
    s.vs = sym::VariableSpace::standard(m, n);
    auto state_poly = [&](unsigned terms) {
        sym::Expr e;
        std::uniform_int_distribution<int> c(-3, 3), var(0, static_cast<int>(n) - 1), deg(0, 2);
        for (unsigned k = 0; k < terms; ++k) {
            sym::Expr t(c(rng));
            int d = deg(rng);
            for (int i = 0; i < d; ++i) t *= sym::Expr::symbol(s.vs.x(var(rng)));
            e += t;
        }
        return e;
    };
    for (std::size_t i = 0; i < n; ++i) s.f.push_back(state_poly(2));
    s.g.assign(m, {});
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t i = 0; i < n; ++i) s.g[j].push_back(state_poly(2));
    std::uniform_int_distribution<int> pv(-2, 2);
    std::vector<mpq_class> v(s.vs.dim());
    for (std::size_t i = 1; i < v.size(); ++i) v[i] = mpq_class(pv(rng), 2);
    s.p0 = sym::Point(s.vs, v);
    return s;
}

// Random polynomial system with N = {x_{n*+1} = … = x_n = 0} invariant under
// u* = 0: the transverse drift components vanish on N.
inline lift::ControlSystem random_target_system(std::mt19937_64& rng, std::size_t m, std::size_t n, std::size_t n_star) {
    auto base = random_system(rng, m, n);
    lift::ControlSystem s;
    s.vars = base.vs;
    std::uniform_int_distribution<int> c(-2, 2), tv(static_cast<int>(n_star), static_cast<int>(n) - 1);
    for (std::size_t i = 0; i < n; ++i) {
        if (i < n_star) {
            s.f.push_back(base.f[i]);
        } else {
            sym::Expr e;
            for (int k = 0; k < 2; ++k) e += base.f[(i + static_cast<std::size_t>(k)) % n] * sym::Expr::symbol(s.vars.x(static_cast<std::size_t>(tv(rng))));
            e += sym::Expr(c(rng)) * sym::Expr::symbol(s.vars.x(static_cast<std::size_t>(tv(rng))));
            s.f.push_back(e);
        }
    }
    s.g = base.g;
    for (std::size_t i = n_star; i < n; ++i) s.N_defs.push_back(sym::Expr::symbol(s.vars.x(i)));
    s.x0.assign(n, 0);
    for (std::size_t i = 0; i < n_star; ++i) s.x0[i] = mpq_class(c(rng), 2);
    s.u_star.assign(m, sym::Expr(0));
    return s;
}

} // namespace tfl::test
