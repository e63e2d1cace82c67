#pragma once

#include <Eigen/Dense>
#include <gmpxx.h>

#include <random>
#include <vector>

#include "tfl/lift/system.hpp"
#include "tfl/num/dense.hpp"

namespace tfl::test {

using QMatrix = std::vector<std::vector<mpq_class>>;

inline QMatrix q_zero(std::size_t r, std::size_t c) { return QMatrix(r, std::vector<mpq_class>(c, 0)); }

inline QMatrix q_mul(const QMatrix& a, const QMatrix& b) {
    QMatrix out = q_zero(a.size(), b.front().size());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t k = 0; k < b.size(); ++k)
            if (a[i][k] != 0)
                for (std::size_t j = 0; j < b[k].size(); ++j) out[i][j] += a[i][k] * b[k][j];
    return out;
}

// Inverse by Gauss-Jordan; empty when singular.
inline QMatrix q_inverse(QMatrix a) {
    const std::size_t n = a.size();
    QMatrix inv = q_zero(n, n);
    for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        while (p < n && a[p][c] == 0) ++p;
        if (p == n) return {};
        std::swap(a[p], a[c]);
        std::swap(inv[p], inv[c]);
        mpq_class s = a[c][c];
        for (std::size_t j = 0; j < n; ++j) {
            a[c][j] /= s;
            inv[c][j] /= s;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == c || a[r][c] == 0) continue;
            mpq_class f = a[r][c];
            for (std::size_t j = 0; j < n; ++j) {
                a[r][j] -= f * a[c][j];
                inv[r][j] -= f * inv[c][j];
            }
        }
    }
    return inv;
}

inline Eigen::MatrixXd q_to_eigen(const QMatrix& a) {
    Eigen::MatrixXd m(a.size(), a.empty() ? 0 : a.front().size());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a[i].size(); ++j) m(i, j) = a[i][j].get_d();
    return m;
}

// ẋ = A x + B u with N = {C x = 0} invariant under u* = K x.
struct LtiInstance {
    lift::ControlSystem sys;
    QMatrix A, B, V;  // V: basis of N as columns
    std::size_t n = 0, m = 0, n_star = 0;

    // rank [V | B | AB | … | A^{n−n*−1} B] = n.
    bool oracle() const {
        Eigen::MatrixXd a = q_to_eigen(A), b = q_to_eigen(B);
        Eigen::MatrixXd M(n, n_star + m * (n - n_star));
        if (n_star > 0) M.leftCols(n_star) = q_to_eigen(V);
        Eigen::MatrixXd P = b;
        for (std::size_t k = 0; k < n - n_star; ++k) {
            M.block(0, n_star + k * m, n, m) = P;
            P = a * P;
        }
        return num::rank(M) == static_cast<int>(n);
    }
    bool controllable() const {
        Eigen::MatrixXd a = q_to_eigen(A), b = q_to_eigen(B);
        Eigen::MatrixXd M(n, n * m);
        Eigen::MatrixXd P = b;
        for (std::size_t k = 0; k < n; ++k) {
            M.block(0, k * m, n, m) = P;
            P = a * P;
        }
        return num::rank(M) == static_cast<int>(n);
    }
};

// Random instance built in coordinates z = T^{-1} x where N = {z_{n*+1..n} = 0}.
// With `transverse_uncontrollable` the last transverse coordinate is decoupled
// from the inputs, so the oracle is false.
inline LtiInstance random_lti(std::mt19937_64& rng, bool transverse_uncontrollable = false) {
    std::uniform_int_distribution<int> dn(2, 4), dm(1, 2), small(-2, 2), unit(-1, 1);
    LtiInstance L;
    L.n = static_cast<std::size_t>(dn(rng));
    L.m = static_cast<std::size_t>(dm(rng));
    L.n_star = std::uniform_int_distribution<std::size_t>(0, L.n - 1)(rng);
    const std::size_t n = L.n, m = L.m, ns = L.n_star;
    QMatrix T, Ti;
    do {
        T = q_zero(n, n);
        for (auto& r : T)
            for (auto& v : r) v = unit(rng);
        Ti = q_inverse(T);
    } while (Ti.empty());
    QMatrix Az = q_zero(n, n), Bz = q_zero(n, m), K = q_zero(m, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (!(i >= ns && j < ns)) Az[i][j] = small(rng);
    for (auto& r : Bz)
        for (auto& v : r) v = small(rng);
    for (auto& r : K)
        for (auto& v : r) v = unit(rng);
    if (transverse_uncontrollable) {
        for (std::size_t j = 0; j < m; ++j) Bz[n - 1][j] = 0;
        for (std::size_t j = 0; j + 1 < n; ++j) Az[n - 1][j] = 0;
    }
    L.B = q_mul(T, Bz);
    QMatrix Acl = q_mul(q_mul(T, Az), Ti), BK = q_mul(L.B, K);
    L.A = q_zero(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) L.A[i][j] = Acl[i][j] - BK[i][j];
    L.V = q_zero(n, ns);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < ns; ++j) L.V[i][j] = T[i][j];

    auto& s = L.sys;
    s.vars = sym::VariableSpace::standard(m, n);
    auto linear = [&](const std::vector<mpq_class>& row) {
        sym::Expr e;
        for (std::size_t j = 0; j < n; ++j)
            if (row[j] != 0) e += sym::Expr(row[j]) * sym::Expr::symbol(s.vars.x(j));
        return e;
    };
    for (std::size_t i = 0; i < n; ++i) s.f.push_back(linear(L.A[i]));
    for (std::size_t j = 0; j < m; ++j) {
        std::vector<sym::Expr> col;
        for (std::size_t i = 0; i < n; ++i) col.emplace_back(L.B[i][j]);
        s.g.push_back(std::move(col));
    }
    for (std::size_t i = ns; i < n; ++i) s.N_defs.push_back(linear(Ti[i]));
    s.x0.assign(n, 0);
    for (std::size_t j = 0; j < m; ++j) s.u_star.push_back(linear(K[j]));
    return L;
}

inline LtiInstance random_controllable_lti(std::mt19937_64& rng) {
    for (;;) {
        auto L = random_lti(rng);
        if (L.controllable()) return L;
    }
}

} // namespace tfl::test
