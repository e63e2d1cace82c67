#include "tfl/ext/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "tfl/error.hpp"

namespace tfl::ext {

namespace {

sym::Bindings exact_bindings(const Point& p, const sym::Expr& e) {
    sym::Bindings b;
    for (sym::SymbolId v : e.variables())
        if (p.binds(v)) b.emplace_back(v, Expr(p.exact(v)));
    return b;
}

// Value of a polynomial-with-kernels at an exact point, folded symbolically.
AtPoint classify_poly_exact(const sym::Poly& poly, const Point& p) {
    Expr e = Expr::polynomial(poly);
    Expr c = sym::substitute(e, exact_bindings(p, e));
    if (c.is_zero()) return AtPoint::Vanishes;
    if (c.is_constant()) return AtPoint::Unit;
    // Kernel constants such as exp(2) remain; decide numerically.
    double v = sym::eval_at(c, p);
    return std::abs(v) > 1e-12 ? AtPoint::Unit : AtPoint::Vanishes;
}

} // namespace

AtPoint classify_at(const Expr& e, const Point& p) {
    if (e.is_zero()) return AtPoint::Vanishes;
    if (e.is_constant()) return AtPoint::Unit;
    if (p.is_exact()) {
        if (!e.is_polynomial() && classify_poly_exact(e.den(), p) == AtPoint::Vanishes) return AtPoint::Pole;
        return classify_poly_exact(e.num(), p);
    }
    auto eval_poly = [&](const sym::Poly& q) { return sym::eval_at(Expr::polynomial(q), p); };
    if (!e.is_polynomial()) {
        double d = eval_poly(e.den());
        if (std::abs(d) <= 1e-12) return AtPoint::Pole;
    }
    return std::abs(eval_poly(e.num())) > 1e-12 ? AtPoint::Unit : AtPoint::Vanishes;
}

bool is_unit_at(const Expr& e, const Point& p) { return classify_at(e, p) == AtPoint::Unit; }

bool is_regular_at(const Expr& e, const Point& p) {
    if (e.is_polynomial()) return true;
    return classify_at(Expr::polynomial(e.den()), p) == AtPoint::Unit;
}

bool row_regular_at(const Row& r, const Point& p) {
    return std::all_of(r.begin(), r.end(), [&](const Expr& e) { return is_regular_at(e, p); });
}

bool row_is_zero(const Row& r) {
    return std::all_of(r.begin(), r.end(), [](const Expr& e) { return e.is_zero(); });
}

namespace {

void eliminate(Matrix& m, std::size_t prow, std::size_t col) {
    Expr inv = Expr(1) / m[prow][col];
    if (inv != Expr(1))
        for (auto& e : m[prow]) e *= inv;
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (i == prow || m[i][col].is_zero()) continue;
        Expr f = m[i][col];
        for (std::size_t j = 0; j < m[i].size(); ++j)
            if (!m[prow][j].is_zero()) m[i][j] -= f * m[prow][j];
    }
}

} // namespace

Echelon rref(Matrix m, const Point* local) {
    Echelon out;
    if (m.empty()) return out;
    const std::size_t cols = m[0].size();
    std::vector<bool> used(m.size(), false);
    std::vector<std::pair<std::size_t, std::size_t>> order;  // (row, col)
    for (;;) {
        std::optional<std::pair<std::size_t, std::size_t>> pick;
        if (local) {
            for (std::size_t c = 0; c < cols && !pick; ++c)
                for (std::size_t i = 0; i < m.size(); ++i)
                    if (!used[i] && !m[i][c].is_zero() && is_unit_at(m[i][c], *local)) {
                        pick = {{i, c}};
                        break;
                    }
        }
        if (!pick) {
            for (std::size_t c = 0; c < cols && !pick; ++c)
                for (std::size_t i = 0; i < m.size(); ++i) {
                    if (used[i] || m[i][c].is_zero()) continue;
                    sym::ZeroTest z = sym::is_zero(m[i][c]);
                    if (z == sym::ZeroTest::NonZero) {
                        pick = {{i, c}};
                        break;
                    }
                    if (z == sym::ZeroTest::Inconclusive) out.inconclusive = true;
                }
        }
        if (!pick) break;
        eliminate(m, pick->first, pick->second);
        used[pick->first] = true;
        order.push_back(*pick);
    }
    std::sort(order.begin(), order.end(), [](auto a, auto b) { return a.second < b.second; });
    for (auto [r, c] : order) {
        out.rows.push_back(std::move(m[r]));
        out.pivots.push_back(c);
    }
    return out;
}

std::optional<Echelon> rref_with_pivots(Matrix m, const std::vector<std::size_t>& cols) {
    Echelon out;
    std::vector<bool> used(m.size(), false);
    std::vector<std::size_t> rows;
    for (std::size_t c : cols) {
        std::optional<std::size_t> pr;
        for (std::size_t i = 0; i < m.size(); ++i)
            if (!used[i] && !m[i][c].is_zero() && sym::is_zero(m[i][c]) == sym::ZeroTest::NonZero) {
                pr = i;
                break;
            }
        if (!pr) return std::nullopt;
        eliminate(m, *pr, c);
        used[*pr] = true;
        rows.push_back(*pr);
    }
    for (std::size_t i = 0; i < m.size(); ++i)
        if (!used[i] && !row_is_zero(m[i])) return std::nullopt;  // rank exceeds |cols|
    std::vector<std::size_t> idx(cols.size());
    for (std::size_t k = 0; k < idx.size(); ++k) idx[k] = k;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return cols[a] < cols[b]; });
    for (std::size_t k : idx) {
        out.rows.push_back(std::move(m[rows[k]]));
        out.pivots.push_back(cols[k]);
    }
    return out;
}

Matrix nullspace(const Matrix& m, std::size_t cols, const Point* local, bool* inconclusive) {
    Echelon e = rref(m, local);
    if (inconclusive) *inconclusive = e.inconclusive;
    Matrix basis;
    for (std::size_t f = 0; f < cols; ++f) {
        if (std::find(e.pivots.begin(), e.pivots.end(), f) != e.pivots.end()) continue;
        Row v(cols);
        v[f] = Expr(1);
        for (std::size_t k = 0; k < e.pivots.size(); ++k) v[e.pivots[k]] = -e.rows[k][f];
        basis.push_back(std::move(v));
    }
    return basis;
}

Row primitive_row(const Row& r, std::optional<std::size_t> sign_col) {
    // Common denominator.
    sym::Poly l(1);
    for (const auto& e : r) {
        if (e.is_zero() || e.is_polynomial()) continue;
        sym::Poly g = sym::gcd(l, e.den());
        l = l * sym::divide_exact(e.den(), g);
    }
    std::vector<sym::Poly> nums;
    nums.reserve(r.size());
    for (const auto& e : r) {
        if (e.is_zero()) {
            nums.emplace_back();
            continue;
        }
        nums.push_back(e.num() * sym::divide_exact(l, e.den()));
    }
    sym::Poly g;
    for (const auto& n : nums) {
        if (n.is_zero()) continue;
        g = g.is_zero() ? n.monic() : sym::gcd(g, n);
        if (g.is_constant()) break;
    }
    if (g.is_zero()) return r;
    Row out(r.size());
    // Scale so that the content is removed and the first nonzero entry has positive leading coefficient.
    for (std::size_t i = 0; i < nums.size(); ++i) {
        if (nums[i].is_zero()) continue;
        sym::Poly q = g.is_constant() ? nums[i] : sym::divide_exact(nums[i], g);
        nums[i] = q;
    }
    // Integer-primitive normalization across the whole row.
    mpz_class den = 1, num = 0;
    for (const auto& n : nums)
        for (const auto& t : n.terms()) {
            mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), t.c.get_den_mpz_t());
            mpz_gcd(num.get_mpz_t(), num.get_mpz_t(), t.c.get_num_mpz_t());
        }
    mpq_class scale(den, num == 0 ? mpz_class(1) : num);
    scale.canonicalize();
    if (sign_col && !nums[*sign_col].is_zero()) {
        if (nums[*sign_col].leading_coeff() < 0) scale = -scale;
    } else {
        for (const auto& n : nums)
            if (!n.is_zero()) {
                if (n.leading_coeff() < 0) scale = -scale;
                break;
            }
    }
    for (std::size_t i = 0; i < nums.size(); ++i)
        out[i] = nums[i].is_zero() ? Expr() : Expr::polynomial(nums[i] * scale);
    return out;
}

std::vector<std::vector<double>> evaluate(const Matrix& m, const Point& p) {
    std::vector<std::vector<double>> out(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) {
        out[i].resize(m[i].size());
        for (std::size_t j = 0; j < m[i].size(); ++j)
            out[i][j] = m[i][j].is_zero() ? 0.0 : sym::eval_at(m[i][j], p);
    }
    return out;
}

} // namespace tfl::ext
