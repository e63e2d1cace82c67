#include "tfl/ext/ideal.hpp"

#include <algorithm>
#include <random>

#include "tfl/error.hpp"
#include "tfl/num/dense.hpp"

namespace tfl::ext {

const char* to_string(Provenance p) {
    switch (p) {
        case Provenance::System: return "system";
        case Provenance::Derived: return "derived-from";
        case Provenance::Closure: return "closure-of";
        case Provenance::Sum: return "sum";
        case Provenance::Explicit: return "explicit";
    }
    return "?";
}

const char* to_string(Membership m) {
    switch (m) {
        case Membership::Member: return "Member";
        case Membership::NonMember: return "NonMember";
        case Membership::Inconclusive: return "Inconclusive";
    }
    return "?";
}

namespace {

struct Basis {
    Matrix rows;
    std::vector<std::size_t> pivots;
};

void eliminate_with(Row& target, const Row& pivot_row, std::size_t col) {
    if (target[col].is_zero()) return;
    Expr f = target[col];
    for (std::size_t j = 0; j < target.size(); ++j)
        if (!pivot_row[j].is_zero()) target[j] -= f * pivot_row[j];
}

void normalize(Row& r, std::size_t col) {
    Expr inv = Expr(1) / r[col];
    if (inv == Expr(1)) return;
    for (auto& e : r) e *= inv;
}

bool combinations_next(std::vector<std::size_t>& idx, std::size_t n) {
    std::size_t k = idx.size();
    for (std::size_t i = k; i-- > 0;) {
        if (idx[i] < n - k + i) {
            ++idx[i];
            for (std::size_t j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
            return true;
        }
    }
    return false;
}

// Basis of the span of `input` that is regular at p0 with unit pivots.
Basis local_basis(const Matrix& input, const sym::Point& p0) {
    Matrix work;
    for (const auto& r : input)
        if (!row_is_zero(r)) work.push_back(primitive_row(r));
    if (work.empty()) return {};
    const std::size_t cols = work[0].size();
    Basis done;
    auto is_pivot = [&](std::size_t c) {
        return std::find(done.pivots.begin(), done.pivots.end(), c) != done.pivots.end();
    };
    for (int round = 0; round < 64; ++round) {
        bool progress = true;
        while (progress) {
            progress = false;
            for (std::size_t c = 0; c < cols && !progress; ++c) {
                if (is_pivot(c)) continue;
                for (std::size_t i = 0; i < work.size(); ++i) {
                    if (work[i][c].is_zero() || !is_unit_at(work[i][c], p0)) continue;
                    Row pr = std::move(work[i]);
                    work.erase(work.begin() + static_cast<std::ptrdiff_t>(i));
                    normalize(pr, c);
                    for (auto& r : done.rows) eliminate_with(r, pr, c);
                    for (auto& r : work) eliminate_with(r, pr, c);
                    done.rows.push_back(std::move(pr));
                    done.pivots.push_back(c);
                    progress = true;
                    break;
                }
            }
        }
        std::erase_if(work, [](const Row& r) { return row_is_zero(r); });
        if (work.empty()) break;
        // Remaining rows vanish at p0. Removing common factors may expose a unit.
        for (auto& r : work) r = primitive_row(r);
        bool unit = false;
        for (const auto& r : work)
            for (std::size_t c = 0; c < cols; ++c)
                if (!is_pivot(c) && !r[c].is_zero() && is_unit_at(r[c], p0)) unit = true;
        if (unit) continue;
        // Search pivot sets for a reduced form that is regular at p0.
        Echelon gen = rref(work);
        std::erase_if(gen.rows, [](const Row& r) { return row_is_zero(r); });
        std::size_t k = gen.pivots.size();
        std::vector<std::size_t> cand;
        for (std::size_t c = 0; c < cols; ++c) {
            if (is_pivot(c)) continue;
            bool any = false;
            for (const auto& r : gen.rows) any = any || !r[c].is_zero();
            if (any) cand.push_back(c);
        }
        std::optional<Echelon> found;
        if (k > 0 && cand.size() >= k) {
            std::vector<std::size_t> idx(k);
            for (std::size_t i = 0; i < k; ++i) idx[i] = i;
            int tries = 0;
            do {
                std::vector<std::size_t> q;
                for (std::size_t i : idx) q.push_back(cand[i]);
                auto e = rref_with_pivots(gen.rows, q);
                if (e && std::all_of(e->rows.begin(), e->rows.end(),
                                     [&](const Row& r) { return row_regular_at(r, p0); })) {
                    found = std::move(e);
                    break;
                }
            } while (++tries < 512 && combinations_next(idx, cand.size()));
        }
        if (!found)
            throw RegularityViolation("generators have no basis that is regular and independent at p0");
        for (std::size_t j = 0; j < found->rows.size(); ++j) {
            for (auto& r : done.rows) eliminate_with(r, found->rows[j], found->pivots[j]);
            done.rows.push_back(found->rows[j]);
            done.pivots.push_back(found->pivots[j]);
        }
        work.clear();
        break;
    }
    if (!work.empty()) throw RegularityViolation("local basis construction did not converge");
    std::vector<std::size_t> order(done.rows.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return done.pivots[a] < done.pivots[b]; });
    Basis out;
    for (std::size_t i : order) {
        out.rows.push_back(primitive_row(done.rows[i], done.pivots[i]));
        out.pivots.push_back(done.pivots[i]);
    }
    return out;
}

} // namespace

PfaffianIdeal PfaffianIdeal::make(const sym::VariableSpace& vs, const Matrix& rows, const sym::Point& p0,
                                  Provenance prov, std::string note) {
    for (const auto& r : rows)
        if (r.size() != vs.dim()) throw DimensionMismatch("generator length differs from 1 + m + n");
    PfaffianIdeal I;
    I.vs_ = vs;
    I.p0_ = p0;
    I.prov_ = prov;
    I.note_ = std::move(note);
    Basis b = local_basis(rows, p0);
    I.gens_ = std::move(b.rows);
    I.pivots_ = std::move(b.pivots);
    for (std::size_t i = 0; i < I.gens_.size(); ++i) {
        Row s = I.gens_[i];
        normalize(s, I.pivots_[i]);
        if (!row_regular_at(s, p0)) throw InternalError("solved generator not regular at p0");
        I.solved_.push_back(std::move(s));
    }
    // Pointwise independence at p0.
    Eigen::MatrixXd m = pointwise_span(I, p0);
    if (static_cast<std::size_t>(m.rows()) != I.gens_.size())
        throw RegularityViolation("generators are dependent at p0");
    return I;
}

PfaffianIdeal PfaffianIdeal::zero(const sym::VariableSpace& vs, const sym::Point& p0, std::string note) {
    PfaffianIdeal I;
    I.vs_ = vs;
    I.p0_ = p0;
    I.prov_ = Provenance::Explicit;
    I.note_ = std::move(note);
    return I;
}

std::vector<KForm> PfaffianIdeal::forms() const {
    std::vector<KForm> out;
    for (const auto& r : gens_) out.push_back(KForm::one_form(vs_, r));
    return out;
}

PfaffianIdeal PfaffianIdeal::with(const Matrix& extra, Provenance prov, std::string note) const {
    Matrix rows = gens_;
    rows.insert(rows.end(), extra.begin(), extra.end());
    return make(vs_, rows, p0_, prov, std::move(note));
}

Row dt_row(const sym::VariableSpace& vs) {
    Row r(vs.dim());
    r[0] = Expr(1);
    return r;
}

namespace {

Membership combine(Membership acc, sym::ZeroTest z) {
    if (z == sym::ZeroTest::NonZero) return Membership::NonMember;
    if (z == sym::ZeroTest::Inconclusive && acc == Membership::Member) return Membership::Inconclusive;
    return acc;
}

} // namespace

Membership ideal_membership(const Row& a, const PfaffianIdeal& I) {
    Row res = a;
    for (std::size_t i = 0; i < I.size(); ++i) eliminate_with(res, I.solved()[i], I.pivots()[i]);
    Membership m = Membership::Member;
    for (const auto& e : res) {
        m = combine(m, sym::is_zero(e));
        if (m == Membership::NonMember) return m;
    }
    return m;
}

Membership ideal_membership(const KForm& a, const PfaffianIdeal& I) {
    if (a.degree() != 1) throw DimensionMismatch("ideal_membership expects a one-form");
    return ideal_membership(a.as_row(), I);
}

namespace {

// Fields X_a = ∂_a - Σ_i S_i[a] ∂_{p_i} spanning the annihilator of I.
std::vector<Row> annihilating_fields(const PfaffianIdeal& I, std::vector<std::size_t>* free_cols) {
    const std::size_t D = I.space().dim();
    std::vector<Row> X;
    for (std::size_t a = 0; a < D; ++a) {
        if (std::find(I.pivots().begin(), I.pivots().end(), a) != I.pivots().end()) continue;
        Row v(D);
        v[a] = Expr(1);
        for (std::size_t i = 0; i < I.size(); ++i) v[I.pivots()[i]] = -I.solved()[i][a];
        X.push_back(std::move(v));
        if (free_cols) free_cols->push_back(a);
    }
    return X;
}

} // namespace

Membership algebraic_membership(const KForm& beta, const PfaffianIdeal& I) {
    if (beta.degree() != 2) throw DimensionMismatch("algebraic_membership expects a 2-form");
    auto X = annihilating_fields(I, nullptr);
    Membership m = Membership::Member;
    for (std::size_t a = 0; a < X.size(); ++a)
        for (std::size_t b = a + 1; b < X.size(); ++b) {
            m = combine(m, sym::is_zero(evaluate2(beta, X[a], X[b])));
            if (m == Membership::NonMember) return m;
        }
    return m;
}

namespace {

std::vector<sym::Point> perturbed_points(const sym::Point& p0, const DerivedOptions& opt) {
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    std::vector<sym::Point> pts;
    for (unsigned k = 0; k < opt.rank_samples; ++k) {
        std::vector<double> v = p0.values();
        for (auto& x : v) x += opt.perturbation * d(rng);
        pts.push_back(p0.with_values(std::move(v)));
    }
    return pts;
}

Eigen::MatrixXd to_eigen(const std::vector<std::vector<double>>& m, std::size_t cols) {
    Eigen::MatrixXd out(m.size(), cols);
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < cols; ++j) out(i, j) = m[i][j];
    return out;
}

} // namespace

PfaffianIdeal derived_system(const PfaffianIdeal& I, const DerivedOptions& opt) {
    if (I.empty()) return I;
    const auto& vs = I.space();
    std::vector<std::size_t> free_cols;
    auto X = annihilating_fields(I, &free_cols);
    std::vector<KForm> dS;
    for (const auto& s : I.solved()) dS.push_back(exterior_derivative(KForm::one_form(vs, s)));
    Matrix C;
    for (std::size_t a = 0; a < X.size(); ++a)
        for (std::size_t b = a + 1; b < X.size(); ++b) {
            Row row(I.size());
            for (std::size_t i = 0; i < I.size(); ++i) row[i] = dS[i].is_zero() ? Expr() : evaluate2(dS[i], X[a], X[b]);
            if (!row_is_zero(row)) C.push_back(std::move(row));
        }
    std::string note = "derived system of " + std::to_string(I.size()) + "-generator ideal";
    if (C.empty()) return PfaffianIdeal::make(vs, I.generators(), I.base_point(), Provenance::Derived, note);

    bool inconclusive = false;
    Matrix lambda = nullspace(C, I.size(), &I.base_point(), &inconclusive);
    if (inconclusive) throw RegularityViolation("inconclusive zero test while ranking the derived-system coefficients");
    // Generic rank certification near p0.
    const int symbolic_rank = static_cast<int>(I.size() - lambda.size());
    for (const auto& p : perturbed_points(I.base_point(), opt)) {
        int r = num::rank(to_eigen(evaluate(C, p), I.size()));
        if (r != symbolic_rank)
            throw RegularityViolation("derived-system coefficient rank " + std::to_string(r) + " near p0 differs from generic rank " +
                                      std::to_string(symbolic_rank));
    }
    Matrix rows;
    for (const auto& l : lambda) {
        Row w(vs.dim());
        for (std::size_t i = 0; i < I.size(); ++i) {
            if (l[i].is_zero()) continue;
            for (std::size_t j = 0; j < vs.dim(); ++j)
                if (!I.solved()[i][j].is_zero()) w[j] += l[i] * I.solved()[i][j];
        }
        rows.push_back(std::move(w));
    }
    return PfaffianIdeal::make(vs, rows, I.base_point(), Provenance::Derived, note);
}

std::vector<std::size_t> Flag::counts() const {
    std::vector<std::size_t> c;
    for (const auto& I : ideals) c.push_back(I.size());
    return c;
}

Membership same_span(const PfaffianIdeal& a, const PfaffianIdeal& b) {
    if (a.size() != b.size()) return Membership::NonMember;
    Membership m = Membership::Member;
    for (const auto& r : a.generators()) {
        Membership x = ideal_membership(r, b);
        if (x == Membership::NonMember) return x;
        if (x == Membership::Inconclusive) m = x;
    }
    for (const auto& r : b.generators()) {
        Membership x = ideal_membership(r, a);
        if (x == Membership::NonMember) return x;
        if (x == Membership::Inconclusive) m = x;
    }
    return m;
}

Flag derived_flag(const PfaffianIdeal& I, std::size_t max_steps, const DerivedOptions& opt) {
    if (max_steps == 0) max_steps = I.space().dim() + 1;
    Flag flag;
    flag.ideals.push_back(I);
    for (std::size_t step = 0; step < max_steps; ++step) {
        const PfaffianIdeal& cur = flag.ideals.back();
        PfaffianIdeal next = derived_system(cur, opt);
        if (next.size() == cur.size()) {
            Eigen::MatrixXd a = pointwise_span(cur, cur.base_point());
            Eigen::MatrixXd b = pointwise_span(next, cur.base_point());
            if (num::rank(a) != num::rank(b) || same_span(cur, next) != Membership::Member)
                throw RegularityViolation("derived system has the same size but a different span");
            return flag;
        }
        flag.ideals.push_back(std::move(next));
    }
    throw NoTermination("derived flag did not stabilize within " + std::to_string(max_steps) + " steps");
}

PfaffianIdeal differential_closure(const PfaffianIdeal& I, const DerivedOptions& opt) {
    Flag f = derived_flag(I, 0, opt);
    const PfaffianIdeal& last = f.ideals.back();
    if (last.empty()) return PfaffianIdeal::zero(I.space(), I.base_point(), "closure");
    return PfaffianIdeal::make(I.space(), last.generators(), I.base_point(), Provenance::Closure,
                               "closure of " + std::to_string(I.size()) + "-generator ideal");
}

Eigen::MatrixXd pointwise_span(const PfaffianIdeal& I, const sym::Point& p) {
    const std::size_t D = I.space().dim();
    if (I.empty()) return Eigen::MatrixXd(0, D);
    return num::row_basis(to_eigen(evaluate(I.generators(), p), D));
}

} // namespace tfl::ext
