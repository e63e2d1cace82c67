#include "tfl/integ/integrator.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <sstream>

#include "tfl/cond/conditions.hpp"
#include "tfl/error.hpp"
#include "tfl/num/dense.hpp"
#include "tfl/sym/symbols.hpp"

namespace tfl::integ {

using sym::SymbolId;

const char* to_string(Source s) {
    switch (s) {
        case Source::Integrated: return "integrated";
        case Source::Hint: return "hint";
        case Source::LieDerivative: return "lie-derivative-of-output";
        case Source::Time: return "time";
        case Source::Combined: return "combined";
    }
    return "?";
}

namespace {

using QMatrix = std::vector<std::vector<mpq_class>>;

Eigen::RowVectorXd grad_at(const sym::VariableSpace& vs, const Expr& e, const sym::Point& p) {
    auto g = ext::gradient(vs, e);
    Eigen::RowVectorXd r = Eigen::RowVectorXd::Zero(static_cast<Eigen::Index>(vs.dim()));
    for (std::size_t i = 0; i < g.size(); ++i)
        if (!g[i].is_zero()) r(static_cast<Eigen::Index>(i)) = sym::eval_at(g[i], p);
    return r;
}

// Rows added only when they raise the numeric rank.
class RankTracker {
public:
    explicit RankTracker(std::size_t dim) : m_(0, static_cast<Eigen::Index>(dim)) {}
    bool try_add(const Eigen::RowVectorXd& r) {
        Eigen::MatrixXd next(m_.rows() + 1, m_.cols());
        next << m_, r;
        if (num::rank(next) <= rank_) return false;
        m_ = std::move(next);
        ++rank_;
        return true;
    }
    int rank() const { return rank_; }

private:
    Eigen::MatrixXd m_;
    int rank_ = 0;
};

sym::Bindings point_bindings(const sym::VariableSpace& vs, const sym::Point& p) {
    sym::Bindings b;
    for (std::size_t i = 0; i < vs.dim(); ++i) {
        if (p.is_exact())
            b.emplace_back(vs[i], Expr(p.exact_values()[i]));
        else
            b.emplace_back(vs[i], Expr(mpq_class(p[i])));
    }
    return b;
}

Expr vanish_at(const Expr& e, const sym::Point& p, const sym::VariableSpace& vs) {
    Expr c = sym::substitute(e, point_bindings(vs, p));
    return c.is_zero() ? e : e - c;
}

std::string row_to_string(const sym::VariableSpace& vs, const ext::Row& r) {
    std::string out;
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (r[i].is_zero()) continue;
        if (!out.empty()) out += " + ";
        out += "(" + sym::to_string(r[i]) + ")*d" + vs.name(i);
    }
    return out.empty() ? "0" : out;
}

bool depends_on_only(const Expr& e, SymbolId v) {
    for (SymbolId s : e.variables())
        if (s != v) return false;
    return true;
}

// Candidate first integral of a solved row dz_p − Σ a_q dz_q whose
// coefficients factor as a_q = c(z_p) b_q with b_q free of z_p.
std::optional<Expr> separable_integral(const sym::VariableSpace& vs, const ext::Row& row, std::size_t p) {
    const SymbolId zp = vs[p];
    std::vector<Expr> a;
    std::vector<SymbolId> q;
    for (std::size_t j = 0; j < row.size(); ++j) {
        if (j == p || row[j].is_zero()) continue;
        a.push_back(-row[j]);
        q.push_back(vs[j]);
    }
    if (a.empty()) return std::nullopt;
    std::optional<Expr> c;
    for (long ref : {1L, 2L, 3L}) {
        Expr at = sym::substitute(a.front(), {{zp, Expr(ref)}});
        if (at.is_zero()) continue;
        c = a.front() / at;
        break;
    }
    if (!c || !depends_on_only(*c, zp)) return std::nullopt;
    std::vector<Expr> b;
    for (const auto& ai : a) {
        Expr bi = ai / *c;
        if (bi.depends_on(zp)) return std::nullopt;
        b.push_back(bi);
    }
    auto B = potential(b, q);
    if (!B) return std::nullopt;
    Expr inv = Expr(1) / *c;
    if (inv.is_polynomial()) {
        auto G = antiderivative(inv, zp);
        if (G) return *G - *B;
    }
    if (c->is_polynomial() && c->num().degree_in(zp) == 1) {
        auto coeffs = c->num().coefficients_in(zp);
        Expr lambda = Expr::polynomial(coeffs[1]);
        return *c * sym::exp(-lambda * *B);
    }
    return std::nullopt;
}

std::optional<Expr> closed_integral(const sym::VariableSpace& vs, const ext::Row& row) {
    auto theta = ext::KForm::one_form(vs, row);
    if (!ext::exterior_derivative(theta).is_zero()) return std::nullopt;
    std::vector<Expr> c;
    std::vector<SymbolId> v;
    for (std::size_t j = 0; j < row.size(); ++j)
        if (!row[j].is_zero()) {
            c.push_back(row[j]);
            v.push_back(vs[j]);
        }
    return potential(c, v);
}

mpq_class random_rational(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> num(-40, 40), den(1, 9);
    return mpq_class(num(rng), den(rng));
}

// Reduced echelon form over Q; returns pivot columns.
std::vector<std::size_t> q_rref(QMatrix& m, std::size_t cols) {
    std::vector<std::size_t> piv;
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < m.size(); ++c) {
        std::size_t p = r;
        while (p < m.size() && m[p][c] == 0) ++p;
        if (p == m.size()) continue;
        std::swap(m[p], m[r]);
        mpq_class s = m[r][c];
        for (auto& v : m[r]) v /= s;
        for (std::size_t i = 0; i < m.size(); ++i) {
            if (i == r || m[i][c] == 0) continue;
            mpq_class f = m[i][c];
            for (std::size_t j = 0; j < cols; ++j) m[i][j] -= f * m[r][j];
        }
        piv.push_back(c);
        ++r;
    }
    m.resize(r);
    return piv;
}

QMatrix q_nullspace(QMatrix m, std::size_t cols) {
    auto piv = q_rref(m, cols);
    QMatrix out;
    for (std::size_t f = 0; f < cols; ++f) {
        if (std::find(piv.begin(), piv.end(), f) != piv.end()) continue;
        std::vector<mpq_class> v(cols, 0);
        v[f] = 1;
        for (std::size_t i = 0; i < piv.size(); ++i) v[piv[i]] = -m[i][f];
        out.push_back(std::move(v));
    }
    return out;
}

mpq_class rationalize(double x) {
    // Continued fraction with bounded denominator.
    const double tol = 1e-9;
    long h0 = 0, h1 = 1, k0 = 1, k1 = 0;
    double v = x;
    for (int it = 0; it < 40; ++it) {
        double a = std::floor(v);
        long ai = static_cast<long>(a);
        long h2 = ai * h1 + h0, k2 = ai * k1 + k0;
        h0 = h1; h1 = h2; k0 = k1; k1 = k2;
        if (std::abs(x - static_cast<double>(h1) / static_cast<double>(k1)) < tol * std::max(1.0, std::abs(x)) || k1 > 100000) break;
        double frac = v - a;
        if (frac < 1e-15) break;
        v = 1.0 / frac;
    }
    return mpq_class(h1, k1);
}

using MonomialIdx = std::vector<std::size_t>;

std::vector<MonomialIdx> monomials(std::size_t n, unsigned degree) {
    std::vector<MonomialIdx> out;
    std::vector<MonomialIdx> layer{{}};
    for (unsigned d = 1; d <= degree; ++d) {
        std::vector<MonomialIdx> next;
        for (const auto& m : layer)
            for (std::size_t i = m.empty() ? 0 : m.back(); i < n; ++i) {
                auto mm = m;
                mm.push_back(i);
                next.push_back(mm);
            }
        out.insert(out.end(), next.begin(), next.end());
        layer = std::move(next);
    }
    return out;
}

// Relations Σ c_α F^α ≡ 0 on L, one row per relation, over the monomial list.
QMatrix vanishing_relations(const std::vector<Expr>& comps, const std::vector<MonomialIdx>& mons,
                            const LiftedSystem& ls, const AdaptOptions& opt) {
    const std::size_t A = mons.size();
    const std::size_t S = A + 8;
    std::mt19937_64 rng(opt.seed);
    if (ls.graph) {
        sym::Bindings b = *ls.graph;
        b.emplace_back(ls.vs.t(), Expr(0));
        std::vector<Expr> rest;
        std::vector<SymbolId> syms;
        for (const auto& c : comps) {
            rest.push_back(sym::substitute(c, b));
            for (auto s : rest.back().num().symbols()) syms.push_back(s);
            for (auto s : rest.back().den().symbols()) syms.push_back(s);
        }
        std::sort(syms.begin(), syms.end());
        syms.erase(std::unique(syms.begin(), syms.end()), syms.end());
        QMatrix M;
        for (std::size_t tries = 0; M.size() < S && tries < 4 * S; ++tries) {
            std::map<SymbolId, mpq_class> val;
            for (auto s : syms) val[s] = random_rational(rng);
            auto look = [&](SymbolId s) { return val.at(s); };
            std::vector<mpq_class> v;
            bool ok = true;
            for (const auto& r : rest) {
                mpq_class d = r.den().eval_exact(look);
                if (d == 0) { ok = false; break; }
                v.push_back(r.num().eval_exact(look) / d);
            }
            if (!ok) continue;
            std::vector<mpq_class> row;
            for (const auto& m : mons) {
                mpq_class x = 1;
                for (auto i : m) x *= v[i];
                row.push_back(x);
            }
            M.push_back(std::move(row));
        }
        if (M.size() < S) throw AdaptationFailed("could not evaluate the components on L");
        return q_nullspace(std::move(M), A);
    }
    auto pts = cond::sample_on_L(ls, S, 0.1, opt.seed);
    Eigen::MatrixXd M(static_cast<Eigen::Index>(pts.size()), static_cast<Eigen::Index>(A));
    for (std::size_t s = 0; s < pts.size(); ++s) {
        std::vector<double> v;
        for (const auto& c : comps) v.push_back(sym::eval_at(c, pts[s]));
        for (std::size_t a = 0; a < A; ++a) {
            double x = 1;
            for (auto i : mons[a]) x *= v[i];
            M(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(a)) = x;
        }
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double tol = num::kRankTol * std::max(sv.size() ? sv(0) : 0.0, 1.0);
    Eigen::Index r = 0;
    while (r < sv.size() && sv(r) > tol) ++r;
    Eigen::MatrixXd N = svd.matrixV().rightCols(static_cast<Eigen::Index>(A) - r).transpose();
    Eigen::MatrixXd E = num::row_basis(N);
    QMatrix out;
    for (Eigen::Index i = 0; i < E.rows(); ++i) {
        std::vector<mpq_class> row;
        for (Eigen::Index j = 0; j < E.cols(); ++j) row.push_back(rationalize(E(i, j)));
        out.push_back(std::move(row));
    }
    return out;
}

} // namespace

std::optional<Expr> antiderivative(const Expr& e, SymbolId var) {
    auto var_kernel = [&](SymbolId s) {
        if (!sym::is_kernel(s)) return false;
        const auto& deps = sym::symbols::kernel_info(s).depends_on;
        return std::binary_search(deps.begin(), deps.end(), var);
    };
    for (SymbolId s : e.den().symbols())
        if (s == var || var_kernel(s)) return std::nullopt;
    const Expr z = Expr::symbol(var);
    Expr out;
    for (const auto& term : e.num().terms()) {
        const std::uint32_t k = term.m.degree_in(var);
        std::vector<sym::Factor> kf;
        for (const auto& f : term.m.factors())
            if (var_kernel(f.sym)) kf.push_back(f);
        sym::Monomial rest = term.m.without(var);
        for (const auto& f : kf) rest = rest.without(f.sym);
        Expr coef = Expr::polynomial(sym::Poly::from_terms({{rest, term.c}}));
        if (kf.empty()) {
            out += coef * sym::pow(z, k + 1) / Expr(static_cast<long>(k + 1));
            continue;
        }
        if (kf.size() != 1 || kf[0].exp != 1) return std::nullopt;
        const auto& info = sym::symbols::kernel_info(kf[0].sym);
        if (info.fn != sym::KernelFn::Exp) return std::nullopt;
        auto alpha = sym::diff(*info.arg, var).rational_value();
        if (!alpha || *alpha == 0) return std::nullopt;
        // ∫ z^k e^{αz} = e^{αz} Σ_j (−1)^j k!/(k−j)! z^{k−j} / α^{j+1}
        Expr sum;
        mpq_class fall = 1, apow = *alpha;
        for (std::uint32_t j = 0; j <= k; ++j) {
            mpq_class c = fall / apow;
            if (j % 2) c = -c;
            sum += Expr(c) * sym::pow(z, k - j);
            fall *= static_cast<long>(k - j);
            apow *= *alpha;
        }
        out += coef * Expr::symbol(kf[0].sym) * sum;
    }
    return out / Expr::polynomial(e.den());
}

std::optional<Expr> potential(const std::vector<Expr>& coeffs, const std::vector<SymbolId>& vars) {
    Expr F;
    for (std::size_t i = 0; i < vars.size(); ++i) {
        Expr r = coeffs[i] - sym::diff(F, vars[i]);
        for (std::size_t j = 0; j < i; ++j)
            if (r.depends_on(vars[j])) return std::nullopt;
        auto a = antiderivative(r, vars[i]);
        if (!a) return std::nullopt;
        F += *a;
    }
    for (std::size_t i = 0; i < vars.size(); ++i)
        if (sym::diff(F, vars[i]) != coeffs[i]) return std::nullopt;
    return F;
}

SmoothMapAdapted frobenius_integrate(const PfaffianIdeal& closure, const std::vector<Expr>& hints, std::size_t k) {
    const auto& vs = closure.space();
    const auto& p0 = closure.base_point();
    SmoothMapAdapted F;
    F.k = k;
    F.target = closure;
    RankTracker rank(vs.dim());
    std::vector<std::pair<Expr, Source>> found;

    auto accept = [&](const Expr& cand, Source src) {
        if (ext::ideal_membership(ext::gradient(vs, cand), closure) != ext::Membership::Member) {
            if (src == Source::Hint)
                throw HintRejected("hint " + sym::to_string(cand) + " has a differential outside the closure");
            return false;
        }
        if (!rank.try_add(grad_at(vs, cand, p0))) {
            if (src == Source::Hint) throw HintRejected("hint " + sym::to_string(cand) + " adds no rank at p0");
            return false;
        }
        found.emplace_back(vanish_at(cand, p0, vs), src);
        return true;
    };
    for (const auto& h : hints) accept(h, Source::Hint);

    const auto& solved = closure.solved();
    const auto& gens = closure.generators();
    const auto& piv = closure.pivots();
    std::vector<std::size_t> order(piv.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return piv[a] < piv[b]; });

    std::vector<std::size_t> residual;
    for (std::size_t i : order) {
        if (rank.rank() == static_cast<int>(closure.size())) break;
        const std::size_t p = piv[i];
        bool coordinate = true;
        for (std::size_t j = 0; j < solved[i].size(); ++j)
            if (j != p && !solved[i][j].is_zero()) coordinate = false;
        bool ok = false;
        if (coordinate) {
            ok = accept(Expr::symbol(vs[p]), p == 0 ? Source::Time : Source::Integrated);
        } else {
            for (const auto* row : {&solved[i], &gens[i]}) {
                if (ok) break;
                if (auto c = closed_integral(vs, *row)) ok = accept(*c, Source::Integrated);
            }
            if (!ok)
                if (auto c = separable_integral(vs, solved[i], p)) ok = accept(*c, Source::Integrated);
        }
        if (!ok) residual.push_back(i);
    }
    if (rank.rank() != static_cast<int>(closure.size())) {
        std::ostringstream msg;
        msg << "closure " << k << ": found " << rank.rank() << " of " << closure.size()
            << " first integrals; supply hints for the residual solved rows:";
        for (std::size_t i : residual) msg << "\n  " << row_to_string(vs, solved[i]);
        throw IntegrationFailed(msg.str());
    }
    std::stable_partition(found.begin(), found.end(), [](const auto& c) { return c.second != Source::Time; });
    for (auto& [e, s] : found) {
        F.components.push_back(e);
        F.provenance.push_back(s);
    }
    return F;
}

std::size_t rank_on_L(const SmoothMapAdapted& F, const LiftedSystem& ls, const sym::Point& p) {
    const auto D = static_cast<Eigen::Index>(ls.vs.dim());
    Eigen::MatrixXd J(static_cast<Eigen::Index>(F.size()), D);
    for (std::size_t i = 0; i < F.size(); ++i) J.row(static_cast<Eigen::Index>(i)) = grad_at(ls.vs, F.components[i], p);
    Eigen::MatrixXd T = num::annihilator(lift::ann_tangent_L(ls, p), D);
    if (T.rows() == 0 || J.rows() == 0) return 0;
    return static_cast<std::size_t>(num::rank(J * T.transpose()));
}

SmoothMapAdapted adapt_to_L(const SmoothMapAdapted& F, const LiftedSystem& ls, std::size_t target_vanish,
                            const AdaptOptions& opt) {
    const std::size_t l = F.size();
    if (target_vanish > l)
        throw AdaptationFailed("target of " + std::to_string(target_vanish) + " vanishing components exceeds " + std::to_string(l));
    const std::size_t r = rank_on_L(F, ls, ls.p0);
    if (l - r != target_vanish)
        throw AdaptationFailed("F has rank " + std::to_string(r) + " on L at p0, so " + std::to_string(l - r) +
                               " components can vanish there, not " + std::to_string(target_vanish));

    SmoothMapAdapted out;
    out.k = F.k;
    out.target = F.target;
    out.warnings = F.warnings;
    auto certify = [&](const Expr& e) {
        auto z = lift::vanishes_on_L(ls, e);
        if (z == sym::ZeroTest::NonZero) return false;
        if (z == sym::ZeroTest::Inconclusive) {
            if (!ls.graph && !ls.base.N_defs.empty()) {
                out.warnings.push_back("vanishing of " + sym::to_string(e) + " on L rests on sampling");
                return true;
            }
            throw InconclusiveZeroTest("cannot decide whether " + sym::to_string(e) + " vanishes on L");
        }
        return true;
    };

    bool adapted = true;
    for (std::size_t i = 0; i < target_vanish && adapted; ++i) adapted = certify(F.components[i]);
    if (adapted) {
        SmoothMapAdapted same = F;
        same.vanish_count = target_vanish;
        same.warnings = out.warnings;
        return same;
    }

    const auto mons = monomials(l, opt.degree);
    QMatrix rel = vanishing_relations(F.components, mons, ls, opt);
    // Echelon form pivoting on the highest monomial, then simplest first.
    const std::size_t A = mons.size();
    QMatrix rev(rel.size(), std::vector<mpq_class>(A));
    for (std::size_t i = 0; i < rel.size(); ++i)
        for (std::size_t j = 0; j < A; ++j) rev[i][j] = rel[i][A - 1 - j];
    auto piv = q_rref(rev, A);
    std::vector<std::size_t> idx(piv.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return piv[a] > piv[b]; });

    RankTracker rank(ls.vs.dim());
    std::vector<std::pair<Expr, Source>> block;
    for (std::size_t ri : idx) {
        if (block.size() == target_vanish) break;
        std::vector<mpq_class> c(A);
        for (std::size_t j = 0; j < A; ++j) c[j] = rev[ri][A - 1 - j];
        std::size_t nz = 0, single = 0;
        for (std::size_t j = 0; j < A; ++j)
            if (c[j] != 0) {
                ++nz;
                single = j;
            }
        Expr phi;
        Source src = Source::Combined;
        if (nz == 1 && mons[single].size() == 1) {
            phi = F.components[mons[single][0]];
            src = F.provenance[mons[single][0]];
        } else {
            mpz_class den = 1;
            for (const auto& v : c)
                if (v != 0) den = lcm(den, mpz_class(v.get_den()));
            mpz_class g = 0;
            for (const auto& v : c)
                if (v != 0) g = gcd(g, mpz_class(v * den));
            mpq_class scale = mpq_class(den) / mpq_class(g);
            if (c[A - 1 - piv[ri]] < 0) scale = -scale;
            for (std::size_t j = 0; j < A; ++j) {
                if (c[j] == 0) continue;
                Expr m(c[j] * scale);
                for (auto i : mons[j]) m *= F.components[i];
                phi += m;
            }
        }
        if (!rank.try_add(grad_at(ls.vs, phi, ls.p0))) continue;
        if (!certify(phi)) throw AdaptationFailed("combination " + sym::to_string(phi) + " does not vanish on L");
        block.emplace_back(phi, src);
    }
    if (block.size() < target_vanish)
        throw AdaptationFailed("found " + std::to_string(block.size()) + " of " + std::to_string(target_vanish) +
                               " independent combinations of degree at most " + std::to_string(opt.degree) +
                               " vanishing on L; raise the ansatz degree or supply hints");
    auto tier = [](Source s) { return s == Source::Time ? 2 : s == Source::LieDerivative ? 1 : 0; };
    std::stable_sort(block.begin(), block.end(), [&](const auto& a, const auto& b) { return tier(a.second) < tier(b.second); });
    for (auto& [e, s] : block) {
        out.components.push_back(e);
        out.provenance.push_back(s);
    }
    out.vanish_count = block.size();
    for (std::size_t i = 0; i < l && out.components.size() < l; ++i)
        if (rank.try_add(grad_at(ls.vs, F.components[i], ls.p0))) {
            out.components.push_back(F.components[i]);
            out.provenance.push_back(F.provenance[i]);
        }
    if (out.components.size() != l) throw InternalError("adapted map lost rank");
    for (std::size_t i = 0; i < out.vanish_count; ++i)
        if (out.provenance[i] == Source::Combined &&
            ext::ideal_membership(ext::gradient(ls.vs, out.components[i]), out.target) != ext::Membership::Member)
            throw InternalError("combination left the target closure");
    return out;
}

SmoothMapAdapted subsume(const SmoothMapAdapted& lower, const SmoothMapAdapted& higher) {
    const auto& vs = lower.target.space();
    const auto& p0 = lower.target.base_point();
    SmoothMapAdapted out;
    out.k = lower.k;
    out.target = lower.target;
    out.warnings = lower.warnings;
    RankTracker rank(vs.dim());
    for (std::size_t i = 0; i < higher.size(); ++i) {
        const auto& c = higher.components[i];
        if (ext::ideal_membership(ext::gradient(vs, c), lower.target) != ext::Membership::Member)
            throw SubsumptionFailed("component " + sym::to_string(c) + " is not in the lower closure");
        if (!rank.try_add(grad_at(vs, c, p0))) throw SubsumptionFailed("higher map is not independent at p0");
        out.components.push_back(c);
        out.provenance.push_back(higher.provenance[i]);
    }
    out.vanish_count = higher.vanish_count;
    for (std::size_t i = 0; i < lower.size(); ++i)
        if (rank.try_add(grad_at(vs, lower.components[i], p0))) {
            out.components.push_back(lower.components[i]);
            out.provenance.push_back(lower.provenance[i]);
        }
    if (out.size() != lower.size()) throw SubsumptionFailed("subsumed map changed rank");
    return out;
}

Expr lie_f(const LiftedSystem& ls, const Expr& h) {
    Expr out;
    for (std::size_t i = 0; i < ls.vs.n(); ++i) {
        Expr d = sym::diff(h, ls.vs.x(i));
        if (!d.is_zero()) out += d * ls.base.f[i];
    }
    return out;
}

SmoothMapAdapted adapt_subordinate(const SmoothMapAdapted& F, const std::vector<Expr>& h,
                                   const std::vector<std::size_t>& kappa, const LiftedSystem& ls, std::size_t k) {
    if (h.size() != kappa.size()) throw DimensionMismatch("one relative degree per output component is needed");
    if (h.empty()) return F;
    SmoothMapAdapted H;
    H.k = F.k;
    H.target = F.target;
    for (std::size_t i = 0; i < h.size(); ++i) {
        if (kappa[i] <= k) throw AdaptationFailed("output component " + std::to_string(i + 1) + " has relative degree " +
                                                  std::to_string(kappa[i]) + ", not above " + std::to_string(k));
        Expr c = h[i];
        for (std::size_t j = 0; j + k + 1 <= kappa[i]; ++j) {
            if (lift::vanishes_on_L(ls, c) == sym::ZeroTest::NonZero)
                throw AdaptationFailed(sym::to_string(c) + " does not vanish on L");
            H.components.push_back(c);
            H.provenance.push_back(Source::LieDerivative);
            c = lie_f(ls, c);
        }
    }
    H.vanish_count = H.size();
    try {
        return subsume(F, H);
    } catch (const SubsumptionFailed& e) {
        throw AdaptationFailed(std::string("output tower does not fit the closure: ") + e.what());
    }
}

bool characteristic(const SmoothMapAdapted& F) {
    const auto& vs = F.target.space();
    if (F.size() != F.target.size()) return false;
    RankTracker rank(vs.dim());
    for (const auto& c : F.components) {
        if (ext::ideal_membership(ext::gradient(vs, c), F.target) != ext::Membership::Member) return false;
        if (!rank.try_add(grad_at(vs, c, F.target.base_point()))) return false;
    }
    return true;
}

} // namespace tfl::integ
