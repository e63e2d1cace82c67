#include "tfl/lift/system.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "tfl/error.hpp"
#include "tfl/num/dense.hpp"

namespace tfl::lift {

using ext::VectorField;
using sym::ZeroTest;

sym::Point ControlSystem::point(const std::vector<double>& x, const std::vector<double>& u) const {
    std::vector<double> v(vars.dim(), 0.0);
    for (std::size_t j = 0; j < u.size(); ++j) v[vars.u_index(j)] = u[j];
    for (std::size_t i = 0; i < x.size(); ++i) v[vars.x_index(i)] = x[i];
    return sym::Point(vars, std::move(v));
}

namespace {

bool states_only(const ControlSystem& sys, const Expr& e) {
    for (auto s : e.variables()) {
        auto idx = sys.vars.index_of(s);
        if (!idx || *idx < sys.vars.x_index(0)) return false;
    }
    return true;
}

sym::Point exact_state_point(const ControlSystem& sys, const std::vector<mpq_class>& u) {
    std::vector<mpq_class> v(sys.vars.dim());
    for (std::size_t j = 0; j < u.size(); ++j) v[sys.vars.u_index(j)] = u[j];
    for (std::size_t i = 0; i < sys.n(); ++i) v[sys.vars.x_index(i)] = sys.x0[i];
    return sym::Point(sys.vars, std::move(v));
}

mpq_class value_at(const Expr& e, const sym::Point& p) {
    if (auto q = sym::eval_exact(e, p)) return *q;
    return mpq_class(sym::eval_at(e, p));
}

// Defining functions with their gradients in the states, for Newton steps.
struct NEval {
    const ControlSystem& sys;
    std::vector<std::vector<Expr>> grad;

    explicit NEval(const ControlSystem& s) : sys(s) {
        for (const auto& phi : s.N_defs) {
            std::vector<Expr> row;
            for (std::size_t i = 0; i < s.n(); ++i) row.push_back(sym::diff(phi, s.vars.x(i)));
            grad.push_back(std::move(row));
        }
    }
    Eigen::VectorXd values(const sym::Point& p) const {
        Eigen::VectorXd r(sys.N_defs.size());
        for (std::size_t k = 0; k < sys.N_defs.size(); ++k) r(k) = sym::eval_at(sys.N_defs[k], p);
        return r;
    }
    Eigen::MatrixXd jacobian(const sym::Point& p) const {
        Eigen::MatrixXd J(grad.size(), sys.n());
        for (std::size_t k = 0; k < grad.size(); ++k)
            for (std::size_t i = 0; i < sys.n(); ++i) J(k, i) = grad[k][i].is_zero() ? 0.0 : sym::eval_at(grad[k][i], p);
        return J;
    }
};

std::optional<std::vector<double>> newton(const NEval& ev, std::vector<double> x, double tol, int max_iter) {
    for (int it = 0; it <= max_iter; ++it) {
        sym::Point p = ev.sys.point(x);
        Eigen::VectorXd r;
        try {
            r = ev.values(p);
        } catch (const DomainError&) {
            return std::nullopt;
        }
        double res = r.size() ? r.cwiseAbs().maxCoeff() : 0.0;
        if (!std::isfinite(res)) return std::nullopt;
        if (res <= tol) return x;
        if (it == max_iter) break;
        Eigen::MatrixXd J = ev.jacobian(p);
        Eigen::VectorXd step = J.completeOrthogonalDecomposition().solve(r);
        double scale = 1.0;
        for (double v : x) scale = std::max(scale, std::abs(v));
        for (std::size_t i = 0; i < x.size(); ++i) x[i] -= step(static_cast<Eigen::Index>(i));
        if (step.norm() <= 1e-15 * scale) {
            // Converged to rounding; accept when the looser acceptance bound holds.
            Eigen::VectorXd r2 = ev.values(ev.sys.point(x));
            if (r2.size() == 0 || r2.cwiseAbs().maxCoeff() <= 1e-10) return x;
            return std::nullopt;
        }
    }
    return std::nullopt;
}

} // namespace

double N_residual(const ControlSystem& sys, const std::vector<double>& x) {
    sym::Point p = sys.point(x);
    double r = 0;
    for (const auto& phi : sys.N_defs) r = std::max(r, std::abs(sym::eval_at(phi, p)));
    return r;
}

std::optional<std::vector<double>> project_to_N(const ControlSystem& sys, std::vector<double> x, double tol,
                                                int max_iter) {
    return newton(NEval(sys), std::move(x), tol, max_iter);
}

std::vector<std::vector<double>> sample_states_on_N(const ControlSystem& sys, std::size_t count, double radius,
                                                    std::uint64_t seed) {
    NEval ev(sys);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    std::vector<double> x0(sys.n());
    for (std::size_t i = 0; i < sys.n(); ++i) x0[i] = sys.x0[i].get_d();
    std::vector<std::vector<double>> out;
    const std::size_t attempts = 20 * count + 20;
    for (std::size_t a = 0; a < attempts && out.size() < count; ++a) {
        std::vector<double> x = x0;
        for (auto& v : x) v += radius * d(rng);
        auto y = newton(ev, std::move(x), 1e-12, 50);
        if (!y) continue;
        double dist = 0;
        for (std::size_t i = 0; i < y->size(); ++i) dist = std::max(dist, std::abs((*y)[i] - x0[i]));
        if (dist > 2 * radius + 1e-12) continue;
        out.push_back(std::move(*y));
    }
    if (out.empty()) throw SamplingFailed("Newton projection onto N failed for every attempt");
    return out;
}

sym::Poly reduce_modulo(const sym::Poly& p, const std::vector<Expr>& defs) {
    std::vector<sym::Poly> div;
    for (const auto& d : defs)
        if (d.is_polynomial() && !d.is_zero()) div.push_back(d.num());
    sym::Poly rest = p, rem;
    while (!rest.is_zero()) {
        const sym::Term lt = rest.leading();
        bool reduced = false;
        for (const auto& d : div) {
            const sym::Term& ld = d.leading();
            if (!ld.m.divides(lt.m)) continue;
            rest -= d.mul_term(lt.m / ld.m, lt.c / ld.c);
            reduced = true;
            break;
        }
        if (!reduced) {
            sym::Poly head = sym::Poly::from_terms({lt});
            rem += head;
            rest -= head;
        }
    }
    return rem;
}

void verify_graph(const ControlSystem& sys, const sym::Bindings& graph) {
    std::set<sym::SymbolId> bound;
    for (const auto& [s, e] : graph) {
        auto idx = sys.vars.index_of(s);
        if (!idx || *idx < sys.vars.x_index(0)) throw InvalidProblem("parametrization binds a non-state variable");
        if (!bound.insert(s).second) throw InvalidProblem("parametrization binds a state twice");
    }
    for (const auto& [s, e] : graph) {
        if (!states_only(sys, e)) throw InvalidProblem("parametrization depends on time or inputs");
        for (auto b : bound)
            if (e.depends_on(b)) throw InvalidProblem("parametrization is not in graph form");
    }
    if (graph.size() != sys.N_defs.size())
        throw InvalidProblem("parametrization binds " + std::to_string(graph.size()) + " states but N has codimension " +
                             std::to_string(sys.N_defs.size()));
    for (const auto& phi : sys.N_defs)
        if (sym::is_zero(sym::substitute(phi, graph)) != ZeroTest::Zero)
            throw InvalidProblem("parametrization does not satisfy the defining function " + sym::to_string(phi));
    sym::Point p = exact_state_point(sys, std::vector<mpq_class>(sys.m()));
    for (const auto& [s, e] : graph) {
        double want = p.value(s), got = sym::eval_at(e, p);
        if (std::abs(want - got) > 1e-10) throw InvalidProblem("parametrization does not pass through x0");
    }
}

std::optional<sym::Bindings> derive_graph(const ControlSystem& sys) {
    sym::Bindings graph;
    std::vector<Expr> open = sys.N_defs;
    bool progress = true;
    while (!open.empty() && progress) {
        progress = false;
        for (std::size_t k = 0; k < open.size() && !progress; ++k) {
            Expr phi = sym::substitute(open[k], graph);
            if (!phi.is_polynomial()) continue;
            // Highest-index state entering linearly with a constant coefficient.
            for (std::size_t i = sys.n(); i-- > 0;) {
                sym::SymbolId v = sys.vars.x(i);
                auto coeffs = phi.num().coefficients_in(v);
                if (coeffs.size() != 2 || !coeffs[1].is_constant()) continue;
                Expr c = Expr::polynomial(coeffs[1]);
                Expr rest = phi - c * Expr::symbol(v);
                if (rest.depends_on(v)) continue;
                Expr value = -rest / c;
                sym::Bindings one = {{v, value}};
                for (auto& [s, e] : graph) e = sym::substitute(e, one);
                graph.emplace_back(v, value);
                open.erase(open.begin() + static_cast<std::ptrdiff_t>(k));
                progress = true;
                break;
            }
        }
    }
    if (!open.empty()) return std::nullopt;
    std::sort(graph.begin(), graph.end(), [&](const auto& a, const auto& b) {
        return *sys.vars.index_of(a.first) < *sys.vars.index_of(b.first);
    });
    try {
        verify_graph(sys, graph);
    } catch (const InvalidProblem&) {
        return std::nullopt;
    }
    return graph;
}

ZeroTest vanishes_on_N(const ControlSystem& sys, const std::optional<sym::Bindings>& graph, const Expr& e,
                       const VanishOptions& opt) {
    if (e.is_zero()) return ZeroTest::Zero;
    if (graph) {
        ZeroTest z = sym::is_zero(sym::substitute(e, *graph));
        if (z != ZeroTest::Inconclusive) return z;
    }
    bool polynomial_defs = std::all_of(sys.N_defs.begin(), sys.N_defs.end(),
                                       [](const Expr& d) { return d.is_polynomial() && !d.has_kernels(); });
    if (polynomial_defs && !e.has_kernels() && reduce_modulo(e.num(), sys.N_defs).is_zero()) return ZeroTest::Zero;
    auto pts = sample_states_on_N(sys, opt.samples, opt.radius, opt.seed);
    for (const auto& x : pts) {
        double v;
        try {
            v = sym::eval_at(e, sys.point(x));
        } catch (const DomainError&) {
            continue;
        }
        if (std::abs(v) > opt.tolerance) return ZeroTest::NonZero;
    }
    return ZeroTest::Inconclusive;
}

ZeroTest vanishes_on_L(const LiftedSystem& ls, const Expr& e, const VanishOptions& opt) {
    Expr r = sym::substitute(e, {{ls.vs.t(), Expr(0)}});
    // Inputs are free on L; the restriction must vanish for all of them.
    bool has_u = false;
    for (std::size_t j = 0; j < ls.m(); ++j) has_u = has_u || r.depends_on(ls.vs.u(j));
    if (!has_u) return vanishes_on_N(ls.base, ls.graph, r, opt);
    // Check at a few fixed input values; each must vanish on N.
    ZeroTest acc = ZeroTest::Zero;
    for (long val : {0L, 1L, -2L}) {
        sym::Bindings b;
        for (std::size_t j = 0; j < ls.m(); ++j) b.emplace_back(ls.vs.u(j), Expr(val + static_cast<long>(j)));
        ZeroTest z = vanishes_on_N(ls.base, ls.graph, sym::substitute(r, b), opt);
        if (z == ZeroTest::NonZero) return z;
        if (z == ZeroTest::Inconclusive) acc = z;
    }
    // Finitely many input values do not prove an identity in u.
    return acc == ZeroTest::Zero ? ZeroTest::Inconclusive : acc;
}

LiftedSystem lift_system(const ControlSystem& sys) {
    const auto& vs = sys.vars;
    const std::size_t n = vs.n(), m = vs.m();
    if (n == 0 || m == 0) throw InvalidProblem("the system needs at least one state and one input");
    if (sys.f.size() != n) throw DimensionMismatch("f has " + std::to_string(sys.f.size()) + " components, expected " + std::to_string(n));
    if (sys.g.size() != m) throw DimensionMismatch("expected " + std::to_string(m) + " input fields");
    for (const auto& gj : sys.g)
        if (gj.size() != n) throw DimensionMismatch("input field has the wrong number of components");
    if (sys.u_star.size() != m) throw DimensionMismatch("u* must have one entry per input");
    if (sys.x0.size() != n) throw DimensionMismatch("x0 must have one entry per state");
    if (sys.N_defs.empty()) throw InvalidProblem("N needs at least one defining function (n* < n)");
    if (sys.N_defs.size() > n) throw RankDeficientN("more defining functions than states");
    auto check_states = [&](const Expr& e, const char* what) {
        if (!states_only(sys, e)) throw InvalidProblem(std::string(what) + " may depend on the states only: " + sym::to_string(e));
    };
    for (const auto& e : sys.f) check_states(e, "f");
    for (const auto& gj : sys.g)
        for (const auto& e : gj) check_states(e, "g");
    for (const auto& e : sys.N_defs) check_states(e, "N");
    for (const auto& e : sys.u_star) check_states(e, "u*");

    LiftedSystem ls;
    ls.base = sys;
    ls.vs = vs;

    sym::Point px0 = exact_state_point(sys, std::vector<mpq_class>(m));
    std::vector<mpq_class> ustar0;
    for (const auto& e : sys.u_star) ustar0.push_back(value_at(e, px0));
    ls.p0 = exact_state_point(sys, ustar0);

    for (const auto& phi : sys.N_defs) {
        double v = std::abs(sym::eval_at(phi, ls.p0));
        auto q = sym::eval_exact(phi, ls.p0);
        if ((q && *q != 0) || v > 1e-10) throw InvalidProblem("x0 does not lie on N: " + sym::to_string(phi) + " = " + std::to_string(v));
    }
    // Jacobian of N at x0.
    Eigen::MatrixXd J(sys.N_defs.size(), n);
    for (std::size_t k = 0; k < sys.N_defs.size(); ++k)
        for (std::size_t i = 0; i < n; ++i) J(k, i) = sym::eval_at(sym::diff(sys.N_defs[k], vs.x(i)), ls.p0);
    int r = num::rank(J);
    if (r != static_cast<int>(sys.N_defs.size()))
        throw RankDeficientN("Jacobian of the defining functions of N has rank " + std::to_string(r) + " at x0, expected " +
                             std::to_string(sys.N_defs.size()));
    ls.n_star = n - sys.N_defs.size();

    if (sys.parametrization) {
        verify_graph(sys, *sys.parametrization);
        ls.graph = sys.parametrization;
    } else {
        ls.graph = derive_graph(sys);
    }

    ls.f = VectorField(vs);
    for (std::size_t i = 0; i < n; ++i) ls.f[vs.x_index(i)] = sys.f[i];
    for (std::size_t j = 0; j < m; ++j) {
        VectorField g(vs);
        for (std::size_t i = 0; i < n; ++i) g[vs.x_index(i)] = sys.g[j][i];
        ls.g.push_back(std::move(g));
        ls.U.push_back(VectorField::coordinate(vs, vs.u_index(j)));
    }
    ls.Y = ls.f;
    for (std::size_t j = 0; j < m; ++j) ls.Y = ls.Y + ls.g[j] * Expr::symbol(vs.u(j));
    ls.Y[0] = Expr(1);

    // Invariance of N under the closed loop f + g u*.
    VectorField closed = ls.f;
    for (std::size_t j = 0; j < m; ++j) closed = closed + ls.g[j] * sys.u_star[j];
    for (const auto& phi : sys.N_defs) {
        Expr Lphi = ext::lie_derivative(closed, phi);
        ZeroTest z = vanishes_on_N(sys, ls.graph, Lphi);
        if (z == ZeroTest::NonZero)
            throw InvarianceViolation("u* does not render N invariant: the closed-loop derivative of " + sym::to_string(phi) +
                                      " does not vanish on N");
        if (z == ZeroTest::Inconclusive)
            ls.warnings.push_back("invariance of N under u* for " + sym::to_string(phi) + " rests on sampled evidence only");
    }

    for (std::size_t i = 0; i < n; ++i) {
        ext::Row w(vs.dim());
        w[vs.x_index(i)] = Expr(1);
        w[0] = -ls.Y[vs.x_index(i)];
        ls.omega.push_back(std::move(w));
    }
    ls.I0 = ext::PfaffianIdeal::make(vs, ls.omega, ls.p0, ext::Provenance::System, "system ideal");
    ls.L_defs.push_back(Expr::symbol(vs.t()));
    for (const auto& phi : sys.N_defs) ls.L_defs.push_back(phi);
    return ls;
}

Eigen::MatrixXd ann_tangent_L(const LiftedSystem& ls, const sym::Point& p) {
    const auto& vs = ls.vs;
    if (std::abs(p[0]) > 1e-10) throw PointNotOnL("point has t = " + std::to_string(p[0]));
    for (const auto& phi : ls.base.N_defs) {
        double v = sym::eval_at(phi, p);
        if (std::abs(v) > 1e-10) throw PointNotOnL("point violates " + sym::to_string(phi) + " by " + std::to_string(v));
    }
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(ls.L_defs.size()), static_cast<Eigen::Index>(vs.dim()));
    A(0, 0) = 1.0;
    for (std::size_t k = 0; k < ls.base.N_defs.size(); ++k)
        for (std::size_t i = 0; i < vs.n(); ++i) {
            Expr d = sym::diff(ls.base.N_defs[k], vs.x(i));
            if (!d.is_zero()) A(static_cast<Eigen::Index>(k + 1), static_cast<Eigen::Index>(vs.x_index(i))) = sym::eval_at(d, p);
        }
    return A;
}

VectorField ad(const VectorField& f, const VectorField& g, std::size_t j) {
    VectorField r = g;
    for (std::size_t k = 0; k < j; ++k) r = ext::lie_bracket(f, r);
    return r;
}

std::vector<VectorField> g_module(const VectorField& f, const std::vector<VectorField>& g, std::size_t k) {
    std::vector<VectorField> out;
    std::vector<VectorField> cur = g;
    for (std::size_t j = 0; j <= k; ++j) {
        out.insert(out.end(), cur.begin(), cur.end());
        if (j < k)
            for (auto& c : cur) c = ext::lie_bracket(f, c);
    }
    return out;
}

std::vector<VectorField> g_module(const LiftedSystem& ls, std::size_t k) { return g_module(ls.f, ls.g, k); }

Eigen::MatrixXd evaluate_fields(const std::vector<VectorField>& fields, const sym::Point& p) {
    const std::size_t D = p.size();
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(fields.size()), static_cast<Eigen::Index>(D));
    for (std::size_t i = 0; i < fields.size(); ++i)
        for (std::size_t j = 0; j < D; ++j)
            if (!fields[i][j].is_zero())
                out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = sym::eval_at(fields[i][j], p);
    return out;
}

namespace {

// Deterministic generic point used to screen candidates numerically.
sym::Point screening_point(const sym::VariableSpace& vs) {
    std::vector<mpq_class> v;
    for (std::size_t i = 0; i < vs.dim(); ++i) v.emplace_back(static_cast<long>(37 + 11 * i), static_cast<long>(19 + 3 * i));
    return sym::Point(vs, std::move(v));
}

ext::Matrix as_rows(const std::vector<VectorField>& fields) {
    ext::Matrix m;
    for (const auto& f : fields) m.push_back(f.components());
    return m;
}

} // namespace

std::size_t generic_rank(const std::vector<VectorField>& fields) {
    if (fields.empty()) return 0;
    return ext::rref(as_rows(fields)).pivots.size();
}

std::vector<VectorField> independent_subset(const std::vector<VectorField>& fields, const sym::Point* keep_at) {
    std::vector<VectorField> out;
    if (fields.empty()) return out;
    sym::Point q = screening_point(fields[0].space());
    Eigen::MatrixXd num_rows(0, static_cast<Eigen::Index>(q.size()));
    Eigen::MatrixXd at_rows(0, static_cast<Eigen::Index>(q.size()));
    bool numeric_ok = true;
    std::size_t generic = 0;
    auto raises_rank_at = [&](const VectorField& f) {
        if (!keep_at) return false;
        Eigen::MatrixXd cand = num::stack(at_rows, evaluate_fields({f}, *keep_at));
        if (num::rank(cand) <= num::rank(at_rows)) return false;
        at_rows = cand;
        return true;
    };
    for (const auto& f : fields) {
        if (f.is_zero()) continue;
        bool independent = false;
        if (generic < q.size()) {
            if (numeric_ok) {
                try {
                    Eigen::MatrixXd cand = num::stack(num_rows, evaluate_fields({f}, q));
                    if (num::rank(cand) > num::rank(num_rows)) {
                        num_rows = cand;
                        independent = true;
                    }
                } catch (const DomainError&) {
                    numeric_ok = false;
                }
            }
            if (!independent) {
                // Numeric screening is a lower bound on generic rank; confirm symbolically.
                auto rows = as_rows(out);
                rows.push_back(f.components());
                independent = generic < ext::rref(rows).pivots.size();
                if (independent && numeric_ok) {
                    try {
                        num_rows = num::stack(num_rows, evaluate_fields({f}, q));
                    } catch (const DomainError&) {
                        numeric_ok = false;
                    }
                }
            }
        }
        bool local = raises_rank_at(f);
        if (independent) ++generic;
        if (independent || local) out.push_back(f);
    }
    return out;
}

std::vector<VectorField> s_module(const LiftedSystem& ls, std::size_t k) { return s_module(ls.f, ls.g, k, &ls.p0); }

std::vector<VectorField> s_module(const VectorField& f, const std::vector<VectorField>& g, std::size_t k,
                                  const sym::Point* keep_at) {
    std::vector<VectorField> S = g;
    std::vector<VectorField> adk = g;
    for (std::size_t i = 1; i <= k; ++i) {
        for (auto& c : adk) c = ext::lie_bracket(f, c);
        std::vector<VectorField> cand = S;
        for (std::size_t a = 0; a < S.size(); ++a)
            for (std::size_t b = a + 1; b < S.size(); ++b) cand.push_back(ext::lie_bracket(S[a], S[b]));
        cand.insert(cand.end(), adk.begin(), adk.end());
        S = independent_subset(cand, keep_at);
    }
    return S;
}

std::vector<VectorField> involutive_closure(const std::vector<VectorField>& fields, const sym::Point& p0,
                                            const ext::DerivedOptions& opt) {
    std::vector<VectorField> S = independent_subset(fields, &p0);
    if (S.empty()) return S;
    const std::size_t D = S[0].space().dim();
    std::size_t rank = generic_rank(S);
    for (std::size_t it = 0; it < D; ++it) {
        std::vector<VectorField> cand = S;
        for (std::size_t a = 0; a < S.size(); ++a)
            for (std::size_t b = a + 1; b < S.size(); ++b) cand.push_back(ext::lie_bracket(S[a], S[b]));
        auto next = independent_subset(cand, &p0);
        std::size_t r = generic_rank(next);
        bool grew = r > rank || next.size() > S.size();
        S = std::move(next);
        if (!grew) break;
        rank = r;
    }
    // Constant rank near p0, p0 included.
    std::vector<sym::Point> pts = {p0};
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    for (unsigned k = 0; k < opt.rank_samples; ++k) {
        std::vector<double> v = p0.values();
        for (auto& x : v) x += opt.perturbation * d(rng);
        pts.push_back(p0.with_values(std::move(v)));
    }
    for (const auto& p : pts) {
        int r = num::rank(evaluate_fields(S, p));
        if (r != static_cast<int>(rank))
            throw RegularityViolation("involutive closure has generic rank " + std::to_string(rank) + " but rank " +
                                      std::to_string(r) + " at or near p0");
    }
    return S;
}

} // namespace tfl::lift
