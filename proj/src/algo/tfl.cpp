#include "tfl/algo/tfl.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <numeric>

#include "tfl/error.hpp"
#include "tfl/num/dense.hpp"

namespace tfl::algo {

namespace {

sym::Point x0_point(const ControlSystem& sys) {
    std::vector<mpq_class> v(sys.vars.dim(), 0);
    for (std::size_t i = 0; i < sys.n(); ++i) v[sys.vars.x_index(i)] = sys.x0[i];
    return sym::Point(sys.vars, v);
}

Eigen::MatrixXd state_gradients(const ControlSystem& sys, const std::vector<Expr>& fs, const sym::Point& p) {
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(fs.size()), static_cast<Eigen::Index>(sys.n()));
    for (std::size_t r = 0; r < fs.size(); ++r)
        for (std::size_t i = 0; i < sys.n(); ++i) {
            Expr d = sym::diff(fs[r], sys.vars.x(i));
            if (!d.is_zero()) J(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(i)) = sym::eval_at(d, p);
        }
    return J;
}

sym::ZeroTest identically_zero(const Expr& e) { return e.is_zero() ? sym::ZeroTest::Zero : sym::is_zero(e); }

Eigen::MatrixXd lifted_gradients(const LiftedSystem& ls, const std::vector<Expr>& fs) {
    Eigen::MatrixXd J(static_cast<Eigen::Index>(fs.size()), static_cast<Eigen::Index>(ls.vs.dim()));
    auto rows = ext::evaluate([&] {
        ext::Matrix m;
        for (const auto& f : fs) m.push_back(ext::gradient(ls.vs, f));
        return m;
    }(), ls.p0);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j) J(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    return J;
}

template <class E>
[[noreturn]] void rethrow_at(const E& e, std::size_t k) {
    throw E("at k = " + std::to_string(k) + " (closure index " + std::to_string(k - 1) + "): " + e.what());
}

std::string join_names(const std::vector<std::string>& v) {
    std::string out;
    for (const auto& s : v) out += (out.empty() ? "" : ", ") + s;
    return out;
}

} // namespace

Expr lie_derivative(const std::vector<Expr>& field, const sym::VariableSpace& vs, const Expr& h) {
    Expr out;
    for (std::size_t i = 0; i < vs.n(); ++i) {
        if (field[i].is_zero()) continue;
        Expr d = sym::diff(h, vs.x(i));
        if (!d.is_zero()) out += d * field[i];
    }
    return out;
}

RelativeDegree vector_relative_degree(const ControlSystem& sys, const std::vector<Expr>& h) {
    const auto p = x0_point(sys);
    if (num::rank(state_gradients(sys, h, p)) != static_cast<int>(h.size()))
        throw IndependenceViolation("output differentials are dependent at x0");
    RelativeDegree rd;
    rd.decoupling = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(h.size()), static_cast<Eigen::Index>(sys.m()));
    for (std::size_t i = 0; i < h.size(); ++i) {
        Expr phi = h[i];
        bool found = false;
        for (std::size_t r = 0; r < sys.n() && !found; ++r) {
            bool inconclusive = false;
            std::vector<Expr> lg;
            for (std::size_t j = 0; j < sys.m(); ++j) {
                lg.push_back(lie_derivative(sys.g[j], sys.vars, phi));
                auto z = identically_zero(lg.back());
                if (z == sym::ZeroTest::NonZero) found = true;
                if (z == sym::ZeroTest::Inconclusive) inconclusive = true;
            }
            if (found) {
                rd.kappa.push_back(r + 1);
                for (std::size_t j = 0; j < sys.m(); ++j)
                    rd.decoupling(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = sym::eval_at(lg[j], p);
                break;
            }
            if (inconclusive)
                throw NoRelativeDegree("cannot decide whether L_g L_f^" + std::to_string(r) + " of output " +
                                       std::to_string(i + 1) + " vanishes identically");
            phi = lie_derivative(sys.f, sys.vars, phi);
        }
        if (!found) throw NoRelativeDegree("no input acts on output " + std::to_string(i + 1) + " within n derivatives");
    }
    if (num::rank(rd.decoupling) != static_cast<int>(h.size()))
        throw NoRelativeDegree("decoupling matrix is rank deficient at x0");
    return rd;
}

bool dual_rd_check(const LiftedSystem& ls, const cond::FlagData& fd, const std::vector<Expr>& h, std::size_t kappa1) {
    if (kappa1 == 0 || h.empty()) return false;
    const std::size_t last = fd.levels() - 1;
    const auto& C = fd.closure[std::min(kappa1 - 1, last)];
    for (const auto& e : h)
        if (ext::ideal_membership(ext::gradient(ls.vs, e), C) != ext::Membership::Member) return false;
    Eigen::MatrixXd dh = lifted_gradients(ls, h);
    if (num::rank(dh) != static_cast<int>(h.size())) return false;
    Eigen::MatrixXd dt = Eigen::MatrixXd::Zero(1, static_cast<Eigen::Index>(ls.vs.dim()));
    dt(0, 0) = 1;
    Eigen::MatrixXd J = num::stack(ext::pointwise_span(fd.with_dt[std::min(kappa1, last)], ls.p0), dt);
    return num::intersection_dimension(dh, J) == 0;
}

std::vector<Expr> zero_dynamics_manifold(const ControlSystem& sys, const std::vector<Expr>& h,
                                         const std::vector<std::size_t>& kappa) {
    if (h.size() != kappa.size()) throw DimensionMismatch("one relative degree per output component is needed");
    std::vector<Expr> defs;
    for (std::size_t i = 0; i < h.size(); ++i) {
        Expr c = h[i];
        for (std::size_t j = 0; j < kappa[i]; ++j) {
            defs.push_back(c);
            c = lie_derivative(sys.f, sys.vars, c);
        }
    }
    if (num::rank(state_gradients(sys, defs, x0_point(sys))) != static_cast<int>(defs.size()))
        throw IndependenceViolation("zero dynamics defining functions are dependent at x0");
    return defs;
}

NormalFormData normal_form(const ControlSystem& sys, const std::vector<Expr>& h, const std::vector<std::size_t>& kappa) {
    const auto p = x0_point(sys);
    NormalFormData nf;
    std::vector<Expr> coords;
    std::vector<std::vector<Expr>> D;
    for (std::size_t i = 0; i < h.size(); ++i) {
        std::vector<Expr> tower{h[i]};
        for (std::size_t j = 1; j < kappa[i]; ++j) tower.push_back(lie_derivative(sys.f, sys.vars, tower.back()));
        coords.insert(coords.end(), tower.begin(), tower.end());
        std::vector<Expr> row;
        for (std::size_t j = 0; j < sys.m(); ++j) row.push_back(lie_derivative(sys.g[j], sys.vars, tower.back()));
        D.push_back(std::move(row));
        nf.alpha.push_back(lie_derivative(sys.f, sys.vars, tower.back()));
        nf.xi.push_back(std::move(tower));
    }
    int r = num::rank(state_gradients(sys, coords, p));
    if (r != static_cast<int>(coords.size())) throw CompletionFailed("transverse coordinates are dependent at x0");
    for (std::size_t i = 0; i < sys.n() && coords.size() < sys.n(); ++i) {
        auto trial = coords;
        trial.push_back(Expr::symbol(sys.vars.x(i)));
        if (num::rank(state_gradients(sys, trial, p)) > r) {
            coords = std::move(trial);
            nf.eta.push_back(Expr::symbol(sys.vars.x(i)));
            ++r;
        }
    }
    if (coords.size() != sys.n()) throw CompletionFailed("no coordinate completion found at x0");
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(state_gradients(sys, coords, p));
    const auto& sv = svd.singularValues();
    nf.jacobian_condition = sv(0) / sv(sv.size() - 1);

    nf.beta = D;
    auto beta_rank = [&](const std::vector<std::vector<Expr>>& B) {
        Eigen::MatrixXd M(static_cast<Eigen::Index>(B.size()), static_cast<Eigen::Index>(sys.m()));
        for (std::size_t a = 0; a < B.size(); ++a)
            for (std::size_t b = 0; b < sys.m(); ++b) M(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = sym::eval_at(B[a][b], p);
        return num::rank(M);
    };
    int br = beta_rank(nf.beta);
    for (std::size_t j = 0; j < sys.m() && nf.beta.size() < sys.m(); ++j) {
        auto trial = nf.beta;
        std::vector<Expr> e(sys.m(), Expr(0));
        e[j] = Expr(1);
        trial.push_back(e);
        if (beta_rank(trial) > br) {
            nf.beta = std::move(trial);
            nf.alpha.push_back(Expr(0));
            ++br;
        }
    }
    if (br != static_cast<int>(sys.m())) throw CompletionFailed("feedback matrix is singular at x0");
    return nf;
}

Analysis analyze(const ControlSystem& sys, const Options& opt) {
    Analysis a{lift::lift_system(sys), {}, {}};
    a.fd = cond::flag_data(a.ls, opt.conditions.derived);
    a.conditions = cond::check_conditions(a.ls, a.fd, opt.conditions);
    return a;
}

Certificate certify(const Analysis& a, const std::vector<Expr>& h, const std::vector<std::size_t>& kappa,
                    const std::vector<ZLevel>& zflag, std::vector<std::string>* warnings) {
    const auto& sys = a.ls.base;
    Certificate c;
    auto warn = [&](const std::string& w) {
        if (warnings) warnings->push_back(w);
    };

    c.vanish_on_N = true;
    for (const auto& e : h) {
        auto z = lift::vanishes_on_N(sys, a.ls.graph, e);
        if (z == sym::ZeroTest::NonZero) c.vanish_on_N = false;
        if (z == sym::ZeroTest::Inconclusive) warn("vanishing of " + sym::to_string(e) + " on N rests on sampling");
    }

    try {
        c.relative_degree = vector_relative_degree(sys, h).kappa == kappa;
    } catch (const NoRelativeDegree&) {
        c.relative_degree = false;
    } catch (const IndependenceViolation&) {
        c.relative_degree = false;
    }

    c.dual = !h.empty();
    for (std::size_t i = 0; i < h.size();) {
        std::size_t j = i;
        std::vector<Expr> group;
        while (j < h.size() && kappa[j] == kappa[i]) group.push_back(h[j++]);
        if (!dual_rd_check(a.ls, a.fd, group, kappa[i])) c.dual = false;
        i = j;
    }

    c.kappa_sum = std::accumulate(kappa.begin(), kappa.end(), std::size_t{0}) == a.ls.codim();

    c.nesting = !zflag.empty();
    for (std::size_t i = 1; i < zflag.size(); ++i)
        for (const auto& d : zflag[i - 1].defs)
            if (std::find(zflag[i].defs.begin(), zflag[i].defs.end(), d) == zflag[i].defs.end()) c.nesting = false;
    if (c.nesting) {
        const auto& z1 = zflag.back().defs;
        if (z1.size() != a.ls.codim()) c.nesting = false;
        for (const auto& d : z1)
            if (lift::vanishes_on_N(sys, a.ls.graph, d) == sym::ZeroTest::NonZero) c.nesting = false;
        if (c.nesting) {
            ControlSystem Z = sys;
            Z.N_defs = z1;
            Z.parametrization.reset();
            for (const auto& x : lift::sample_states_on_N(Z, 8, 0.1, 5))
                if (lift::N_residual(sys, x) > 1e-8) c.nesting = false;
        }
    }
    return c;
}

TFLReport run_tfl(const Analysis& a, const Options& opt) {
    const auto& cr = a.conditions;
    if (!cr.all()) {
        std::vector<std::string> failed;
        if (!cr.con) failed.push_back("(Con)");
        if (!cr.inv) failed.push_back("(Inv)");
        if (!cr.dim) failed.push_back("(Dim)");
        throw ConditionsFailed("conditions fail: " + join_names(failed));
    }
    const auto& ls = a.ls;
    const auto& sys = ls.base;
    const auto& rho = cr.indices.rho;
    const std::size_t K1 = cr.indices.kappa.front();
    TFLReport rep;
    rep.warnings = cr.warnings;
    std::vector<std::size_t> hk;
    rep.zflag.push_back({K1 + 1, {}, {}});
    for (std::size_t k = K1; k >= 1; --k) {
        Iteration it;
        it.k = k;
        if (rho[k - 1] == rho[k]) {
            it.skipped = true;
            rep.iterations.push_back(std::move(it));
            ZLevel z = rep.zflag.back();
            z.k = k;
            rep.zflag.push_back(std::move(z));
            continue;
        }
        it.mu = rho[k - 1] - rho[k];
        try {
            auto hint = opt.hints.find(k - 1);
            it.integrated = integ::frobenius_integrate(
                a.fd.closure[k - 1], hint == opt.hints.end() ? std::vector<Expr>{} : hint->second, k - 1);
            auto F = integ::adapt_subordinate(it.integrated, rep.h, hk, ls, k - 1);
            std::size_t target = 1;
            for (std::size_t i = k - 1; i < rho.size(); ++i) target += rho[i];
            it.adapted = integ::adapt_to_L(F, ls, target, opt.adapt);
            for (std::size_t i = 0; i < it.adapted.vanish_count; ++i) {
                auto s = it.adapted.provenance[i];
                if (s != integ::Source::LieDerivative && s != integ::Source::Time) it.harvested.push_back(it.adapted.components[i]);
            }
            if (it.harvested.size() != it.mu)
                throw AdaptationFailed("expected " + std::to_string(it.mu) +
                                   " new output components, found " + std::to_string(it.harvested.size()));
            for (const auto& e : it.harvested) {
                rep.h.push_back(e);
                hk.push_back(k);
            }
            for (const auto& w : it.adapted.warnings) rep.warnings.push_back(w);
        } catch (const HintRejected& e) {
            rethrow_at(e, k);
        } catch (const IntegrationFailed& e) {
            rethrow_at(e, k);
        } catch (const AdaptationFailed& e) {
            rethrow_at(e, k);
        } catch (const InconclusiveZeroTest& e) {
            rethrow_at(e, k);
        } catch (const SubsumptionFailed& e) {
            rethrow_at(e, k);
        }
        try {
            if (vector_relative_degree(sys, rep.h).kappa != hk)
                throw CertificateMismatch("partial output lost its relative degree at index " + std::to_string(k));
        } catch (const NoRelativeDegree& e) {
            throw CertificateMismatch(std::string("partial output at index ") + std::to_string(k) + ": " + e.what());
        }
        rep.zflag.push_back({k, zero_dynamics_manifold(sys, rep.h, hk), hk});
        rep.iterations.push_back(std::move(it));
    }
    rep.rd = vector_relative_degree(sys, rep.h);
    rep.certificate = certify(a, rep.h, hk, rep.zflag, &rep.warnings);
    if (!rep.certificate.all()) throw CertificateMismatch("produced output fails re-verification");
    rep.nf = normal_form(sys, rep.h, hk);
    return rep;
}

TFLReport run_tfl(const ControlSystem& sys, const Options& opt) { return run_tfl(analyze(sys, opt), opt); }

} // namespace tfl::algo
