#include "tfl/cond/conditions.hpp"

#include <algorithm>
#include <random>

#include "tfl/error.hpp"
#include "tfl/num/dense.hpp"

namespace tfl::cond {

namespace {

Eigen::MatrixXd dt_numeric(std::size_t dim) {
    Eigen::MatrixXd r = Eigen::MatrixXd::Zero(1, static_cast<Eigen::Index>(dim));
    r(0, 0) = 1.0;
    return r;
}

Eigen::MatrixXd span_with_dt(const PfaffianIdeal& I, const sym::Point& p) {
    return num::stack(ext::pointwise_span(I, p), dt_numeric(I.space().dim()));
}

std::vector<sym::Point> with_p0(const LiftedSystem& ls, const std::vector<sym::Point>& samples) {
    std::vector<sym::Point> pts{ls.p0};
    pts.insert(pts.end(), samples.begin(), samples.end());
    return pts;
}

} // namespace

FlagData flag_data(const LiftedSystem& ls, const ext::DerivedOptions& opt) {
    FlagData fd;
    fd.flag = ext::derived_flag(ls.I0, 0, opt);
    const auto dt = ext::dt_row(ls.vs);
    const std::size_t levels = ls.codim() + 2;
    for (std::size_t k = 0; k < levels; ++k) {
        const std::size_t idx = std::min(k, fd.flag.terminal());
        if (k > idx) {
            fd.with_dt.push_back(fd.with_dt.back());
            fd.closure.push_back(fd.closure.back());
            fd.differential.push_back(fd.differential.back());
            continue;
        }
        auto J = fd.flag.ideals[idx].with({dt});
        auto C = ext::differential_closure(J, opt);
        fd.differential.push_back(C.size() == J.size());
        fd.with_dt.push_back(std::move(J));
        fd.closure.push_back(std::move(C));
    }
    return fd;
}

std::vector<std::size_t> IndexProfile::listed() const {
    const std::size_t k1 = kappa.empty() ? 0 : kappa.front();
    return {rho.begin(), rho.begin() + static_cast<std::ptrdiff_t>(std::min(k1 + 1, rho.size()))};
}

std::size_t IndexProfile::rho_sum() const {
    std::size_t s = 0;
    for (auto r : rho) s += r;
    return s;
}

std::size_t IndexProfile::kappa_sum() const {
    std::size_t s = 0;
    for (auto k : kappa) s += k;
    return s;
}

std::vector<std::vector<double>> sample_on_N(const ControlSystem& sys, std::size_t count, double radius,
                                             std::uint64_t seed) {
    if (count == 0) throw InvalidProblem("sample count must be at least 1");
    if (!(radius > 0)) throw InvalidProblem("sample radius must be positive");
    return lift::sample_states_on_N(sys, count, radius, seed);
}

std::vector<sym::Point> sample_on_L(const LiftedSystem& ls, std::size_t count, double radius, std::uint64_t seed) {
    const auto& sys = ls.base;
    auto xs = sample_on_N(sys, count, radius, seed);
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
    std::uniform_real_distribution<double> du(-radius, radius);
    std::vector<sym::Point> out;
    for (const auto& x : xs) {
        sym::Point px = sys.point(x);
        std::vector<double> u(sys.m());
        for (std::size_t j = 0; j < sys.m(); ++j) u[j] = sym::eval_at(sys.u_star[j], px) + du(rng);
        out.push_back(sys.point(x, u));
    }
    return out;
}

std::size_t intersection_dimension(const LiftedSystem& ls, const PfaffianIdeal& ideal, const sym::Point& p) {
    return static_cast<std::size_t>(num::intersection_dimension(lift::ann_tangent_L(ls, p), span_with_dt(ideal, p)));
}

IndexProfile profile_from_rho(std::vector<std::size_t> rho, std::size_t n_minus_nstar) {
    IndexProfile ip;
    ip.rho = std::move(rho);
    ip.n_minus_nstar = n_minus_nstar;
    const std::size_t rho0 = ip.rho.empty() ? 0 : ip.rho.front();
    for (std::size_t i = 1; i <= rho0; ++i) {
        std::size_t c = 0;
        for (auto r : ip.rho) c += r >= i ? 1 : 0;
        ip.kappa.push_back(c);
    }
    return ip;
}

IndexProfile rho_indices(const LiftedSystem& ls, const FlagData& fd, bool use_closures) {
    const auto& ideals = use_closures ? fd.closure : fd.with_dt;
    std::vector<std::size_t> d;
    for (const auto& I : ideals) d.push_back(intersection_dimension(ls, I, ls.p0));
    std::vector<std::size_t> rho;
    for (std::size_t i = 0; i + 1 < d.size(); ++i) {
        if (d[i + 1] > d[i]) throw InternalError("intersection dimension grows along the flag");
        rho.push_back(d[i] - d[i + 1]);
    }
    return profile_from_rho(std::move(rho), ls.codim());
}

bool check_con(const LiftedSystem& ls, const FlagData& fd) {
    const auto& C = fd.closure[ls.codim()];
    Eigen::MatrixXd basis = num::intersection_basis(lift::ann_tangent_L(ls, ls.p0), ext::pointwise_span(C, ls.p0));
    if (basis.rows() != 1) return false;
    const double scale = basis.row(0).cwiseAbs().maxCoeff();
    for (Eigen::Index j = 1; j < basis.cols(); ++j)
        if (std::abs(basis(0, j)) > num::kRankTol * std::max(scale, 1.0)) return false;
    return true;
}

bool DimTable::holds() const {
    for (const auto& row : dims)
        for (auto d : row)
            if (d != row.front()) return false;
    return true;
}

bool InvTable::holds() const {
    for (const auto& row : cells)
        for (const auto& c : row)
            if (!c.contained) return false;
    return true;
}

DimTable dim_table(const LiftedSystem& ls, const FlagData& fd, const std::vector<sym::Point>& samples,
                   par::Mode mode) {
    const auto pts = with_p0(ls, samples);
    const std::size_t K = ls.codim() + 1;
    DimTable t;
    t.dims.assign(K, std::vector<std::size_t>(pts.size()));
    par::for_each_index(pts.size(), [&](std::size_t s) {
        Eigen::MatrixXd A = lift::ann_tangent_L(ls, pts[s]);
        for (std::size_t k = 0; k < K; ++k)
            t.dims[k][s] = static_cast<std::size_t>(num::intersection_dimension(A, span_with_dt(fd.with_dt[k], pts[s])));
    }, mode);
    return t;
}

InvTable inv_table(const LiftedSystem& ls, const FlagData& fd, const std::vector<sym::Point>& samples,
                   par::Mode mode) {
    const auto pts = with_p0(ls, samples);
    const std::size_t K = ls.codim() + 1;
    InvTable t;
    t.cells.assign(K, std::vector<InvCell>(pts.size()));
    par::for_each_index(pts.size(), [&](std::size_t s) {
        Eigen::MatrixXd A = lift::ann_tangent_L(ls, pts[s]);
        for (std::size_t k = 0; k < K; ++k) {
            if (fd.differential[k]) continue;
            Eigen::MatrixXd X = num::intersection_basis(A, span_with_dt(fd.with_dt[k], pts[s]));
            t.cells[k][s] = {true, num::rows_contained(X, ext::pointwise_span(fd.closure[k], pts[s]))};
        }
    }, mode);
    return t;
}

bool check_dim(const LiftedSystem& ls, const FlagData& fd, const std::vector<sym::Point>& samples) {
    if (samples.empty()) throw InvalidProblem("(Dim) needs at least one sample");
    return dim_table(ls, fd, samples).holds();
}

bool check_inv(const LiftedSystem& ls, const FlagData& fd, const std::vector<sym::Point>& samples) {
    return inv_table(ls, fd, samples).holds();
}

ConditionReport check_conditions(const LiftedSystem& ls, const FlagData& fd, const ConditionOptions& opt) {
    ConditionReport r;
    r.warnings = ls.warnings;
    r.samples_used = sample_on_L(ls, opt.samples, opt.radius, opt.seed);
    if (r.samples_used.size() < opt.samples)
        r.warnings.push_back("only " + std::to_string(r.samples_used.size()) + " of " + std::to_string(opt.samples) +
                             " samples on N converged");
    r.con = check_con(ls, fd);
    r.dim_detail = dim_table(ls, fd, r.samples_used, opt.mode);
    r.dim = r.dim_detail.holds();
    r.inv_detail = inv_table(ls, fd, r.samples_used, opt.mode);
    r.inv = r.inv_detail.holds();
    r.indices_advisory = !r.inv;
    r.indices = rho_indices(ls, fd, r.inv);
    if (r.indices_advisory) r.warnings.push_back("(Inv) fails; indices computed from the raw ideals are advisory");
    return r;
}

} // namespace tfl::cond
