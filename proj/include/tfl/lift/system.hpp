#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>
#include <vector>

#include "tfl/ext/ideal.hpp"

namespace tfl::lift {

using sym::Expr;

// ẋ = f(x) + Σ g_j(x) u_j with target manifold N = {N_defs = 0} rendered
// invariant by the feedback u*.
struct ControlSystem {
    sym::VariableSpace vars;              // t, inputs, states
    std::vector<Expr> f;                  // n state components
    std::vector<std::vector<Expr>> g;     // m columns of n components
    std::vector<Expr> N_defs;
    std::vector<mpq_class> x0;            // n
    std::vector<Expr> u_star;             // m, over the states
    // Optional graph parametrization of N: each bound state as a function of
    // the remaining ones. Verified against N_defs before use.
    std::optional<sym::Bindings> parametrization;

    std::size_t n() const { return vars.n(); }
    std::size_t m() const { return vars.m(); }
    // Point of the full space with t = 0, the given inputs and states.
    sym::Point point(const std::vector<double>& x, const std::vector<double>& u = {}) const;
};

struct LiftedSystem {
    ControlSystem base;
    sym::VariableSpace vs;
    ext::VectorField f, Y;
    std::vector<ext::VectorField> g;
    std::vector<ext::VectorField> U;  // ∂/∂u_j
    ext::Matrix omega;
    ext::PfaffianIdeal I0;
    std::vector<Expr> L_defs;         // t, then N_defs
    sym::Point p0;                    // exact
    std::size_t n_star = 0;
    std::optional<sym::Bindings> graph;  // verified parametrization of N, user supplied or derived
    std::vector<std::string> warnings;

    std::size_t n() const { return vs.n(); }
    std::size_t m() const { return vs.m(); }
    std::size_t codim() const { return vs.n() - n_star; }
};

LiftedSystem lift_system(const ControlSystem& sys);

// Graph parametrization of N obtained by solving defining functions that are
// linear with a constant coefficient in some state; nullopt when none exists.
std::optional<sym::Bindings> derive_graph(const ControlSystem& sys);
// Throws InvalidProblem when the bindings do not parametrize N.
void verify_graph(const ControlSystem& sys, const sym::Bindings& graph);

// Remainder of multivariate division of a polynomial by the defining
// functions, graded-lex order. Zero proves vanishing on N.
sym::Poly reduce_modulo(const sym::Poly& p, const std::vector<Expr>& defs);

struct VanishOptions {
    unsigned samples = 8;
    double radius = 0.1;
    std::uint64_t seed = 1;
    double tolerance = 1e-9;
};

// Zero: proven (graph substitution or ideal reduction); NonZero: a witness
// exists; Inconclusive: only sampled evidence of vanishing.
sym::ZeroTest vanishes_on_N(const ControlSystem& sys, const std::optional<sym::Bindings>& graph, const Expr& e,
                            const VanishOptions& opt = {});
sym::ZeroTest vanishes_on_L(const LiftedSystem& ls, const Expr& e, const VanishOptions& opt = {});

// Newton projection of a state onto N using the minimum-norm step.
std::optional<std::vector<double>> project_to_N(const ControlSystem& sys, std::vector<double> x, double tol = 1e-12,
                                                int max_iter = 50);
// Newton projections of random perturbations of x0 (box of the given
// radius); deterministic for a fixed seed. Throws SamplingFailed when no
// attempt converges. May return fewer than `count` states.
std::vector<std::vector<double>> sample_states_on_N(const ControlSystem& sys, std::size_t count, double radius,
                                                    std::uint64_t seed);
// Largest |φ(x)| over the defining functions.
double N_residual(const ControlSystem& sys, const std::vector<double>& x);

// Rows dt and dφ(p) for each defining function of N. Throws PointNotOnL.
Eigen::MatrixXd ann_tangent_L(const LiftedSystem& ls, const sym::Point& p);

// G^k = {ad_f^j g_i : j ≤ k}, ordered by j then i.
std::vector<ext::VectorField> g_module(const LiftedSystem& ls, std::size_t k);
std::vector<ext::VectorField> g_module(const ext::VectorField& f, const std::vector<ext::VectorField>& g, std::size_t k);
// S^0 = G^0; S^k spans S^{k-1}, its pairwise brackets and G^k.
std::vector<ext::VectorField> s_module(const LiftedSystem& ls, std::size_t k);
std::vector<ext::VectorField> s_module(const ext::VectorField& f, const std::vector<ext::VectorField>& g, std::size_t k,
                                       const sym::Point* keep_at = nullptr);
ext::VectorField ad(const ext::VectorField& f, const ext::VectorField& g, std::size_t j);

// Maximal subset of the fields that is independent over the function field,
// in input order. Fields are kept unscaled. With `keep_at`, fields that raise
// the rank at that point are kept as well, so the pointwise span there is
// that of the whole list.
std::vector<ext::VectorField> independent_subset(const std::vector<ext::VectorField>& fields,
                                                 const sym::Point* keep_at = nullptr);
// Rank over the function field.
std::size_t generic_rank(const std::vector<ext::VectorField>& fields);
// Generators of the involutive closure. Throws RegularityViolation when the
// generic rank is not attained at points near p0.
std::vector<ext::VectorField> involutive_closure(const std::vector<ext::VectorField>& fields, const sym::Point& p0,
                                                 const ext::DerivedOptions& opt = {});

Eigen::MatrixXd evaluate_fields(const std::vector<ext::VectorField>& fields, const sym::Point& p);

} // namespace tfl::lift
