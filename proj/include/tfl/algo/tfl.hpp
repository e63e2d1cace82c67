#pragma once

#include <Eigen/Dense>

#include <map>
#include <string>
#include <vector>

#include "tfl/cond/conditions.hpp"
#include "tfl/integ/integrator.hpp"

namespace tfl::algo {

using lift::ControlSystem;
using lift::LiftedSystem;
using sym::Expr;

struct RelativeDegree {
    std::vector<std::size_t> kappa;
    Eigen::MatrixXd decoupling;  // ρ0 × m at x0
};

// κ_i is one more than the number of drift derivatives before some input
// field acts on h^i. Throws IndependenceViolation when the dh^i are dependent
// at x0 and NoRelativeDegree when the decoupling matrix is rank deficient or
// a lower derivative cannot be shown to vanish identically.
RelativeDegree vector_relative_degree(const ControlSystem& sys, const std::vector<Expr>& h);

// Uniform dual test: each dh^i lies in ⟨I^(κ1−1), dt⟩^(∞) and span{dh_p0}
// meets span{I^(κ1)_p0, dt_p0} only in 0.
bool dual_rd_check(const LiftedSystem& ls, const cond::FlagData& fd, const std::vector<Expr>& h, std::size_t kappa1);

// {L_f^j h^i : j < κ_i}. Throws IndependenceViolation.
std::vector<Expr> zero_dynamics_manifold(const ControlSystem& sys, const std::vector<Expr>& h,
                                         const std::vector<std::size_t>& kappa);

Expr lie_derivative(const std::vector<Expr>& field, const sym::VariableSpace& vs, const Expr& h);

struct NormalFormData {
    std::vector<std::vector<Expr>> xi;  // xi[i][j] = L_f^j h^i
    std::vector<Expr> eta;
    std::vector<Expr> alpha;               // m entries: L_f^{κ_i} h^i, then 0
    std::vector<std::vector<Expr>> beta;   // m × m: decoupling rows, then unit rows
    double jacobian_condition = 0;
};

// Throws CompletionFailed.
NormalFormData normal_form(const ControlSystem& sys, const std::vector<Expr>& h, const std::vector<std::size_t>& kappa);

struct ZLevel {
    std::size_t k = 0;
    std::vector<Expr> defs;
    std::vector<std::size_t> kappa;  // relative degrees of the output defining it
};

struct Iteration {
    std::size_t k = 0;
    bool skipped = false;
    std::size_t mu = 0;
    integ::SmoothMapAdapted integrated, adapted;
    std::vector<Expr> harvested;
};

struct Options {
    cond::ConditionOptions conditions;
    integ::AdaptOptions adapt;
    std::map<std::size_t, std::vector<Expr>> hints;  // by closure index
};

struct Analysis {
    LiftedSystem ls;
    cond::FlagData fd;
    cond::ConditionReport conditions;
};

Analysis analyze(const ControlSystem& sys, const Options& opt = {});

struct Certificate {
    bool vanish_on_N = false, relative_degree = false, dual = false, kappa_sum = false, nesting = false;
    bool all() const { return vanish_on_N && relative_degree && dual && kappa_sum && nesting; }
};

struct TFLReport {
    std::vector<Iteration> iterations;
    std::vector<Expr> h;
    RelativeDegree rd;
    std::vector<ZLevel> zflag;  // Z^(κ1+1) ⊇ … ⊇ Z^(1)
    NormalFormData nf;
    Certificate certificate;
    std::vector<std::string> warnings;
};

// Algorithm 1 on an analyzed problem. Throws ConditionsFailed,
// IntegrationFailed, AdaptationFailed or CertificateMismatch.
TFLReport run_tfl(const Analysis& a, const Options& opt = {});
TFLReport run_tfl(const ControlSystem& sys, const Options& opt = {});

// Re-verification from scratch of a produced output.
Certificate certify(const Analysis& a, const std::vector<Expr>& h, const std::vector<std::size_t>& kappa,
                    const std::vector<ZLevel>& zflag, std::vector<std::string>* warnings = nullptr);

} // namespace tfl::algo
