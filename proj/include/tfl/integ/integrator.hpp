#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tfl/lift/system.hpp"

namespace tfl::integ {

using ext::PfaffianIdeal;
using lift::LiftedSystem;
using sym::Expr;

enum class Source { Integrated, Hint, LieDerivative, Time, Combined };
const char* to_string(Source s);

// Map whose component differentials span a differential ideal (its target
// closure), with the leading `vanish_count` components vanishing on L.
struct SmoothMapAdapted {
    std::vector<Expr> components;
    std::vector<Source> provenance;
    std::size_t vanish_count = 0;
    std::size_t k = 0;
    PfaffianIdeal target;
    std::vector<std::string> warnings;

    std::size_t size() const { return components.size(); }
};

// Antiderivative in `var` for polynomials in var and terms z^k exp(a z + b);
// nullopt outside that class.
std::optional<Expr> antiderivative(const Expr& e, sym::SymbolId var);

// F with dF = Σ coeffs[i] d vars[i], treating every other variable as a
// parameter; nullopt when the coefficients are not of that form.
std::optional<Expr> potential(const std::vector<Expr>& coeffs, const std::vector<sym::SymbolId>& vars);

// Integrates a differential ideal. Hints are checked first and must each be
// a member that adds rank at p0 (else HintRejected); the remaining rank is
// filled from closed generators and separable solved rows. Components are
// normalized to vanish at p0, with t last. Throws IntegrationFailed with
// the residual solved rows.
SmoothMapAdapted frobenius_integrate(const PfaffianIdeal& closure, const std::vector<Expr>& hints = {},
                                     std::size_t k = 0);

struct AdaptOptions {
    unsigned degree = 2;
    std::uint64_t seed = 11;
};

// Rank of the Jacobian of F restricted to L at p.
std::size_t rank_on_L(const SmoothMapAdapted& F, const LiftedSystem& ls, const sym::Point& p);

// Rewrites F so exactly `target_vanish` leading components vanish on L,
// using polynomial combinations of its components up to the ansatz degree.
// The vanishing block is ordered new components, then Lie derivatives of
// the output, then t. Throws AdaptationFailed or InconclusiveZeroTest.
SmoothMapAdapted adapt_to_L(const SmoothMapAdapted& F, const LiftedSystem& ls, std::size_t target_vanish,
                            const AdaptOptions& opt = {});

// Leading components are those of `higher`, completed by independent
// components of `lower`. Throws SubsumptionFailed.
SmoothMapAdapted subsume(const SmoothMapAdapted& lower, const SmoothMapAdapted& higher);

// Lie derivative of a state function along the drift.
Expr lie_f(const LiftedSystem& ls, const Expr& h);

// Places L_f^j h^i for j ≤ κ_i − k − 1 first, verbatim, then completes from
// F. Throws AdaptationFailed when those differentials leave the target.
SmoothMapAdapted adapt_subordinate(const SmoothMapAdapted& F, const std::vector<Expr>& h,
                                   const std::vector<std::size_t>& kappa, const LiftedSystem& ls, std::size_t k);

// Characteristic property: every differential is a member of the target and
// the rank at p0 equals the target's size.
bool characteristic(const SmoothMapAdapted& F);

} // namespace tfl::integ
