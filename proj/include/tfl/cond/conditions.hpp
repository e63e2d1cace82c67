#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

#include "tfl/lift/system.hpp"
#include "tfl/par/pointwise.hpp"

namespace tfl::cond {

using ext::PfaffianIdeal;
using lift::ControlSystem;
using lift::LiftedSystem;

// Derived flag of the lifted system together with ⟨I^(k), dt⟩ and its
// differential closure for every k = 0..n−n*+1. Entries past the end of the
// flag repeat its terminal ideal.
struct FlagData {
    ext::Flag flag;
    std::vector<PfaffianIdeal> with_dt;
    std::vector<PfaffianIdeal> closure;
    std::vector<bool> differential;  // closure equals ⟨I^(k), dt⟩

    std::size_t levels() const { return with_dt.size(); }
};

FlagData flag_data(const LiftedSystem& ls, const ext::DerivedOptions& opt = {});

struct IndexProfile {
    std::vector<std::size_t> rho;    // ρ_0..ρ_{n−n*}
    std::vector<std::size_t> kappa;  // κ_1..κ_{ρ_0}
    std::size_t n_minus_nstar = 0;

    // ρ_0..ρ_{κ_1}: the nonzero indices and the first vanishing one.
    std::vector<std::size_t> listed() const;
    std::size_t rho_sum() const;
    std::size_t kappa_sum() const;
};

// Samples of N near x0; see lift::sample_states_on_N.
std::vector<std::vector<double>> sample_on_N(const ControlSystem& sys, std::size_t count, double radius = 0.1,
                                             std::uint64_t seed = 1);
// Points of L near p0: t = 0, states sampled on N, inputs u*(x) perturbed
// within the same radius.
std::vector<sym::Point> sample_on_L(const LiftedSystem& ls, std::size_t count, double radius = 0.1,
                                    std::uint64_t seed = 1);

// dim(Ann(T_p L) ∩ span{ideal_p, dt_p}). Throws PointNotOnL.
std::size_t intersection_dimension(const LiftedSystem& ls, const PfaffianIdeal& ideal, const sym::Point& p);

// ρ_i from the differences of intersection dimensions at p0. Uses the
// closures when `use_closures`, otherwise the ideals ⟨I^(k), dt⟩.
IndexProfile rho_indices(const LiftedSystem& ls, const FlagData& fd, bool use_closures = true);
IndexProfile profile_from_rho(std::vector<std::size_t> rho, std::size_t n_minus_nstar);

bool check_con(const LiftedSystem& ls, const FlagData& fd);

struct InvCell {
    bool checked = false;  // false when ⟨I^(k), dt⟩ is already differential
    bool contained = true;
};

// Tables are indexed [k][point], point 0 being p0 and 1.. the samples.
struct DimTable {
    std::vector<std::vector<std::size_t>> dims;
    bool holds() const;
};
struct InvTable {
    std::vector<std::vector<InvCell>> cells;
    bool holds() const;
};

DimTable dim_table(const LiftedSystem& ls, const FlagData& fd, const std::vector<sym::Point>& samples,
                   par::Mode mode = par::Mode::Parallel);
InvTable inv_table(const LiftedSystem& ls, const FlagData& fd, const std::vector<sym::Point>& samples,
                   par::Mode mode = par::Mode::Parallel);

bool check_dim(const LiftedSystem& ls, const FlagData& fd, const std::vector<sym::Point>& samples);
bool check_inv(const LiftedSystem& ls, const FlagData& fd, const std::vector<sym::Point>& samples);

struct ConditionOptions {
    std::size_t samples = 8;
    double radius = 0.1;
    std::uint64_t seed = 1;
    par::Mode mode = par::Mode::Parallel;
    ext::DerivedOptions derived;
};

struct ConditionReport {
    bool con = false, inv = false, dim = false;
    DimTable dim_detail;
    InvTable inv_detail;
    IndexProfile indices;
    bool indices_advisory = false;  // computed from the raw ideals because (Inv) failed
    std::vector<sym::Point> samples_used;
    std::vector<std::string> warnings;

    bool all() const { return con && inv && dim; }
};

ConditionReport check_conditions(const LiftedSystem& ls, const FlagData& fd, const ConditionOptions& opt = {});

} // namespace tfl::cond
