#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "tfl/ext/forms.hpp"
#include "tfl/ext/linalg.hpp"

namespace tfl::ext {

enum class Provenance { System, Derived, Closure, Sum, Explicit };
const char* to_string(Provenance p);

enum class Membership { Member, NonMember, Inconclusive };
const char* to_string(Membership m);

// Finitely generated Pfaffian ideal, stored as one-form rows. Generators are
// polynomial-primitive, regular at p0 and pointwise independent there; each
// has a pivot column where it is a unit at p0 and every other generator is 0.
class PfaffianIdeal {
public:
    PfaffianIdeal() = default;
    // Normalizes the rows. Throws RegularityViolation when no basis of their
    // span is regular and independent at p0.
    static PfaffianIdeal make(const sym::VariableSpace& vs, const Matrix& rows, const sym::Point& p0,
                              Provenance prov, std::string note = {});
    static PfaffianIdeal zero(const sym::VariableSpace& vs, const sym::Point& p0, std::string note = {});

    const sym::VariableSpace& space() const { return vs_; }
    const sym::Point& base_point() const { return p0_; }
    Provenance provenance() const { return prov_; }
    const std::string& note() const { return note_; }

    std::size_t size() const { return gens_.size(); }
    bool empty() const { return gens_.empty(); }
    const Matrix& generators() const { return gens_; }
    const std::vector<std::size_t>& pivots() const { return pivots_; }
    std::vector<KForm> forms() const;
    // Generators scaled so each pivot entry is 1.
    const Matrix& solved() const { return solved_; }

    // ⟨I, extra⟩.
    PfaffianIdeal with(const Matrix& extra, Provenance prov = Provenance::Sum, std::string note = {}) const;

private:
    sym::VariableSpace vs_;
    sym::Point p0_;
    Provenance prov_ = Provenance::Explicit;
    std::string note_;
    Matrix gens_, solved_;
    std::vector<std::size_t> pivots_;
};

Row dt_row(const sym::VariableSpace& vs);

Membership ideal_membership(const Row& a, const PfaffianIdeal& I);
Membership ideal_membership(const KForm& a, const PfaffianIdeal& I);
// Membership of a 2-form in the algebraic ideal generated by I's one-forms.
Membership algebraic_membership(const KForm& beta, const PfaffianIdeal& I);

struct DerivedOptions {
    unsigned rank_samples = 8;
    double perturbation = 0.05;
    std::uint64_t seed = 7;
};

PfaffianIdeal derived_system(const PfaffianIdeal& I, const DerivedOptions& opt = {});

struct Flag {
    std::vector<PfaffianIdeal> ideals;
    std::size_t terminal() const { return ideals.size() - 1; }
    std::vector<std::size_t> counts() const;
};

// max_steps 0 means 1 + m + n + 1.
Flag derived_flag(const PfaffianIdeal& I, std::size_t max_steps = 0, const DerivedOptions& opt = {});
PfaffianIdeal differential_closure(const PfaffianIdeal& I, const DerivedOptions& opt = {});

Eigen::MatrixXd pointwise_span(const PfaffianIdeal& I, const sym::Point& p);

// Span equality over the function field, checked by membership both ways.
Membership same_span(const PfaffianIdeal& a, const PfaffianIdeal& b);

} // namespace tfl::ext
