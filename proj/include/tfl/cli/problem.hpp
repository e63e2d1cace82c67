#pragma once

#include <string>

#include "tfl/algo/tfl.hpp"

namespace tfl::cli {

// A problem file is YAML with the sections
//
//   system:  states, inputs, f (n entries), g (m input fields of n entries)
//   target:  N, x0, u_star, optional parametrization {state: expression}
//   hints:   {k: [expressions]}, k being the closure index of ⟨I^(k), dt⟩^(∞)
//   options: seed, samples, radius, ansatz_degree
//
// with every expression written in the parser's grammar.
struct Problem {
    std::string name;
    lift::ControlSystem sys;
    algo::Options options;
};

// Throws ParseError (with 1-based line and column), DimensionMismatch,
// InvalidProblem, RankDeficientN or InvarianceViolation.
Problem parse_problem(const std::string& text, const std::string& name = "problem");
Problem load_problem(const std::string& path);

} // namespace tfl::cli
