#pragma once

#include <optional>
#include <vector>

#include "tfl/sym/expr.hpp"

namespace tfl::ext {

using sym::Expr;
using sym::Point;
using Row = std::vector<Expr>;
using Matrix = std::vector<Row>;

// Value class of an expression at a point.
enum class AtPoint { Unit, Vanishes, Pole };

// Exact when the point is exact: substitutes rationals and folds; otherwise
// numeric with a 1e-12 threshold.
AtPoint classify_at(const Expr& e, const Point& p);
bool is_unit_at(const Expr& e, const Point& p);
bool is_regular_at(const Expr& e, const Point& p);
bool row_regular_at(const Row& r, const Point& p);

struct Echelon {
    Matrix rows;                  // pivot entries equal 1, pivot columns cleared elsewhere
    std::vector<std::size_t> pivots;
    bool inconclusive = false;    // some pivot candidate had an inconclusive zero test
};

// Reduced row echelon form over the function field. With `local` set, pivots
// that are units at that point are preferred; otherwise the lowest column
// whose entry is NonZero is used.
Echelon rref(Matrix m, const Point* local = nullptr);

// RREF with the given pivot columns, in order. Returns nullopt when some
// column has no usable pivot.
std::optional<Echelon> rref_with_pivots(Matrix m, const std::vector<std::size_t>& cols);

// Basis of {v : m v = 0} over the function field (column count `cols`).
Matrix nullspace(const Matrix& m, std::size_t cols, const Point* local, bool* inconclusive = nullptr);

// Multiplies out denominators and divides by the gcd of the row entries, then
// scales to integer coefficients with positive leading coefficient in the
// entry `sign_col` (default: first nonzero entry). Zero rows stay zero.
Row primitive_row(const Row& r, std::optional<std::size_t> sign_col = std::nullopt);

bool row_is_zero(const Row& r);

// Numeric evaluation of a matrix at a point.
std::vector<std::vector<double>> evaluate(const Matrix& m, const Point& p);

} // namespace tfl::ext
