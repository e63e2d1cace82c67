#pragma once

#include <Eigen/Dense>

namespace tfl::num {

using Eigen::MatrixXd;

// Singular values below kRankTol * max(sigma_max, 1) count as zero.
inline constexpr double kRankTol = 1e-9;

int rank(const MatrixXd& m, double tol = kRankTol);

MatrixXd stack(const MatrixXd& top, const MatrixXd& bottom);

// Row basis in reduced echelon form; pivots taken column by column in
// ascending order, largest magnitude first.
MatrixXd row_basis(const MatrixXd& m, double tol = kRankTol);

// dim(rowspace(a) ∩ rowspace(b)) = rank a + rank b - rank [a; b].
int intersection_dimension(const MatrixXd& a, const MatrixXd& b, double tol = kRankTol);

// Orthonormal rows spanning rowspace(a) ∩ rowspace(b).
MatrixXd intersection_basis(const MatrixXd& a, const MatrixXd& b, double tol = kRankTol);

// Every row of x lies in rowspace(y).
bool rows_contained(const MatrixXd& x, const MatrixXd& y, double tol = kRankTol);

// Orthonormal basis (rows) of the annihilator of rowspace(m) in R^cols.
MatrixXd annihilator(const MatrixXd& m, Eigen::Index cols, double tol = kRankTol);

} // namespace tfl::num
