#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <exception>
#include <functional>
#include <vector>

#include "tfl/ext/linalg.hpp"

namespace tfl::par {

enum class Mode { Parallel, Serial };

// Runs fn(i) for i in [0, n). In parallel mode iterations are spread over
// OpenMP threads; an exception from any iteration is rethrown after the loop,
// the one with the lowest index first, so failures are deterministic.
void for_each_index(std::size_t n, const std::function<void(std::size_t)>& fn, Mode mode = Mode::Parallel);

// Values of a symbolic matrix with `cols` columns at every point.
std::vector<Eigen::MatrixXd> evaluate_all(const ext::Matrix& m, std::size_t cols, const std::vector<sym::Point>& pts,
                                          Mode mode = Mode::Parallel);

// Numeric rank of each matrix.
std::vector<int> ranks(const std::vector<Eigen::MatrixXd>& ms, Mode mode = Mode::Parallel);

// dim(rowspace a[i] ∩ rowspace b[i]) for each pair.
std::vector<int> intersection_dimensions(const std::vector<Eigen::MatrixXd>& a, const std::vector<Eigen::MatrixXd>& b,
                                         Mode mode = Mode::Parallel);

} // namespace tfl::par
