#include "tfl/par/pointwise.hpp"

#include <omp.h>

#include "tfl/error.hpp"
#include "tfl/num/dense.hpp"

namespace tfl::par {

void for_each_index(std::size_t n, const std::function<void(std::size_t)>& fn, Mode mode) {
    if (mode == Mode::Serial) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::exception_ptr> errors(n);
    const auto count = static_cast<long>(n);
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < count; ++i) {
        try {
            fn(static_cast<std::size_t>(i));
        } catch (...) {
            errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

std::vector<Eigen::MatrixXd> evaluate_all(const ext::Matrix& m, std::size_t cols, const std::vector<sym::Point>& pts,
                                          Mode mode) {
    for (const auto& r : m)
        if (r.size() != cols) throw DimensionMismatch("matrix row has " + std::to_string(r.size()) + " entries, expected " + std::to_string(cols));
    std::vector<Eigen::MatrixXd> out(pts.size());
    for_each_index(pts.size(), [&](std::size_t k) {
        Eigen::MatrixXd v = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m.size()), static_cast<Eigen::Index>(cols));
        for (std::size_t i = 0; i < m.size(); ++i)
            for (std::size_t j = 0; j < cols; ++j)
                if (!m[i][j].is_zero()) v(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = sym::eval_at(m[i][j], pts[k]);
        out[k] = std::move(v);
    }, mode);
    return out;
}

std::vector<int> ranks(const std::vector<Eigen::MatrixXd>& ms, Mode mode) {
    std::vector<int> out(ms.size());
    for_each_index(ms.size(), [&](std::size_t k) { out[k] = num::rank(ms[k]); }, mode);
    return out;
}

std::vector<int> intersection_dimensions(const std::vector<Eigen::MatrixXd>& a, const std::vector<Eigen::MatrixXd>& b,
                                         Mode mode) {
    if (a.size() != b.size()) throw DimensionMismatch("intersection needs paired matrices");
    std::vector<int> out(a.size());
    for_each_index(a.size(), [&](std::size_t k) { out[k] = num::intersection_dimension(a[k], b[k]); }, mode);
    return out;
}

} // namespace tfl::par
