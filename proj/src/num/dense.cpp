#include "tfl/num/dense.hpp"

#include <algorithm>

namespace tfl::num {

namespace {

double threshold(const Eigen::VectorXd& sv, double tol) {
    double top = sv.size() ? sv(0) : 0.0;
    return tol * std::max(top, 1.0);
}

} // namespace

int rank(const MatrixXd& m, double tol) {
    if (m.rows() == 0 || m.cols() == 0) return 0;
    Eigen::JacobiSVD<MatrixXd> svd(m);
    const auto& sv = svd.singularValues();
    double th = threshold(sv, tol);
    int r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > th) ++r;
    return r;
}

MatrixXd stack(const MatrixXd& top, const MatrixXd& bottom) {
    Eigen::Index cols = top.rows() ? top.cols() : bottom.cols();
    MatrixXd s(top.rows() + bottom.rows(), cols);
    if (top.rows()) s.topRows(top.rows()) = top;
    if (bottom.rows()) s.bottomRows(bottom.rows()) = bottom;
    return s;
}

MatrixXd row_basis(const MatrixXd& m, double tol) {
    if (m.rows() == 0) return MatrixXd(0, m.cols());
    MatrixXd a = m;
    double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    double th = tol * scale;
    Eigen::Index r = 0;
    for (Eigen::Index c = 0; c < a.cols() && r < a.rows(); ++c) {
        Eigen::Index best = r;
        for (Eigen::Index i = r + 1; i < a.rows(); ++i)
            if (std::abs(a(i, c)) > std::abs(a(best, c))) best = i;
        if (std::abs(a(best, c)) <= th) continue;
        a.row(r).swap(a.row(best));
        a.row(r) /= a(r, c);
        for (Eigen::Index i = 0; i < a.rows(); ++i)
            if (i != r && a(i, c) != 0.0) a.row(i) -= a(i, c) * a.row(r);
        ++r;
    }
    MatrixXd out = a.topRows(r);
    for (Eigen::Index i = 0; i < out.rows(); ++i)
        for (Eigen::Index j = 0; j < out.cols(); ++j)
            if (std::abs(out(i, j)) <= th) out(i, j) = 0.0;
    return out;
}

int intersection_dimension(const MatrixXd& a, const MatrixXd& b, double tol) {
    return rank(a, tol) + rank(b, tol) - rank(stack(a, b), tol);
}

MatrixXd intersection_basis(const MatrixXd& a, const MatrixXd& b, double tol) {
    Eigen::Index cols = a.rows() ? a.cols() : b.cols();
    if (a.rows() == 0 || b.rows() == 0) return MatrixXd(0, cols);
    // x = a^T s = b^T w  <=>  [a^T, -b^T] (s; w) = 0
    MatrixXd m(cols, a.rows() + b.rows());
    m.leftCols(a.rows()) = a.transpose();
    m.rightCols(b.rows()) = -b.transpose();
    Eigen::JacobiSVD<MatrixXd> svd(m, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    double th = threshold(sv, tol);
    Eigen::Index nz = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > th) ++nz;
    MatrixXd null = svd.matrixV().rightCols(m.cols() - nz);
    MatrixXd x = (a.transpose() * null.topRows(a.rows())).transpose();
    // Orthonormalize the images.
    if (x.rows() == 0) return MatrixXd(0, cols);
    Eigen::JacobiSVD<MatrixXd> sx(x, Eigen::ComputeFullV);
    int r = rank(x, tol);
    return sx.matrixV().leftCols(r).transpose();
}

bool rows_contained(const MatrixXd& x, const MatrixXd& y, double tol) {
    if (x.rows() == 0) return true;
    return rank(stack(y, x), tol) == rank(y, tol);
}

MatrixXd annihilator(const MatrixXd& m, Eigen::Index cols, double tol) {
    if (m.rows() == 0) return MatrixXd::Identity(cols, cols);
    Eigen::JacobiSVD<MatrixXd> svd(m, Eigen::ComputeFullV);
    int r = rank(m, tol);
    return svd.matrixV().rightCols(cols - r).transpose();
}

} // namespace tfl::num
