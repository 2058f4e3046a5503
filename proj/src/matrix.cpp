#include "covsel/matrix.hpp"

#include <cmath>
#include <stdexcept>

namespace covsel {

SymMat::SymMat(Mat a) : m_(std::move(a)) {
    if (m_.rows() < 1 || m_.rows() != m_.cols()) {
        throw std::invalid_argument("SymMat requires a square matrix");
    }
    if (!m_.allFinite()) {
        throw std::invalid_argument("SymMat entries must be finite");
    }
    const double scale = 1.0 + m_.cwiseAbs().maxCoeff();
    const double skew = (m_ - m_.transpose()).cwiseAbs().maxCoeff();
    if (skew > 1e-10 * scale) {
        throw std::invalid_argument("SymMat: matrix is not symmetric");
    }
}

Projector::Projector(Mat p) {
    SymMat checked(std::move(p));  // symmetry + squareness
    m_ = checked.mat();
    const Index d = m_.rows();
    if ((m_ * m_ - m_).norm() > 1e-8 * static_cast<double>(d)) {
        throw std::invalid_argument("Projector: matrix is not idempotent");
    }
    rank_ = static_cast<Index>(std::llround(m_.trace()));
    if (rank_ < 0 || rank_ > d) {
        throw std::invalid_argument("Projector: trace outside [0, dim]");
    }
}

Vec vec(const Mat& a) {
    return Eigen::Map<const Vec>(a.data(), a.size());
}

Mat unvec(const Vec& v, Index rows, Index cols) {
    if (rows < 1 || cols < 1 || v.size() != rows * cols) {
        throw std::invalid_argument("bad unvec shape");
    }
    return Eigen::Map<const Mat>(v.data(), rows, cols);
}

Mat kron(const Mat& a, const Mat& b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Index i = 0; i < a.rows(); ++i) {
        for (Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

double frobenius_inner(const Mat& a, const Mat& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw std::invalid_argument("frobenius_inner: shape mismatch");
    }
    return a.cwiseProduct(b).sum();
}

Mat pseudo_inverse(const Mat& a, double rtol) {
    if (rtol <= 0.0) {
        rtol = 1e-12 * static_cast<double>(std::max(a.rows(), a.cols()));
    }
    Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.info() != Eigen::Success) {
        throw std::runtime_error("decomposition failed");
    }
    const Vec& s = svd.singularValues();
    const double cutoff = s.size() > 0 ? rtol * s(0) : 0.0;
    Vec inv = Vec::Zero(s.size());
    for (Index i = 0; i < s.size(); ++i) {
        if (s(i) > cutoff) inv(i) = 1.0 / s(i);
    }
    return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

Projector projector(const Mat& g, double rtol) {
    if (g.rows() < 1 || g.cols() < 1) {
        throw std::invalid_argument("projector: empty design matrix");
    }
    if (rtol <= 0.0) {
        rtol = 1e-12 * static_cast<double>(std::max(g.rows(), g.cols()));
    }
    // P = U_r U_r^T from the SVD of G: same column space, better conditioned
    // than forming G (G^T G)^- G^T explicitly.
    Eigen::JacobiSVD<Mat> svd(g, Eigen::ComputeThinU);
    if (svd.info() != Eigen::Success) {
        throw std::runtime_error("decomposition failed");
    }
    const Vec& s = svd.singularValues();
    const double cutoff = s.size() > 0 ? rtol * s(0) : 0.0;
    Index r = 0;
    while (r < s.size() && s(r) > cutoff) ++r;
    Mat p;
    if (r == 0) {
        p = Mat::Zero(g.rows(), g.rows());
    } else {
        const Mat ur = svd.matrixU().leftCols(r);
        p = ur * ur.transpose();
        p = 0.5 * (p + p.transpose());  // wash out round-off asymmetry
    }
    return Projector(std::move(p));
}

SymMat project_to_model_space(const Mat& a, const Projector& p) {
    if (a.rows() != p.dim() || a.cols() != p.dim()) {
        throw std::invalid_argument("project_to_model_space: dimension mismatch");
    }
    const Mat sym = 0.5 * (a + a.transpose());
    Mat out = p.mat() * sym * p.mat();
    out = 0.5 * (out + out.transpose());
    return SymMat(std::move(out));
}

}  // namespace covsel
