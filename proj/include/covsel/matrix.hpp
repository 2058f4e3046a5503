#pragma once

#include <Eigen/Dense>

namespace covsel {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using Index = Eigen::Index;

/// Square matrix checked to be symmetric up to floating-point noise:
/// max |A_ij - A_ji| <= 1e-10 * (1 + max |A_ij|).
class SymMat {
public:
    explicit SymMat(Mat a);

    const Mat& mat() const { return m_; }
    Index dim() const { return m_.rows(); }
    double operator()(Index i, Index j) const { return m_(i, j); }

private:
    Mat m_;
};

/// Orthogonal projection matrix with its rank. Construction checks symmetry
/// and idempotency (||P^2 - P||_F <= 1e-8 * dim) and sets rank = round(tr P).
class Projector {
public:
    explicit Projector(Mat p);

    const Mat& mat() const { return m_; }
    Index dim() const { return m_.rows(); }
    Index rank() const { return rank_; }

private:
    Mat m_;
    Index rank_;
};

/// Column-major stacking of A into a vector; preserves the Frobenius norm.
Vec vec(const Mat& a);

/// Inverse of vec. Throws "bad unvec shape" if sizes do not match.
Mat unvec(const Vec& v, Index rows, Index cols);

/// Kronecker product, the (i,j) block of the result being a_ij * B.
Mat kron(const Mat& a, const Mat& b);

/// tr(A B^T). Throws on shape mismatch.
double frobenius_inner(const Mat& a, const Mat& b);

inline double frobenius_sq(const Mat& a) { return a.squaredNorm(); }

/// Moore-Penrose inverse via SVD. Singular values below rtol * sigma_max are
/// treated as zero; rtol < 0 selects the default 1e-12 * max(rows, cols).
Mat pseudo_inverse(const Mat& a, double rtol = -1.0);

/// Orthogonal projector onto the column space of G: G (G^T G)^- G^T.
/// Independent of the choice of generalized inverse.
Projector projector(const Mat& g, double rtol = -1.0);

/// Closest matrix to A in {G Psi G^T : Psi symmetric}: P ((A + A^T)/2) P.
/// Maps non-negative definite A to a non-negative definite result.
SymMat project_to_model_space(const Mat& a, const Projector& p);

}  // namespace covsel
