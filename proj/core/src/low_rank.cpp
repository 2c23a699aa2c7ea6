#include "omcal/solver.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace omcal {

Matrix procrustes(const Matrix& W, Diagnostics* diag) {
    if (W.rows() < W.cols())
        throw Error(ErrorKind::InvalidParameter, "procrustes: W is " + std::to_string(W.rows()) + "x" +
                                                     std::to_string(W.cols()) + "; need rows >= cols");
    Eigen::JacobiSVD<Matrix> svd(W, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector& sigma = svd.singularValues();
    if (sigma.size() > 0 && sigma(sigma.size() - 1) < 1e-12)
        warn(diag, "RankDeficientW: smallest singular value of Z^T F below 1e-12; G is not unique");
    return svd.matrixU() * svd.matrixV().transpose();
}

Matrix update_G(const Matrix& Z, const Matrix& F, Diagnostics* diag) {
    return procrustes(Z.transpose() * F, diag);
}

Matrix svt(const Matrix& M, double tau) {
    if (tau < 0.0) throw Error(ErrorKind::InvalidParameter, "svt: tau must be >= 0");
    if (tau == 0.0 || M.size() == 0) return M;

    const bool tall = M.rows() >= M.cols();
    const Matrix gram = tall ? Matrix(M.transpose() * M) : Matrix(M * M.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
    const Vector& lambda = eig.eigenvalues();
    const Matrix& basis = eig.eigenvectors();

    // M = P S Q^T, so P shrink(S) Q^T = M Q diag(shrink/s) Q^T for tall M.
    Vector scale(lambda.size());
    for (Index i = 0; i < lambda.size(); ++i) {
        const double s = std::sqrt(std::max(lambda(i), 0.0));
        scale(i) = s > tau ? (s - tau) / s : 0.0;
    }
    const Matrix shrink = basis * scale.asDiagonal() * basis.transpose();
    return tall ? Matrix(M * shrink) : Matrix(shrink * M);
}

namespace {

// R factor of a tall matrix, reduced block by block so each Householder pass
// stays in cache: the R factors of row blocks are stacked and factored again.
// Same singular values as A, with the backward error of a plain QR.
Matrix tall_r_factor(const Matrix& A) {
    const Index rows = A.rows(), cols = A.cols();
    const Index block = std::max<Index>(4 * cols, 32768 / std::max<Index>(cols, 1));
    if (rows <= 2 * block) {
        Eigen::HouseholderQR<Matrix> qr(A);
        return qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
    }
    const Index blocks = (rows + block - 1) / block;
    Matrix stacked(blocks * cols, cols);
    for (Index b = 0; b < blocks; ++b) {
        const Index start = b * block, len = std::min(block, rows - start);
        if (len >= cols) {
            Eigen::HouseholderQR<Matrix> qr(A.middleRows(start, len));
            stacked.middleRows(b * cols, cols) = qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
        } else {
            stacked.middleRows(b * cols, cols).setZero();
            stacked.middleRows(b * cols, len) = A.middleRows(start, len);
        }
    }
    return tall_r_factor(stacked);
}

} // namespace

Vector singular_values(const Matrix& A) {
    if (A.size() == 0) return Vector();
    const bool tall = A.rows() >= A.cols();
    Eigen::JacobiSVD<Matrix> svd(tall_r_factor(tall ? A : Matrix(A.transpose())));
    return svd.singularValues();
}

double nuclear_norm(const Matrix& A) { return singular_values(A).sum(); }

} // namespace omcal
