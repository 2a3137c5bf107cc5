#include <polyext/tensor.hpp>

#include <cmath>
#include <stdexcept>

namespace polyext {

DeformationGradient::DeformationGradient(Matrix entries)
    : m_entries(std::move(entries)) {
    if (m_entries.rows() != m_entries.cols() || m_entries.rows() < 2)
        throw std::invalid_argument("DeformationGradient: expected a square matrix of size >= 2");
    m_det = determinant(m_entries);
    if (!(m_det > 0.0))
        throw std::domain_error("DeformationGradient: det F <= 0 (outside GL+(n))");
}

SingularSpectrum svd(const DeformationGradient &F) {
    if (F.det() < 1e-300)
        throw std::domain_error("svd: F numerically singular (det below 1e-300)");

    Eigen::JacobiSVD<Matrix> dec(F.matrix(), Eigen::ComputeFullU | Eigen::ComputeFullV);
    SingularSpectrum s{dec.matrixU(), dec.singularValues(), dec.matrixV()};

    // det F > 0 and sigma_i > 0 force det(left) * det(right) = +1; when both
    // are -1, flipping the last column of each keeps the product U S V^T.
    if (determinant(s.left) < 0.0) {
        const int last = F.dim() - 1;
        s.left.col(last) = -s.left.col(last);
        s.right.col(last) = -s.right.col(last);
    }
    return s;
}

Vector singular_values(const Matrix &X) {
    Eigen::JacobiSVD<Matrix> dec(X);
    return dec.singularValues();
}

Matrix stretch_tensor(const DeformationGradient &F) {
    const SingularSpectrum s = svd(F);
    Matrix U = s.right * s.sigma.asDiagonal() * s.right.transpose();
    return 0.5 * (U + U.transpose());
}

Matrix log_stretch(const DeformationGradient &F) {
    const SingularSpectrum s = svd(F);
    Vector lg = s.sigma.array().log();
    Matrix L = s.right * lg.asDiagonal() * s.right.transpose();
    return 0.5 * (L + L.transpose());
}

Matrix deviatoric(const Matrix &X) {
    const double n = static_cast<double>(X.rows());
    return X - (X.trace() / n) * Matrix::Identity(X.rows(), X.cols());
}

double frobenius_norm(const Matrix &X) { return X.norm(); }

double trace(const Matrix &X) { return X.trace(); }

double determinant(const Matrix &X) {
    const auto n = X.rows();
    if (n == 2)
        return X(0, 0) * X(1, 1) - X(0, 1) * X(1, 0);
    if (n == 3)
        return X(0, 0) * (X(1, 1) * X(2, 2) - X(1, 2) * X(2, 1))
             - X(0, 1) * (X(1, 0) * X(2, 2) - X(1, 2) * X(2, 0))
             + X(0, 2) * (X(1, 0) * X(2, 1) - X(1, 1) * X(2, 0));
    return X.determinant();
}

} // namespace polyext
