////////////////////////////////////////////////////////////////////////////////
// tensor.hpp
////////////////////////////////////////////////////////////////////////////////
/*! @file
//  Small dense matrix algebra on n x n deformation gradients (n = 2, 3 are the
//  supported dimensions; generic n works through the same code paths):
//  rotation-valued SVD, stretch tensor, principal matrix logarithm of the
//  stretch, deviatoric part, and the usual scalar invariants.
*///////////////////////////////////////////////////////////////////////////////
#pragma once

#include <Eigen/Dense>

namespace polyext {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// F in GL+(n). Construction rejects det F <= 0 (and det below the 1e-300
// numerical-singularity guard) with std::domain_error.
class DeformationGradient {
public:
    explicit DeformationGradient(Matrix entries);

    const Matrix &matrix() const { return m_entries; }
    int dim() const { return static_cast<int>(m_entries.rows()); }
    double det() const { return m_det; }

private:
    Matrix m_entries;
    double m_det;
};

// F = left * diag(sigma) * right^T with left, right in SO(n) and
// sigma[0] >= sigma[1] >= ... > 0.
struct SingularSpectrum {
    Matrix left;
    Vector sigma;
    Matrix right;

    Matrix reconstruct() const { return left * sigma.asDiagonal() * right.transpose(); }
};

// Rotation-valued SVD of F. Deterministic for fixed input.
SingularSpectrum svd(const DeformationGradient &F);

// Singular values (descending) of an arbitrary square matrix; no GL+ gate.
Vector singular_values(const Matrix &X);

// U = sqrt(F^T F), symmetric positive definite.
Matrix stretch_tensor(const DeformationGradient &F);

// log U, the principal matrix logarithm of the stretch tensor.
Matrix log_stretch(const DeformationGradient &F);

// X - (tr X / n) * I.
Matrix deviatoric(const Matrix &X);

double frobenius_norm(const Matrix &X);
double trace(const Matrix &X);

// Closed form for n in {2, 3}; LU fallback otherwise.
double determinant(const Matrix &X);

} // namespace polyext
