// Dense complex linear algebra with deterministic, tolerance-aware
// decompositions. Everything downstream (states, POVMs, witnesses) builds
// on these primitives.

#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace uqsd {

using cdouble = std::complex<double>;
using CMatrix = Eigen::Matrix<cdouble, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using CVector = Eigen::Matrix<cdouble, Eigen::Dynamic, 1>;
using RVector = Eigen::VectorXd;

// Default tolerances shared across modules.
inline constexpr double kTolRank = 1e-10;
inline constexpr double kTolProduct = 1e-8;
inline constexpr double kTolDetect = 1e-8;

struct HermitianEigenResult {
    RVector eigenvalues;   // ascending
    CMatrix eigenvectors;  // orthonormal columns, phase-fixed
};

struct SvdResult {
    CMatrix u;
    RVector singular_values;  // non-negative, descending
    CMatrix v;                // a = u * diag(s) * v.adjoint()
};

bool is_finite(const CMatrix& a);
double frobenius_norm(const CMatrix& a);
bool is_hermitian(const CMatrix& a, double tol = kTolRank);

// Rotates v so its largest-magnitude component is real positive
// (lowest index wins ties). No-op on the zero vector.
void fix_phase(CVector& v);

// Eigendecomposition of a Hermitian matrix. Throws std::invalid_argument on
// non-square or non-Hermitian input. Deterministic for identical input bits;
// eigenvector phases fixed by fix_phase.
HermitianEigenResult eigh(const CMatrix& a);

// Thin SVD of a rectangular matrix, deterministic, column phases fixed on u
// with the matching rotation applied to v.
SvdResult svd(const CMatrix& a);

// Count of singular values above tol_rank * s_max; 0 when s_max == 0.
int numerical_rank(const RVector& singular_values_desc, double tol_rank = kTolRank);

double max_eigenvalue(const CMatrix& hermitian);

// Principal square root of a PSD matrix (negative eigenvalues clamped to 0).
CMatrix hermitian_sqrt(const CMatrix& psd);

CMatrix kron(const CMatrix& a, const CMatrix& b);
CVector kron(const CVector& a, const CVector& b);
CMatrix kron_all(const std::vector<CMatrix>& factors);
CVector kron_all(const std::vector<CVector>& factors);

}  // namespace uqsd
