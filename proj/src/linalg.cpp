#include "uqsd/linalg.hpp"

#include <cmath>
#include <stdexcept>

namespace uqsd {

bool is_finite(const CMatrix& a) {
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            if (!std::isfinite(a(i, j).real()) || !std::isfinite(a(i, j).imag())) return false;
    return true;
}

double frobenius_norm(const CMatrix& a) { return a.norm(); }

bool is_hermitian(const CMatrix& a, double tol) {
    if (a.rows() != a.cols()) return false;
    double scale = std::max(1.0, a.norm());
    return (a - a.adjoint()).norm() <= tol * scale;
}

void fix_phase(CVector& v) {
    Eigen::Index best = 0;
    double best_mag = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        double m = std::abs(v(i));
        if (m > best_mag) {
            best_mag = m;
            best = i;
        }
    }
    if (best_mag < 1e-300) return;
    v *= std::conj(v(best)) / best_mag;
}

HermitianEigenResult eigh(const CMatrix& a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("eigh: matrix must be square");
    if (!is_finite(a)) throw std::invalid_argument("eigh: non-finite entries");
    if (!is_hermitian(a)) throw std::invalid_argument("eigh: matrix not Hermitian within tolerance");

    Eigen::SelfAdjointEigenSolver<CMatrix> solver(a);
    if (solver.info() != Eigen::Success) throw std::runtime_error("eigh: decomposition failed");

    HermitianEigenResult res{solver.eigenvalues(), solver.eigenvectors()};
    for (Eigen::Index k = 0; k < res.eigenvectors.cols(); ++k) {
        CVector col = res.eigenvectors.col(k);
        fix_phase(col);
        res.eigenvectors.col(k) = col;
    }
    return res;
}

SvdResult svd(const CMatrix& a) {
    if (!is_finite(a)) throw std::invalid_argument("svd: non-finite entries");

    Eigen::JacobiSVD<CMatrix> solver(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    SvdResult res{solver.matrixU(), solver.singularValues(), solver.matrixV()};
    for (Eigen::Index k = 0; k < res.u.cols(); ++k) {
        // Same rotation on both sides keeps u * diag(s) * v^dagger unchanged.
        Eigen::Index best = 0;
        double best_mag = 0.0;
        for (Eigen::Index i = 0; i < res.u.rows(); ++i) {
            double m = std::abs(res.u(i, k));
            if (m > best_mag) {
                best_mag = m;
                best = i;
            }
        }
        if (best_mag < 1e-300) continue;
        cdouble phase = std::conj(res.u(best, k)) / best_mag;
        res.u.col(k) *= phase;
        res.v.col(k) *= phase;
    }
    return res;
}

int numerical_rank(const RVector& singular_values_desc, double tol_rank) {
    if (singular_values_desc.size() == 0) return 0;
    double s_max = singular_values_desc(0);
    if (s_max <= 0.0) return 0;
    int rank = 0;
    for (Eigen::Index i = 0; i < singular_values_desc.size(); ++i)
        if (singular_values_desc(i) > tol_rank * s_max) ++rank;
    return rank;
}

double max_eigenvalue(const CMatrix& hermitian) {
    auto res = eigh(hermitian);
    return res.eigenvalues(res.eigenvalues.size() - 1);
}

CMatrix hermitian_sqrt(const CMatrix& psd) {
    auto res = eigh(psd);
    RVector roots = res.eigenvalues.cwiseMax(0.0).cwiseSqrt();
    return res.eigenvectors * roots.asDiagonal() * res.eigenvectors.adjoint();
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

CVector kron(const CVector& a, const CVector& b) {
    CVector out(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
    return out;
}

CMatrix kron_all(const std::vector<CMatrix>& factors) {
    if (factors.empty()) throw std::invalid_argument("kron_all: empty factor list");
    CMatrix out = factors.front();
    for (std::size_t k = 1; k < factors.size(); ++k) out = kron(out, factors[k]);
    return out;
}

CVector kron_all(const std::vector<CVector>& factors) {
    if (factors.empty()) throw std::invalid_argument("kron_all: empty factor list");
    CVector out = factors.front();
    for (std::size_t k = 1; k < factors.size(); ++k) out = kron(out, factors[k]);
    return out;
}

}  // namespace uqsd
