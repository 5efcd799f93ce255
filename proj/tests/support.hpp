// Shared fixtures for the test suites: canonical states, independent
// orthonormalization and trace oracles, and seeded ensemble generators.

#pragma once

#include <vector>

#include "uqsd/discrimination.hpp"
#include "uqsd/rng.hpp"
#include "uqsd/states.hpp"

namespace testsupport {

using namespace uqsd;

inline CVector basis_vector(int d, int i) {
    CVector v = CVector::Zero(d);
    v(i) = 1.0;
    return v;
}

inline CVector ket_plus() {
    CVector v(2);
    v << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    return v;
}

inline CVector ket_minus() {
    CVector v(2);
    v << 1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0);
    return v;
}

// 0: (|00>+|11>)/sqrt2, 1: (|00>-|11>)/sqrt2, 2: (|01>+|10>)/sqrt2, 3: (|01>-|10>)/sqrt2
inline CVector bell(int which) {
    const double s = 1.0 / std::sqrt(2.0);
    CVector v = CVector::Zero(4);
    switch (which % 4) {
        case 0: v(0) = s; v(3) = s; break;
        case 1: v(0) = s; v(3) = -s; break;
        case 2: v(1) = s; v(2) = s; break;
        default: v(1) = s; v(2) = -s; break;
    }
    return v;
}

// Independent orthonormalization oracle (classical Gram-Schmidt, no SVD/QR).
inline std::vector<CVector> gram_schmidt(const std::vector<CVector>& vs, double tol = 1e-10) {
    std::vector<CVector> out;
    for (CVector v : vs) {
        for (const auto& u : out) v -= u * u.dot(v);
        double n = v.norm();
        if (n > tol) out.push_back(v / n);
    }
    return out;
}

inline CMatrix projector_from(const std::vector<CVector>& basis, int d) {
    CMatrix p = CMatrix::Zero(d, d);
    for (const auto& u : basis) p += u * u.adjoint();
    return p;
}

inline CMatrix haar_unitary(int d, Rng& rng) {
    CMatrix g(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) g(i, j) = rng.complex_gaussian();
    Eigen::HouseholderQR<CMatrix> qr(g);
    CMatrix q = qr.householderQ() * CMatrix::Identity(d, d);
    CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int k = 0; k < d; ++k) {
        cdouble rkk = r(k, k);
        if (std::abs(rkk) > 1e-300) q.col(k) *= rkk / std::abs(rkk);
    }
    return q;
}

// Product basis rotated by independent per-party Haar unitaries; the flat
// index of each basis vector follows the row-major party convention.
inline std::vector<CVector> rotated_product_basis(const SpaceShape& shape, Rng& rng) {
    std::vector<CMatrix> us;
    for (int d : shape.dims) us.push_back(haar_unitary(d, rng));
    std::vector<CVector> out;
    for (int i = 0; i < shape.total; ++i) {
        auto multi = shape.multi_index(i);
        std::vector<CVector> factors;
        for (int j = 0; j < shape.parties(); ++j) factors.push_back(us[j].col(multi[j]));
        out.push_back(kron_all(factors));
    }
    return out;
}

inline ProductVector random_product_vector(const SpaceShape& shape, Rng& rng) {
    std::vector<CVector> factors;
    for (int d : shape.dims) factors.push_back(rng.haar_vector(d));
    return ProductVector::make(shape, std::move(factors));
}

inline Subspace random_subspace(const SpaceShape& shape, int rank, Rng& rng) {
    CMatrix u = haar_unitary(shape.total, rng);
    return Subspace::from_orthonormal(shape, u.leftCols(rank));
}

// Mixed-state ensemble from a rotated product basis: the basis indices are
// split into `groups` consecutive blocks and each state is the uniform
// mixture over one block. Always LOCC-discriminable.
inline StateEnsemble grouped_mixture_ensemble(const SpaceShape& shape, int groups, Rng& rng) {
    auto basis = rotated_product_basis(shape, rng);
    std::vector<DensityMatrix> states;
    const int d = shape.total;
    int start = 0;
    for (int g = 0; g < groups; ++g) {
        int len = d / groups + (g < d % groups ? 1 : 0);
        CMatrix rho = CMatrix::Zero(d, d);
        for (int k = start; k < start + len; ++k) rho += basis[k] * basis[k].adjoint() / double(len);
        states.push_back(DensityMatrix::from_matrix(shape, rho));
        start += len;
    }
    return StateEnsemble::make(shape, std::move(states));
}

// Direct Born-rule trace oracle.
inline double trace_prob(const CMatrix& rho, const CMatrix& element) {
    return (rho * element).trace().real();
}

}  // namespace testsupport
