#include "uqsd/states.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace uqsd {

SpaceShape SpaceShape::of(std::vector<int> dims) {
    if (dims.empty()) throw std::invalid_argument("SpaceShape: need at least one party");
    int total = 1;
    for (int d : dims) {
        if (d < 2) throw std::invalid_argument("SpaceShape: every party dimension must be >= 2");
        total *= d;
    }
    SpaceShape s;
    s.dims = std::move(dims);
    s.total = total;
    return s;
}

int SpaceShape::flat_index(std::span<const int> multi) const {
    if (multi.size() != dims.size()) throw std::invalid_argument("flat_index: wrong arity");
    int idx = 0;
    for (std::size_t j = 0; j < dims.size(); ++j) {
        if (multi[j] < 0 || multi[j] >= dims[j]) throw std::out_of_range("flat_index: index out of range");
        idx = idx * dims[j] + multi[j];
    }
    return idx;
}

std::vector<int> SpaceShape::multi_index(int flat) const {
    if (flat < 0 || flat >= total) throw std::out_of_range("multi_index: out of range");
    std::vector<int> multi(dims.size());
    for (int j = static_cast<int>(dims.size()) - 1; j >= 0; --j) {
        multi[j] = flat % dims[j];
        flat /= dims[j];
    }
    return multi;
}

DensityMatrix DensityMatrix::from_matrix(SpaceShape shape, CMatrix m, bool allow_unnormalized) {
    if (m.rows() != shape.total || m.cols() != shape.total)
        throw std::invalid_argument("DensityMatrix: matrix size does not match shape");
    if (!is_finite(m)) throw std::invalid_argument("DensityMatrix: non-finite entries");
    if (!is_hermitian(m)) throw std::invalid_argument("DensityMatrix: not Hermitian within tolerance");

    auto eig = eigh(CMatrix((m + m.adjoint()) / 2.0));
    if (eig.eigenvalues(0) < -kTolRank)
        throw std::invalid_argument("DensityMatrix: negative eigenvalue beyond tolerance");
    double tr = m.trace().real();
    if (!allow_unnormalized && std::abs(tr - 1.0) > kTolRank)
        throw std::invalid_argument("DensityMatrix: trace differs from 1; pass the unnormalized flag");

    DensityMatrix rho;
    rho.shape = std::move(shape);
    rho.matrix = std::move(m);
    rho.unnormalized = allow_unnormalized;
    return rho;
}

DensityMatrix DensityMatrix::pure(SpaceShape shape, const CVector& v) {
    if (v.size() != shape.total) throw std::invalid_argument("DensityMatrix::pure: vector size mismatch");
    double n = v.norm();
    if (std::abs(n - 1.0) > 1e-6) throw std::invalid_argument("DensityMatrix::pure: vector not unit norm");
    CVector u = v / n;
    DensityMatrix rho;
    rho.shape = std::move(shape);
    rho.matrix = u * u.adjoint();
    return rho;
}

StateEnsemble StateEnsemble::make(SpaceShape shape, std::vector<DensityMatrix> states,
                                  std::vector<int> delta, std::vector<double> priors) {
    const int m = static_cast<int>(states.size());
    if (m < 2) throw std::invalid_argument("StateEnsemble: need at least two states");
    for (const auto& rho : states)
        if (!(rho.shape == shape)) throw std::invalid_argument("StateEnsemble: shape mismatch");

    if (delta.empty()) {
        delta.resize(m);
        std::iota(delta.begin(), delta.end(), 1);
    }
    std::sort(delta.begin(), delta.end());
    if (std::adjacent_find(delta.begin(), delta.end()) != delta.end())
        throw std::invalid_argument("StateEnsemble: duplicate indices in delta");
    if (delta.front() < 1 || delta.back() > m)
        throw std::invalid_argument("StateEnsemble: delta index out of range");

    if (!priors.empty()) {
        if (static_cast<int>(priors.size()) != m)
            throw std::invalid_argument("StateEnsemble: priors length mismatch");
        double sum = 0.0;
        for (double p : priors) {
            if (p < 0.0) throw std::invalid_argument("StateEnsemble: negative prior");
            sum += p;
        }
        if (std::abs(sum - 1.0) > kTolRank) throw std::invalid_argument("StateEnsemble: priors must sum to 1");
    }

    StateEnsemble e;
    e.shape = std::move(shape);
    e.states = std::move(states);
    e.delta = std::move(delta);
    e.priors = std::move(priors);
    return e;
}

bool StateEnsemble::in_delta(int mu) const {
    return std::binary_search(delta.begin(), delta.end(), mu);
}

double StateEnsemble::prior(int mu) const {
    if (mu < 1 || mu > count()) throw std::out_of_range("prior: index out of range");
    if (priors.empty()) return 1.0 / count();
    return priors[mu - 1];
}

StateEnsemble ensemble_from_vectors(const SpaceShape& shape, const std::vector<CVector>& vectors,
                                    std::vector<int> delta, std::vector<double> priors) {
    std::vector<DensityMatrix> states;
    states.reserve(vectors.size());
    for (const auto& v : vectors) states.push_back(DensityMatrix::pure(shape, v));
    return StateEnsemble::make(shape, std::move(states), std::move(delta), std::move(priors));
}

CMatrix Subspace::projector() const {
    if (dim() == 0) return CMatrix::Zero(shape.total, shape.total);
    return basis * basis.adjoint();
}

Subspace Subspace::from_orthonormal(SpaceShape shape, CMatrix basis) {
    if (basis.rows() != shape.total) throw std::invalid_argument("Subspace: basis row count mismatch");
    if (basis.cols() > shape.total) throw std::invalid_argument("Subspace: more columns than dimensions");
    if (basis.cols() > 0) {
        CMatrix gram = basis.adjoint() * basis;
        CMatrix eye = CMatrix::Identity(basis.cols(), basis.cols());
        if ((gram - eye).norm() > 1e-9) throw std::invalid_argument("Subspace: columns not orthonormal");
    }
    Subspace s;
    s.shape = std::move(shape);
    s.basis = std::move(basis);
    return s;
}

Subspace Subspace::from_spanning(SpaceShape shape, const std::vector<CVector>& vectors,
                                 double tol_rank) {
    if (vectors.empty()) return zero(std::move(shape));
    CMatrix stacked(shape.total, static_cast<Eigen::Index>(vectors.size()));
    for (std::size_t k = 0; k < vectors.size(); ++k) {
        if (vectors[k].size() != shape.total)
            throw std::invalid_argument("Subspace::from_spanning: vector size mismatch");
        stacked.col(static_cast<Eigen::Index>(k)) = vectors[k];
    }
    auto dec = svd(stacked);
    int rank = numerical_rank(dec.singular_values, tol_rank);
    Subspace s;
    s.shape = std::move(shape);
    s.basis = dec.u.leftCols(rank);
    return s;
}

Subspace Subspace::zero(SpaceShape shape) {
    Subspace s;
    s.basis = CMatrix::Zero(shape.total, 0);
    s.shape = std::move(shape);
    return s;
}

Subspace Subspace::full(SpaceShape shape) {
    Subspace s;
    s.basis = CMatrix::Identity(shape.total, shape.total);
    s.shape = std::move(shape);
    return s;
}

ProductVector ProductVector::make(SpaceShape shape, std::vector<CVector> factors) {
    if (static_cast<int>(factors.size()) != shape.parties())
        throw std::invalid_argument("ProductVector: one factor per party required");
    for (std::size_t j = 0; j < factors.size(); ++j) {
        if (factors[j].size() != shape.dims[j])
            throw std::invalid_argument("ProductVector: factor dimension mismatch");
        double n = factors[j].norm();
        if (std::abs(n - 1.0) > 1e-8) throw std::invalid_argument("ProductVector: factor not unit norm");
        factors[j] /= n;
    }
    ProductVector pv;
    pv.shape = std::move(shape);
    pv.factors = std::move(factors);
    return pv;
}

Subspace support(const DensityMatrix& rho, double tol_rank) {
    auto eig = eigh(rho.matrix);
    const Eigen::Index d = eig.eigenvalues.size();
    double lambda_max = eig.eigenvalues(d - 1);
    if (lambda_max <= 0.0) return Subspace::zero(rho.shape);

    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = d - 1; i >= 0; --i)
        if (eig.eigenvalues(i) > tol_rank * lambda_max) keep.push_back(i);

    CMatrix basis(d, static_cast<Eigen::Index>(keep.size()));
    for (std::size_t k = 0; k < keep.size(); ++k) basis.col(static_cast<Eigen::Index>(k)) = eig.eigenvectors.col(keep[k]);
    return Subspace::from_orthonormal(rho.shape, std::move(basis));
}

Subspace complement(const Subspace& s) {
    const int d = s.shape.total;
    const int r = s.dim();
    if (r == 0) return Subspace::full(s.shape);
    if (r == d) return Subspace::zero(s.shape);

    // Householder completion: the trailing columns of Q span the complement.
    Eigen::HouseholderQR<CMatrix> qr(s.basis);
    CMatrix q = qr.householderQ() * CMatrix::Identity(d, d);
    return Subspace::from_orthonormal(s.shape, q.rightCols(d - r));
}

CVector assemble(const ProductVector& pv) { return kron_all(pv.factors); }

std::optional<ProductVector> factorize_if_product(const CVector& v, const SpaceShape& shape,
                                                  double tol_product) {
    if (v.size() != shape.total) throw std::invalid_argument("factorize_if_product: size mismatch");
    if (std::abs(v.norm() - 1.0) > 1e-8) throw std::invalid_argument("factorize_if_product: vector not unit norm");

    const int n = shape.parties();
    std::vector<CVector> factors;
    factors.reserve(n);

    CVector cur = v;
    int rest_len = shape.total;
    for (int j = 0; j + 1 < n; ++j) {
        const int dj = shape.dims[j];
        rest_len /= dj;
        Eigen::Map<const CMatrix> reshaped(cur.data(), dj, rest_len);
        auto dec = svd(CMatrix(reshaped));
        if (dec.singular_values.size() > 1 && dec.singular_values(1) > tol_product) return std::nullopt;
        factors.push_back(dec.u.col(0));
        cur = dec.singular_values(0) * dec.v.col(0).conjugate();
    }
    cur /= cur.norm();
    factors.push_back(cur);

    auto pv = ProductVector::make(shape, std::move(factors));

    // Compare against v up to global phase.
    CVector asm_v = assemble(pv);
    cdouble overlap = asm_v.dot(v);  // <asm|v>
    cdouble phase = std::abs(overlap) > 1e-300 ? overlap / std::abs(overlap) : cdouble(1.0, 0.0);
    if ((asm_v * phase - v).norm() > 10.0 * tol_product) return std::nullopt;
    return pv;
}

CMatrix embed_at_party(const CMatrix& op, int party, const SpaceShape& shape) {
    if (party < 0 || party >= shape.parties()) throw std::out_of_range("embed_at_party: bad party");
    if (op.rows() != shape.dims[party] || op.cols() != shape.dims[party])
        throw std::invalid_argument("embed_at_party: operator dimension mismatch");
    std::vector<CMatrix> factors;
    factors.reserve(shape.parties());
    for (int j = 0; j < shape.parties(); ++j)
        factors.push_back(j == party ? op : CMatrix(CMatrix::Identity(shape.dims[j], shape.dims[j])));
    return kron_all(factors);
}

}  // namespace uqsd
