// Multiparticle state machinery: composite-space shapes, density matrices,
// ensembles, subspaces with projectors, and product-vector structure.
//
// Index convention is row-major in party order: flat index
// i = sum_j i_j * prod_{k>j} D_k, party 1 leftmost. All reshapes and
// tensor assemblies honor it.

#pragma once

#include <optional>
#include <span>
#include <vector>

#include "uqsd/linalg.hpp"

namespace uqsd {

struct SpaceShape {
    std::vector<int> dims;  // per-party dimensions, each >= 2
    int total = 0;          // product of dims

    static SpaceShape of(std::vector<int> dims);

    int parties() const { return static_cast<int>(dims.size()); }
    int flat_index(std::span<const int> multi) const;
    std::vector<int> multi_index(int flat) const;

    bool operator==(const SpaceShape& o) const { return dims == o.dims; }
};

struct DensityMatrix {
    SpaceShape shape;
    CMatrix matrix;
    bool unnormalized = false;

    // Validates Hermiticity, positivity and (unless allow_unnormalized)
    // unit trace. Throws std::invalid_argument on violation.
    static DensityMatrix from_matrix(SpaceShape shape, CMatrix m, bool allow_unnormalized = false);

    // |v><v| for a vector of norm 1 within 1e-6 (renormalized exactly).
    static DensityMatrix pure(SpaceShape shape, const CVector& v);

    double trace() const { return matrix.trace().real(); }
};

struct StateEnsemble {
    SpaceShape shape;
    std::vector<DensityMatrix> states;
    std::vector<int> delta;       // 1-based state indices to discriminate, sorted
    std::vector<double> priors;   // empty = uniform

    static StateEnsemble make(SpaceShape shape, std::vector<DensityMatrix> states,
                              std::vector<int> delta = {}, std::vector<double> priors = {});

    int count() const { return static_cast<int>(states.size()); }
    bool in_delta(int mu) const;
    double prior(int mu) const;  // 1-based
};

// Convenience: ensemble of pure states from assembled vectors.
StateEnsemble ensemble_from_vectors(const SpaceShape& shape, const std::vector<CVector>& vectors,
                                    std::vector<int> delta = {}, std::vector<double> priors = {});

struct Subspace {
    SpaceShape shape;
    CMatrix basis;  // total x dim, orthonormal columns

    int dim() const { return static_cast<int>(basis.cols()); }
    CMatrix projector() const;

    static Subspace from_orthonormal(SpaceShape shape, CMatrix basis);
    // Orthonormalizes an arbitrary spanning set via SVD; rank decided with tol_rank.
    static Subspace from_spanning(SpaceShape shape, const std::vector<CVector>& vectors,
                                  double tol_rank = kTolRank);
    static Subspace zero(SpaceShape shape);
    static Subspace full(SpaceShape shape);
};

struct ProductVector {
    SpaceShape shape;
    std::vector<CVector> factors;  // one unit vector per party

    static ProductVector make(SpaceShape shape, std::vector<CVector> factors);
};

// Span of eigenvectors of rho with eigenvalue > tol_rank * lambda_max.
Subspace support(const DensityMatrix& rho, double tol_rank = kTolRank);

// Orthogonal complement within the composite space.
Subspace complement(const Subspace& s);

// Tensor product of the factors, length shape.total.
CVector assemble(const ProductVector& pv);

// Tests product structure by sequential bipartite splits (party 1 vs rest,
// then recurse); succeeds iff every split's second singular value is at most
// tol_product. Recovered factors reproduce v up to a global phase.
std::optional<ProductVector> factorize_if_product(const CVector& v, const SpaceShape& shape,
                                                  double tol_product = kTolProduct);

// op acting on party j (0-based), identity elsewhere.
CMatrix embed_at_party(const CMatrix& op, int party, const SpaceShape& shape);

}  // namespace uqsd
