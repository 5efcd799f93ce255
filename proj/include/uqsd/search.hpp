// Product-vector search: decides whether a subspace contains an N-party
// product vector (optionally with nonzero overlap against a target state).
// The workhorse is alternating rank-1 ("see-saw") maximization of
// <pi|A|pi> over product vectors; for two-qubit systems an exact algebraic
// certifier is available, and a brute-force Bloch-grid oracle validates both.

#pragma once

#include <optional>

#include "uqsd/states.hpp"

namespace uqsd {

struct SearchConfig {
    int restarts = 32;
    int max_iters = 200;          // see-saw sweeps per restart
    double conv_tol = 1e-12;      // objective-change stopping threshold
    double tol_rank = kTolRank;
    double tol_product = kTolProduct;
    double tol_detect = kTolDetect;
    double weight_w = 1e-2;       // coupling between membership and detection
    std::uint64_t seed = 0;

    void validate() const;
};

struct OverlapResult {
    double value = 0.0;       // best <pi|A|pi> found; lower bound on the max
    ProductVector argmax;
    int iterations = 0;       // sweeps used by the winning restart
    int restart_index = 0;
};

// Maximizes <pi|A|pi> over product vectors by cycling parties and replacing
// each factor with the top eigenvector of the effective local matrix. The
// objective is non-decreasing within a run; the best over cfg.restarts wins,
// ties broken by lowest restart index. Throws on non-PSD input.
OverlapResult max_product_overlap(const CMatrix& a, const SpaceShape& shape, const SearchConfig& cfg);

struct ProductInSubspace {
    ProductVector pv;
    double membership = 0.0;    // <pi|P|pi>
    double detect_value = 0.0;  // <pi|rho|pi>, 0 when no target given
};

// Searches the range of projector p for a product vector, favoring nonzero
// overlap with target when given. Accepts a candidate iff membership is at
// least 1 - tol_product and (with a target) detect_value is at least
// tol_detect; among accepted candidates the one with the largest detect_value
// wins. An empty result is heuristic failure, not proof of absence.
std::optional<ProductInSubspace> find_product_in_subspace(const CMatrix& p, const DensityMatrix* target,
                                                          const SpaceShape& shape, const SearchConfig& cfg);

struct TwoQubitDecision {
    bool exists = false;
    std::optional<ProductVector> certificate;
    double detect_value = 0.0;
    double membership = 0.0;
};

// Exact decision procedure for two-qubit subspaces: product vectors in the
// span correspond to roots of the determinant of the reshaped basis pencil.
// dim 1: determinant test. dim 2: enumerate the (at most two) projective
// roots of a scalar quadratic, handling the identically-zero case where the
// whole plane is product. dim >= 3: a quadratic form in >= 3 complex
// variables always has isotropic vectors, and when a target is given a rank
// argument settles existence; certificates come from root enumeration on
// seeded pencils.
TwoQubitDecision certify_two_qubit(const Subspace& s, const DensityMatrix* target, const SearchConfig& cfg);

// Exhaustive Bloch-angle grid over per-qubit (theta, phi); every party must
// be a qubit and N <= 3. Lower bound converging to the true maximum.
double brute_force_overlap(const CMatrix& a, const SpaceShape& shape, int grid_points);

}  // namespace uqsd
