// Entanglement witnesses from undiscriminable subspaces. Only defined for
// ensembles whose combined support is the whole composite space, where the
// per-state candidate set is a genuine subspace with projector P. The witness
// W = 1 - gamma^{-1} P is nonnegative on every product (hence separable)
// state and strictly negative on the subspace.

#pragma once

#include <optional>

#include "uqsd/discrimination.hpp"

namespace uqsd {

struct WitnessOperator {
    SpaceShape shape;
    CMatrix w;
    CMatrix projector;  // the P the witness was built from
    double gamma = 0.0; // max product overlap of P, strictly inside (0, 1)
    int projector_dim = 0;
};

struct WitnessValidation {
    long samples = 0;
    long violations = 0;              // product samples with <pi|W|pi> < -1e-8
    double min_product_expectation = 0.0;
    double recheck_overlap = 0.0;     // fresh-seed see-saw overlap of P
    bool recheck_ok = false;          // 1 - gamma^{-1} * recheck_overlap >= -1e-6
    double detected_value = 0.0;      // expectation on a subspace state, 1 - gamma^{-1}
    bool passed = false;
};

// True iff the support of the summed ensemble is the entire space.
bool full_support_check(const StateEnsemble& e, double tol_rank = kTolRank);

// The candidate subspace for state mu (the orthocomplement of the other
// states' combined support). Requires full support; throws
// std::domain_error otherwise.
Subspace s_tilde_projector(const StateEnsemble& e, int mu, double tol_rank = kTolRank);

struct BuildWitnessResult {
    enum class Status { built, product_state_exists, validation_failed };
    Status status = Status::validation_failed;
    std::optional<WitnessOperator> witness;
    double gamma = 0.0;
    std::optional<ProductVector> product;  // present when a product state was found
};

// gamma = max product overlap of P by see-saw. When gamma reaches 1 within
// tol_product the subspace contains a product state and no witness exists.
// Because see-saw lower-bounds gamma, the construction is re-checked with a
// fresh seed and rejected if the bound moves past the witness guarantee.
BuildWitnessResult build_witness(const Subspace& s, const SearchConfig& cfg);

// Samples seeded Haar-random product states against W, re-runs the overlap
// bound with an independent seed, and exhibits a detected subspace state.
WitnessValidation validate_witness(const WitnessOperator& wop, long samples, std::uint64_t seed,
                                   const SearchConfig& cfg);

}  // namespace uqsd
