// Feasibility decisions for unambiguous discrimination, with and without the
// LOCC constraint, and construction of the certifying global and local POVMs.
// Also reciprocal (dual-basis) states for pure ensembles spanning the space.

#pragma once

#include <map>
#include <optional>
#include <string>

#include "uqsd/search.hpp"
#include "uqsd/states.hpp"

namespace uqsd {

struct GlobalPOVM {
    SpaceShape shape;
    std::vector<int> delta;          // 1-based labels, sorted
    std::vector<CMatrix> conclusive; // aligned with delta
    CMatrix inconclusive;
    double lambda = 0.0;             // normalization used by the builder

    bool valid(double tol = 1e-9) const;  // PSD elements, completeness
};

// A POVM element written as a sum of K tensor products of per-party positive
// operators; the form every LOCC-implementable element must take.
struct SeparablePOVMElement {
    SpaceShape shape;
    std::vector<std::vector<CMatrix>> terms;  // K x N

    static SeparablePOVMElement single_term(SpaceShape shape, std::vector<CMatrix> factors);
    CMatrix assemble() const;
    bool valid(double tol = 1e-10) const;
};

struct LocalPOVMSet {
    struct Party {
        std::vector<CMatrix> conclusive;  // aligned with delta
        CMatrix inconclusive;
    };
    SpaceShape shape;
    std::vector<int> delta;
    std::vector<Party> parties;
    std::vector<double> lambdas;       // per party
    std::vector<ProductVector> pis;    // the product vectors the set was built from

    double prefactor() const;  // prod_j 1/lambda_j
    // p(mu|rho_mu) = <pi_mu|rho_mu|pi_mu> * prefactor, keyed by mu.
    std::map<int, double> predicted_rates(const StateEnsemble& e) const;
};

enum class Feasibility { feasible, infeasible, undetermined };
std::string to_string(Feasibility f);

struct StateFeasibility {
    int mu = 0;
    bool unconstrained = false;
    Feasibility locc = Feasibility::undetermined;
    std::optional<ProductVector> certificate;
    double detect_value = 0.0;
    double membership = 0.0;
    std::string method;  // "algebraic" or "seesaw"
};

struct FeasibilityReport {
    std::vector<StateFeasibility> entries;  // one per mu in delta, in delta order

    bool all_unconstrained() const;
    bool all_locc_feasible() const;
    const StateFeasibility& entry(int mu) const;
};

// R_perp(mu-bar): orthogonal complement of the support of the sum of all
// states other than mu.
Subspace complement_support_of_rest(const StateEnsemble& e, int mu, double tol_rank = kTolRank);

// Unconstrained feasibility: for each mu in delta, true iff the compression
// of rho_mu onto R_perp(mu-bar) has a top eigenvalue above
// tol_detect * lambda_max(rho_mu). The relative threshold keeps the decision
// invariant under positive rescaling of any state.
std::map<int, bool> check_unconstrained(const StateEnsemble& e, double tol_rank = kTolRank,
                                        double tol_detect = kTolDetect);

// LOCC feasibility for each mu in delta: searches R_perp(mu-bar) for a
// product vector with nonzero detection. Two-qubit systems use the exact
// algebraic certifier; other shapes use the see-saw search, whose failures
// are reported undetermined.
FeasibilityReport check_locc(const StateEnsemble& e, const SearchConfig& cfg);

// Global POVM from conclusive-direction vectors: lambda is the top eigenvalue
// of the sum of projectors, each element lambda^{-1}|pi><pi|, remainder
// inconclusive.
GlobalPOVM build_global_povm(const SpaceShape& shape, const std::map<int, CVector>& pis);
GlobalPOVM build_global_povm(const SpaceShape& shape, const std::map<int, ProductVector>& pis);

struct PovmTable {
    std::vector<int> delta;                // conclusive column labels
    Eigen::MatrixXd probs;                 // M rows; columns delta..., last = inconclusive
    double max_offdiagonal = 0.0;          // largest conclusive mislabel probability
    double min_diagonal = 0.0;             // smallest p(mu|rho_mu) over delta
    bool unambiguous = false;
};

// Full outcome-probability table p(outcome|rho_mu); flags violations of the
// unambiguity requirement at tolerance tol.
PovmTable verify_povm(const GlobalPOVM& povm, const StateEnsemble& e, double tol = 1e-9);

// Per-party POVMs from product certificates; party j uses the factors'
// projectors scaled by the local normalization lambda_j.
LocalPOVMSet build_local_povms(const SpaceShape& shape, const std::map<int, ProductVector>& pis);

// Dual family of linearly independent unit vectors spanning the space
// (M = D): <dual_mu|psi_nu> = c_mu delta_{mu nu} with c_mu > 0.
std::vector<CVector> reciprocal_states(const SpaceShape& shape, const std::vector<CVector>& psis,
                                       double tol_rank = kTolRank);

}  // namespace uqsd
