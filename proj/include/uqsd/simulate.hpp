// Monte Carlo simulation of the non-adaptive LOCC protocol: every party
// measures its own subsystem with its local POVM, outcomes are compared
// classically, and the run is conclusive only when all parties agree on the
// same state label.

#pragma once

#include "uqsd/discrimination.hpp"
#include "uqsd/rng.hpp"

namespace uqsd {

struct SimulationReport {
    struct PerState {
        int mu = 0;
        long prepared = 0;
        long conclusive_correct = 0;  // unanimous mu (only possible for mu in delta)
        long conclusive_wrong = 0;    // unanimous nu in delta with nu != mu
        long inconclusive = 0;
        double empirical_rate = 0.0;  // conclusive_correct / prepared
        double predicted_rate = 0.0;  // detect * prod_j lambda_j^{-1}, 0 outside delta
    };

    long trials = 0;
    std::uint64_t seed = 0;
    std::vector<PerState> per_state;  // one row per ensemble state

    long total_wrong() const;
};

// Joint outcome sampling for one prepared state: parties measure in order,
// the conditional state updated by the Kraus map with the element's square
// root, so correlations are sampled exactly. Outcome values are indices into
// delta, or -1 for the inconclusive element.
std::vector<int> sample_joint_outcomes(const CMatrix& rho, const LocalPOVMSet& lp, Rng& rng);

// Runs `trials` rounds: a state is drawn by prior, measured by all parties,
// and tallied. Each trial derives its own RNG stream from (seed, trial), so
// counts are independent of any partitioning of trials across workers.
SimulationReport run_protocol(const StateEnsemble& e, const LocalPOVMSet& lp, long trials,
                              std::uint64_t seed);

}  // namespace uqsd
