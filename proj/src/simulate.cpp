#include "uqsd/simulate.hpp"

#include <stdexcept>

namespace uqsd {

long SimulationReport::total_wrong() const {
    long w = 0;
    for (const auto& row : per_state) w += row.conclusive_wrong;
    return w;
}

namespace {

struct EmbeddedElements {
    // Per party: per outcome (delta order, then inconclusive): the element
    // embedded into the composite space and the Kraus square root.
    std::vector<std::vector<CMatrix>> elements;
    std::vector<std::vector<CMatrix>> kraus;
};

EmbeddedElements prepare_elements(const LocalPOVMSet& lp) {
    EmbeddedElements out;
    const int n = lp.shape.parties();
    out.elements.resize(n);
    out.kraus.resize(n);
    for (int j = 0; j < n; ++j) {
        auto push = [&](const CMatrix& local) {
            out.elements[j].push_back(embed_at_party(local, j, lp.shape));
            out.kraus[j].push_back(embed_at_party(hermitian_sqrt(local), j, lp.shape));
        };
        for (const auto& el : lp.parties[j].conclusive) push(el);
        push(lp.parties[j].inconclusive);
    }
    return out;
}

std::vector<int> sample_with_elements(const CMatrix& rho_in, const LocalPOVMSet& lp,
                                      const EmbeddedElements& pre, Rng& rng) {
    const int n = lp.shape.parties();
    const int outcomes = static_cast<int>(lp.delta.size()) + 1;

    std::vector<int> results(n);
    CMatrix rho = rho_in;
    for (int j = 0; j < n; ++j) {
        std::vector<double> probs(outcomes);
        for (int k = 0; k < outcomes; ++k) {
            double p = (rho * pre.elements[j][k]).trace().real();
            if (p < -1e-10) throw std::runtime_error("sample_joint_outcomes: negative outcome probability");
            probs[k] = std::max(p, 0.0);
        }
        int k = rng.categorical(probs);
        results[j] = k == outcomes - 1 ? -1 : k;

        if (j + 1 < n) {
            const CMatrix& kr = pre.kraus[j][k];
            rho = kr * rho * kr.adjoint();
            double tr = rho.trace().real();
            if (tr > 1e-300) rho /= tr;
        }
    }
    return results;
}

}  // namespace

std::vector<int> sample_joint_outcomes(const CMatrix& rho, const LocalPOVMSet& lp, Rng& rng) {
    auto pre = prepare_elements(lp);
    return sample_with_elements(rho, lp, pre, rng);
}

SimulationReport run_protocol(const StateEnsemble& e, const LocalPOVMSet& lp, long trials,
                              std::uint64_t seed) {
    if (!(e.shape == lp.shape)) throw std::invalid_argument("run_protocol: shape mismatch");
    if (trials < 0) throw std::invalid_argument("run_protocol: negative trial count");

    auto pre = prepare_elements(lp);
    auto predicted = lp.predicted_rates(e);

    SimulationReport report;
    report.trials = trials;
    report.seed = seed;
    report.per_state.resize(e.count());
    for (int mu = 1; mu <= e.count(); ++mu) {
        report.per_state[mu - 1].mu = mu;
        auto it = predicted.find(mu);
        report.per_state[mu - 1].predicted_rate = it != predicted.end() ? it->second : 0.0;
    }

    std::vector<double> priors(e.count());
    for (int mu = 1; mu <= e.count(); ++mu) priors[mu - 1] = e.prior(mu);

    for (long t = 0; t < trials; ++t) {
        Rng rng = Rng::derived(seed, static_cast<std::uint64_t>(t));
        int mu = rng.categorical(priors) + 1;
        auto& row = report.per_state[mu - 1];
        ++row.prepared;

        auto outcomes = sample_with_elements(e.states[mu - 1].matrix, lp, pre, rng);
        bool unanimous = true;
        for (int r : outcomes)
            if (r != outcomes[0]) unanimous = false;

        if (!unanimous || outcomes[0] < 0) {
            ++row.inconclusive;
        } else {
            int label = lp.delta[outcomes[0]];
            if (label == mu)
                ++row.conclusive_correct;
            else
                ++row.conclusive_wrong;
        }
    }

    for (auto& row : report.per_state)
        row.empirical_rate = row.prepared > 0 ? static_cast<double>(row.conclusive_correct) / row.prepared : 0.0;
    return report;
}

}  // namespace uqsd
