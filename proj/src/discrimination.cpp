#include "uqsd/discrimination.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace uqsd {

bool GlobalPOVM::valid(double tol) const {
    CMatrix sum = inconclusive;
    for (const auto& el : conclusive) sum += el;
    if ((sum - CMatrix::Identity(shape.total, shape.total)).norm() > tol) return false;
    auto psd = [&](const CMatrix& m) {
        auto eig = eigh(CMatrix((m + m.adjoint()) / 2.0));
        return eig.eigenvalues(0) >= -1e-10;
    };
    for (const auto& el : conclusive)
        if (!psd(el)) return false;
    return psd(inconclusive);
}

SeparablePOVMElement SeparablePOVMElement::single_term(SpaceShape shape, std::vector<CMatrix> factors) {
    if (static_cast<int>(factors.size()) != shape.parties())
        throw std::invalid_argument("SeparablePOVMElement: one factor per party required");
    SeparablePOVMElement el;
    el.shape = std::move(shape);
    el.terms.push_back(std::move(factors));
    return el;
}

CMatrix SeparablePOVMElement::assemble() const {
    CMatrix out = CMatrix::Zero(shape.total, shape.total);
    for (const auto& term : terms) out += kron_all(term);
    return out;
}

bool SeparablePOVMElement::valid(double tol) const {
    if (terms.empty()) return false;
    if (terms.size() > static_cast<std::size_t>(shape.total) * shape.total) return false;  // K <= D^2
    for (const auto& term : terms) {
        if (static_cast<int>(term.size()) != shape.parties()) return false;
        for (int j = 0; j < shape.parties(); ++j) {
            const CMatrix& f = term[j];
            if (f.rows() != shape.dims[j] || f.cols() != shape.dims[j]) return false;
            if (!is_hermitian(f, tol)) return false;
            auto eig = eigh(CMatrix((f + f.adjoint()) / 2.0));
            if (eig.eigenvalues(0) < -tol * std::max(1.0, eig.eigenvalues(eig.eigenvalues.size() - 1)))
                return false;
        }
    }
    return true;
}

double LocalPOVMSet::prefactor() const {
    double p = 1.0;
    for (double l : lambdas) p /= l;
    return p;
}

std::map<int, double> LocalPOVMSet::predicted_rates(const StateEnsemble& e) const {
    if (!(e.shape == shape)) throw std::invalid_argument("predicted_rates: shape mismatch");
    std::map<int, double> rates;
    const double pre = prefactor();
    for (std::size_t k = 0; k < delta.size(); ++k) {
        CVector pi = assemble(pis[k]);
        double detect = (pi.adjoint() * e.states[delta[k] - 1].matrix * pi)(0, 0).real();
        rates[delta[k]] = detect * pre;
    }
    return rates;
}

std::string to_string(Feasibility f) {
    switch (f) {
        case Feasibility::feasible: return "feasible";
        case Feasibility::infeasible: return "infeasible";
        default: return "undetermined";
    }
}

bool FeasibilityReport::all_unconstrained() const {
    return std::all_of(entries.begin(), entries.end(), [](const auto& s) { return s.unconstrained; });
}

bool FeasibilityReport::all_locc_feasible() const {
    return std::all_of(entries.begin(), entries.end(),
                       [](const auto& s) { return s.locc == Feasibility::feasible; });
}

const StateFeasibility& FeasibilityReport::entry(int mu) const {
    for (const auto& s : entries)
        if (s.mu == mu) return s;
    throw std::out_of_range("FeasibilityReport: no entry for this state");
}

Subspace complement_support_of_rest(const StateEnsemble& e, int mu, double tol_rank) {
    if (mu < 1 || mu > e.count()) throw std::out_of_range("complement_support_of_rest: bad index");
    CMatrix sum = CMatrix::Zero(e.shape.total, e.shape.total);
    for (int nu = 1; nu <= e.count(); ++nu)
        if (nu != mu) sum += e.states[nu - 1].matrix;
    auto rest = DensityMatrix::from_matrix(e.shape, std::move(sum), /*allow_unnormalized=*/true);
    return complement(support(rest, tol_rank));
}

namespace {

double compressed_top_eigenvalue(const StateEnsemble& e, int mu, const Subspace& s) {
    if (s.dim() == 0) return 0.0;
    CMatrix p = s.projector();
    CMatrix compressed = p * e.states[mu - 1].matrix * p;
    return max_eigenvalue(CMatrix((compressed + compressed.adjoint()) / 2.0));
}

}  // namespace

std::map<int, bool> check_unconstrained(const StateEnsemble& e, double tol_rank, double tol_detect) {
    std::map<int, bool> flags;
    for (int mu : e.delta) {
        Subspace s = complement_support_of_rest(e, mu, tol_rank);
        double lam = compressed_top_eigenvalue(e, mu, s);
        double scale = max_eigenvalue(e.states[mu - 1].matrix);
        flags[mu] = lam > tol_detect * std::max(scale, 1e-300);
    }
    return flags;
}

FeasibilityReport check_locc(const StateEnsemble& e, const SearchConfig& cfg) {
    cfg.validate();
    const bool two_qubits = e.shape.dims == std::vector<int>{2, 2};

    FeasibilityReport report;
    for (int mu : e.delta) {
        StateFeasibility entry;
        entry.mu = mu;
        entry.method = two_qubits ? "algebraic" : "seesaw";

        Subspace s = complement_support_of_rest(e, mu, cfg.tol_rank);
        double lam = compressed_top_eigenvalue(e, mu, s);
        double scale = max_eigenvalue(e.states[mu - 1].matrix);
        entry.unconstrained = lam > cfg.tol_detect * std::max(scale, 1e-300);

        if (!entry.unconstrained) {
            // No vector of the complement sees rho_mu at all, so in particular
            // no product vector does.
            entry.locc = Feasibility::infeasible;
            entry.method = "algebraic";
            report.entries.push_back(std::move(entry));
            continue;
        }

        const DensityMatrix& rho = e.states[mu - 1];
        if (two_qubits) {
            auto decision = certify_two_qubit(s, &rho, cfg);
            if (decision.exists && decision.certificate) {
                entry.locc = Feasibility::feasible;
                entry.certificate = decision.certificate;
                entry.detect_value = decision.detect_value;
                entry.membership = decision.membership;
            } else if (!decision.exists) {
                entry.locc = Feasibility::infeasible;
            } else {
                // Existence proven but no certificate materialized; fall back
                // to the heuristic rather than claim feasibility uncertified.
                auto found = find_product_in_subspace(s.projector(), &rho, e.shape, cfg);
                if (found) {
                    entry.locc = Feasibility::feasible;
                    entry.certificate = found->pv;
                    entry.detect_value = found->detect_value;
                    entry.membership = found->membership;
                    entry.method = "seesaw";
                } else {
                    entry.locc = Feasibility::undetermined;
                }
            }
        } else {
            auto found = find_product_in_subspace(s.projector(), &rho, e.shape, cfg);
            if (found) {
                entry.locc = Feasibility::feasible;
                entry.certificate = found->pv;
                entry.detect_value = found->detect_value;
                entry.membership = found->membership;
            } else {
                entry.locc = Feasibility::undetermined;
            }
        }
        report.entries.push_back(std::move(entry));
    }
    return report;
}

GlobalPOVM build_global_povm(const SpaceShape& shape, const std::map<int, CVector>& pis) {
    if (pis.empty()) throw std::invalid_argument("build_global_povm: no vectors given");

    CMatrix sum = CMatrix::Zero(shape.total, shape.total);
    for (const auto& [mu, v] : pis) {
        if (v.size() != shape.total) throw std::invalid_argument("build_global_povm: vector size mismatch");
        if (std::abs(v.norm() - 1.0) > 1e-8) throw std::invalid_argument("build_global_povm: vector not unit norm");
        sum += v * v.adjoint();
    }
    double lambda = max_eigenvalue(CMatrix((sum + sum.adjoint()) / 2.0));

    GlobalPOVM povm;
    povm.shape = shape;
    povm.lambda = lambda;
    povm.inconclusive = CMatrix::Identity(shape.total, shape.total);
    for (const auto& [mu, v] : pis) {
        povm.delta.push_back(mu);
        CMatrix el = (v * v.adjoint()) / lambda;
        povm.inconclusive -= el;
        povm.conclusive.push_back(std::move(el));
    }
    return povm;
}

GlobalPOVM build_global_povm(const SpaceShape& shape, const std::map<int, ProductVector>& pis) {
    std::map<int, CVector> vectors;
    for (const auto& [mu, pv] : pis) vectors.emplace(mu, assemble(pv));
    return build_global_povm(shape, vectors);
}

PovmTable verify_povm(const GlobalPOVM& povm, const StateEnsemble& e, double tol) {
    if (!(povm.shape == e.shape)) throw std::invalid_argument("verify_povm: shape mismatch");

    const int m = e.count();
    const int cols = static_cast<int>(povm.delta.size()) + 1;
    PovmTable table;
    table.delta = povm.delta;
    table.probs.resize(m, cols);

    double max_off = 0.0;
    double min_diag = std::numeric_limits<double>::infinity();
    for (int mu = 1; mu <= m; ++mu) {
        const CMatrix& rho = e.states[mu - 1].matrix;
        for (std::size_t k = 0; k < povm.delta.size(); ++k) {
            double p = (rho * povm.conclusive[k]).trace().real();
            table.probs(mu - 1, static_cast<int>(k)) = p;
            if (povm.delta[k] == mu) {
                if (e.in_delta(mu)) min_diag = std::min(min_diag, p);
            } else {
                max_off = std::max(max_off, std::abs(p));
            }
        }
        table.probs(mu - 1, cols - 1) = (rho * povm.inconclusive).trace().real();
    }
    table.max_offdiagonal = max_off;
    table.min_diagonal = std::isfinite(min_diag) ? min_diag : 0.0;
    table.unambiguous = max_off <= tol && table.min_diagonal > tol;
    return table;
}

LocalPOVMSet build_local_povms(const SpaceShape& shape, const std::map<int, ProductVector>& pis) {
    if (pis.empty()) throw std::invalid_argument("build_local_povms: no product vectors given");
    for (const auto& [mu, pv] : pis)
        if (!(pv.shape == shape)) throw std::invalid_argument("build_local_povms: shape mismatch");

    LocalPOVMSet set;
    set.shape = shape;
    for (const auto& [mu, pv] : pis) {
        set.delta.push_back(mu);
        set.pis.push_back(pv);
    }

    const int n = shape.parties();
    for (int j = 0; j < n; ++j) {
        CMatrix sum = CMatrix::Zero(shape.dims[j], shape.dims[j]);
        for (const auto& pv : set.pis) sum += pv.factors[j] * pv.factors[j].adjoint();
        double lambda_j = max_eigenvalue(CMatrix((sum + sum.adjoint()) / 2.0));
        set.lambdas.push_back(lambda_j);

        LocalPOVMSet::Party party;
        party.inconclusive = CMatrix::Identity(shape.dims[j], shape.dims[j]);
        for (const auto& pv : set.pis) {
            CMatrix el = (pv.factors[j] * pv.factors[j].adjoint()) / lambda_j;
            party.inconclusive -= el;
            party.conclusive.push_back(std::move(el));
        }
        set.parties.push_back(std::move(party));
    }
    return set;
}

std::vector<CVector> reciprocal_states(const SpaceShape& shape, const std::vector<CVector>& psis,
                                       double tol_rank) {
    const int d = shape.total;
    if (static_cast<int>(psis.size()) != d)
        throw std::invalid_argument("reciprocal_states: need exactly D vectors");

    CMatrix psi(d, d);
    for (int k = 0; k < d; ++k) {
        if (psis[k].size() != d) throw std::invalid_argument("reciprocal_states: vector size mismatch");
        if (std::abs(psis[k].norm() - 1.0) > 1e-8)
            throw std::invalid_argument("reciprocal_states: vectors must be unit norm");
        psi.col(k) = psis[k];
    }

    auto dec = svd(psi);
    if (numerical_rank(dec.singular_values, tol_rank) < d)
        throw std::invalid_argument("reciprocal_states: vectors are linearly dependent");

    // Unnormalized duals are the columns of (Psi^{-1})^dagger; normalizing
    // keeps each overlap <dual_mu|psi_mu> real positive.
    CMatrix inv_adj = psi.inverse().adjoint();
    std::vector<CVector> duals;
    duals.reserve(d);
    for (int k = 0; k < d; ++k) {
        CVector v = inv_adj.col(k);
        duals.push_back(v / v.norm());
    }
    return duals;
}

}  // namespace uqsd
