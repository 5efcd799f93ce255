#include "uqsd/witness.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "uqsd/rng.hpp"

namespace uqsd {

namespace {

constexpr std::uint64_t kRecheckStream = 0x7765725F636B; // distinct from search streams

double product_sample_expectation(const CMatrix& w, const SpaceShape& shape, Rng& rng) {
    std::vector<CVector> factors;
    factors.reserve(shape.parties());
    for (int j = 0; j < shape.parties(); ++j) factors.push_back(rng.haar_vector(shape.dims[j]));
    CVector v = kron_all(factors);
    return (v.adjoint() * w * v)(0, 0).real();
}

}  // namespace

bool full_support_check(const StateEnsemble& e, double tol_rank) {
    CMatrix sum = CMatrix::Zero(e.shape.total, e.shape.total);
    for (const auto& rho : e.states) sum += rho.matrix;
    auto total = DensityMatrix::from_matrix(e.shape, std::move(sum), /*allow_unnormalized=*/true);
    return support(total, tol_rank).dim() == e.shape.total;
}

Subspace s_tilde_projector(const StateEnsemble& e, int mu, double tol_rank) {
    if (!full_support_check(e, tol_rank))
        throw std::domain_error(
            "ensemble support does not cover the full space; the candidate set is not a subspace");
    return complement_support_of_rest(e, mu, tol_rank);
}

BuildWitnessResult build_witness(const Subspace& s, const SearchConfig& cfg) {
    cfg.validate();
    if (s.dim() < 1) throw std::invalid_argument("build_witness: zero-dimensional subspace");

    CMatrix p = s.projector();
    auto overlap = max_product_overlap(p, s.shape, cfg);

    BuildWitnessResult result;
    result.gamma = overlap.value;
    if (overlap.value >= 1.0 - cfg.tol_product) {
        result.status = BuildWitnessResult::Status::product_state_exists;
        result.product = overlap.argmax;
        return result;
    }

    // Soundness guard: an underestimated gamma would make W negative on some
    // product state. Re-run with an independent seed and reject on failure.
    SearchConfig recheck_cfg = cfg;
    recheck_cfg.seed = splitmix64(cfg.seed ^ kRecheckStream);
    auto recheck = max_product_overlap(p, s.shape, recheck_cfg);
    if (1.0 - recheck.value / overlap.value < -1e-6) {
        result.status = BuildWitnessResult::Status::validation_failed;
        result.gamma = std::max(overlap.value, recheck.value);
        return result;
    }

    WitnessOperator wop;
    wop.shape = s.shape;
    wop.gamma = overlap.value;
    wop.projector = p;
    wop.projector_dim = s.dim();
    wop.w = CMatrix::Identity(s.shape.total, s.shape.total) - p / overlap.value;

    result.status = BuildWitnessResult::Status::built;
    result.witness = std::move(wop);
    return result;
}

WitnessValidation validate_witness(const WitnessOperator& wop, long samples, std::uint64_t seed,
                                   const SearchConfig& cfg) {
    WitnessValidation report;
    report.samples = samples;

    Rng rng(seed);
    double min_val = std::numeric_limits<double>::infinity();
    for (long i = 0; i < samples; ++i) {
        double val = product_sample_expectation(wop.w, wop.shape, rng);
        min_val = std::min(min_val, val);
        if (val < -1e-8) ++report.violations;
    }
    report.min_product_expectation = samples > 0 ? min_val : 0.0;

    SearchConfig recheck_cfg = cfg;
    recheck_cfg.seed = splitmix64(seed ^ 0x76616C6964ULL);
    auto recheck = max_product_overlap(wop.projector, wop.shape, recheck_cfg);
    report.recheck_overlap = recheck.value;
    report.recheck_ok = 1.0 - recheck.value / wop.gamma >= -1e-6;

    // Any unit vector in the range of P scores 1 - gamma^{-1} < 0.
    auto eig = eigh(wop.projector);
    CVector in_range = eig.eigenvectors.col(eig.eigenvectors.cols() - 1);
    report.detected_value = (in_range.adjoint() * wop.w * in_range)(0, 0).real();

    report.passed = report.violations == 0 && report.recheck_ok && report.detected_value < 0.0;
    return report;
}

}  // namespace uqsd
