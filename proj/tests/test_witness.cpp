#include <doctest.h>

#include "support.hpp"
#include "uqsd/witness.hpp"

using namespace uqsd;
using namespace testsupport;

namespace {

SearchConfig quick_cfg(std::uint64_t seed = 1) {
    SearchConfig cfg;
    cfg.seed = seed;
    cfg.restarts = 16;
    return cfg;
}

StateEnsemble bell_ensemble(int count) {
    auto shape = SpaceShape::of({2, 2});
    std::vector<CVector> vs;
    for (int k = 0; k < count; ++k) vs.push_back(bell(k));
    return ensemble_from_vectors(shape, vs);
}

}  // namespace

TEST_SUITE("witness") {

TEST_CASE("full support holds for complete bases and fails for three Bell states") {
    auto shape = SpaceShape::of({2, 2});
    std::vector<CVector> basis;
    for (int i = 0; i < 4; ++i) basis.push_back(basis_vector(4, i));
    CHECK(full_support_check(ensemble_from_vectors(shape, basis)));
    CHECK(full_support_check(bell_ensemble(4)));
    CHECK_FALSE(full_support_check(bell_ensemble(3)));
}

TEST_CASE("candidate subspaces for complete bases") {
    auto e4 = bell_ensemble(4);
    auto s = s_tilde_projector(e4, 1);
    REQUIRE(s.dim() == 1);
    CHECK(std::abs(s.basis.col(0).dot(bell(0))) == doctest::Approx(1.0).epsilon(1e-10));

    auto shape = SpaceShape::of({2, 2});
    std::vector<CVector> basis;
    for (int i = 0; i < 4; ++i) basis.push_back(basis_vector(4, i));
    auto sp = s_tilde_projector(ensemble_from_vectors(shape, basis), 1);
    REQUIRE(sp.dim() == 1);
    CHECK(std::abs(sp.basis.col(0)(0)) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("candidate subspace of a block-mixed ensemble") {
    auto shape = SpaceShape::of({2, 2});
    CMatrix rho1 = CMatrix::Zero(4, 4), rho2 = CMatrix::Zero(4, 4);
    rho1(0, 0) = rho1(1, 1) = 0.5;  // |0><0| x I/2
    rho2(2, 2) = rho2(3, 3) = 0.5;  // |1><1| x I/2
    auto e = StateEnsemble::make(shape, {DensityMatrix::from_matrix(shape, rho1),
                                         DensityMatrix::from_matrix(shape, rho2)});
    auto s = s_tilde_projector(e, 1);
    REQUIRE(s.dim() == 2);
    CMatrix expected = projector_from({basis_vector(4, 0), basis_vector(4, 1)}, 4);
    CHECK((s.projector() - expected).norm() < 1e-10);
}

TEST_CASE("candidate subspace requires full support") {
    CHECK_THROWS_AS(s_tilde_projector(bell_ensemble(3), 1), std::domain_error);
}

TEST_CASE("witness from the Bell line") {
    auto shape = SpaceShape::of({2, 2});
    auto s = Subspace::from_spanning(shape, {bell(0)});
    auto built = build_witness(s, quick_cfg());
    REQUIRE(built.status == BuildWitnessResult::Status::built);
    CHECK(built.witness->gamma == doctest::Approx(0.5).epsilon(1e-6));

    // W = 1 - 2 P; the detected state scores -1.
    CMatrix expected = CMatrix::Identity(4, 4) - 2.0 * s.projector();
    CHECK((built.witness->w - expected).norm() < 1e-5);
    double detected = (bell(0).adjoint() * built.witness->w * bell(0))(0, 0).real();
    CHECK(detected == doctest::Approx(-1.0).epsilon(1e-6));

    // Reconstruction from the stored projector.
    CMatrix rebuilt = CMatrix::Identity(4, 4) - built.witness->projector / built.witness->gamma;
    CHECK((built.witness->w - rebuilt).norm() <= 1e-10);
    CHECK(built.witness->gamma > 0.0);
    CHECK(built.witness->gamma < 1.0);
}

TEST_CASE("no witness when the subspace holds a product state") {
    auto shape = SpaceShape::of({2, 2});
    auto line = Subspace::from_spanning(shape, {basis_vector(4, 0)});
    auto r1 = build_witness(line, quick_cfg());
    CHECK(r1.status == BuildWitnessResult::Status::product_state_exists);
    REQUIRE(r1.product.has_value());

    auto plane = Subspace::from_spanning(shape, {bell(0), bell(3)});
    auto r2 = build_witness(plane, quick_cfg());
    CHECK(r2.status == BuildWitnessResult::Status::product_state_exists);
    CHECK(r2.gamma >= 1.0 - 1e-8);

    CHECK_THROWS_AS(build_witness(Subspace::zero(shape), quick_cfg()), std::invalid_argument);
}

TEST_CASE("validation of the Bell witness") {
    auto shape = SpaceShape::of({2, 2});
    auto built = build_witness(Subspace::from_spanning(shape, {bell(0)}), quick_cfg());
    REQUIRE(built.status == BuildWitnessResult::Status::built);

    auto val = validate_witness(*built.witness, 100000, 2024, quick_cfg());
    CHECK(val.violations == 0);
    CHECK(val.min_product_expectation >= -1e-8);
    CHECK(val.recheck_ok);
    CHECK(val.detected_value == doctest::Approx(-1.0).epsilon(1e-6));
    CHECK(val.passed);
}

TEST_CASE("validation catches a misreported overlap") {
    // gamma deliberately understated for the Bell projector: product states
    // near (|0>-i|1>)(|0>+i|1>)/2 reach expectation 1 - 0.5/0.4 = -0.25.
    auto shape = SpaceShape::of({2, 2});
    WitnessOperator forged;
    forged.shape = shape;
    forged.gamma = 0.4;
    forged.projector = bell(0) * bell(0).adjoint();
    forged.projector_dim = 1;
    forged.w = CMatrix::Identity(4, 4) - forged.projector / forged.gamma;

    auto val = validate_witness(forged, 100000, 99, quick_cfg());
    CHECK(val.violations > 0);
    CHECK(val.min_product_expectation < -1e-3);
    CHECK_FALSE(val.recheck_ok);
    CHECK_FALSE(val.passed);
}

TEST_CASE("gamma from see-saw matches the Bloch-grid oracle") {
    Rng rng(2026);
    auto shape = SpaceShape::of({2, 2});
    for (int trial = 0; trial < 5; ++trial) {
        int rank = 1 + static_cast<int>(rng.next_u64() % 3);
        auto s = random_subspace(shape, rank, rng);
        auto overlap = max_product_overlap(s.projector(), shape, quick_cfg(trial));
        double oracle = brute_force_overlap(s.projector(), shape, 40);
        CHECK(overlap.value >= oracle - 2e-3);
        CHECK(overlap.value <= 1.0 + 1e-10);
    }
}

TEST_CASE("LOCC feasibility is equivalent to the absence of a witness") {
    auto shape = SpaceShape::of({2, 2});
    Rng rng(8086);
    for (int trial = 0; trial < 6; ++trial) {
        StateEnsemble e = [&]() {
            switch (trial % 3) {
                case 0: return ensemble_from_vectors(shape, rotated_product_basis(shape, rng));
                case 1: {
                    CMatrix u = haar_unitary(4, rng);
                    std::vector<CVector> vs;
                    for (int k = 0; k < 4; ++k) vs.push_back(u.col(k));
                    return ensemble_from_vectors(shape, vs);
                }
                default: return grouped_mixture_ensemble(shape, 2, rng);
            }
        }();
        REQUIRE(full_support_check(e));

        auto report = check_locc(e, quick_cfg(trial + 40));
        for (int mu : e.delta) {
            auto s = s_tilde_projector(e, mu);
            auto built = build_witness(s, quick_cfg(trial + 41));
            bool feasible = report.entry(mu).locc == Feasibility::feasible;
            bool absent = built.status == BuildWitnessResult::Status::product_state_exists;
            CHECK(feasible == absent);
            if (built.status == BuildWitnessResult::Status::built) {
                auto val = validate_witness(*built.witness, 20000, 7 * trial + mu, quick_cfg());
                CHECK(val.passed);
            }
        }
    }
}

}  // TEST_SUITE
