#include <doctest.h>

#include "support.hpp"
#include "uqsd/search.hpp"

using namespace uqsd;
using namespace testsupport;

namespace {

SearchConfig quick_cfg(std::uint64_t seed = 1) {
    SearchConfig cfg;
    cfg.seed = seed;
    cfg.restarts = 16;
    return cfg;
}

double expectation(const CMatrix& a, const ProductVector& pv) {
    CVector v = assemble(pv);
    return (v.adjoint() * a * v)(0, 0).real();
}

}  // namespace

TEST_SUITE("search") {

TEST_CASE("max overlap of a product projector is one") {
    auto shape = SpaceShape::of({2, 2});
    CVector v00 = basis_vector(4, 0);
    auto res = max_product_overlap(CMatrix(v00 * v00.adjoint()), shape, quick_cfg());
    CHECK(res.value == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::abs(assemble(res.argmax).dot(v00)) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("max overlap of the Bell projector is one half") {
    auto shape = SpaceShape::of({2, 2});
    CVector phi = bell(0);
    CMatrix a = phi * phi.adjoint();
    auto res = max_product_overlap(a, shape, quick_cfg());

    // Equals the squared top Schmidt coefficient; the Bloch-grid oracle and
    // the analytic value agree.
    CHECK(res.value == doctest::Approx(0.5).epsilon(1e-6));
    double oracle = brute_force_overlap(a, shape, 60);
    CHECK(std::abs(oracle - 0.5) <= 2e-3);
    CHECK(res.value >= oracle - 2e-3);
}

TEST_CASE("max overlap over a subspace containing a product vector") {
    auto shape = SpaceShape::of({2, 2});
    CVector v01 = basis_vector(4, 1), v10 = basis_vector(4, 2);
    CMatrix p = v01 * v01.adjoint() + v10 * v10.adjoint();
    auto res = max_product_overlap(p, shape, quick_cfg());
    CHECK(res.value == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("overlap value matches its own argmax and stays in bounds") {
    Rng rng(5150);
    auto shape = SpaceShape::of({2, 2});
    for (int trial = 0; trial < 6; ++trial) {
        int rank = 1 + static_cast<int>(rng.next_u64() % 4);
        auto s = random_subspace(shape, rank, rng);
        auto res = max_product_overlap(s.projector(), shape, quick_cfg(trial));
        CHECK(res.value == doctest::Approx(expectation(s.projector(), res.argmax)).epsilon(1e-10));
        CHECK(res.value >= 0.0);
        CHECK(res.value <= 1.0 + 1e-10);
    }
}

TEST_CASE("identical configuration gives identical results") {
    auto shape = SpaceShape::of({2, 2});
    auto s = Subspace::from_spanning(shape, {bell(0), bell(3)});
    auto cfg = quick_cfg(77);
    auto r1 = max_product_overlap(s.projector(), shape, cfg);
    auto r2 = max_product_overlap(s.projector(), shape, cfg);
    CHECK(r1.value == r2.value);
    CHECK(r1.restart_index == r2.restart_index);
    for (int j = 0; j < 2; ++j) CHECK((r1.argmax.factors[j] - r2.argmax.factors[j]).norm() == 0.0);
}

TEST_CASE("max_product_overlap rejects non-PSD input") {
    auto shape = SpaceShape::of({2, 2});
    CHECK_THROWS_AS(max_product_overlap(CMatrix(-CMatrix::Identity(4, 4)), shape, quick_cfg()),
                    std::invalid_argument);
}

TEST_CASE("find_product_in_subspace on a product line") {
    auto shape = SpaceShape::of({2, 2});
    CVector v00 = basis_vector(4, 0);
    auto found = find_product_in_subspace(CMatrix(v00 * v00.adjoint()), nullptr, shape, quick_cfg());
    REQUIRE(found.has_value());
    CHECK(found->membership == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(std::abs(assemble(found->pv).dot(v00)) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("find_product_in_subspace finds the circular-polarization family") {
    // Products in span{(|00>+|11>)/sqrt2, (|01>-|10>)/sqrt2} are
    // (|0>-i|1>)(|0>+i|1>)/2 and its conjugate; both overlap the Bell target
    // with probability one half.
    auto shape = SpaceShape::of({2, 2});
    auto s = Subspace::from_spanning(shape, {bell(0), bell(3)});
    auto rho = DensityMatrix::pure(shape, bell(0));
    auto found = find_product_in_subspace(s.projector(), &rho, shape, quick_cfg());
    REQUIRE(found.has_value());
    CHECK(found->membership >= 1.0 - 1e-8);
    CHECK(found->detect_value == doctest::Approx(0.5).epsilon(1e-6));

    CVector fam1(4), fam2(4);
    fam1 << 0.5, cdouble(0, 0.5), cdouble(0, -0.5), 0.5;
    fam2 << 0.5, cdouble(0, -0.5), cdouble(0, 0.5), 0.5;
    CVector got = assemble(found->pv);
    double m = std::max(std::abs(got.dot(fam1)), std::abs(got.dot(fam2)));
    CHECK(m == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("find_product_in_subspace fails honestly on the Bell line") {
    auto shape = SpaceShape::of({2, 2});
    CVector phi = bell(0);
    auto found = find_product_in_subspace(CMatrix(phi * phi.adjoint()), nullptr, shape, quick_cfg());
    CHECK_FALSE(found.has_value());
}

TEST_CASE("find_product_in_subspace validates the projector") {
    auto shape = SpaceShape::of({2, 2});
    CHECK_THROWS_AS(find_product_in_subspace(CMatrix(2.0 * CMatrix::Identity(4, 4)), nullptr, shape,
                                             quick_cfg()),
                    std::invalid_argument);
}

TEST_CASE("certifier rejects the Bell line") {
    auto shape = SpaceShape::of({2, 2});
    auto s = Subspace::from_spanning(shape, {bell(0)});
    auto d = certify_two_qubit(s, nullptr, quick_cfg());
    CHECK_FALSE(d.exists);
}

TEST_CASE("certifier solves span{psi+, psi-} against psi+") {
    auto shape = SpaceShape::of({2, 2});
    auto s = Subspace::from_spanning(shape, {bell(2), bell(3)});
    auto rho = DensityMatrix::pure(shape, bell(2));
    auto d = certify_two_qubit(s, &rho, quick_cfg());
    REQUIRE(d.exists);
    REQUIRE(d.certificate.has_value());
    CHECK(d.detect_value == doctest::Approx(0.5).epsilon(1e-9));

    CVector got = assemble(*d.certificate);
    double m = std::max(std::abs(got.dot(basis_vector(4, 1))), std::abs(got.dot(basis_vector(4, 2))));
    CHECK(m == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("certifier solves span{phi+, phi-} against phi+") {
    auto shape = SpaceShape::of({2, 2});
    auto s = Subspace::from_spanning(shape, {bell(0), bell(1)});
    auto rho = DensityMatrix::pure(shape, bell(0));
    auto d = certify_two_qubit(s, &rho, quick_cfg());
    REQUIRE(d.exists);
    CHECK(d.detect_value == doctest::Approx(0.5).epsilon(1e-9));
    CVector got = assemble(*d.certificate);
    double m = std::max(std::abs(got.dot(basis_vector(4, 0))), std::abs(got.dot(basis_vector(4, 3))));
    CHECK(m == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("certifier handles an all-product plane") {
    auto shape = SpaceShape::of({2, 2});
    auto s = Subspace::from_spanning(shape, {basis_vector(4, 0), basis_vector(4, 1)});
    auto rho = DensityMatrix::pure(shape, basis_vector(4, 0));
    auto d = certify_two_qubit(s, &rho, quick_cfg());
    REQUIRE(d.exists);
    CHECK(d.detect_value == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("certifier on three- and four-dimensional subspaces") {
    auto shape = SpaceShape::of({2, 2});
    auto s3 = Subspace::from_spanning(shape, {bell(0), bell(1), bell(2)});
    auto rho = DensityMatrix::pure(shape, bell(2));

    auto no_target = certify_two_qubit(s3, nullptr, quick_cfg());
    REQUIRE(no_target.exists);
    REQUIRE(no_target.certificate.has_value());
    CHECK(no_target.membership >= 1.0 - 1e-8);

    auto with_target = certify_two_qubit(s3, &rho, quick_cfg());
    REQUIRE(with_target.exists);
    REQUIRE(with_target.certificate.has_value());
    CHECK(with_target.membership >= 1.0 - 1e-8);
    CHECK(with_target.detect_value >= kTolDetect);
    CHECK(with_target.detect_value <= 0.5 + 1e-9);  // family bound for this span

    auto s4 = Subspace::full(shape);
    auto d4 = certify_two_qubit(s4, &rho, quick_cfg());
    REQUIRE(d4.exists);
    CHECK(d4.detect_value >= kTolDetect);

    // A subspace entirely inside ker(rho) has no detectable product state.
    auto sker = Subspace::from_spanning(shape, {bell(0), bell(1), bell(3)});
    auto dker = certify_two_qubit(sker, &rho, quick_cfg());
    CHECK_FALSE(dker.exists);
}

TEST_CASE("brute force oracle on trivial operators") {
    auto shape = SpaceShape::of({2, 2});
    CHECK(brute_force_overlap(CMatrix::Identity(4, 4), shape, 20) == doctest::Approx(1.0));
    CHECK(brute_force_overlap(CMatrix::Zero(4, 4), shape, 20) == doctest::Approx(0.0));
    CHECK_THROWS_AS(brute_force_overlap(CMatrix::Identity(3, 3), SpaceShape::of({3}), 20),
                    std::invalid_argument);
}

TEST_CASE("see-saw agrees with the oracle and the certifier on random projectors") {
    Rng rng(424242);
    auto shape = SpaceShape::of({2, 2});
    for (int trial = 0; trial < 12; ++trial) {
        int rank = 1 + static_cast<int>(rng.next_u64() % 4);
        auto s = random_subspace(shape, rank, rng);
        CMatrix p = s.projector();

        auto res = max_product_overlap(p, shape, quick_cfg(trial + 1));
        double oracle = brute_force_overlap(p, shape, 40);
        CHECK(res.value >= oracle - 2e-3);

        auto d = certify_two_qubit(s, nullptr, quick_cfg(trial + 1));
        CHECK(d.exists == (oracle >= 1.0 - 5e-3));
    }
}

}  // TEST_SUITE
