#include "uqsd/search.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "uqsd/rng.hpp"

namespace uqsd {

namespace {

constexpr double kPencilZeroTol = 1e-12;

struct SeesawOutcome {
    std::vector<CVector> factors;
    double value = 0.0;
    int iterations = 0;
};

// D x D_j slot matrix: all parties' factors fixed except party j, where the
// identity is inserted. eff = T^dagger A T is party j's effective matrix.
CMatrix slot_matrix(const std::vector<CVector>& factors, int j, const SpaceShape& shape) {
    std::vector<CMatrix> blocks;
    blocks.reserve(factors.size());
    for (int k = 0; k < shape.parties(); ++k) {
        if (k == j) {
            blocks.push_back(CMatrix::Identity(shape.dims[k], shape.dims[k]));
        } else {
            CMatrix col(shape.dims[k], 1);
            col.col(0) = factors[k];
            blocks.push_back(std::move(col));
        }
    }
    return kron_all(blocks);
}

double product_expectation(const CMatrix& a, const std::vector<CVector>& factors) {
    CVector v = kron_all(factors);
    return (v.adjoint() * a * v)(0, 0).real();
}

SeesawOutcome run_seesaw(const CMatrix& a, const SpaceShape& shape, const SearchConfig& cfg, Rng& rng) {
    const int n = shape.parties();
    std::vector<CVector> factors;
    factors.reserve(n);
    for (int j = 0; j < n; ++j) factors.push_back(rng.haar_vector(shape.dims[j]));

    double obj = product_expectation(a, factors);
    double sweep_prev = obj;
    int iterations = 0;
    for (int iter = 1; iter <= cfg.max_iters; ++iter) {
        for (int j = 0; j < n; ++j) {
            CMatrix t = slot_matrix(factors, j, shape);
            CMatrix eff = t.adjoint() * a * t;
            auto eig = eigh(CMatrix((eff + eff.adjoint()) / 2.0));
            double top = eig.eigenvalues(eig.eigenvalues.size() - 1);
            if (top < obj - 1e-9 * std::max(1.0, std::abs(obj)))
                throw std::logic_error("see-saw objective decreased");
            obj = top;
            factors[j] = eig.eigenvectors.col(eig.eigenvectors.cols() - 1);
        }
        iterations = iter;
        if (obj - sweep_prev < cfg.conv_tol) break;
        sweep_prev = obj;
    }
    return {std::move(factors), obj, iterations};
}

Eigen::Matrix2cd reshape2(const CVector& v) {
    Eigen::Matrix2cd m;
    m << v(0), v(1), v(2), v(3);
    return m;
}

cdouble det2(const Eigen::Matrix2cd& m) { return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0); }

// Bilinear polarization of det: det(a + b) = det a + det b + mix(a, b).
cdouble mix2(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
    return a(0, 0) * b(1, 1) + b(0, 0) * a(1, 1) - a(0, 1) * b(1, 0) - b(0, 1) * a(1, 0);
}

struct PencilRoots {
    bool identically_zero = false;
    std::vector<std::array<cdouble, 2>> roots;  // projective [x : y]
};

// Roots of alpha x^2 + beta x y + gamma y^2 on the projective line.
PencilRoots pencil_roots(cdouble alpha, cdouble beta, cdouble gamma) {
    PencilRoots out;
    double scale = std::max({std::abs(alpha), std::abs(beta), std::abs(gamma)});
    double tol = kPencilZeroTol * std::max(1.0, scale);
    if (scale <= kPencilZeroTol) {
        out.identically_zero = true;
        return out;
    }
    if (std::abs(alpha) > tol) {
        cdouble disc = std::sqrt(beta * beta - 4.0 * alpha * gamma);
        // Pick the sign that avoids cancellation in beta + disc.
        cdouble s = (std::real(std::conj(beta) * disc) >= 0.0) ? cdouble(1.0) : cdouble(-1.0);
        cdouble q = -(beta + s * disc) / 2.0;
        cdouble r1, r2;
        if (std::abs(q) > 1e-300) {
            r1 = q / alpha;
            r2 = gamma / q;
        } else {
            r1 = cdouble(0.0);
            r2 = -beta / alpha;
        }
        out.roots.push_back({r1, cdouble(1.0)});
        out.roots.push_back({r2, cdouble(1.0)});
    } else if (std::abs(beta) > tol) {
        out.roots.push_back({cdouble(1.0), cdouble(0.0)});
        out.roots.push_back({-gamma / beta, cdouble(1.0)});
    } else {
        out.roots.push_back({cdouble(1.0), cdouble(0.0)});
    }
    return out;
}

struct Candidate {
    ProductVector pv;
    double detect = 0.0;
    double membership = 0.0;
};

// Largest Rayleigh quotient of rho over span{g1, g2} (not necessarily
// orthonormal): solve the 2x2 generalized problem H c = lambda G c.
CVector rayleigh_argmax_on_plane(const CVector& g1, const CVector& g2, const CMatrix& rho) {
    CMatrix g(2, 2), h(2, 2);
    const CVector* basis[2] = {&g1, &g2};
    for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) {
            g(k, l) = basis[k]->dot(*basis[l]);
            h(k, l) = (basis[k]->adjoint() * rho * (*basis[l]))(0, 0);
        }
    auto ge = eigh(CMatrix((g + g.adjoint()) / 2.0));
    RVector inv_sqrt = ge.eigenvalues.cwiseMax(1e-14).cwiseInverse().cwiseSqrt();
    CMatrix gis = ge.eigenvectors * inv_sqrt.asDiagonal() * ge.eigenvectors.adjoint();
    CMatrix m = gis * h * gis;
    auto me = eigh(CMatrix((m + m.adjoint()) / 2.0));
    CVector c = gis * me.eigenvectors.col(1);
    CVector v = c(0) * g1 + c(1) * g2;
    return v / v.norm();
}

// Product candidates in span{g1, g2} of a two-qubit space: the determinant
// pencil's roots, or (identically-zero pencil) the whole plane.
void pencil_candidates(const CVector& g1, const CVector& g2, const DensityMatrix* target,
                       const CMatrix& projector, double tol_product, std::vector<Candidate>& out) {
    Eigen::Matrix2cd m1 = reshape2(g1), m2 = reshape2(g2);
    auto roots = pencil_roots(det2(m1), mix2(m1, m2), det2(m2));

    SpaceShape shape = SpaceShape::of({2, 2});
    std::vector<CVector> raw;
    if (roots.identically_zero) {
        if (target) {
            raw.push_back(rayleigh_argmax_on_plane(g1, g2, target->matrix));
        }
        raw.push_back(g1 / g1.norm());
    } else {
        for (const auto& r : roots.roots) {
            CVector v = r[0] * g1 + r[1] * g2;
            double n = v.norm();
            if (n < 1e-12) continue;
            raw.push_back(v / n);
        }
    }
    for (const auto& v : raw) {
        auto pv = factorize_if_product(v, shape, tol_product);
        if (!pv) continue;
        Candidate c{*pv, 0.0, (v.adjoint() * projector * v)(0, 0).real()};
        if (target) c.detect = (v.adjoint() * target->matrix * v)(0, 0).real();
        out.push_back(std::move(c));
    }
}

}  // namespace

void SearchConfig::validate() const {
    if (restarts < 1) throw std::invalid_argument("SearchConfig: restarts must be >= 1");
    if (max_iters < 1) throw std::invalid_argument("SearchConfig: max_iters must be >= 1");
    if (conv_tol <= 0 || tol_rank <= 0 || tol_product <= 0 || tol_detect <= 0 || weight_w <= 0)
        throw std::invalid_argument("SearchConfig: tolerances and weight must be positive");
}

OverlapResult max_product_overlap(const CMatrix& a, const SpaceShape& shape, const SearchConfig& cfg) {
    cfg.validate();
    if (a.rows() != shape.total || a.cols() != shape.total)
        throw std::invalid_argument("max_product_overlap: operator size mismatch");
    auto eig = eigh(a);
    double top = eig.eigenvalues(eig.eigenvalues.size() - 1);
    if (eig.eigenvalues(0) < -1e-9 * std::max(1.0, top))
        throw std::invalid_argument("max_product_overlap: operator not PSD within tolerance");

    OverlapResult best;
    bool have = false;
    for (int r = 0; r < cfg.restarts; ++r) {
        Rng rng = Rng::derived(cfg.seed, static_cast<std::uint64_t>(r));
        auto run = run_seesaw(a, shape, cfg, rng);
        double value = product_expectation(a, run.factors);
        if (!have || value > best.value) {
            best.value = value;
            best.argmax = ProductVector::make(shape, run.factors);
            best.iterations = run.iterations;
            best.restart_index = r;
            have = true;
        }
    }
    return best;
}

std::optional<ProductInSubspace> find_product_in_subspace(const CMatrix& p, const DensityMatrix* target,
                                                          const SpaceShape& shape, const SearchConfig& cfg) {
    cfg.validate();
    if (p.rows() != shape.total || p.cols() != shape.total)
        throw std::invalid_argument("find_product_in_subspace: projector size mismatch");
    double scale = std::max(1.0, p.norm());
    if (!is_hermitian(p, 1e-9) || (p * p - p).norm() > 1e-9 * scale)
        throw std::invalid_argument("find_product_in_subspace: input is not a projector");

    // Maximizing <pi|P(1 + w rho)P|pi> drives pi into the subspace while the
    // small detection term breaks ties toward nonzero target overlap.
    CMatrix m = p;
    if (target) m += cfg.weight_w * CMatrix(p * target->matrix * p);
    m = (m + m.adjoint()) / 2.0;

    std::optional<ProductInSubspace> best;
    for (int r = 0; r < cfg.restarts; ++r) {
        Rng rng = Rng::derived(cfg.seed, static_cast<std::uint64_t>(r));
        auto run = run_seesaw(m, shape, cfg, rng);
        CVector v = kron_all(run.factors);
        double membership = (v.adjoint() * p * v)(0, 0).real();
        double detect = target ? (v.adjoint() * target->matrix * v)(0, 0).real() : 0.0;
        if (membership < 1.0 - cfg.tol_product) continue;
        if (target && detect < cfg.tol_detect) continue;
        double score = target ? detect : membership;
        double best_score = best ? (target ? best->detect_value : best->membership) : -1.0;
        if (score > best_score)
            best = ProductInSubspace{ProductVector::make(shape, run.factors), membership, detect};
    }
    return best;
}

TwoQubitDecision certify_two_qubit(const Subspace& s, const DensityMatrix* target, const SearchConfig& cfg) {
    cfg.validate();
    if (s.shape.dims != std::vector<int>{2, 2})
        throw std::invalid_argument("certify_two_qubit: shape must be two qubits");
    const int r = s.dim();
    if (r < 1 || r > 4) throw std::invalid_argument("certify_two_qubit: subspace dimension out of range");

    TwoQubitDecision decision;
    CMatrix projector = s.projector();

    auto keep_best = [&](std::vector<Candidate>& cands) {
        for (auto& c : cands) {
            if (target && c.detect < cfg.tol_detect) continue;
            double score = target ? c.detect : c.membership;
            double best = decision.certificate ? (target ? decision.detect_value : decision.membership) : -1.0;
            if (score > best) {
                decision.certificate = c.pv;
                decision.detect_value = c.detect;
                decision.membership = c.membership;
            }
        }
    };

    if (r == 1) {
        CVector b = s.basis.col(0);
        auto pv = factorize_if_product(b, s.shape, cfg.tol_product);
        if (!pv) return decision;  // determinant of the reshape is nonzero
        double detect = target ? (b.adjoint() * target->matrix * b)(0, 0).real() : 0.0;
        if (target && detect < cfg.tol_detect) return decision;
        decision.exists = true;
        decision.certificate = *pv;
        decision.detect_value = detect;
        decision.membership = 1.0;
        return decision;
    }

    if (r == 2) {
        std::vector<Candidate> cands;
        pencil_candidates(s.basis.col(0), s.basis.col(1), target, projector, cfg.tol_product, cands);
        keep_best(cands);
        decision.exists = decision.certificate.has_value();
        return decision;
    }

    // r >= 3: the determinant quadric meets every subspace of dimension >= 3.
    // With a target, products avoiding ker(rho) exist exactly when the
    // subspace is not contained in ker(rho): the quadric section has rank
    // >= 2, so it cannot collapse into the projective line P(S @ ker rho).
    if (target) {
        CMatrix restricted = projector * target->matrix * projector;
        double lam = max_eigenvalue(CMatrix((restricted + restricted.adjoint()) / 2.0));
        if (lam <= cfg.tol_detect) return decision;  // below threshold counts as zero overlap
    }
    decision.exists = true;

    std::vector<Candidate> cands;
    if (r == 4) {
        // Computational basis vectors are product and span the whole space.
        for (int i = 0; i < 4 && cands.size() < 4; ++i) {
            CVector v = CVector::Zero(4);
            v(i) = 1.0;
            auto pv = factorize_if_product(v, s.shape, cfg.tol_product);
            double detect = target ? (v.adjoint() * target->matrix * v)(0, 0).real() : 0.0;
            cands.push_back(Candidate{*pv, detect, 1.0});
        }
        keep_best(cands);
    }
    // Seeded pencils inside the subspace; each contributes exact roots.
    Rng rng = Rng::derived(cfg.seed, 0x5bd1e995u);
    const int attempts = target ? 256 : 16;
    for (int attempt = 0; attempt < attempts; ++attempt) {
        CVector c1 = rng.haar_vector(r), c2 = rng.haar_vector(r);
        CVector g1 = s.basis * c1, g2 = s.basis * c2;
        cands.clear();
        pencil_candidates(g1, g2, target, projector, cfg.tol_product, cands);
        keep_best(cands);
        if (decision.certificate) {
            if (!target) break;
            if (decision.detect_value >= cfg.tol_detect && attempt >= 15) break;
        }
    }
    return decision;
}

double brute_force_overlap(const CMatrix& a, const SpaceShape& shape, int grid_points) {
    for (int d : shape.dims)
        if (d != 2) throw std::invalid_argument("brute_force_overlap: every party must be a qubit");
    if (shape.parties() > 3) throw std::invalid_argument("brute_force_overlap: at most three parties");
    if (grid_points < 2) throw std::invalid_argument("brute_force_overlap: grid too small");
    if (a.rows() != shape.total || a.cols() != shape.total)
        throw std::invalid_argument("brute_force_overlap: operator size mismatch");

    struct BlochPoint {
        cdouble v0, v1;
        double c0, c1;  // |v0|^2, |v1|^2
        cdouble w;      // v0 * conj(v1)
    };
    std::vector<BlochPoint> grid;
    grid.reserve(static_cast<std::size_t>(grid_points) * grid_points);
    for (int t = 0; t < grid_points; ++t) {
        double theta = M_PI * t / (grid_points - 1);
        double ct = std::cos(theta / 2), st = std::sin(theta / 2);
        for (int f = 0; f < grid_points; ++f) {
            double phi = 2.0 * M_PI * f / grid_points;
            cdouble v0(ct, 0.0), v1 = st * cdouble(std::cos(phi), std::sin(phi));
            grid.push_back({v0, v1, std::norm(v0), std::norm(v1), v0 * std::conj(v1)});
        }
    }

    // Contract the trailing qubit with b: out[i,j] = <b| A_block(i,j) |b>.
    auto contract_last = [](const CMatrix& m, const BlochPoint& b) {
        Eigen::Index d = m.rows() / 2;
        CMatrix out(d, d);
        for (Eigen::Index i = 0; i < d; ++i)
            for (Eigen::Index j = 0; j < d; ++j)
                out(i, j) = std::conj(b.v0) * (m(2 * i, 2 * j) * b.v0 + m(2 * i, 2 * j + 1) * b.v1) +
                            std::conj(b.v1) * (m(2 * i + 1, 2 * j) * b.v0 + m(2 * i + 1, 2 * j + 1) * b.v1);
        return out;
    };

    std::function<double(const CMatrix&, int)> best_over = [&](const CMatrix& m, int parties) -> double {
        if (parties == 1) {
            double a00 = m(0, 0).real(), a11 = m(1, 1).real();
            cdouble a10 = m(1, 0);
            double best = -std::numeric_limits<double>::infinity();
            for (const auto& g : grid) {
                double val = g.c0 * a00 + g.c1 * a11 + 2.0 * std::real(g.w * a10);
                if (val > best) best = val;
            }
            return best;
        }
        double best = -std::numeric_limits<double>::infinity();
        for (const auto& g : grid) best = std::max(best, best_over(contract_last(m, g), parties - 1));
        return best;
    };
    return best_over(a, shape.parties());
}

}  // namespace uqsd
