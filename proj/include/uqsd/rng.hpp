// Seedable RNG wrapper around std::mt19937_64 with hand-rolled uniform /
// Gaussian transforms so that streams are bit-reproducible across platforms
// (the std::*_distribution classes are implementation-defined).

#pragma once

#include <cstdint>
#include <random>
#include <span>

#include "uqsd/linalg.hpp"

namespace uqsd {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    // Independent substream for (seed, stream); merged results stay
    // independent of how work is partitioned across streams.
    static Rng derived(std::uint64_t seed, std::uint64_t stream) {
        return Rng(splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632BE59BD9B4E019ULL)));
    }

    std::uint64_t next_u64() { return gen_(); }

    // Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    // Box-Muller pair; one call consumes exactly two uniforms.
    std::pair<double, double> gaussian_pair() {
        double u1 = 1.0 - uniform();  // (0, 1], keeps log finite
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * M_PI * u2;
        return {r * std::cos(a), r * std::sin(a)};
    }

    double gaussian() { return gaussian_pair().first; }

    cdouble complex_gaussian() {
        auto [re, im] = gaussian_pair();
        return {re, im};
    }

    // Haar-random unit vector via normalized complex Gaussians.
    CVector haar_vector(int dim) {
        CVector v(dim);
        for (int i = 0; i < dim; ++i) v(i) = complex_gaussian();
        v /= v.norm();
        return v;
    }

    // Inverse-CDF draw from unnormalized non-negative weights.
    int categorical(std::span<const double> weights) {
        double total = 0.0;
        for (double w : weights) total += w;
        double u = uniform() * total;
        double acc = 0.0;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            acc += weights[i];
            if (u < acc) return static_cast<int>(i);
        }
        return static_cast<int>(weights.size()) - 1;
    }

private:
    std::mt19937_64 gen_;
};

}  // namespace uqsd
