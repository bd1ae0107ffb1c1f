#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "hecomp/zq.hpp"

namespace hecomp {

/// Discrete Gaussian error distribution: stddev sigma, rejection bound on |e|.
struct NoiseParams {
    double sigma = 0.0;
    std::int64_t bound = 0;

    static NoiseParams gaussian(double sigma) {
        if (!(sigma > 0.0)) throw std::invalid_argument("NoiseParams: sigma must be > 0");
        NoiseParams np;
        np.sigma = sigma;
        np.bound = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(6.0 * sigma)));
        return np;
    }

    static NoiseParams with_bound(double sigma, std::int64_t bound) {
        if (!(sigma > 0.0)) throw std::invalid_argument("NoiseParams: sigma must be > 0");
        if (bound < 1) throw std::invalid_argument("NoiseParams: bound must be >= 1");
        NoiseParams np;
        np.sigma = sigma;
        np.bound = bound;
        return np;
    }
};

/// Draws from the discrete Gaussian truncated to [-bound, bound] by rejection:
/// propose uniformly, accept with probability exp(-x^2 / 2 sigma^2).
inline std::int64_t sample_error(const NoiseParams& np, std::mt19937_64& rng) {
    std::uniform_int_distribution<std::int64_t> propose(-np.bound, np.bound);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double inv_two_sigma_sq = 1.0 / (2.0 * np.sigma * np.sigma);
    for (;;) {
        std::int64_t x = propose(rng);
        double accept = std::exp(-static_cast<double>(x) * static_cast<double>(x) * inv_two_sigma_sq);
        if (unit(rng) < accept) return x;
    }
}

/// Uniform residue in [0, q), rejection-sampled from masked 64-bit draws.
inline std::uint64_t sample_uniform(const Zq& q, std::mt19937_64& rng) {
    unsigned bits = q.residue_bits();
    std::uint64_t mask = bits == 64 ? ~std::uint64_t(0) : (std::uint64_t(1) << bits) - 1;
    for (;;) {
        std::uint64_t v = rng() & mask;
        if (uint128_t(v) < q.value()) return v;
    }
}

inline std::vector<std::uint64_t> sample_uniform_vector(std::size_t n, const Zq& q,
                                                        std::mt19937_64& rng) {
    std::vector<std::uint64_t> out(n);
    for (auto& v : out) v = sample_uniform(q, rng);
    return out;
}

}  // namespace hecomp
