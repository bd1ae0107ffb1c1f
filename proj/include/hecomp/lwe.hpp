#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "hecomp/params.hpp"
#include "hecomp/polynomial.hpp"
#include "hecomp/prg.hpp"
#include "hecomp/sampling.hpp"

namespace hecomp {

struct LweSecretKey {
    std::vector<std::uint64_t> coeffs;
    bool operator==(const LweSecretKey&) const = default;
};

/// Ciphertext (a, b) with b = <a, sk> + delta*mu + e mod q. The noise fields
/// are bookkeeping only and never serialized.
struct LweCiphertext {
    std::vector<std::uint64_t> a;
    std::uint64_t b = 0;
    std::uint64_t noise_bound = 0;   // worst-case |accumulated noise|
    int noise_budget_bits = 0;       // informational headroom below delta/2
};

/// Fresh ciphertext with the mask replaced by its PRG seed.
struct SeededLweCiphertext {
    Seed128 seed;
    std::uint64_t b = 0;
    std::uint64_t noise_bound = 0;
    int noise_budget_bits = 0;
};

inline LweSecretKey lwe_keygen(const LweParams& params, std::mt19937_64& rng) {
    return LweSecretKey{sample_uniform_vector(params.n, params.q, rng)};
}

/// Deterministic encryption core with caller-chosen mask and noise.
inline LweCiphertext lwe_encrypt_with(const LweSecretKey& sk, std::uint64_t mu,
                                      std::vector<std::uint64_t> a, std::int64_t e,
                                      const LweParams& params) {
    if (mu >= params.p) throw std::invalid_argument("lwe_encrypt: message must be < p");
    if (a.size() != params.n || sk.coeffs.size() != params.n) {
        throw std::invalid_argument("lwe_encrypt: dimension mismatch");
    }
    const Zq& q = params.q;
    std::uint64_t b = dot_mod(a, sk.coeffs, q);
    b = q.add(b, q.mul(params.delta, mu));
    b = q.add(b, q.reduce_signed(e));
    LweCiphertext ct;
    ct.a = std::move(a);
    ct.b = b;
    ct.noise_bound = static_cast<std::uint64_t>(params.noise.bound);
    ct.noise_budget_bits = detail::noise_budget_bits(ct.noise_bound, params.delta);
    return ct;
}

inline LweCiphertext lwe_encrypt(const LweSecretKey& sk, std::uint64_t mu,
                                 const LweParams& params, std::mt19937_64& rng) {
    auto a = sample_uniform_vector(params.n, params.q, rng);
    std::int64_t e = sample_error(params.noise, rng);
    return lwe_encrypt_with(sk, mu, std::move(a), e, params);
}

inline std::uint64_t lwe_decrypt(const LweSecretKey& sk, const LweCiphertext& ct,
                                 const LweParams& params) {
    if (ct.a.size() != params.n || sk.coeffs.size() != params.n) {
        throw std::invalid_argument("lwe_decrypt: dimension mismatch");
    }
    std::uint64_t mu_star = params.q.sub(ct.b, dot_mod(ct.a, sk.coeffs, params.q));
    return rounded_quotient(mu_star, params.delta) % params.p;
}

inline SeededLweCiphertext lwe_encrypt_seeded(const LweSecretKey& sk, std::uint64_t mu,
                                              const LweParams& params, const Seed128& seed,
                                              std::mt19937_64& rng) {
    auto a = prg_expand(seed, params.n, params.q);
    std::int64_t e = sample_error(params.noise, rng);
    LweCiphertext full = lwe_encrypt_with(sk, mu, std::move(a), e, params);
    return SeededLweCiphertext{seed, full.b, full.noise_bound, full.noise_budget_bits};
}

inline LweCiphertext lwe_expand_seeded(const SeededLweCiphertext& sct, const LweParams& params) {
    LweCiphertext ct;
    ct.a = prg_expand(sct.seed, params.n, params.q);
    ct.b = sct.b;
    ct.noise_bound = sct.noise_bound;
    ct.noise_budget_bits = sct.noise_budget_bits;
    return ct;
}

inline LweCiphertext lwe_add(const LweCiphertext& c1, const LweCiphertext& c2,
                             const LweParams& params) {
    if (c1.a.size() != params.n || c2.a.size() != params.n) {
        throw std::invalid_argument("lwe_add: dimension mismatch");
    }
    LweCiphertext r;
    r.a.resize(params.n);
    for (std::size_t i = 0; i < params.n; ++i) r.a[i] = params.q.add(c1.a[i], c2.a[i]);
    r.b = params.q.add(c1.b, c2.b);
    r.noise_bound = detail::sat_add_u64(c1.noise_bound, c2.noise_bound);
    r.noise_budget_bits = detail::noise_budget_bits(r.noise_bound, params.delta);
    return r;
}

inline LweCiphertext lwe_plain_mul(const LweCiphertext& ct, std::uint64_t k,
                                   const LweParams& params) {
    if (k >= params.p) throw std::invalid_argument("lwe_plain_mul: scalar must be < p");
    if (ct.a.size() != params.n) throw std::invalid_argument("lwe_plain_mul: dimension mismatch");
    LweCiphertext r;
    r.a.resize(params.n);
    for (std::size_t i = 0; i < params.n; ++i) r.a[i] = params.q.mul(ct.a[i], k);
    r.b = params.q.mul(ct.b, k);
    r.noise_bound = detail::sat_mul_u64(ct.noise_bound, k);
    r.noise_budget_bits = detail::noise_budget_bits(r.noise_bound, params.delta);
    return r;
}

}  // namespace hecomp
