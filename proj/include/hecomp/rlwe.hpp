#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>

#include "hecomp/params.hpp"
#include "hecomp/polynomial.hpp"
#include "hecomp/prg.hpp"
#include "hecomp/sampling.hpp"

namespace hecomp {

struct RlweSecretKey {
    Polynomial s;
    bool operator==(const RlweSecretKey&) const = default;
};

/// Ciphertext (A(X), B(X)) with B = A*S + delta*mu + E mod R_q.
struct RlweCiphertext {
    Polynomial a;
    Polynomial b;
    std::uint64_t noise_bound = 0;
    int noise_budget_bits = 0;
};

struct SeededRlweCiphertext {
    Seed128 seed;
    Polynomial b;
    std::uint64_t noise_bound = 0;
    int noise_budget_bits = 0;
};

inline RlweSecretKey rlwe_keygen(const RlweParams& params, std::mt19937_64& rng) {
    return RlweSecretKey{Polynomial(sample_uniform_vector(params.N, params.q, rng))};
}

namespace detail {

inline void require_plaintext_range(const Polynomial& mu, const RlweParams& params) {
    if (mu.size() != params.N) throw std::invalid_argument("rlwe: plaintext length mismatch");
    for (std::uint64_t c : mu.coeffs) {
        if (c >= params.p) throw std::invalid_argument("rlwe: plaintext coefficient must be < p");
    }
}

}  // namespace detail

/// Deterministic encryption core with caller-chosen mask and noise polynomial.
inline RlweCiphertext rlwe_encrypt_with(const RlweSecretKey& sk, const Polynomial& mu,
                                        Polynomial a, const std::vector<std::int64_t>& e,
                                        const RlweParams& params) {
    detail::require_plaintext_range(mu, params);
    if (a.size() != params.N || sk.s.size() != params.N || e.size() != params.N) {
        throw std::invalid_argument("rlwe_encrypt: dimension mismatch");
    }
    const Zq& q = params.q;
    Polynomial b = poly_negacyclic_mul(a, sk.s, q);
    for (std::size_t i = 0; i < params.N; ++i) {
        b[i] = q.add(b[i], q.mul(params.delta, mu[i]));
        b[i] = q.add(b[i], q.reduce_signed(e[i]));
    }
    RlweCiphertext ct;
    ct.a = std::move(a);
    ct.b = std::move(b);
    ct.noise_bound = static_cast<std::uint64_t>(params.noise.bound);
    ct.noise_budget_bits = detail::noise_budget_bits(ct.noise_bound, params.delta);
    return ct;
}

inline RlweCiphertext rlwe_encrypt(const RlweSecretKey& sk, const Polynomial& mu,
                                   const RlweParams& params, std::mt19937_64& rng) {
    Polynomial a(sample_uniform_vector(params.N, params.q, rng));
    std::vector<std::int64_t> e(params.N);
    for (auto& v : e) v = sample_error(params.noise, rng);
    return rlwe_encrypt_with(sk, mu, std::move(a), e, params);
}

inline Polynomial rlwe_decrypt(const RlweSecretKey& sk, const RlweCiphertext& ct,
                               const RlweParams& params) {
    if (ct.a.size() != params.N || ct.b.size() != params.N || sk.s.size() != params.N) {
        throw std::invalid_argument("rlwe_decrypt: dimension mismatch");
    }
    Polynomial mu_star = poly_sub(ct.b, poly_negacyclic_mul(ct.a, sk.s, params.q), params.q);
    Polynomial mu(params.N);
    for (std::size_t i = 0; i < params.N; ++i) {
        mu[i] = rounded_quotient(mu_star[i], params.delta) % params.p;
    }
    return mu;
}

inline SeededRlweCiphertext rlwe_encrypt_seeded(const RlweSecretKey& sk, const Polynomial& mu,
                                                const RlweParams& params, const Seed128& seed,
                                                std::mt19937_64& rng) {
    Polynomial a(prg_expand(seed, params.N, params.q));
    std::vector<std::int64_t> e(params.N);
    for (auto& v : e) v = sample_error(params.noise, rng);
    RlweCiphertext full = rlwe_encrypt_with(sk, mu, std::move(a), e, params);
    return SeededRlweCiphertext{seed, std::move(full.b), full.noise_bound, full.noise_budget_bits};
}

inline RlweCiphertext rlwe_expand_seeded(const SeededRlweCiphertext& sct, const RlweParams& params) {
    RlweCiphertext ct;
    ct.a = Polynomial(prg_expand(sct.seed, params.N, params.q));
    ct.b = sct.b;
    ct.noise_bound = sct.noise_bound;
    ct.noise_budget_bits = sct.noise_budget_bits;
    return ct;
}

/// Plaintext-side single-coefficient decryption:
///   mu'[k] = round((B[k] - sum_{i<=k} A[k-i]S[i] + sum_{i>k} A[N+k-i]S[i]) / delta) mod p
/// with the numerator reduced mod q. Serves as the reference the compressor
/// is checked against.
inline std::uint64_t rlwe_extract_coeff_plain(const RlweSecretKey& sk, const RlweCiphertext& ct,
                                              std::size_t k, const RlweParams& params) {
    if (k >= params.N) throw std::out_of_range("rlwe_extract_coeff_plain: k out of range");
    if (ct.a.size() != params.N || ct.b.size() != params.N || sk.s.size() != params.N) {
        throw std::invalid_argument("rlwe_extract_coeff_plain: dimension mismatch");
    }
    const Zq& q = params.q;
    std::uint64_t acc = ct.b[k];
    for (std::size_t i = 0; i <= k; ++i) {
        acc = q.sub(acc, q.mul(ct.a[k - i], sk.s[i]));
    }
    for (std::size_t i = k + 1; i < params.N; ++i) {
        acc = q.add(acc, q.mul(ct.a[params.N + k - i], sk.s[i]));
    }
    return rounded_quotient(acc, params.delta) % params.p;
}

inline RlweCiphertext rlwe_add(const RlweCiphertext& c1, const RlweCiphertext& c2,
                               const RlweParams& params) {
    if (c1.a.size() != params.N || c2.a.size() != params.N) {
        throw std::invalid_argument("rlwe_add: dimension mismatch");
    }
    RlweCiphertext r;
    r.a = poly_add(c1.a, c2.a, params.q);
    r.b = poly_add(c1.b, c2.b, params.q);
    r.noise_bound = detail::sat_add_u64(c1.noise_bound, c2.noise_bound);
    r.noise_budget_bits = detail::noise_budget_bits(r.noise_bound, params.delta);
    return r;
}

inline RlweCiphertext rlwe_plain_mul(const RlweCiphertext& ct, std::uint64_t k,
                                     const RlweParams& params) {
    if (k >= params.p) throw std::invalid_argument("rlwe_plain_mul: scalar must be < p");
    if (ct.a.size() != params.N) throw std::invalid_argument("rlwe_plain_mul: dimension mismatch");
    RlweCiphertext r;
    r.a = Polynomial(params.N);
    r.b = Polynomial(params.N);
    for (std::size_t i = 0; i < params.N; ++i) {
        r.a[i] = params.q.mul(ct.a[i], k);
        r.b[i] = params.q.mul(ct.b[i], k);
    }
    r.noise_bound = detail::sat_mul_u64(ct.noise_bound, k);
    r.noise_budget_bits = detail::noise_budget_bits(r.noise_bound, params.delta);
    return r;
}

}  // namespace hecomp
