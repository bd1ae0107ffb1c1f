#pragma once

#include <concepts>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "hecomp/bigint.hpp"
#include "hecomp/lwe.hpp"
#include "hecomp/rlwe.hpp"

namespace hecomp {

/// Capability contract for the additive scheme backing the compressor: a
/// plaintext modulus query, encryption/decryption, ciphertext addition,
/// plaintext addition, and plaintext-scalar multiplication. Any model of this
/// concept can be swapped in; Paillier is the one that ships.
template <class S>
concept additive_scheme = requires(const typename S::PublicKey& pk, const typename S::Keypair& kp,
                                   const typename S::Ciphertext& c, const BigUint& x,
                                   std::mt19937_64& rng) {
    { S::plaintext_modulus(pk) } -> std::convertible_to<BigUint>;
    { S::encrypt(pk, x, rng) } -> std::same_as<typename S::Ciphertext>;
    { S::decrypt(kp, c) } -> std::same_as<BigUint>;
    { S::add(pk, c, c) } -> std::same_as<typename S::Ciphertext>;
    { S::add_plain(pk, c, x) } -> std::same_as<typename S::Ciphertext>;
    { S::plain_mul(pk, c, x) } -> std::same_as<typename S::Ciphertext>;
};

class incompatibility_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class batch_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Upper bound on the linear phase b + sum_i (q - a[i]) * sk[i] over dimension
/// d: every compressed value is <= q + d*q^2.
inline BigUint linear_phase_bound(const Zq& q, std::size_t dim) {
    BigUint qb = q.to_big();
    return qb + BigUint(static_cast<unsigned long>(dim)) * qb * qb;
}

/// Correctness requirement on the additive plaintext modulus: m > q + d*q^2.
inline bool check_compatibility(const BigUint& m, const Zq& q, std::size_t dim) {
    return m > linear_phase_bound(q, dim);
}

/// Bits one compressed value can occupy: bit length of q + d*q^2.
inline unsigned slot_width_bits(const Zq& q, std::size_t dim) {
    return static_cast<unsigned>(bit_length(linear_phase_bound(q, dim)));
}

/// How many compressed values fit in one additive ciphertext. Conservative
/// bit-length form of floor(log2 m / log2(q + d*q^2)): capacity * width never
/// exceeds floor(log2 m), so the packed value stays below m. Returns 0 when
/// even one full-width slot does not fit (single-value compression may still
/// be legal if m > q + d*q^2).
inline std::size_t batch_capacity(const Zq& q, std::size_t dim, const BigUint& m) {
    if (m < 2) throw std::invalid_argument("batch_capacity: invalid modulus");
    unsigned w = slot_width_bits(q, dim);
    std::size_t floor_log2_m = bit_length(m) - 1;
    std::size_t capacity = floor_log2_m / w;
    // Exact guard: the largest packable value must stay below m.
    while (capacity > 0) {
        BigUint max_packed = ((BigUint(1) << (capacity * w)) - 1);
        if (max_packed < m) break;
        --capacity;
    }
    return capacity;
}

/// Additively encrypted lattice secret key: entry i is AEnc(sk[i]). Carries
/// the additive public key plus fingerprints so mismatched key/ciphertext
/// pairs fail fast instead of decrypting garbage.
template <additive_scheme S>
struct EncryptedSecretKey {
    SchemeKind scheme = SchemeKind::lwe;
    typename S::PublicKey ahe_pk;
    std::vector<typename S::Ciphertext> entries;
    std::uint64_t params_fp = 0;
    std::uint64_t ahe_fp = 0;
};

/// Slot layout of a compressed ciphertext. slot j occupies bits
/// [j*slot_width_bits, (j+1)*slot_width_bits) of the additive plaintext.
struct SlotLayout {
    SchemeKind scheme = SchemeKind::lwe;
    std::uint16_t slot_count = 0;
    std::uint16_t slot_width_bits = 0;
    std::uint64_t params_fp = 0;
    bool operator==(const SlotLayout&) const = default;
};

template <additive_scheme S>
struct CompressedCiphertext {
    typename S::Ciphertext payload;
    SlotLayout layout;
};

namespace detail {

template <additive_scheme S>
std::uint64_t scheme_fingerprint(const typename S::PublicKey& pk) {
    if constexpr (requires { S::fingerprint(pk); }) {
        return S::fingerprint(pk);
    } else {
        auto m = S::plaintext_modulus(pk);
        auto bytes = big_to_bytes_le(m, (bit_length(m) + 7) / 8);
        return fnv1a64(bytes.data(), bytes.size());
    }
}

template <additive_scheme S>
void require_compatible(const typename S::PublicKey& pk, const Zq& q, std::size_t dim) {
    if (!check_compatibility(S::plaintext_modulus(pk), q, dim)) {
        throw incompatibility_error(
            "additive plaintext modulus is too small: need m > q + dim*q^2");
    }
}

/// sum_i scalars[i] (x) entries[i], via the scheme's fused form when it has one.
template <additive_scheme S>
typename S::Ciphertext weighted_sum(const typename S::PublicKey& pk,
                                    std::span<const BigUint> scalars,
                                    std::span<const typename S::Ciphertext> cts) {
    if (cts.empty() || scalars.size() != cts.size()) {
        throw std::invalid_argument("weighted_sum: empty or mismatched inputs");
    }
    if constexpr (requires { S::weighted_sum(pk, scalars, cts); }) {
        return S::weighted_sum(pk, scalars, cts);
    } else {
        typename S::Ciphertext acc = S::plain_mul(pk, cts[0], scalars[0]);
        for (std::size_t i = 1; i < cts.size(); ++i) {
            acc = S::add(pk, acc, S::plain_mul(pk, cts[i], scalars[i]));
        }
        return acc;
    }
}

/// Core of Theorems 1 and 2: homomorphically evaluate
/// b + sum_i scalar_i * sk[i] inside the additive plaintext space.
template <additive_scheme S>
typename S::Ciphertext compress_linear_phase(const EncryptedSecretKey<S>& esk,
                                             std::span<const BigUint> scalars,
                                             std::uint64_t b_term) {
    auto acc = weighted_sum<S>(esk.ahe_pk, scalars, esk.entries);
    return S::add_plain(esk.ahe_pk, acc, big_from_u64(b_term));
}

inline std::uint64_t decode_linear_phase(const BigUint& y, const Zq& q, std::uint64_t delta,
                                         std::uint64_t p) {
    std::uint64_t mu_star = q.reduce_big(y);
    return rounded_quotient(mu_star, delta) % p;
}

/// LWECompress exponents: (q - a[i]); a[i] == 0 contributes the full scalar q.
inline std::vector<BigUint> lwe_compress_scalars(const std::vector<std::uint64_t>& a, const Zq& q) {
    std::vector<BigUint> scalars;
    scalars.reserve(a.size());
    BigUint qb = q.to_big();
    for (std::uint64_t ai : a) scalars.push_back(qb - big_from_u64(ai));
    return scalars;
}

/// RLWECompress exponents for coefficient k: (q - A[k-i]) for i <= k, and
/// +A[N+k-i] for i > k (the negacyclic wraparound terms enter positively).
inline std::vector<BigUint> rlwe_compress_scalars(const Polynomial& a, std::size_t k, const Zq& q) {
    const std::size_t n = a.size();
    std::vector<BigUint> scalars;
    scalars.reserve(n);
    BigUint qb = q.to_big();
    for (std::size_t i = 0; i <= k; ++i) scalars.push_back(qb - big_from_u64(a[k - i]));
    for (std::size_t i = k + 1; i < n; ++i) scalars.push_back(big_from_u64(a[n + k - i]));
    return scalars;
}

}  // namespace detail

template <additive_scheme S>
EncryptedSecretKey<S> encrypt_lattice_key(const typename S::PublicKey& pk, const LweSecretKey& sk,
                                          const LweParams& params, std::mt19937_64& rng) {
    if (sk.coeffs.size() != params.n) throw std::invalid_argument("encrypt_lattice_key: bad key");
    detail::require_compatible<S>(pk, params.q, params.n);
    EncryptedSecretKey<S> esk;
    esk.scheme = SchemeKind::lwe;
    esk.ahe_pk = pk;
    esk.params_fp = fingerprint(params);
    esk.ahe_fp = detail::scheme_fingerprint<S>(pk);
    esk.entries.reserve(params.n);
    for (std::uint64_t c : sk.coeffs) {
        esk.entries.push_back(S::encrypt(pk, big_from_u64(c), rng));
    }
    return esk;
}

template <additive_scheme S>
EncryptedSecretKey<S> encrypt_lattice_key(const typename S::PublicKey& pk, const RlweSecretKey& sk,
                                          const RlweParams& params, std::mt19937_64& rng) {
    if (sk.s.size() != params.N) throw std::invalid_argument("encrypt_lattice_key: bad key");
    detail::require_compatible<S>(pk, params.q, params.N);
    EncryptedSecretKey<S> esk;
    esk.scheme = SchemeKind::rlwe;
    esk.ahe_pk = pk;
    esk.params_fp = fingerprint(params);
    esk.ahe_fp = detail::scheme_fingerprint<S>(pk);
    esk.entries.reserve(params.N);
    for (std::uint64_t c : sk.s.coeffs) {
        esk.entries.push_back(S::encrypt(pk, big_from_u64(c), rng));
    }
    return esk;
}

namespace detail {

template <additive_scheme S>
void require_esk_matches(const EncryptedSecretKey<S>& esk, SchemeKind scheme,
                         std::uint64_t params_fp, std::size_t dim) {
    if (esk.scheme != scheme) throw std::invalid_argument("compress: scheme mismatch");
    if (esk.params_fp != params_fp) {
        throw std::invalid_argument("compress: encrypted key was made for different parameters");
    }
    if (esk.entries.size() != dim) throw std::invalid_argument("compress: dimension mismatch");
    if (esk.ahe_fp != scheme_fingerprint<S>(esk.ahe_pk)) {
        throw std::invalid_argument("compress: additive key fingerprint mismatch");
    }
}

}  // namespace detail

/// LWECompress: x = b (+) sum_i (q - a[i]) (x) skbar[i].
template <additive_scheme S>
CompressedCiphertext<S> lwe_compress(const EncryptedSecretKey<S>& esk, const LweCiphertext& ct,
                                     const LweParams& params) {
    detail::require_esk_matches(esk, SchemeKind::lwe, fingerprint(params), params.n);
    if (ct.a.size() != params.n) throw std::invalid_argument("lwe_compress: bad ciphertext");
    auto scalars = detail::lwe_compress_scalars(ct.a, params.q);
    CompressedCiphertext<S> out;
    out.payload = detail::compress_linear_phase(esk, std::span<const BigUint>(scalars), ct.b);
    out.layout = SlotLayout{SchemeKind::lwe, 1,
                            static_cast<std::uint16_t>(slot_width_bits(params.q, params.n)),
                            esk.params_fp};
    return out;
}

/// RLWECompress for coefficient k of the plaintext polynomial.
template <additive_scheme S>
CompressedCiphertext<S> rlwe_compress(const EncryptedSecretKey<S>& esk, const RlweCiphertext& ct,
                                      std::size_t k, const RlweParams& params) {
    detail::require_esk_matches(esk, SchemeKind::rlwe, fingerprint(params), params.N);
    if (k >= params.N) throw std::out_of_range("rlwe_compress: k out of range");
    if (ct.a.size() != params.N || ct.b.size() != params.N) {
        throw std::invalid_argument("rlwe_compress: bad ciphertext");
    }
    auto scalars = detail::rlwe_compress_scalars(ct.a, k, params.q);
    CompressedCiphertext<S> out;
    out.payload = detail::compress_linear_phase(esk, std::span<const BigUint>(scalars), ct.b[k]);
    out.layout = SlotLayout{SchemeKind::rlwe, 1,
                            static_cast<std::uint16_t>(slot_width_bits(params.q, params.N)),
                            esk.params_fp};
    return out;
}

namespace detail {

inline void require_layout(const SlotLayout& layout, SchemeKind scheme, std::uint64_t params_fp) {
    if (layout.scheme != scheme) throw std::invalid_argument("modified decrypt: scheme mismatch");
    if (layout.params_fp != params_fp) {
        throw std::invalid_argument("modified decrypt: parameter fingerprint mismatch");
    }
    if (layout.slot_count < 1) throw std::invalid_argument("modified decrypt: empty layout");
}

}  // namespace detail

/// ModifiedLWEDecrypt: y = ADec(x), then round((y mod q) / delta) mod p.
template <additive_scheme S>
std::uint64_t modified_lwe_decrypt(const typename S::Keypair& kp, const CompressedCiphertext<S>& x,
                                   const LweParams& params) {
    detail::require_layout(x.layout, SchemeKind::lwe, fingerprint(params));
    if (x.layout.slot_count != 1) {
        throw std::invalid_argument("modified_lwe_decrypt: multi-slot payload, use the batch form");
    }
    BigUint y = S::decrypt(kp, x.payload);
    return detail::decode_linear_phase(y, params.q, params.delta, params.p);
}

/// ModifiedRLWEDecrypt; identical decoding, RLWE layout.
template <additive_scheme S>
std::uint64_t modified_rlwe_decrypt(const typename S::Keypair& kp, const CompressedCiphertext<S>& x,
                                    const RlweParams& params) {
    detail::require_layout(x.layout, SchemeKind::rlwe, fingerprint(params));
    if (x.layout.slot_count != 1) {
        throw std::invalid_argument("modified_rlwe_decrypt: multi-slot payload, use the batch form");
    }
    BigUint y = S::decrypt(kp, x.payload);
    return detail::decode_linear_phase(y, params.q, params.delta, params.p);
}

namespace detail {

/// Packs single-compression payloads into disjoint bit ranges: slot j of the
/// plaintext is the j-th linear phase at offset j*w. Evaluated Horner-style
/// from the top slot down, which packs the same value as
/// (+)_j 2^(jw) (x) value_j with far fewer plaintext multiplications.
template <additive_scheme S, class CompressOne>
CompressedCiphertext<S> compress_batch(const EncryptedSecretKey<S>& esk, std::size_t count,
                                       SchemeKind scheme, const Zq& q, std::size_t dim,
                                       std::uint64_t params_fp, CompressOne&& compress_one) {
    if (count == 0) throw std::invalid_argument("compress batch: empty input");
    std::size_t capacity = batch_capacity(q, dim, S::plaintext_modulus(esk.ahe_pk));
    if (count > capacity) {
        throw batch_error("compress batch: " + std::to_string(count) +
                          " values exceed batch capacity " + std::to_string(capacity));
    }
    unsigned w = slot_width_bits(q, dim);
    BigUint shift = BigUint(1) << w;
    typename S::Ciphertext acc = compress_one(count - 1);
    for (std::size_t j = count - 1; j-- > 0;) {
        acc = S::plain_mul(esk.ahe_pk, acc, shift);
        acc = S::add(esk.ahe_pk, acc, compress_one(j));
    }
    CompressedCiphertext<S> out;
    out.payload = std::move(acc);
    out.layout = SlotLayout{scheme, static_cast<std::uint16_t>(count),
                            static_cast<std::uint16_t>(w), params_fp};
    return out;
}

}  // namespace detail

/// Packs several LWE ciphertexts (same key) into one additive ciphertext.
template <additive_scheme S>
CompressedCiphertext<S> lwe_compress_batch(const EncryptedSecretKey<S>& esk,
                                           std::span<const LweCiphertext> cts,
                                           const LweParams& params) {
    detail::require_esk_matches(esk, SchemeKind::lwe, fingerprint(params), params.n);
    for (const auto& ct : cts) {
        if (ct.a.size() != params.n) throw std::invalid_argument("lwe_compress_batch: bad ciphertext");
    }
    return detail::compress_batch<S>(
        esk, cts.size(), SchemeKind::lwe, params.q, params.n, esk.params_fp,
        [&](std::size_t j) {
            auto scalars = detail::lwe_compress_scalars(cts[j].a, params.q);
            return detail::compress_linear_phase(esk, std::span<const BigUint>(scalars), cts[j].b);
        });
}

/// Extracts several coefficients of one RLWE ciphertext into one payload.
/// Duplicate indices are allowed; each slot is independent.
template <additive_scheme S>
CompressedCiphertext<S> rlwe_compress_batch(const EncryptedSecretKey<S>& esk,
                                            const RlweCiphertext& ct,
                                            std::span<const std::size_t> ks,
                                            const RlweParams& params) {
    detail::require_esk_matches(esk, SchemeKind::rlwe, fingerprint(params), params.N);
    if (ct.a.size() != params.N || ct.b.size() != params.N) {
        throw std::invalid_argument("rlwe_compress_batch: bad ciphertext");
    }
    for (std::size_t k : ks) {
        if (k >= params.N) throw std::out_of_range("rlwe_compress_batch: k out of range");
    }
    return detail::compress_batch<S>(
        esk, ks.size(), SchemeKind::rlwe, params.q, params.N, esk.params_fp,
        [&](std::size_t j) {
            auto scalars = detail::rlwe_compress_scalars(ct.a, ks[j], params.q);
            return detail::compress_linear_phase(esk, std::span<const BigUint>(scalars),
                                                 ct.b[ks[j]]);
        });
}

namespace detail {

template <additive_scheme S>
std::vector<std::uint64_t> decode_batch(const typename S::Keypair& kp,
                                        const CompressedCiphertext<S>& x, const Zq& q,
                                        std::uint64_t delta, std::uint64_t p) {
    BigUint y = S::decrypt(kp, x.payload);
    unsigned w = x.layout.slot_width_bits;
    BigUint mask = (BigUint(1) << w) - 1;
    std::vector<std::uint64_t> out;
    out.reserve(x.layout.slot_count);
    for (std::size_t j = 0; j < x.layout.slot_count; ++j) {
        BigUint v = (y >> (j * w)) & mask;
        out.push_back(decode_linear_phase(v, q, delta, p));
    }
    return out;
}

}  // namespace detail

/// Decodes every slot of a batched compression, slot j first.
template <additive_scheme S>
std::vector<std::uint64_t> modified_lwe_decrypt_batch(const typename S::Keypair& kp,
                                                      const CompressedCiphertext<S>& x,
                                                      const LweParams& params) {
    detail::require_layout(x.layout, SchemeKind::lwe, fingerprint(params));
    return detail::decode_batch(kp, x, params.q, params.delta, params.p);
}

template <additive_scheme S>
std::vector<std::uint64_t> modified_rlwe_decrypt_batch(const typename S::Keypair& kp,
                                                       const CompressedCiphertext<S>& x,
                                                       const RlweParams& params) {
    detail::require_layout(x.layout, SchemeKind::rlwe, fingerprint(params));
    return detail::decode_batch(kp, x, params.q, params.delta, params.p);
}

}  // namespace hecomp
