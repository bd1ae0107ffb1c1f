#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "hecomp/bigint.hpp"
#include "hecomp/params.hpp"

namespace hecomp {

/// Paillier cryptosystem in the simplified g = N+1 form. Plaintext space is
/// Z_N for the key modulus N; ciphertexts live in Z*_{N^2}. Encryption is
/// (1 + x*N) * r^N mod N^2, decryption uses L(c^lambda mod N^2) * mu_inv mod N.
struct Paillier {
    struct PublicKey {
        BigUint modulus;      // N = p*q, the plaintext modulus m
        BigUint modulus_sq;   // N^2
        unsigned bits = 0;    // requested key size
    };

    struct Keypair {
        PublicKey pk;
        BigUint lambda;   // lcm(p-1, q-1)
        BigUint mu_inv;   // (lambda mod N)^-1 mod N
    };

    struct Ciphertext {
        BigUint value;
        bool operator==(const Ciphertext&) const = default;
    };

    static constexpr int kPrimeTestRounds = 89;  // >= 64 Miller-Rabin rounds after BPSW

    static const BigUint& plaintext_modulus(const PublicKey& pk) { return pk.modulus; }

    /// Serialized ciphertext width: values are < N^2 < 2^(2*bits).
    static std::size_t ciphertext_bytes(const PublicKey& pk) {
        return 2 * ((pk.bits + 7) / 8);
    }

    static Keypair from_primes(const BigUint& p, const BigUint& q) {
        if (p == q) throw std::invalid_argument("Paillier: primes must be distinct");
        Keypair kp;
        kp.pk.modulus = p * q;
        kp.pk.modulus_sq = kp.pk.modulus * kp.pk.modulus;
        kp.pk.bits = static_cast<unsigned>(bit_length(kp.pk.modulus));
        kp.lambda = lcm(p - 1, q - 1);
        kp.mu_inv = invmod(mod_q(kp.lambda, kp.pk.modulus), kp.pk.modulus);
        return kp;
    }

    static Keypair keygen(unsigned bits, std::mt19937_64& rng) {
        if (bits < 64 || bits % 2 != 0) {
            throw std::invalid_argument("Paillier::keygen: bits must be even and >= 64");
        }
        unsigned pb = bits / 2;
        BigUint primes[2];
        for (auto& prime : primes) {
            bool found = false;
            // Top two bits set so the product has exactly `bits` bits.
            for (int attempt = 0; attempt < 100000; ++attempt) {
                BigUint c = random_bits(pb, rng);
                mpz_setbit(c.get_mpz_t(), pb - 1);
                mpz_setbit(c.get_mpz_t(), pb - 2);
                mpz_setbit(c.get_mpz_t(), 0);
                if (mpz_probab_prime_p(c.get_mpz_t(), kPrimeTestRounds) != 0 && c != primes[0]) {
                    prime = c;
                    found = true;
                    break;
                }
            }
            if (!found) throw std::runtime_error("Paillier::keygen: prime generation failed");
        }
        Keypair kp = from_primes(primes[0], primes[1]);
        if (kp.pk.bits != bits) throw std::runtime_error("Paillier::keygen: modulus size drifted");
        return kp;
    }

    /// Deterministic encryption core with caller-chosen unit r.
    static Ciphertext encrypt_with(const PublicKey& pk, const BigUint& x, const BigUint& r) {
        if (x < 0 || x >= pk.modulus) {
            throw std::invalid_argument("Paillier::encrypt: plaintext out of range");
        }
        if (r < 1 || r >= pk.modulus || gcd(r, pk.modulus) != 1) {
            throw std::invalid_argument("Paillier::encrypt: randomness must be a unit");
        }
        BigUint gx = mod_q(1 + x * pk.modulus, pk.modulus_sq);
        return Ciphertext{mod_q(gx * powm(r, pk.modulus, pk.modulus_sq), pk.modulus_sq)};
    }

    static Ciphertext encrypt(const PublicKey& pk, const BigUint& x, std::mt19937_64& rng) {
        for (;;) {
            BigUint r = random_below(pk.modulus, rng);
            if (r > 0 && gcd(r, pk.modulus) == 1) return encrypt_with(pk, x, r);
        }
    }

    static BigUint decrypt(const Keypair& kp, const Ciphertext& c) {
        check_ciphertext(kp.pk, c);
        BigUint u = powm(c.value, kp.lambda, kp.pk.modulus_sq);
        BigUint l = (u - 1) / kp.pk.modulus;
        return mod_q(l * kp.mu_inv, kp.pk.modulus);
    }

    static Ciphertext add(const PublicKey& pk, const Ciphertext& c1, const Ciphertext& c2) {
        check_ciphertext(pk, c1);
        check_ciphertext(pk, c2);
        return Ciphertext{mod_q(c1.value * c2.value, pk.modulus_sq)};
    }

    /// Adds the plaintext constant k without fresh randomness: c * (1 + kN).
    static Ciphertext add_plain(const PublicKey& pk, const Ciphertext& c, const BigUint& k) {
        check_ciphertext(pk, c);
        BigUint gk = mod_q(1 + mod_q(k, pk.modulus) * pk.modulus, pk.modulus_sq);
        return Ciphertext{mod_q(c.value * gk, pk.modulus_sq)};
    }

    static Ciphertext plain_mul(const PublicKey& pk, const Ciphertext& c, const BigUint& k) {
        if (k < 0) throw std::invalid_argument("Paillier::plain_mul: scalar must be >= 0");
        check_ciphertext(pk, c);
        return Ciphertext{powm(c.value, mod_q(k, pk.modulus), pk.modulus_sq)};
    }

    /// Fused sum_i k_i (x) c_i as one interleaved multi-exponentiation: the
    /// squarings of the exponent ladder are shared across all terms.
    static Ciphertext weighted_sum(const PublicKey& pk, std::span<const BigUint> scalars,
                                   std::span<const Ciphertext> cts) {
        if (scalars.size() != cts.size()) {
            throw std::invalid_argument("Paillier::weighted_sum: length mismatch");
        }
        std::size_t max_bits = 0;
        for (const auto& k : scalars) {
            if (k < 0) throw std::invalid_argument("Paillier::weighted_sum: scalar must be >= 0");
            max_bits = std::max(max_bits, bit_length(k));
        }
        for (const auto& c : cts) check_ciphertext(pk, c);
        BigUint acc = 1;
        for (std::size_t bit = max_bits; bit-- > 0;) {
            acc = mod_q(acc * acc, pk.modulus_sq);
            for (std::size_t i = 0; i < cts.size(); ++i) {
                if (mpz_tstbit(scalars[i].get_mpz_t(), bit)) {
                    acc = mod_q(acc * cts[i].value, pk.modulus_sq);
                }
            }
        }
        return Ciphertext{acc};
    }

    static std::uint64_t fingerprint(const PublicKey& pk) {
        auto bytes = big_to_bytes_le(pk.modulus, (pk.bits + 7) / 8);
        std::uint64_t h = detail::fnv1a64(bytes.data(), bytes.size());
        return detail::fnv1a64_u64(pk.bits, h);
    }

private:
    static void check_ciphertext(const PublicKey& pk, const Ciphertext& c) {
        if (c.value < 0 || c.value >= pk.modulus_sq) {
            throw std::invalid_argument("Paillier: ciphertext out of range");
        }
    }
};

}  // namespace hecomp
