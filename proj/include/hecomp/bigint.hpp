#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

namespace hecomp {

/// Arbitrary-precision non-negative integer. Backed by GMP; values are kept
/// non-negative at every public API boundary of this library.
using BigUint = mpz_class;

/// Number of bits needed to represent x (0 for x == 0).
inline std::size_t bit_length(const BigUint& x) {
    if (x == 0) return 0;
    return mpz_sizeinbase(x.get_mpz_t(), 2);
}

/// Canonical residue of x modulo q, in [0, q). x may be negative.
inline BigUint mod_q(const BigUint& x, const BigUint& q) {
    if (q < 2) throw std::invalid_argument("mod_q: modulus must be >= 2");
    BigUint r;
    mpz_fdiv_r(r.get_mpz_t(), x.get_mpz_t(), q.get_mpz_t());
    return r;
}

/// base^exp mod m (exp >= 0).
inline BigUint powm(const BigUint& base, const BigUint& exp, const BigUint& m) {
    if (exp < 0) throw std::invalid_argument("powm: negative exponent");
    BigUint r;
    mpz_powm(r.get_mpz_t(), base.get_mpz_t(), exp.get_mpz_t(), m.get_mpz_t());
    return r;
}

/// Multiplicative inverse of a mod m; throws if it does not exist.
inline BigUint invmod(const BigUint& a, const BigUint& m) {
    BigUint r;
    if (mpz_invert(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t()) == 0) {
        throw std::domain_error("invmod: inverse does not exist");
    }
    return r;
}

inline BigUint gcd(const BigUint& a, const BigUint& b) {
    BigUint r;
    mpz_gcd(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return r;
}

inline BigUint lcm(const BigUint& a, const BigUint& b) {
    BigUint r;
    mpz_lcm(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return r;
}

inline BigUint big_from_u64(std::uint64_t v) {
    BigUint r;
    mpz_import(r.get_mpz_t(), 1, -1, sizeof(v), 0, 0, &v);
    return r;
}

inline BigUint big_from_u128(unsigned __int128 v) {
    std::uint64_t words[2] = {static_cast<std::uint64_t>(v),
                              static_cast<std::uint64_t>(v >> 64)};
    BigUint r;
    mpz_import(r.get_mpz_t(), 2, -1, sizeof(words[0]), 0, 0, words);
    return r;
}

/// Checked narrowing to uint64_t.
inline std::uint64_t big_to_u64(const BigUint& x) {
    if (x < 0 || bit_length(x) > 64) {
        throw std::overflow_error("big_to_u64: value does not fit");
    }
    std::uint64_t w = 0;
    mpz_export(&w, nullptr, -1, sizeof(w), 0, 0, x.get_mpz_t());
    return w;
}

/// Fixed-width little-endian encoding; throws if x needs more than `width` bytes.
inline std::vector<std::uint8_t> big_to_bytes_le(const BigUint& x, std::size_t width) {
    if (x < 0) throw std::invalid_argument("big_to_bytes_le: negative value");
    if ((bit_length(x) + 7) / 8 > width) {
        throw std::overflow_error("big_to_bytes_le: value wider than field");
    }
    std::vector<std::uint8_t> out(width, 0);
    std::size_t count = 0;
    mpz_export(out.data(), &count, -1, 1, 0, 0, x.get_mpz_t());
    return out;
}

inline BigUint big_from_bytes_le(std::span<const std::uint8_t> bytes) {
    BigUint r;
    if (!bytes.empty()) {
        mpz_import(r.get_mpz_t(), bytes.size(), -1, 1, 0, 0, bytes.data());
    }
    return r;
}

/// Uniform value in [0, 2^bits), drawn from the caller's RNG.
inline BigUint random_bits(std::size_t bits, std::mt19937_64& rng) {
    if (bits == 0) return BigUint(0);
    std::size_t words = (bits + 63) / 64;
    std::vector<std::uint64_t> buf(words);
    for (auto& w : buf) w = rng();
    if (bits % 64 != 0) {
        buf.back() &= (std::uint64_t(1) << (bits % 64)) - 1;
    }
    BigUint r;
    mpz_import(r.get_mpz_t(), buf.size(), -1, sizeof(buf[0]), 0, 0, buf.data());
    return r;
}

/// Uniform value in [0, bound) by rejection sampling.
inline BigUint random_below(const BigUint& bound, std::mt19937_64& rng) {
    if (bound <= 0) throw std::invalid_argument("random_below: bound must be positive");
    std::size_t k = bit_length(bound);
    for (;;) {
        BigUint r = random_bits(k, rng);
        if (r < bound) return r;
    }
}

}  // namespace hecomp
