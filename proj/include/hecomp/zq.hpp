#pragma once

#include <cstdint>
#include <stdexcept>

#include "hecomp/bigint.hpp"

namespace hecomp {

using uint128_t = unsigned __int128;
using int128_t = __int128;

/// Residue ring Z_q for a modulus 2 <= q <= 2^64. Residues are uint64_t in
/// [0, q); q itself is stored as 128 bits so q == 2^64 is representable
/// (q_lo == 0 encodes that case).
struct Zq {
    std::uint64_t q_lo = 0;  // q mod 2^64; zero means q == 2^64

    static Zq pow2(unsigned log2_q) {
        if (log2_q < 1 || log2_q > 64) {
            throw std::invalid_argument("Zq::pow2: log2_q must be in [1, 64]");
        }
        Zq z;
        z.q_lo = log2_q == 64 ? 0 : (std::uint64_t(1) << log2_q);
        return z;
    }

    static Zq of(std::uint64_t q) {
        if (q < 2) throw std::invalid_argument("Zq::of: modulus must be >= 2");
        Zq z;
        z.q_lo = q;
        return z;
    }

    bool operator==(const Zq&) const = default;

    uint128_t value() const {
        return q_lo == 0 ? (uint128_t(1) << 64) : uint128_t(q_lo);
    }

    BigUint to_big() const { return big_from_u128(value()); }

    std::uint64_t max_residue() const { return q_lo == 0 ? ~std::uint64_t(0) : q_lo - 1; }

    /// Bits needed to represent a residue (= bit length of q-1).
    unsigned residue_bits() const {
        std::uint64_t m = max_residue();
        unsigned b = 0;
        while (m != 0) { ++b; m >>= 1; }
        return b;
    }

    std::size_t residue_bytes() const { return (residue_bits() + 7) / 8; }

    std::uint64_t reduce(uint128_t x) const {
        if (q_lo == 0) return static_cast<std::uint64_t>(x);
        return static_cast<std::uint64_t>(x % q_lo);
    }

    std::uint64_t reduce_signed(std::int64_t x) const {
        int128_t v = x;
        int128_t q = static_cast<int128_t>(value());
        v %= q;
        if (v < 0) v += q;
        return static_cast<std::uint64_t>(v);
    }

    std::uint64_t reduce_big(const BigUint& x) const {
        return big_to_u64(mod_q(x, to_big()));
    }

    std::uint64_t add(std::uint64_t a, std::uint64_t b) const {
        uint128_t s = uint128_t(a) + b;
        uint128_t q = value();
        return static_cast<std::uint64_t>(s >= q ? s - q : s);
    }

    std::uint64_t sub(std::uint64_t a, std::uint64_t b) const {
        if (a >= b) return a - b;
        return static_cast<std::uint64_t>(value() - b + a);
    }

    std::uint64_t neg(std::uint64_t a) const {
        return a == 0 ? 0 : static_cast<std::uint64_t>(value() - a);
    }

    std::uint64_t mul(std::uint64_t a, std::uint64_t b) const {
        if (q_lo == 0) return a * b;  // natural wraparound is reduction mod 2^64
        return static_cast<std::uint64_t>((uint128_t(a) * b) % q_lo);
    }

    /// floor(q / d) for d >= 1; fits in 64 bits whenever d >= 2.
    std::uint64_t floor_div(std::uint64_t d) const {
        if (d == 0) throw std::invalid_argument("Zq::floor_div: division by zero");
        return static_cast<std::uint64_t>(value() / d);
    }
};

/// Round-half-up division: floor(x/d + 1/2), ties at exactly d/2 go up.
inline std::uint64_t rounded_quotient(std::uint64_t x, std::uint64_t d) {
    if (d == 0) throw std::invalid_argument("rounded_quotient: division by zero");
    return static_cast<std::uint64_t>((uint128_t(x) * 2 + d) / (uint128_t(d) * 2));
}

namespace detail {

inline std::uint64_t sat_add_u64(std::uint64_t a, std::uint64_t b) {
    std::uint64_t s = a + b;
    return s < a ? ~std::uint64_t(0) : s;
}

inline std::uint64_t sat_mul_u64(std::uint64_t a, std::uint64_t b) {
    uint128_t p = uint128_t(a) * b;
    return p > ~std::uint64_t(0) ? ~std::uint64_t(0) : static_cast<std::uint64_t>(p);
}

/// Informational headroom: floor(log2((delta/2) / noise_bound)), clamped at 0.
inline int noise_budget_bits(std::uint64_t noise_bound, std::uint64_t delta) {
    std::uint64_t half = delta / 2;
    std::uint64_t nb = noise_bound == 0 ? 1 : noise_bound;
    if (half <= nb) return 0;
    std::uint64_t ratio = half / nb;
    int bits = -1;
    while (ratio != 0) { ++bits; ratio >>= 1; }
    return bits;
}

}  // namespace detail

}  // namespace hecomp
