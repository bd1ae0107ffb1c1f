#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <random>
#include <vector>

#include "hecomp/zq.hpp"

namespace hecomp {

constexpr std::size_t kSeedBytes = 16;  // lambda = 128 bits

/// 128-bit PRG seed.
struct Seed128 {
    std::array<std::uint8_t, kSeedBytes> bytes{};
    bool operator==(const Seed128&) const = default;
};

inline Seed128 random_seed(std::mt19937_64& rng) {
    Seed128 s;
    for (std::size_t i = 0; i < kSeedBytes; i += 8) {
        std::uint64_t w = rng();
        std::memcpy(s.bytes.data() + i, &w, 8);
    }
    return s;
}

namespace detail {

inline std::uint32_t rotl32(std::uint32_t v, int c) { return (v << c) | (v >> (32 - c)); }

inline void chacha_quarter(std::uint32_t& a, std::uint32_t& b, std::uint32_t& c, std::uint32_t& d) {
    a += b; d ^= a; d = rotl32(d, 16);
    c += d; b ^= c; b = rotl32(b, 12);
    a += b; d ^= a; d = rotl32(d, 8);
    c += d; b ^= c; b = rotl32(b, 7);
}

/// ChaCha20 block function (RFC 8439): 32-byte key, 32-bit block counter,
/// 12-byte nonce -> 64 bytes of keystream.
inline void chacha20_block(const std::uint8_t key[32], std::uint32_t counter,
                           const std::uint8_t nonce[12], std::uint8_t out[64]) {
    std::uint32_t state[16];
    state[0] = 0x61707865; state[1] = 0x3320646e; state[2] = 0x79622d32; state[3] = 0x6b206574;
    for (int i = 0; i < 8; ++i) std::memcpy(&state[4 + i], key + 4 * i, 4);
    state[12] = counter;
    for (int i = 0; i < 3; ++i) std::memcpy(&state[13 + i], nonce + 4 * i, 4);

    std::uint32_t x[16];
    std::memcpy(x, state, sizeof(x));
    for (int round = 0; round < 10; ++round) {
        chacha_quarter(x[0], x[4], x[8], x[12]);
        chacha_quarter(x[1], x[5], x[9], x[13]);
        chacha_quarter(x[2], x[6], x[10], x[14]);
        chacha_quarter(x[3], x[7], x[11], x[15]);
        chacha_quarter(x[0], x[5], x[10], x[15]);
        chacha_quarter(x[1], x[6], x[11], x[12]);
        chacha_quarter(x[2], x[7], x[8], x[13]);
        chacha_quarter(x[3], x[4], x[9], x[14]);
    }
    for (int i = 0; i < 16; ++i) {
        std::uint32_t w = x[i] + state[i];
        std::memcpy(out + 4 * i, &w, 4);
    }
}

}  // namespace detail

/// Deterministic byte stream derived from a 128-bit seed.
///
/// Construction (fixed for golden-vector stability): ChaCha20 keystream with
/// key = seed || seed (32 bytes), nonce = 12 zero bytes, block counter
/// starting at 0.
class PrgStream {
public:
    explicit PrgStream(const Seed128& seed) {
        std::memcpy(key_.data(), seed.bytes.data(), kSeedBytes);
        std::memcpy(key_.data() + kSeedBytes, seed.bytes.data(), kSeedBytes);
    }

    void next_bytes(std::uint8_t* dst, std::size_t len) {
        while (len > 0) {
            if (pos_ == block_.size()) {
                static constexpr std::uint8_t kZeroNonce[12] = {};
                detail::chacha20_block(key_.data(), counter_++, kZeroNonce, block_.data());
                pos_ = 0;
            }
            std::size_t take = std::min(len, block_.size() - pos_);
            std::memcpy(dst, block_.data() + pos_, take);
            pos_ += take;
            dst += take;
            len -= take;
        }
    }

    /// Little-endian value of the next `nbytes` stream bytes (nbytes <= 8).
    std::uint64_t next_chunk(std::size_t nbytes) {
        std::uint8_t buf[8] = {};
        next_bytes(buf, nbytes);
        std::uint64_t v;
        std::memcpy(&v, buf, 8);
        return v;
    }

private:
    std::array<std::uint8_t, 32> key_{};
    std::array<std::uint8_t, 64> block_{};
    std::size_t pos_ = 64;
    std::uint32_t counter_ = 0;
};

/// Expands a seed into `count` residues in [0, q). Pure function of its
/// arguments. Each residue consumes fixed-width chunks of ceil(bits(q-1)/8)
/// bytes, masked to the residue width; chunks >= q are rejected so the output
/// is unbiased.
inline std::vector<std::uint64_t> prg_expand(const Seed128& seed, std::size_t count, const Zq& q) {
    PrgStream stream(seed);
    unsigned bits = q.residue_bits();
    std::size_t nbytes = q.residue_bytes();
    std::uint64_t mask = bits == 64 ? ~std::uint64_t(0) : (std::uint64_t(1) << bits) - 1;
    std::vector<std::uint64_t> out;
    out.reserve(count);
    while (out.size() < count) {
        std::uint64_t v = stream.next_chunk(nbytes) & mask;
        if (uint128_t(v) < q.value()) out.push_back(v);
    }
    return out;
}

}  // namespace hecomp
