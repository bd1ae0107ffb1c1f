#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hecomp/compression.hpp"
#include "hecomp/lwe.hpp"
#include "hecomp/paillier.hpp"
#include "hecomp/rlwe.hpp"

namespace hecomp {

class format_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace io {

inline void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
}

inline void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

inline void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

inline void put_uint(std::vector<std::uint8_t>& out, std::uint64_t v, std::size_t width) {
    for (std::size_t i = 0; i < width; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

inline void put_bytes(std::vector<std::uint8_t>& out, std::span<const std::uint8_t> bytes) {
    out.insert(out.end(), bytes.begin(), bytes.end());
}

inline void put_string(std::vector<std::uint8_t>& out, const std::string& s) {
    if (s.size() > 0xFF) throw format_error("string field too long");
    out.push_back(static_cast<std::uint8_t>(s.size()));
    out.insert(out.end(), s.begin(), s.end());
}

/// Bounds-checked sequential reader over a byte buffer.
class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> data) : data_(data) {}

    std::size_t remaining() const { return data_.size() - pos_; }
    bool done() const { return pos_ == data_.size(); }

    std::uint8_t u8() { return take(1)[0]; }

    std::uint16_t u16() {
        auto b = take(2);
        return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
    }

    std::uint32_t u32() {
        auto b = take(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
        return v;
    }

    std::uint64_t u64() { return uint(8); }

    std::uint64_t uint(std::size_t width) {
        if (width > 8) throw format_error("integer field too wide");
        auto b = take(width);
        std::uint64_t v = 0;
        for (std::size_t i = 0; i < width; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
        return v;
    }

    std::span<const std::uint8_t> take(std::size_t n) {
        if (remaining() < n) throw format_error("unexpected end of data");
        auto out = data_.subspan(pos_, n);
        pos_ += n;
        return out;
    }

    std::string string() {
        std::size_t len = u8();
        auto b = take(len);
        return std::string(b.begin(), b.end());
    }

    void expect_done() const {
        if (!done()) throw format_error("trailing bytes after payload");
    }

private:
    std::span<const std::uint8_t> data_;
    std::size_t pos_ = 0;
};

}  // namespace io

// ---------------------------------------------------------------------------
// Raw encodings. Residues are fixed-width little-endian integers of
// ceil(log2 q / 8) bytes.
// ---------------------------------------------------------------------------

inline std::size_t lwe_ciphertext_bytes(const LweParams& params) {
    return (params.n + 1) * params.q.residue_bytes();
}

inline std::size_t seeded_lwe_ciphertext_bytes(const LweParams& params) {
    return kSeedBytes + params.q.residue_bytes();
}

inline std::size_t rlwe_ciphertext_bytes(const RlweParams& params) {
    return 2 * params.N * params.q.residue_bytes();
}

inline std::size_t seeded_rlwe_ciphertext_bytes(const RlweParams& params) {
    return kSeedBytes + params.N * params.q.residue_bytes();
}

namespace detail {

inline void put_residues(std::vector<std::uint8_t>& out, const std::vector<std::uint64_t>& v,
                         const Zq& q) {
    std::size_t width = q.residue_bytes();
    for (std::uint64_t r : v) io::put_uint(out, r, width);
}

inline std::vector<std::uint64_t> read_residues(io::Reader& r, std::size_t count, const Zq& q) {
    std::size_t width = q.residue_bytes();
    std::vector<std::uint64_t> out(count);
    for (auto& v : out) {
        v = r.uint(width);
        if (uint128_t(v) >= q.value()) throw format_error("residue out of range");
    }
    return out;
}

}  // namespace detail

inline std::vector<std::uint8_t> to_bytes(const LweSecretKey& sk, const LweParams& params) {
    std::vector<std::uint8_t> out;
    out.reserve(params.n * params.q.residue_bytes());
    detail::put_residues(out, sk.coeffs, params.q);
    return out;
}

inline LweSecretKey lwe_secret_key_from_bytes(std::span<const std::uint8_t> bytes,
                                              const LweParams& params) {
    io::Reader r(bytes);
    LweSecretKey sk{detail::read_residues(r, params.n, params.q)};
    r.expect_done();
    return sk;
}

/// Full ciphertext: the a-vector concatenated, then b.
inline std::vector<std::uint8_t> to_bytes(const LweCiphertext& ct, const LweParams& params) {
    std::vector<std::uint8_t> out;
    out.reserve(lwe_ciphertext_bytes(params));
    detail::put_residues(out, ct.a, params.q);
    io::put_uint(out, ct.b, params.q.residue_bytes());
    return out;
}

inline LweCiphertext lwe_ciphertext_from_bytes(std::span<const std::uint8_t> bytes,
                                               const LweParams& params) {
    io::Reader r(bytes);
    LweCiphertext ct;
    ct.a = detail::read_residues(r, params.n, params.q);
    ct.b = detail::read_residues(r, 1, params.q)[0];
    r.expect_done();
    ct.noise_bound = static_cast<std::uint64_t>(params.noise.bound);
    ct.noise_budget_bits = detail::noise_budget_bits(ct.noise_bound, params.delta);
    return ct;
}

/// Seeded form: the 16-byte seed, then b.
inline std::vector<std::uint8_t> to_bytes(const SeededLweCiphertext& ct, const LweParams& params) {
    std::vector<std::uint8_t> out;
    out.reserve(seeded_lwe_ciphertext_bytes(params));
    io::put_bytes(out, ct.seed.bytes);
    io::put_uint(out, ct.b, params.q.residue_bytes());
    return out;
}

inline SeededLweCiphertext seeded_lwe_ciphertext_from_bytes(std::span<const std::uint8_t> bytes,
                                                            const LweParams& params) {
    io::Reader r(bytes);
    SeededLweCiphertext ct;
    auto seed = r.take(kSeedBytes);
    std::memcpy(ct.seed.bytes.data(), seed.data(), kSeedBytes);
    ct.b = detail::read_residues(r, 1, params.q)[0];
    r.expect_done();
    ct.noise_bound = static_cast<std::uint64_t>(params.noise.bound);
    ct.noise_budget_bits = detail::noise_budget_bits(ct.noise_bound, params.delta);
    return ct;
}

inline std::vector<std::uint8_t> to_bytes(const RlweSecretKey& sk, const RlweParams& params) {
    std::vector<std::uint8_t> out;
    detail::put_residues(out, sk.s.coeffs, params.q);
    return out;
}

inline RlweSecretKey rlwe_secret_key_from_bytes(std::span<const std::uint8_t> bytes,
                                                const RlweParams& params) {
    io::Reader r(bytes);
    RlweSecretKey sk{Polynomial(detail::read_residues(r, params.N, params.q))};
    r.expect_done();
    return sk;
}

/// A then B, each as N fixed-width residues.
inline std::vector<std::uint8_t> to_bytes(const RlweCiphertext& ct, const RlweParams& params) {
    std::vector<std::uint8_t> out;
    out.reserve(rlwe_ciphertext_bytes(params));
    detail::put_residues(out, ct.a.coeffs, params.q);
    detail::put_residues(out, ct.b.coeffs, params.q);
    return out;
}

inline RlweCiphertext rlwe_ciphertext_from_bytes(std::span<const std::uint8_t> bytes,
                                                 const RlweParams& params) {
    io::Reader r(bytes);
    RlweCiphertext ct;
    ct.a = Polynomial(detail::read_residues(r, params.N, params.q));
    ct.b = Polynomial(detail::read_residues(r, params.N, params.q));
    r.expect_done();
    ct.noise_bound = static_cast<std::uint64_t>(params.noise.bound);
    ct.noise_budget_bits = detail::noise_budget_bits(ct.noise_bound, params.delta);
    return ct;
}

inline std::vector<std::uint8_t> to_bytes(const SeededRlweCiphertext& ct, const RlweParams& params) {
    std::vector<std::uint8_t> out;
    out.reserve(seeded_rlwe_ciphertext_bytes(params));
    io::put_bytes(out, ct.seed.bytes);
    detail::put_residues(out, ct.b.coeffs, params.q);
    return out;
}

inline SeededRlweCiphertext seeded_rlwe_ciphertext_from_bytes(std::span<const std::uint8_t> bytes,
                                                              const RlweParams& params) {
    io::Reader r(bytes);
    SeededRlweCiphertext ct;
    auto seed = r.take(kSeedBytes);
    std::memcpy(ct.seed.bytes.data(), seed.data(), kSeedBytes);
    ct.b = Polynomial(detail::read_residues(r, params.N, params.q));
    r.expect_done();
    ct.noise_bound = static_cast<std::uint64_t>(params.noise.bound);
    ct.noise_budget_bits = detail::noise_budget_bits(ct.noise_bound, params.delta);
    return ct;
}

// ---------------------------------------------------------------------------
// Additive-scheme encodings (Paillier).
// ---------------------------------------------------------------------------

inline std::vector<std::uint8_t> to_bytes(const Paillier::Ciphertext& ct,
                                          const Paillier::PublicKey& pk) {
    return big_to_bytes_le(ct.value, Paillier::ciphertext_bytes(pk));
}

inline Paillier::Ciphertext paillier_ciphertext_from_bytes(std::span<const std::uint8_t> bytes,
                                                           const Paillier::PublicKey& pk) {
    if (bytes.size() != Paillier::ciphertext_bytes(pk)) {
        throw format_error("paillier ciphertext: wrong length");
    }
    Paillier::Ciphertext ct{big_from_bytes_le(bytes)};
    if (ct.value >= pk.modulus_sq) throw format_error("paillier ciphertext: value out of range");
    return ct;
}

inline std::vector<std::uint8_t> to_bytes(const Paillier::PublicKey& pk) {
    std::vector<std::uint8_t> out;
    io::put_u32(out, pk.bits);
    auto m = big_to_bytes_le(pk.modulus, (pk.bits + 7) / 8);
    io::put_bytes(out, m);
    return out;
}

inline Paillier::PublicKey paillier_public_key_from_bytes(std::span<const std::uint8_t> bytes) {
    io::Reader r(bytes);
    Paillier::PublicKey pk;
    pk.bits = r.u32();
    if (pk.bits < 8 || pk.bits > (1u << 20)) throw format_error("paillier public key: bad size");
    pk.modulus = big_from_bytes_le(r.take((pk.bits + 7) / 8));
    if (bit_length(pk.modulus) != pk.bits) throw format_error("paillier public key: bad modulus");
    pk.modulus_sq = pk.modulus * pk.modulus;
    r.expect_done();
    return pk;
}

inline std::vector<std::uint8_t> to_bytes(const Paillier::Keypair& kp) {
    std::vector<std::uint8_t> out;
    io::put_u32(out, kp.pk.bits);
    std::size_t width = (kp.pk.bits + 7) / 8;
    io::put_bytes(out, big_to_bytes_le(kp.pk.modulus, width));
    io::put_bytes(out, big_to_bytes_le(kp.lambda, width));
    io::put_bytes(out, big_to_bytes_le(kp.mu_inv, width));
    return out;
}

inline Paillier::Keypair paillier_keypair_from_bytes(std::span<const std::uint8_t> bytes) {
    io::Reader r(bytes);
    Paillier::Keypair kp;
    kp.pk.bits = r.u32();
    if (kp.pk.bits < 8 || kp.pk.bits > (1u << 20)) throw format_error("paillier keypair: bad size");
    std::size_t width = (kp.pk.bits + 7) / 8;
    kp.pk.modulus = big_from_bytes_le(r.take(width));
    kp.lambda = big_from_bytes_le(r.take(width));
    kp.mu_inv = big_from_bytes_le(r.take(width));
    if (bit_length(kp.pk.modulus) != kp.pk.bits) throw format_error("paillier keypair: bad modulus");
    kp.pk.modulus_sq = kp.pk.modulus * kp.pk.modulus;
    r.expect_done();
    return kp;
}

/// The canonical encrypted-secret-key encoding is the bare concatenation of
/// its additive-ciphertext entries; all metadata travels separately.
inline std::vector<std::uint8_t> to_bytes(const EncryptedSecretKey<Paillier>& esk) {
    std::vector<std::uint8_t> out;
    std::size_t width = Paillier::ciphertext_bytes(esk.ahe_pk);
    out.reserve(esk.entries.size() * width);
    for (const auto& entry : esk.entries) {
        io::put_bytes(out, big_to_bytes_le(entry.value, width));
    }
    return out;
}

inline std::vector<Paillier::Ciphertext> esk_entries_from_bytes(
    std::span<const std::uint8_t> bytes, std::size_t count, const Paillier::PublicKey& pk) {
    std::size_t width = Paillier::ciphertext_bytes(pk);
    if (bytes.size() != count * width) throw format_error("encrypted key: wrong length");
    std::vector<Paillier::Ciphertext> entries;
    entries.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        entries.push_back(paillier_ciphertext_from_bytes(bytes.subspan(i * width, width), pk));
    }
    return entries;
}

/// Compressed ciphertext: 1-byte scheme tag, 2-byte slot count, 2-byte slot
/// width, 8-byte parameter fingerprint, then the additive payload.
inline std::vector<std::uint8_t> to_bytes(const CompressedCiphertext<Paillier>& x,
                                          const Paillier::PublicKey& pk) {
    std::vector<std::uint8_t> out;
    out.push_back(static_cast<std::uint8_t>(x.layout.scheme));
    io::put_u16(out, x.layout.slot_count);
    io::put_u16(out, x.layout.slot_width_bits);
    io::put_u64(out, x.layout.params_fp);
    io::put_bytes(out, big_to_bytes_le(x.payload.value, Paillier::ciphertext_bytes(pk)));
    return out;
}

inline CompressedCiphertext<Paillier> compressed_ciphertext_from_bytes(
    std::span<const std::uint8_t> bytes, const Paillier::PublicKey& pk) {
    io::Reader r(bytes);
    CompressedCiphertext<Paillier> x;
    std::uint8_t tag = r.u8();
    if (tag != static_cast<std::uint8_t>(SchemeKind::lwe) &&
        tag != static_cast<std::uint8_t>(SchemeKind::rlwe)) {
        throw format_error("compressed ciphertext: unknown scheme tag");
    }
    x.layout.scheme = static_cast<SchemeKind>(tag);
    x.layout.slot_count = r.u16();
    x.layout.slot_width_bits = r.u16();
    x.layout.params_fp = r.u64();
    if (x.layout.slot_count < 1) throw format_error("compressed ciphertext: empty layout");
    x.payload = paillier_ciphertext_from_bytes(r.take(Paillier::ciphertext_bytes(pk)), pk);
    r.expect_done();
    return x;
}

// ---------------------------------------------------------------------------
// File envelope: every file starts with the magic "HEC1", a format version
// byte, and a payload kind byte.
// ---------------------------------------------------------------------------

constexpr char kFileMagic[4] = {'H', 'E', 'C', '1'};
constexpr std::uint8_t kFileVersion = 1;

enum class FileKind : std::uint8_t {
    lwe_secret_key = 0x01,
    rlwe_secret_key = 0x02,
    lwe_ciphertext = 0x03,
    rlwe_ciphertext = 0x04,
    seeded_lwe_ciphertext = 0x05,
    seeded_rlwe_ciphertext = 0x06,
    ahe_keypair = 0x07,
    ahe_public_key = 0x08,
    encrypted_secret_key = 0x09,
    compressed_ciphertext = 0x0a,
};

inline void save_file(const std::string& path, FileKind kind,
                      std::span<const std::uint8_t> payload) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out.write(kFileMagic, sizeof(kFileMagic));
    char header[2] = {static_cast<char>(kFileVersion), static_cast<char>(kind)};
    out.write(header, sizeof(header));
    out.write(reinterpret_cast<const char*>(payload.data()),
              static_cast<std::streamsize>(payload.size()));
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline std::pair<FileKind, std::vector<std::uint8_t>> load_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::vector<std::uint8_t> data((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
    if (data.size() < 6 || std::memcmp(data.data(), kFileMagic, 4) != 0) {
        throw format_error("not a HEC1 file: " + path);
    }
    if (data[4] != kFileVersion) throw format_error("unsupported format version");
    FileKind kind = static_cast<FileKind>(data[5]);
    return {kind, std::vector<std::uint8_t>(data.begin() + 6, data.end())};
}

}  // namespace hecomp
