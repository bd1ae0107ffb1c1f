#pragma once

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <cstdint>
#include <cstring>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hecomp/compression.hpp"
#include "hecomp/paillier.hpp"
#include "hecomp/serialize.hpp"

namespace hecomp::wire {

class protocol_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Frame types. A frame is: 1-byte type, 4-byte little-endian payload length,
// payload. No frame ever carries a lattice or additive secret key.
constexpr std::uint8_t kFrameHello = 0x01;        // session config + additive public key
constexpr std::uint8_t kFrameKeyUpload = 0x02;    // encrypted secret key
constexpr std::uint8_t kFrameRequest = 0x03;      // seeded fresh ciphertexts
constexpr std::uint8_t kFrameResponse = 0x04;     // compressed response
constexpr std::uint8_t kFrameError = 0x05;        // UTF-8 diagnostic

constexpr std::uint32_t kMaxFrameLen = 64u << 20;
constexpr std::size_t kFrameHeaderBytes = 5;

struct Frame {
    std::uint8_t type = 0;
    std::vector<std::uint8_t> payload;
};

/// Minimal RAII TCP socket.
class Socket {
public:
    Socket() = default;
    explicit Socket(int fd) : fd_(fd) {}
    Socket(Socket&& other) noexcept : fd_(other.fd_) { other.fd_ = -1; }
    Socket& operator=(Socket&& other) noexcept {
        if (this != &other) {
            close_fd();
            fd_ = other.fd_;
            other.fd_ = -1;
        }
        return *this;
    }
    Socket(const Socket&) = delete;
    Socket& operator=(const Socket&) = delete;
    ~Socket() { close_fd(); }

    int fd() const { return fd_; }
    bool valid() const { return fd_ >= 0; }

    void write_all(const std::uint8_t* data, std::size_t len) {
        while (len > 0) {
            ssize_t n = ::send(fd_, data, len, MSG_NOSIGNAL);
            if (n <= 0) throw protocol_error("socket write failed");
            data += n;
            len -= static_cast<std::size_t>(n);
        }
    }

    void read_exact(std::uint8_t* data, std::size_t len) {
        while (len > 0) {
            ssize_t n = ::recv(fd_, data, len, 0);
            if (n <= 0) throw protocol_error("connection closed mid-frame");
            data += n;
            len -= static_cast<std::size_t>(n);
        }
    }

    static Socket connect_to(const std::string& host, std::uint16_t port) {
        int fd = ::socket(AF_INET, SOCK_STREAM, 0);
        if (fd < 0) throw protocol_error("socket() failed");
        Socket s(fd);
        sockaddr_in addr{};
        addr.sin_family = AF_INET;
        addr.sin_port = htons(port);
        if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
            throw protocol_error("bad address: " + host);
        }
        if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
            throw protocol_error("connect failed: " + host + ":" + std::to_string(port));
        }
        return s;
    }

private:
    void close_fd() {
        if (fd_ >= 0) ::close(fd_);
        fd_ = -1;
    }
    int fd_ = -1;
};

inline void write_frame(Socket& s, std::uint8_t type, std::span<const std::uint8_t> payload) {
    if (payload.size() > kMaxFrameLen) throw protocol_error("frame too large");
    std::vector<std::uint8_t> header;
    header.push_back(type);
    io::put_u32(header, static_cast<std::uint32_t>(payload.size()));
    s.write_all(header.data(), header.size());
    if (!payload.empty()) s.write_all(payload.data(), payload.size());
}

inline Frame read_frame(Socket& s) {
    std::uint8_t header[kFrameHeaderBytes];
    s.read_exact(header, sizeof(header));
    Frame f;
    f.type = header[0];
    std::uint32_t len = 0;
    for (int i = 0; i < 4; ++i) len |= static_cast<std::uint32_t>(header[1 + i]) << (8 * i);
    if (len > kMaxFrameLen) throw protocol_error("frame length exceeds 64 MiB limit");
    f.payload.resize(len);
    if (len > 0) s.read_exact(f.payload.data(), len);
    return f;
}

/// One (input index, weight) term of the server's linear function.
struct LinearTerm {
    std::uint32_t index = 0;
    std::uint64_t weight = 0;
};

struct SessionConfig {
    SchemeKind scheme = SchemeKind::lwe;
    std::string label;
    std::uint32_t ahe_bits = 0;
    std::vector<LinearTerm> terms;
    std::uint32_t extract_index = 0;  // RLWE only: which coefficient comes back
};

inline std::vector<std::uint8_t> encode_hello(const SessionConfig& cfg,
                                              const Paillier::PublicKey& pk) {
    std::vector<std::uint8_t> out;
    out.push_back(static_cast<std::uint8_t>(cfg.scheme));
    io::put_string(out, cfg.label);
    io::put_u32(out, cfg.ahe_bits);
    io::put_u32(out, cfg.extract_index);
    io::put_u32(out, static_cast<std::uint32_t>(cfg.terms.size()));
    for (const auto& t : cfg.terms) {
        io::put_u32(out, t.index);
        io::put_u64(out, t.weight);
    }
    auto pk_bytes = to_bytes(pk);
    io::put_u32(out, static_cast<std::uint32_t>(pk_bytes.size()));
    io::put_bytes(out, pk_bytes);
    return out;
}

inline std::pair<SessionConfig, Paillier::PublicKey> decode_hello(
    std::span<const std::uint8_t> payload) {
    io::Reader r(payload);
    SessionConfig cfg;
    std::uint8_t tag = r.u8();
    if (tag != static_cast<std::uint8_t>(SchemeKind::lwe) &&
        tag != static_cast<std::uint8_t>(SchemeKind::rlwe)) {
        throw protocol_error("hello: unknown scheme");
    }
    cfg.scheme = static_cast<SchemeKind>(tag);
    cfg.label = r.string();
    cfg.ahe_bits = r.u32();
    cfg.extract_index = r.u32();
    std::uint32_t terms = r.u32();
    if (terms > 4096) throw protocol_error("hello: too many terms");
    cfg.terms.reserve(terms);
    for (std::uint32_t i = 0; i < terms; ++i) {
        LinearTerm t;
        t.index = r.u32();
        t.weight = r.u64();
        cfg.terms.push_back(t);
    }
    std::uint32_t pk_len = r.u32();
    auto pk = paillier_public_key_from_bytes(r.take(pk_len));
    r.expect_done();
    if (pk.bits != cfg.ahe_bits) throw protocol_error("hello: key size disagrees with config");
    return {cfg, pk};
}

inline std::vector<std::uint8_t> encode_key_upload(const EncryptedSecretKey<Paillier>& esk) {
    std::vector<std::uint8_t> out;
    io::put_u64(out, esk.params_fp);
    io::put_u64(out, esk.ahe_fp);
    io::put_u32(out, static_cast<std::uint32_t>(esk.entries.size()));
    auto entries = to_bytes(esk);
    io::put_bytes(out, entries);
    return out;
}

inline EncryptedSecretKey<Paillier> decode_key_upload(std::span<const std::uint8_t> payload,
                                                      SchemeKind scheme,
                                                      const Paillier::PublicKey& pk) {
    io::Reader r(payload);
    EncryptedSecretKey<Paillier> esk;
    esk.scheme = scheme;
    esk.ahe_pk = pk;
    esk.params_fp = r.u64();
    esk.ahe_fp = r.u64();
    std::uint32_t count = r.u32();
    esk.entries = esk_entries_from_bytes(r.take(r.remaining()), count, pk);
    return esk;
}

/// Response payload: 2-byte slot count, 2-byte slot width, additive payload.
/// Scheme and parameter fingerprint are session context, so the frame adds
/// exactly 9 bytes (5 header + 4 layout) on top of the compressed ciphertext.
inline std::vector<std::uint8_t> encode_response(const CompressedCiphertext<Paillier>& x,
                                                 const Paillier::PublicKey& pk) {
    std::vector<std::uint8_t> out;
    io::put_u16(out, x.layout.slot_count);
    io::put_u16(out, x.layout.slot_width_bits);
    io::put_bytes(out, big_to_bytes_le(x.payload.value, Paillier::ciphertext_bytes(pk)));
    return out;
}

inline CompressedCiphertext<Paillier> decode_response(std::span<const std::uint8_t> payload,
                                                      SchemeKind scheme, std::uint64_t params_fp,
                                                      const Paillier::PublicKey& pk) {
    io::Reader r(payload);
    CompressedCiphertext<Paillier> x;
    x.layout.scheme = scheme;
    x.layout.params_fp = params_fp;
    x.layout.slot_count = r.u16();
    x.layout.slot_width_bits = r.u16();
    x.payload = paillier_ciphertext_from_bytes(r.take(Paillier::ciphertext_bytes(pk)), pk);
    r.expect_done();
    return x;
}

namespace detail {

inline void send_error(Socket& s, const std::string& message) {
    std::vector<std::uint8_t> payload(message.begin(), message.end());
    write_frame(s, kFrameError, payload);
}

[[noreturn]] inline void fail_session(Socket& s, const std::string& message) {
    send_error(s, message);
    throw protocol_error(message);
}

}  // namespace detail

/// Handles one client session on an accepted connection. All state is local
/// to the call; the handler only ever sees public key material, encrypted
/// key entries, and ciphertexts.
inline void handle_session(Socket& conn, const std::vector<ParamSetInfo>& registry) {
    Frame hello = read_frame(conn);
    if (hello.type != kFrameHello) detail::fail_session(conn, "expected hello frame");
    SessionConfig cfg;
    Paillier::PublicKey pk;
    try {
        std::tie(cfg, pk) = decode_hello(hello.payload);
    } catch (const std::exception& e) {
        detail::fail_session(conn, std::string("bad hello: ") + e.what());
    }

    auto info = find_param_set(registry, cfg.label);
    if (!info) detail::fail_session(conn, "unknown parameter set: " + cfg.label);
    if (info->scheme != cfg.scheme) detail::fail_session(conn, "scheme does not match set");
    if (cfg.terms.empty()) detail::fail_session(conn, "empty linear function");

    if (cfg.scheme == SchemeKind::lwe) {
        LweParams params = make_lwe_params(*info);
        for (const auto& t : cfg.terms) {
            if (t.weight >= params.p) detail::fail_session(conn, "weight out of range");
        }
        if (!check_compatibility(Paillier::plaintext_modulus(pk), params.q, params.n)) {
            detail::fail_session(conn, "incompatible additive key: need m > q + n*q^2");
        }

        Frame key = read_frame(conn);
        if (key.type != kFrameKeyUpload) detail::fail_session(conn, "expected key upload");
        EncryptedSecretKey<Paillier> esk;
        try {
            esk = decode_key_upload(key.payload, SchemeKind::lwe, pk);
        } catch (const std::exception& e) {
            detail::fail_session(conn, std::string("bad key upload: ") + e.what());
        }
        if (esk.params_fp != fingerprint(params) || esk.entries.size() != params.n) {
            detail::fail_session(conn, "encrypted key does not match parameter set");
        }

        Frame req = read_frame(conn);
        if (req.type != kFrameRequest) detail::fail_session(conn, "expected request");
        io::Reader r(req.payload);
        std::uint32_t count = 0;
        std::vector<LweCiphertext> inputs;
        try {
            count = r.u32();
            std::size_t width = seeded_lwe_ciphertext_bytes(params);
            for (std::uint32_t i = 0; i < count; ++i) {
                auto sct = seeded_lwe_ciphertext_from_bytes(r.take(width), params);
                inputs.push_back(lwe_expand_seeded(sct, params));
            }
            r.expect_done();
        } catch (const std::exception& e) {
            detail::fail_session(conn, std::string("bad request: ") + e.what());
        }
        if (inputs.empty()) detail::fail_session(conn, "empty input set");
        for (const auto& t : cfg.terms) {
            if (t.index >= inputs.size()) detail::fail_session(conn, "term index out of range");
        }

        std::optional<LweCiphertext> acc;
        for (const auto& t : cfg.terms) {
            LweCiphertext term = lwe_plain_mul(inputs[t.index], t.weight, params);
            acc = acc ? lwe_add(*acc, term, params) : term;
        }
        if (uint128_t(2) * acc->noise_bound >= uint128_t(params.delta)) {
            detail::fail_session(conn, "refusing: noise budget exhausted by this function");
        }
        auto compressed = lwe_compress(esk, *acc, params);
        write_frame(conn, kFrameResponse, encode_response(compressed, pk));
    } else {
        RlweParams params = make_rlwe_params(*info);
        for (const auto& t : cfg.terms) {
            if (t.weight >= params.p) detail::fail_session(conn, "weight out of range");
        }
        if (cfg.extract_index >= params.N) detail::fail_session(conn, "extract index out of range");
        if (!check_compatibility(Paillier::plaintext_modulus(pk), params.q, params.N)) {
            detail::fail_session(conn, "incompatible additive key: need m > q + N*q^2");
        }

        Frame key = read_frame(conn);
        if (key.type != kFrameKeyUpload) detail::fail_session(conn, "expected key upload");
        EncryptedSecretKey<Paillier> esk;
        try {
            esk = decode_key_upload(key.payload, SchemeKind::rlwe, pk);
        } catch (const std::exception& e) {
            detail::fail_session(conn, std::string("bad key upload: ") + e.what());
        }
        if (esk.params_fp != fingerprint(params) || esk.entries.size() != params.N) {
            detail::fail_session(conn, "encrypted key does not match parameter set");
        }

        Frame req = read_frame(conn);
        if (req.type != kFrameRequest) detail::fail_session(conn, "expected request");
        io::Reader r(req.payload);
        std::vector<RlweCiphertext> inputs;
        try {
            std::uint32_t count = r.u32();
            std::size_t width = seeded_rlwe_ciphertext_bytes(params);
            for (std::uint32_t i = 0; i < count; ++i) {
                auto sct = seeded_rlwe_ciphertext_from_bytes(r.take(width), params);
                inputs.push_back(rlwe_expand_seeded(sct, params));
            }
            r.expect_done();
        } catch (const std::exception& e) {
            detail::fail_session(conn, std::string("bad request: ") + e.what());
        }
        if (inputs.empty()) detail::fail_session(conn, "empty input set");
        for (const auto& t : cfg.terms) {
            if (t.index >= inputs.size()) detail::fail_session(conn, "term index out of range");
        }

        std::optional<RlweCiphertext> acc;
        for (const auto& t : cfg.terms) {
            RlweCiphertext term = rlwe_plain_mul(inputs[t.index], t.weight, params);
            acc = acc ? rlwe_add(*acc, term, params) : term;
        }
        if (uint128_t(2) * acc->noise_bound >= uint128_t(params.delta)) {
            detail::fail_session(conn, "refusing: noise budget exhausted by this function");
        }
        auto compressed = rlwe_compress(esk, *acc, cfg.extract_index, params);
        write_frame(conn, kFrameResponse, encode_response(compressed, pk));
    }
}

/// Sequential one-connection-at-a-time server. Handler state is per
/// connection; a failed session closes that connection only.
class Server {
public:
    Server(const std::string& host, std::uint16_t port, std::vector<ParamSetInfo> registry)
        : registry_(std::move(registry)) {
        int fd = ::socket(AF_INET, SOCK_STREAM, 0);
        if (fd < 0) throw protocol_error("socket() failed");
        listen_ = Socket(fd);
        int yes = 1;
        ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
        sockaddr_in addr{};
        addr.sin_family = AF_INET;
        addr.sin_port = htons(port);
        if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
            throw protocol_error("bad bind address: " + host);
        }
        if (::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
            throw protocol_error("bind failed on " + host + ":" + std::to_string(port));
        }
        if (::listen(fd, 8) != 0) throw protocol_error("listen failed");
        sockaddr_in bound{};
        socklen_t len = sizeof(bound);
        ::getsockname(fd, reinterpret_cast<sockaddr*>(&bound), &len);
        port_ = ntohs(bound.sin_port);
    }

    std::uint16_t port() const { return port_; }

    /// Serves sessions until stop(); returns the number handled.
    std::size_t run() {
        std::size_t handled = 0;
        while (!stopped_.load()) {
            if (!serve_one(true)) break;
            ++handled;
        }
        return handled;
    }

    /// Accepts and serves exactly one session.
    void run_once() { serve_one(false); }

    void stop() {
        stopped_.store(true);
        ::shutdown(listen_.fd(), SHUT_RDWR);
    }

private:
    bool serve_one(bool swallow_errors) {
        int cfd = ::accept(listen_.fd(), nullptr, nullptr);
        if (cfd < 0) return false;
        Socket conn(cfd);
        try {
            handle_session(conn, registry_);
        } catch (const std::exception&) {
            if (!swallow_errors) throw;
        }
        return true;
    }

    Socket listen_;
    std::vector<ParamSetInfo> registry_;
    std::uint16_t port_ = 0;
    std::atomic<bool> stopped_{false};
};

struct ClientResult {
    std::vector<std::uint64_t> values;   // decoded slots (single value for LWE demo)
    std::size_t response_wire_bytes = 0;  // exact bytes of the response frame
    std::size_t request_wire_bytes = 0;   // hello + key upload + request frames
};

/// Runs the full protocol against a server: hello, encrypted-key upload,
/// seeded-ciphertext request, compressed response, modified decryption.
inline ClientResult run_lwe_session(const std::string& host, std::uint16_t port,
                                    const SessionConfig& cfg, const LweParams& params,
                                    const LweSecretKey& sk, const Paillier::Keypair& kp,
                                    const std::vector<std::uint64_t>& inputs,
                                    std::mt19937_64& rng) {
    auto esk = encrypt_lattice_key<Paillier>(kp.pk, sk, params, rng);
    Socket conn = Socket::connect_to(host, port);
    ClientResult result;

    auto hello = encode_hello(cfg, kp.pk);
    write_frame(conn, kFrameHello, hello);
    auto key_upload = encode_key_upload(esk);
    write_frame(conn, kFrameKeyUpload, key_upload);

    std::vector<std::uint8_t> request;
    io::put_u32(request, static_cast<std::uint32_t>(inputs.size()));
    for (std::uint64_t mu : inputs) {
        auto sct = lwe_encrypt_seeded(sk, mu, params, random_seed(rng), rng);
        io::put_bytes(request, to_bytes(sct, params));
    }
    write_frame(conn, kFrameRequest, request);
    result.request_wire_bytes =
        3 * kFrameHeaderBytes + hello.size() + key_upload.size() + request.size();

    Frame reply = read_frame(conn);
    if (reply.type == kFrameError) {
        throw protocol_error("server error: " +
                             std::string(reply.payload.begin(), reply.payload.end()));
    }
    if (reply.type != kFrameResponse) throw protocol_error("unexpected frame type");
    result.response_wire_bytes = kFrameHeaderBytes + reply.payload.size();
    auto compressed = decode_response(reply.payload, SchemeKind::lwe, fingerprint(params), kp.pk);
    result.values.push_back(modified_lwe_decrypt(kp, compressed, params));
    return result;
}

inline ClientResult run_rlwe_session(const std::string& host, std::uint16_t port,
                                     const SessionConfig& cfg, const RlweParams& params,
                                     const RlweSecretKey& sk, const Paillier::Keypair& kp,
                                     const std::vector<Polynomial>& inputs,
                                     std::mt19937_64& rng) {
    auto esk = encrypt_lattice_key<Paillier>(kp.pk, sk, params, rng);
    Socket conn = Socket::connect_to(host, port);
    ClientResult result;

    auto hello = encode_hello(cfg, kp.pk);
    write_frame(conn, kFrameHello, hello);
    auto key_upload = encode_key_upload(esk);
    write_frame(conn, kFrameKeyUpload, key_upload);

    std::vector<std::uint8_t> request;
    io::put_u32(request, static_cast<std::uint32_t>(inputs.size()));
    for (const auto& mu : inputs) {
        auto sct = rlwe_encrypt_seeded(sk, mu, params, random_seed(rng), rng);
        io::put_bytes(request, to_bytes(sct, params));
    }
    write_frame(conn, kFrameRequest, request);
    result.request_wire_bytes =
        3 * kFrameHeaderBytes + hello.size() + key_upload.size() + request.size();

    Frame reply = read_frame(conn);
    if (reply.type == kFrameError) {
        throw protocol_error("server error: " +
                             std::string(reply.payload.begin(), reply.payload.end()));
    }
    if (reply.type != kFrameResponse) throw protocol_error("unexpected frame type");
    result.response_wire_bytes = kFrameHeaderBytes + reply.payload.size();
    auto compressed = decode_response(reply.payload, SchemeKind::rlwe, fingerprint(params), kp.pk);
    result.values.push_back(modified_rlwe_decrypt(kp, compressed, params));
    return result;
}

}  // namespace hecomp::wire
