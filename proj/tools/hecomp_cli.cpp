// hecomp command-line tool: key generation, encryption, server-side
// processing and compression, modified decryption, size benchmarks, and a
// client/server demo speaking the length-prefixed wire protocol.

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hecomp/compression.hpp"
#include "hecomp/lwe.hpp"
#include "hecomp/paillier.hpp"
#include "hecomp/params.hpp"
#include "hecomp/rlwe.hpp"
#include "hecomp/serialize.hpp"
#include "hecomp/sizes.hpp"
#include "hecomp/wire.hpp"

namespace {

using namespace hecomp;

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIncompatible = 3;

struct GlobalOpts {
    std::string registry_path;
    std::optional<std::uint64_t> seed;
};

std::vector<ParamSetInfo> load_registry(const GlobalOpts& opts) {
    if (!opts.registry_path.empty()) return load_param_registry(opts.registry_path);
    std::ifstream probe("share/param_sets.json");
    if (probe.good()) return load_param_registry("share/param_sets.json");
    return builtin_param_sets();
}

std::mt19937_64 make_rng(const GlobalOpts& opts) {
    if (opts.seed) return std::mt19937_64(*opts.seed);
    std::random_device rd;
    std::seed_seq seq{rd(), rd(), rd(), rd(), rd(), rd(), rd(), rd()};
    return std::mt19937_64(seq);
}

std::vector<std::uint64_t> parse_u64_csv(const std::string& s) {
    std::vector<std::uint64_t> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stoull(item));
    }
    return out;
}

std::pair<std::string, std::uint16_t> parse_host_port(const std::string& s) {
    auto colon = s.rfind(':');
    if (colon == std::string::npos) throw std::invalid_argument("expected host:port, got " + s);
    return {s.substr(0, colon), static_cast<std::uint16_t>(std::stoul(s.substr(colon + 1)))};
}

ParamSetInfo resolve_set(const std::vector<ParamSetInfo>& registry, const std::string& label) {
    auto info = find_param_set(registry, label);
    if (!info) throw std::runtime_error("unknown parameter set: " + label);
    return *info;
}

// File payload helpers. Lattice key and ciphertext files carry the set label
// and parameter fingerprint ahead of the raw encoding so later stages can
// resolve parameters and reject mismatched inputs.

std::vector<std::uint8_t> with_label(const std::string& label, std::uint64_t fp,
                                     std::span<const std::uint8_t> body) {
    std::vector<std::uint8_t> out;
    io::put_string(out, label);
    io::put_u64(out, fp);
    io::put_bytes(out, body);
    return out;
}

struct LabeledPayload {
    std::string label;
    std::uint64_t fp = 0;
    std::vector<std::uint8_t> body;
};

LabeledPayload split_label(std::span<const std::uint8_t> payload) {
    io::Reader r(payload);
    LabeledPayload out;
    out.label = r.string();
    out.fp = r.u64();
    auto rest = r.take(r.remaining());
    out.body.assign(rest.begin(), rest.end());
    return out;
}

Paillier::PublicKey load_ahe_public(const std::string& path) {
    auto [kind, payload] = load_file(path);
    if (kind == FileKind::ahe_public_key) return paillier_public_key_from_bytes(payload);
    if (kind == FileKind::ahe_keypair) return paillier_keypair_from_bytes(payload).pk;
    throw std::runtime_error(path + " is not an additive key file");
}

Paillier::Keypair load_ahe_keypair(const std::string& path) {
    auto [kind, payload] = load_file(path);
    if (kind != FileKind::ahe_keypair) throw std::runtime_error(path + " is not an additive keypair");
    return paillier_keypair_from_bytes(payload);
}

std::vector<std::uint8_t> encode_esk_file(const EncryptedSecretKey<Paillier>& esk,
                                          const std::string& label) {
    std::vector<std::uint8_t> out;
    out.push_back(static_cast<std::uint8_t>(esk.scheme));
    io::put_string(out, label);
    io::put_u64(out, esk.params_fp);
    io::put_u64(out, esk.ahe_fp);
    auto pk = to_bytes(esk.ahe_pk);
    io::put_u32(out, static_cast<std::uint32_t>(pk.size()));
    io::put_bytes(out, pk);
    io::put_u32(out, static_cast<std::uint32_t>(esk.entries.size()));
    io::put_bytes(out, to_bytes(esk));
    return out;
}

struct EskFile {
    EncryptedSecretKey<Paillier> esk;
    std::string label;
};

EskFile decode_esk_file(std::span<const std::uint8_t> payload) {
    io::Reader r(payload);
    EskFile out;
    std::uint8_t tag = r.u8();
    out.esk.scheme = static_cast<SchemeKind>(tag);
    out.label = r.string();
    out.esk.params_fp = r.u64();
    out.esk.ahe_fp = r.u64();
    std::uint32_t pk_len = r.u32();
    out.esk.ahe_pk = paillier_public_key_from_bytes(r.take(pk_len));
    std::uint32_t count = r.u32();
    out.esk.entries = esk_entries_from_bytes(r.take(r.remaining()), count, out.esk.ahe_pk);
    return out;
}

std::vector<std::uint8_t> encode_compressed_file(const CompressedCiphertext<Paillier>& x,
                                                 const std::string& label,
                                                 const Paillier::PublicKey& pk) {
    std::vector<std::uint8_t> out;
    io::put_string(out, label);
    io::put_u32(out, pk.bits);
    io::put_bytes(out, to_bytes(x, pk));
    return out;
}

// ---------------------------------------------------------------------------
// Subcommand bodies.
// ---------------------------------------------------------------------------

int cmd_keygen(const GlobalOpts& g, const std::string& scheme, const std::string& set_label,
               unsigned ahe_bits, const std::string& out_path, const std::string& pub_out) {
    auto rng = make_rng(g);
    if (scheme == "ahe") {
        auto kp = Paillier::keygen(ahe_bits, rng);
        save_file(out_path, FileKind::ahe_keypair, to_bytes(kp));
        if (!pub_out.empty()) save_file(pub_out, FileKind::ahe_public_key, to_bytes(kp.pk));
        std::cout << "wrote " << ahe_bits << "-bit additive keypair to " << out_path << "\n";
        return 0;
    }
    auto registry = load_registry(g);
    auto info = resolve_set(registry, set_label);
    if (scheme == "lwe") {
        auto params = make_lwe_params(info);
        auto sk = lwe_keygen(params, rng);
        save_file(out_path, FileKind::lwe_secret_key,
                  with_label(params.label, fingerprint(params), to_bytes(sk, params)));
    } else if (scheme == "rlwe") {
        auto params = make_rlwe_params(info);
        auto sk = rlwe_keygen(params, rng);
        save_file(out_path, FileKind::rlwe_secret_key,
                  with_label(params.label, fingerprint(params), to_bytes(sk, params)));
    } else {
        throw std::runtime_error("unknown scheme: " + scheme);
    }
    std::cout << "wrote " << scheme << " secret key (" << set_label << ") to " << out_path << "\n";
    return 0;
}

int cmd_enc_key(const GlobalOpts& g, const std::string& sk_path, const std::string& ahe_path,
                const std::string& out_path) {
    auto rng = make_rng(g);
    auto registry = load_registry(g);
    auto pk = load_ahe_public(ahe_path);
    auto [kind, payload] = load_file(sk_path);
    auto labeled = split_label(payload);
    auto info = resolve_set(registry, labeled.label);
    if (kind == FileKind::lwe_secret_key) {
        auto params = make_lwe_params(info);
        auto sk = lwe_secret_key_from_bytes(labeled.body, params);
        auto esk = encrypt_lattice_key<Paillier>(pk, sk, params, rng);
        save_file(out_path, FileKind::encrypted_secret_key, encode_esk_file(esk, params.label));
    } else if (kind == FileKind::rlwe_secret_key) {
        auto params = make_rlwe_params(info);
        auto sk = rlwe_secret_key_from_bytes(labeled.body, params);
        auto esk = encrypt_lattice_key<Paillier>(pk, sk, params, rng);
        save_file(out_path, FileKind::encrypted_secret_key, encode_esk_file(esk, params.label));
    } else {
        throw std::runtime_error(sk_path + " is not a lattice secret key file");
    }
    std::cout << "wrote encrypted secret key to " << out_path << "\n";
    return 0;
}

int cmd_encrypt(const GlobalOpts& g, const std::string& sk_path, const std::string& mu_csv,
                bool seeded, const std::string& out_path) {
    auto rng = make_rng(g);
    auto registry = load_registry(g);
    auto [kind, payload] = load_file(sk_path);
    auto labeled = split_label(payload);
    auto info = resolve_set(registry, labeled.label);
    auto mu = parse_u64_csv(mu_csv);
    if (kind == FileKind::lwe_secret_key) {
        auto params = make_lwe_params(info);
        if (mu.size() != 1) throw std::runtime_error("LWE encrypt expects a single --mu value");
        auto sk = lwe_secret_key_from_bytes(labeled.body, params);
        if (seeded) {
            auto sct = lwe_encrypt_seeded(sk, mu[0], params, random_seed(rng), rng);
            save_file(out_path, FileKind::seeded_lwe_ciphertext,
                      with_label(params.label, fingerprint(params), to_bytes(sct, params)));
        } else {
            auto ct = lwe_encrypt(sk, mu[0], params, rng);
            save_file(out_path, FileKind::lwe_ciphertext,
                      with_label(params.label, fingerprint(params), to_bytes(ct, params)));
        }
    } else if (kind == FileKind::rlwe_secret_key) {
        auto params = make_rlwe_params(info);
        if (mu.size() > params.N) throw std::runtime_error("too many plaintext coefficients");
        Polynomial poly(params.N);
        for (std::size_t i = 0; i < mu.size(); ++i) poly[i] = mu[i];
        auto sk = rlwe_secret_key_from_bytes(labeled.body, params);
        if (seeded) {
            auto sct = rlwe_encrypt_seeded(sk, poly, params, random_seed(rng), rng);
            save_file(out_path, FileKind::seeded_rlwe_ciphertext,
                      with_label(params.label, fingerprint(params), to_bytes(sct, params)));
        } else {
            auto ct = rlwe_encrypt(sk, poly, params, rng);
            save_file(out_path, FileKind::rlwe_ciphertext,
                      with_label(params.label, fingerprint(params), to_bytes(ct, params)));
        }
    } else {
        throw std::runtime_error(sk_path + " is not a lattice secret key file");
    }
    std::cout << "wrote ciphertext to " << out_path << "\n";
    return 0;
}

LweCiphertext load_lwe_input(const std::string& path, const LweParams& params) {
    auto [kind, payload] = load_file(path);
    auto labeled = split_label(payload);
    if (labeled.fp != fingerprint(params)) {
        throw std::runtime_error(path + ": parameter fingerprint mismatch");
    }
    if (kind == FileKind::lwe_ciphertext) return lwe_ciphertext_from_bytes(labeled.body, params);
    if (kind == FileKind::seeded_lwe_ciphertext) {
        return lwe_expand_seeded(seeded_lwe_ciphertext_from_bytes(labeled.body, params), params);
    }
    throw std::runtime_error(path + " is not an LWE ciphertext file");
}

RlweCiphertext load_rlwe_input(const std::string& path, const RlweParams& params) {
    auto [kind, payload] = load_file(path);
    auto labeled = split_label(payload);
    if (labeled.fp != fingerprint(params)) {
        throw std::runtime_error(path + ": parameter fingerprint mismatch");
    }
    if (kind == FileKind::rlwe_ciphertext) return rlwe_ciphertext_from_bytes(labeled.body, params);
    if (kind == FileKind::seeded_rlwe_ciphertext) {
        return rlwe_expand_seeded(seeded_rlwe_ciphertext_from_bytes(labeled.body, params), params);
    }
    throw std::runtime_error(path + " is not an RLWE ciphertext file");
}

std::string first_label(const std::string& path) {
    auto [kind, payload] = load_file(path);
    (void)kind;
    return split_label(payload).label;
}

int cmd_process(const GlobalOpts& g, const std::vector<std::string>& inputs,
                const std::string& weights_csv, const std::string& out_path) {
    auto registry = load_registry(g);
    if (inputs.empty()) throw std::runtime_error("process: no inputs");
    auto weights = parse_u64_csv(weights_csv);
    if (weights.size() != inputs.size()) {
        throw std::runtime_error("process: need one weight per input");
    }
    auto info = resolve_set(registry, first_label(inputs[0]));
    if (info.scheme == SchemeKind::lwe) {
        auto params = make_lwe_params(info);
        std::optional<LweCiphertext> acc;
        for (std::size_t i = 0; i < inputs.size(); ++i) {
            auto term = lwe_plain_mul(load_lwe_input(inputs[i], params), weights[i], params);
            acc = acc ? lwe_add(*acc, term, params) : term;
        }
        if (uint128_t(2) * acc->noise_bound >= uint128_t(params.delta)) {
            throw std::runtime_error("process: noise budget exhausted, result would be unsound");
        }
        save_file(out_path, FileKind::lwe_ciphertext,
                  with_label(params.label, fingerprint(params), to_bytes(*acc, params)));
    } else {
        auto params = make_rlwe_params(info);
        std::optional<RlweCiphertext> acc;
        for (std::size_t i = 0; i < inputs.size(); ++i) {
            auto term = rlwe_plain_mul(load_rlwe_input(inputs[i], params), weights[i], params);
            acc = acc ? rlwe_add(*acc, term, params) : term;
        }
        if (uint128_t(2) * acc->noise_bound >= uint128_t(params.delta)) {
            throw std::runtime_error("process: noise budget exhausted, result would be unsound");
        }
        save_file(out_path, FileKind::rlwe_ciphertext,
                  with_label(params.label, fingerprint(params), to_bytes(*acc, params)));
    }
    std::cout << "wrote processed ciphertext to " << out_path << "\n";
    return 0;
}

int cmd_compress(const GlobalOpts& g, const std::string& esk_path,
                 const std::vector<std::string>& inputs, const std::string& ks_csv,
                 const std::string& out_path) {
    auto registry = load_registry(g);
    auto [kind, payload] = load_file(esk_path);
    if (kind != FileKind::encrypted_secret_key) {
        throw std::runtime_error(esk_path + " is not an encrypted secret key file");
    }
    auto esk_file = decode_esk_file(payload);
    auto info = resolve_set(registry, esk_file.label);
    if (inputs.empty()) throw std::runtime_error("compress: no inputs");

    if (esk_file.esk.scheme == SchemeKind::lwe) {
        auto params = make_lwe_params(info);
        std::vector<LweCiphertext> cts;
        for (const auto& path : inputs) cts.push_back(load_lwe_input(path, params));
        CompressedCiphertext<Paillier> x =
            cts.size() == 1 ? lwe_compress(esk_file.esk, cts[0], params)
                            : lwe_compress_batch(esk_file.esk, std::span<const LweCiphertext>(cts),
                                                 params);
        save_file(out_path, FileKind::compressed_ciphertext,
                  encode_compressed_file(x, params.label, esk_file.esk.ahe_pk));
    } else {
        auto params = make_rlwe_params(info);
        if (inputs.size() != 1) throw std::runtime_error("compress: RLWE takes one input ciphertext");
        auto ct = load_rlwe_input(inputs[0], params);
        auto ks64 = parse_u64_csv(ks_csv.empty() ? "0" : ks_csv);
        std::vector<std::size_t> ks(ks64.begin(), ks64.end());
        CompressedCiphertext<Paillier> x =
            ks.size() == 1
                ? rlwe_compress(esk_file.esk, ct, ks[0], params)
                : rlwe_compress_batch(esk_file.esk, ct, std::span<const std::size_t>(ks), params);
        save_file(out_path, FileKind::compressed_ciphertext,
                  encode_compressed_file(x, params.label, esk_file.esk.ahe_pk));
    }
    std::cout << "wrote compressed ciphertext to " << out_path << "\n";
    return 0;
}

int cmd_decrypt(const GlobalOpts& g, const std::string& in_path, const std::string& sk_path,
                const std::string& ahe_path) {
    auto registry = load_registry(g);
    auto [kind, payload] = load_file(in_path);

    if (kind == FileKind::compressed_ciphertext) {
        if (ahe_path.empty()) throw std::runtime_error("decrypt: compressed input needs --ahe");
        auto kp = load_ahe_keypair(ahe_path);
        io::Reader r(payload);
        std::string label = r.string();
        std::uint32_t bits = r.u32();
        if (bits != kp.pk.bits) throw std::runtime_error("decrypt: additive key size mismatch");
        auto x = compressed_ciphertext_from_bytes(r.take(r.remaining()), kp.pk);
        auto info = resolve_set(registry, label);
        std::vector<std::uint64_t> values;
        if (info.scheme == SchemeKind::lwe) {
            auto params = make_lwe_params(info);
            values = x.layout.slot_count == 1
                         ? std::vector<std::uint64_t>{modified_lwe_decrypt(kp, x, params)}
                         : modified_lwe_decrypt_batch(kp, x, params);
        } else {
            auto params = make_rlwe_params(info);
            values = x.layout.slot_count == 1
                         ? std::vector<std::uint64_t>{modified_rlwe_decrypt(kp, x, params)}
                         : modified_rlwe_decrypt_batch(kp, x, params);
        }
        for (std::size_t i = 0; i < values.size(); ++i) {
            std::cout << (i ? "," : "") << values[i];
        }
        std::cout << "\n";
        return 0;
    }

    if (sk_path.empty()) throw std::runtime_error("decrypt: lattice ciphertext needs --sk");
    auto [sk_kind, sk_payload] = load_file(sk_path);
    auto sk_labeled = split_label(sk_payload);
    auto info = resolve_set(registry, sk_labeled.label);
    if (sk_kind == FileKind::lwe_secret_key) {
        auto params = make_lwe_params(info);
        auto sk = lwe_secret_key_from_bytes(sk_labeled.body, params);
        auto ct = load_lwe_input(in_path, params);
        std::cout << lwe_decrypt(sk, ct, params) << "\n";
    } else if (sk_kind == FileKind::rlwe_secret_key) {
        auto params = make_rlwe_params(info);
        auto sk = rlwe_secret_key_from_bytes(sk_labeled.body, params);
        auto ct = load_rlwe_input(in_path, params);
        auto mu = rlwe_decrypt(sk, ct, params);
        for (std::size_t i = 0; i < mu.size(); ++i) std::cout << (i ? "," : "") << mu[i];
        std::cout << "\n";
    } else {
        throw std::runtime_error(sk_path + " is not a lattice secret key file");
    }
    return 0;
}

int cmd_bench(const GlobalOpts& g, const std::string& sets_arg, unsigned ahe_bits,
              std::size_t trials, const std::string& format, bool sizes_only,
              const std::string& out_path) {
    auto rng = make_rng(g);
    auto registry = load_registry(g);
    std::vector<ParamSetInfo> sets;
    if (sets_arg == "table1") {
        sets = {resolve_set(registry, "n630"), resolve_set(registry, "n750")};
    } else if (sets_arg == "table2") {
        sets = {resolve_set(registry, "N1024"), resolve_set(registry, "N2048"),
                resolve_set(registry, "N4096"), resolve_set(registry, "N8192")};
    } else if (sets_arg == "all") {
        sets = {resolve_set(registry, "n630"), resolve_set(registry, "n750"),
                resolve_set(registry, "N1024"), resolve_set(registry, "N2048"),
                resolve_set(registry, "N4096"), resolve_set(registry, "N8192")};
    } else {
        std::stringstream ss(sets_arg);
        std::string label;
        while (std::getline(ss, label, ',')) {
            if (!label.empty()) sets.push_back(resolve_set(registry, label));
        }
    }
    auto report = run_benchmark(sets, ahe_bits, trials, rng, sizes_only);
    std::string rendered =
        format == "machine" ? to_json(report).dump(2) + "\n" : render_text(report);
    if (out_path.empty()) {
        std::cout << rendered;
    } else {
        std::ofstream out(out_path);
        if (!out) throw std::runtime_error("cannot open " + out_path);
        out << rendered;
        std::cout << "wrote report to " << out_path << "\n";
    }
    return 0;
}

int cmd_serve(const GlobalOpts& g, const std::string& bind, bool once) {
    auto registry = load_registry(g);
    auto [host, port] = parse_host_port(bind);
    wire::Server server(host, port, registry);
    std::cout << "listening on " << host << ":" << server.port() << "\n" << std::flush;
    if (once) {
        server.run_once();
    } else {
        server.run();
    }
    return 0;
}

int cmd_request(const GlobalOpts& g, const std::string& connect, const std::string& set_label,
                unsigned ahe_bits, const std::string& inputs_csv, const std::string& weights_csv,
                std::uint32_t extract_index) {
    auto rng = make_rng(g);
    auto registry = load_registry(g);
    auto [host, port] = parse_host_port(connect);
    auto info = resolve_set(registry, set_label);
    auto inputs = parse_u64_csv(inputs_csv);
    auto weights = parse_u64_csv(weights_csv);
    if (inputs.empty()) throw std::runtime_error("request: no inputs");
    if (weights.size() != inputs.size()) throw std::runtime_error("request: need one weight per input");

    wire::SessionConfig cfg;
    cfg.scheme = info.scheme;
    cfg.label = info.label;
    cfg.ahe_bits = ahe_bits;
    cfg.extract_index = extract_index;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        cfg.terms.push_back({static_cast<std::uint32_t>(i), weights[i]});
    }

    auto kp = Paillier::keygen(ahe_bits, rng);

    if (info.scheme == SchemeKind::lwe) {
        auto params = make_lwe_params(info);
        if (!check_compatibility(Paillier::plaintext_modulus(kp.pk), params.q, params.n)) {
            throw incompatibility_error("additive key too small for this parameter set");
        }
        auto sk = lwe_keygen(params, rng);
        auto result = wire::run_lwe_session(host, port, cfg, params, sk, kp, inputs, rng);
        std::uint64_t expected = 0;
        for (std::size_t i = 0; i < inputs.size(); ++i) {
            expected = (expected + weights[i] * inputs[i]) % params.p;
        }
        std::cout << "result: " << result.values[0] << "\n";
        std::cout << "expected (clear evaluation): " << expected << "\n";
        std::cout << "response wire bytes: " << result.response_wire_bytes << "\n";
        std::cout << "request wire bytes: " << result.request_wire_bytes << "\n";
    } else {
        auto params = make_rlwe_params(info);
        if (!check_compatibility(Paillier::plaintext_modulus(kp.pk), params.q, params.N)) {
            throw incompatibility_error("additive key too small for this parameter set");
        }
        auto sk = rlwe_keygen(params, rng);
        std::vector<Polynomial> polys;
        for (std::uint64_t v : inputs) {
            Polynomial poly(params.N);
            poly[0] = v % params.p;
            polys.push_back(std::move(poly));
        }
        auto result = wire::run_rlwe_session(host, port, cfg, params, sk, kp, polys, rng);
        std::uint64_t expected = 0;
        if (extract_index == 0) {
            for (std::size_t i = 0; i < inputs.size(); ++i) {
                expected = (expected + weights[i] * inputs[i]) % params.p;
            }
        }
        std::cout << "result (coefficient " << extract_index << "): " << result.values[0] << "\n";
        std::cout << "expected (clear evaluation): " << expected << "\n";
        std::cout << "response wire bytes: " << result.response_wire_bytes << "\n";
        std::cout << "request wire bytes: " << result.request_wire_bytes << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"LWE/RLWE encryption with additive-HE ciphertext compression"};
    app.require_subcommand(1);
    GlobalOpts g;
    app.add_option("--registry", g.registry_path, "parameter-set registry JSON file");
    std::uint64_t seed_value = 0;
    auto* seed_opt = app.add_option("--seed", seed_value, "deterministic RNG seed");

    std::string scheme, set_label = "n630", out_path, pub_out;
    unsigned ahe_bits = 3072;
    auto* keygen = app.add_subcommand("keygen", "generate a lattice or additive key");
    keygen->add_option("--scheme", scheme, "lwe | rlwe | ahe")->required();
    keygen->add_option("--set", set_label, "parameter-set label (lattice schemes)");
    keygen->add_option("--ahe-bits", ahe_bits, "additive key size in bits");
    keygen->add_option("--out", out_path, "output file")->required();
    keygen->add_option("--pub-out", pub_out, "also write the additive public key here");

    std::string sk_path, ahe_path;
    auto* enc_key = app.add_subcommand("enc-key", "encrypt a lattice secret key entrywise");
    enc_key->add_option("--sk", sk_path, "lattice secret key file")->required();
    enc_key->add_option("--ahe", ahe_path, "additive keypair or public key file")->required();
    enc_key->add_option("--out", out_path, "output file")->required();

    std::string mu_csv;
    bool seeded = false;
    auto* encrypt = app.add_subcommand("encrypt", "encrypt a plaintext");
    encrypt->add_option("--sk", sk_path, "lattice secret key file")->required();
    encrypt->add_option("--mu", mu_csv, "plaintext (integer, or CSV of coefficients for RLWE)")
        ->required();
    encrypt->add_flag("--seeded", seeded, "emit the seed-compressed fresh form");
    encrypt->add_option("--out", out_path, "output file")->required();

    std::vector<std::string> in_paths;
    std::string weights_csv;
    auto* process = app.add_subcommand("process", "weighted sum of ciphertexts (server-side)");
    process->add_option("--in", in_paths, "input ciphertext files")->required();
    process->add_option("--weights", weights_csv, "CSV of weights, one per input")->required();
    process->add_option("--out", out_path, "output file")->required();

    std::string esk_path, ks_csv;
    auto* compress = app.add_subcommand("compress", "compress ciphertexts with an encrypted key");
    compress->add_option("--esk", esk_path, "encrypted secret key file")->required();
    compress->add_option("--in", in_paths, "input ciphertext file(s); several LWE inputs batch")
        ->required();
    compress->add_option("--k", ks_csv, "RLWE coefficient index (CSV batches several)");
    compress->add_option("--out", out_path, "output file")->required();

    std::string in_path;
    auto* decrypt = app.add_subcommand("decrypt", "decrypt a lattice or compressed ciphertext");
    decrypt->add_option("--in", in_path, "ciphertext file")->required();
    decrypt->add_option("--sk", sk_path, "lattice secret key (for lattice ciphertexts)");
    decrypt->add_option("--ahe", ahe_path, "additive keypair (for compressed ciphertexts)");

    std::string sets_arg = "all", format = "text";
    std::size_t trials = 1;
    bool sizes_only = false;
    auto* bench = app.add_subcommand("bench", "reproduce the size table rows");
    bench->add_option("--sets", sets_arg, "table1 | table2 | all | CSV of labels");
    bench->add_option("--ahe-bits", ahe_bits, "additive key size in bits");
    bench->add_option("--trials", trials, "timing trials per set");
    bench->add_option("--format", format, "text | machine")
        ->check(CLI::IsMember({"text", "machine"}));
    bench->add_flag("--sizes-only", sizes_only, "skip the timing measurements");
    bench->add_option("--out", out_path, "write the report here instead of stdout");

    std::string bind = "127.0.0.1:7700";
    bool once = false;
    auto* serve = app.add_subcommand("serve", "run the demo server");
    serve->add_option("--bind", bind, "host:port (port 0 picks one)");
    serve->add_flag("--once", once, "serve a single session and exit");

    std::string connect, inputs_csv;
    std::uint32_t extract_index = 0;
    unsigned req_bits = 512;
    auto* request = app.add_subcommand("request", "run a full client session against a server");
    request->add_option("--connect", connect, "host:port")->required();
    request->add_option("--set", set_label, "parameter-set label");
    request->add_option("--ahe-bits", req_bits, "additive key size in bits");
    request->add_option("--inputs", inputs_csv, "CSV of plaintext inputs")->required();
    request->add_option("--weights", weights_csv, "CSV of weights, one per input")->required();
    request->add_option("--k", extract_index, "RLWE coefficient to extract");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        app.exit(e);
        return kExitUsage;
    }
    if (*seed_opt) g.seed = seed_value;

    try {
        if (*keygen) return cmd_keygen(g, scheme, set_label, ahe_bits, out_path, pub_out);
        if (*enc_key) return cmd_enc_key(g, sk_path, ahe_path, out_path);
        if (*encrypt) return cmd_encrypt(g, sk_path, mu_csv, seeded, out_path);
        if (*process) return cmd_process(g, in_paths, weights_csv, out_path);
        if (*compress) return cmd_compress(g, esk_path, in_paths, ks_csv, out_path);
        if (*decrypt) return cmd_decrypt(g, in_path, sk_path, ahe_path);
        if (*bench) return cmd_bench(g, sets_arg, ahe_bits, trials, format, sizes_only, out_path);
        if (*serve) return cmd_serve(g, bind, once);
        if (*request)
            return cmd_request(g, connect, set_label, req_bits, inputs_csv, weights_csv,
                               extract_index);
    } catch (const incompatibility_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIncompatible;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitUsage;
}
