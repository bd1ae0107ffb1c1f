#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hecomp/prg.hpp"
#include "hecomp/sampling.hpp"
#include "hecomp/zq.hpp"

namespace hecomp {

enum class SchemeKind : std::uint8_t { lwe = 1, rlwe = 2 };

inline const char* scheme_name(SchemeKind k) { return k == SchemeKind::lwe ? "lwe" : "rlwe"; }

struct LweParams {
    std::string label;
    std::size_t n = 0;
    unsigned log2_q = 0;
    std::uint64_t p = 0;
    NoiseParams noise;
    Zq q;
    std::uint64_t delta = 0;  // floor(q / p)
    static constexpr unsigned seed_bits = 8 * kSeedBytes;
};

struct RlweParams {
    std::string label;
    std::size_t N = 0;
    unsigned log2_q = 0;
    std::uint64_t p = 0;
    NoiseParams noise;
    Zq q;
    std::uint64_t delta = 0;
    static constexpr unsigned seed_bits = 8 * kSeedBytes;
};

inline LweParams make_lwe_params(std::string label, std::size_t n, unsigned log2_q,
                                 std::uint64_t p, double sigma) {
    if (n < 1) throw std::invalid_argument("LweParams: n must be >= 1");
    LweParams params;
    params.label = std::move(label);
    params.n = n;
    params.log2_q = log2_q;
    params.q = Zq::pow2(log2_q);
    if (p < 2 || uint128_t(p) > params.q.value()) {
        throw std::invalid_argument("LweParams: need 2 <= p <= q");
    }
    params.p = p;
    params.delta = params.q.floor_div(p);
    params.noise = NoiseParams::gaussian(sigma);
    return params;
}

inline RlweParams make_rlwe_params(std::string label, std::size_t N, unsigned log2_q,
                                   std::uint64_t p, double sigma) {
    if (N < 1 || (N & (N - 1)) != 0) {
        throw std::invalid_argument("RlweParams: N must be a power of two");
    }
    RlweParams params;
    params.label = std::move(label);
    params.N = N;
    params.log2_q = log2_q;
    params.q = Zq::pow2(log2_q);
    if (p < 2 || uint128_t(p) > params.q.value()) {
        throw std::invalid_argument("RlweParams: need 2 <= p <= q");
    }
    params.p = p;
    params.delta = params.q.floor_div(p);
    params.noise = NoiseParams::gaussian(sigma);
    return params;
}

namespace detail {

inline std::uint64_t fnv1a64(const std::uint8_t* data, std::size_t len,
                             std::uint64_t h = 0xcbf29ce484222325ull) {
    for (std::size_t i = 0; i < len; ++i) {
        h ^= data[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::uint64_t fnv1a64_u64(std::uint64_t v, std::uint64_t h) {
    std::uint8_t b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<std::uint8_t>(v >> (8 * i));
    return fnv1a64(b, 8, h);
}

inline std::uint64_t params_fingerprint(SchemeKind kind, std::size_t dim, unsigned log2_q,
                                        std::uint64_t p, double sigma) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    h = fnv1a64_u64(static_cast<std::uint64_t>(kind), h);
    h = fnv1a64_u64(dim, h);
    h = fnv1a64_u64(log2_q, h);
    h = fnv1a64_u64(p, h);
    h = fnv1a64_u64(static_cast<std::uint64_t>(sigma * 1000000.0 + 0.5), h);
    return h;
}

}  // namespace detail

inline std::uint64_t fingerprint(const LweParams& params) {
    return detail::params_fingerprint(SchemeKind::lwe, params.n, params.log2_q, params.p,
                                      params.noise.sigma);
}

inline std::uint64_t fingerprint(const RlweParams& params) {
    return detail::params_fingerprint(SchemeKind::rlwe, params.N, params.log2_q, params.p,
                                      params.noise.sigma);
}

/// One row of the parameter-set registry.
struct ParamSetInfo {
    std::string label;
    SchemeKind scheme;
    std::size_t dim;  // n for LWE, N for RLWE
    unsigned log2_q;
    std::uint64_t p;
    double sigma;
};

/// Built-in registry. The two LWE and four RLWE production sets, plus small
/// toy sets for quick demos.
inline const std::vector<ParamSetInfo>& builtin_param_sets() {
    static const std::vector<ParamSetInfo> sets = {
        {"n630", SchemeKind::lwe, 630, 64, 16, 3.2},
        {"n750", SchemeKind::lwe, 750, 64, 16, 3.2},
        {"N1024", SchemeKind::rlwe, 1024, 27, 16, 3.2},
        {"N2048", SchemeKind::rlwe, 2048, 54, 16, 3.2},
        {"N4096", SchemeKind::rlwe, 4096, 36, 16, 3.2},
        {"N8192", SchemeKind::rlwe, 8192, 43, 16, 3.2},
        {"lwe-toy", SchemeKind::lwe, 2, 6, 4, 0.1},
        {"rlwe-toy", SchemeKind::rlwe, 8, 6, 4, 0.1},
    };
    return sets;
}

inline std::optional<ParamSetInfo> find_param_set(const std::vector<ParamSetInfo>& registry,
                                                  const std::string& label) {
    for (const auto& info : registry) {
        if (info.label == label) return info;
    }
    return std::nullopt;
}

inline LweParams make_lwe_params(const ParamSetInfo& info) {
    if (info.scheme != SchemeKind::lwe) {
        throw std::invalid_argument("parameter set " + info.label + " is not an LWE set");
    }
    return make_lwe_params(info.label, info.dim, info.log2_q, info.p, info.sigma);
}

inline RlweParams make_rlwe_params(const ParamSetInfo& info) {
    if (info.scheme != SchemeKind::rlwe) {
        throw std::invalid_argument("parameter set " + info.label + " is not an RLWE set");
    }
    return make_rlwe_params(info.label, info.dim, info.log2_q, info.p, info.sigma);
}

inline std::vector<ParamSetInfo> load_param_registry(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open parameter registry: " + path);
    nlohmann::json doc = nlohmann::json::parse(in);
    std::vector<ParamSetInfo> out;
    for (const auto& row : doc.at("parameter_sets")) {
        ParamSetInfo info;
        info.label = row.at("label").get<std::string>();
        std::string scheme = row.at("scheme").get<std::string>();
        if (scheme == "lwe") {
            info.scheme = SchemeKind::lwe;
            info.dim = row.at("n").get<std::size_t>();
        } else if (scheme == "rlwe") {
            info.scheme = SchemeKind::rlwe;
            info.dim = row.at("N").get<std::size_t>();
        } else {
            throw std::runtime_error("registry: unknown scheme " + scheme);
        }
        info.log2_q = row.at("log2_q").get<unsigned>();
        info.p = row.at("p").get<std::uint64_t>();
        info.sigma = row.at("sigma").get<double>();
        out.push_back(std::move(info));
    }
    return out;
}

}  // namespace hecomp
