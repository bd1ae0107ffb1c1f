#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "hecomp/zq.hpp"

namespace hecomp {

/// Element of R_q = Z_q[X]/(X^N + 1); coeffs[i] is the coefficient of X^i.
struct Polynomial {
    std::vector<std::uint64_t> coeffs;

    Polynomial() = default;
    explicit Polynomial(std::size_t n) : coeffs(n, 0) {}
    explicit Polynomial(std::vector<std::uint64_t> c) : coeffs(std::move(c)) {}

    std::size_t size() const { return coeffs.size(); }
    std::uint64_t& operator[](std::size_t i) { return coeffs[i]; }
    std::uint64_t operator[](std::size_t i) const { return coeffs[i]; }
    bool operator==(const Polynomial&) const = default;
};

namespace detail {

inline void require_same_length(const Polynomial& a, const Polynomial& b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("polynomial length mismatch");
    }
}

}  // namespace detail

inline Polynomial poly_add(const Polynomial& a, const Polynomial& b, const Zq& q) {
    detail::require_same_length(a, b);
    Polynomial r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = q.add(a[i], b[i]);
    return r;
}

inline Polynomial poly_sub(const Polynomial& a, const Polynomial& b, const Zq& q) {
    detail::require_same_length(a, b);
    Polynomial r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = q.sub(a[i], b[i]);
    return r;
}

/// Negacyclic schoolbook product: coefficient k of a*b mod (X^N + 1) is
/// sum_{i+j=k} a[i]b[j] - sum_{i+j=N+k} a[i]b[j] mod q, since X^N == -1.
inline Polynomial poly_negacyclic_mul(const Polynomial& a, const Polynomial& b, const Zq& q) {
    detail::require_same_length(a, b);
    const std::size_t n = a.size();
    Polynomial r(n);
    if (n == 0) return r;

    if (q.q_lo == 0) {
        // q == 2^64: native wraparound is exact reduction.
        for (std::size_t i = 0; i < n; ++i) {
            std::uint64_t ai = a[i];
            for (std::size_t j = 0; j < n; ++j) {
                std::size_t k = i + j;
                std::uint64_t p = ai * b[j];
                if (k < n) r[k] += p; else r[k - n] -= p;
            }
        }
        return r;
    }

    // Deferred reduction: accumulate the wrapped and unwrapped products in
    // 128 bits and reduce once per output coefficient. Safe while
    // N * (q-1)^2 fits in 128 bits.
    uint128_t qm1 = q.value() - 1;
    if (qm1 <= (~uint128_t(0) / n) / qm1) {
        std::vector<uint128_t> pos(n, 0), neg(n, 0);
        for (std::size_t i = 0; i < n; ++i) {
            std::uint64_t ai = a[i];
            if (ai == 0) continue;
            for (std::size_t j = 0; j < n; ++j) {
                std::size_t k = i + j;
                uint128_t p = uint128_t(ai) * b[j];
                if (k < n) pos[k] += p; else neg[k - n] += p;
            }
        }
        for (std::size_t k = 0; k < n; ++k) {
            r[k] = q.sub(q.reduce(pos[k]), q.reduce(neg[k]));
        }
        return r;
    }

    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            std::size_t k = i + j;
            std::uint64_t p = q.mul(a[i], b[j]);
            if (k < n) r[k] = q.add(r[k], p); else r[k - n] = q.sub(r[k - n], p);
        }
    }
    return r;
}

/// Dot product sum_i a[i]*b[i] mod q, same reduction strategy as the ring product.
inline std::uint64_t dot_mod(const std::vector<std::uint64_t>& a,
                             const std::vector<std::uint64_t>& b, const Zq& q) {
    if (a.size() != b.size()) throw std::invalid_argument("dot_mod: length mismatch");
    if (q.q_lo == 0) {
        std::uint64_t acc = 0;
        for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
        return acc;
    }
    uint128_t qm1 = q.value() - 1;
    if (!a.empty() && qm1 <= (~uint128_t(0) / a.size()) / qm1) {
        uint128_t acc = 0;
        for (std::size_t i = 0; i < a.size(); ++i) acc += uint128_t(a[i]) * b[i];
        return q.reduce(acc);
    }
    std::uint64_t acc = 0;
    for (std::size_t i = 0; i < a.size(); ++i) acc = q.add(acc, q.mul(a[i], b[i]));
    return acc;
}

}  // namespace hecomp
