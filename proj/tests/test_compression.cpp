#include <gtest/gtest.h>

#include "hecomp/compression.hpp"
#include "test_support.hpp"

using namespace hecomp;
using testsupport::ClearAdditive;
using testsupport::fixed_rng;
using testsupport::small_paillier;
using testsupport::toy_lwe_params;
using testsupport::toy_paillier;
using testsupport::toy_rlwe_params;

namespace {

ClearAdditive::Keypair clear_key(const BigUint& m) { return ClearAdditive::Keypair{{m}}; }

}  // namespace

TEST(Compatibility, ExactThresholds) {
    Zq q64 = Zq::pow2(6);
    // q=64, n=2: bound is 64 + 2*4096 = 8256.
    EXPECT_EQ(linear_phase_bound(q64, 2), 8256);
    EXPECT_TRUE(check_compatibility(BigUint(10403), q64, 2));
    EXPECT_FALSE(check_compatibility(BigUint(8256), q64, 2));  // strict inequality
    EXPECT_TRUE(check_compatibility(BigUint(8257), q64, 2));

    // q=2^64, n=630: bound has 138 bits, so any 3072-bit modulus dominates.
    Zq q = Zq::pow2(64);
    EXPECT_EQ(bit_length(linear_phase_bound(q, 630)), 138u);
    EXPECT_TRUE(check_compatibility(BigUint(1) << 3071, q, 630));
    EXPECT_FALSE(check_compatibility(BigUint(1) << 130, q, 630));
}

TEST(EncryptLatticeKey, EntrywiseRoundTrip) {
    auto params = make_lwe_params("toy6", 6, 6, 4, 0.16);
    auto kp = toy_paillier();
    auto rng = fixed_rng(80);
    auto sk = lwe_keygen(params, rng);
    // m = 10403 vs bound 64 + 6*4096 = 24640: incompatible.
    EXPECT_THROW(encrypt_lattice_key<Paillier>(kp.pk, sk, params, rng), incompatibility_error);

    auto params2 = toy_lwe_params();
    auto sk2 = lwe_keygen(params2, rng);
    auto esk = encrypt_lattice_key<Paillier>(kp.pk, sk2, params2, rng);
    EXPECT_EQ(esk.scheme, SchemeKind::lwe);
    EXPECT_EQ(esk.entries.size(), params2.n);
    EXPECT_EQ(esk.params_fp, fingerprint(params2));
    for (std::size_t i = 0; i < params2.n; ++i) {
        EXPECT_EQ(Paillier::decrypt(kp, esk.entries[i]), sk2.coeffs[i]);
    }
}

// Toy chain pinned by hand: sk=(3,5), ct=(a=(2,4), b=43). The additive
// plaintext must be 43 + 62*3 + 60*5 = 529; 529 mod 64 = 17; round(17/16) = 1.
TEST(LweCompress, ToyChainExactValue) {
    auto params = toy_lwe_params();
    LweSecretKey sk{{3, 5}};
    auto ct = lwe_encrypt_with(sk, 1, {2, 4}, 1, params);
    ASSERT_EQ(ct.b, 43u);

    auto kp = clear_key(BigUint(10403));
    auto rng = fixed_rng(81);
    auto esk = encrypt_lattice_key<ClearAdditive>(kp.pk, sk, params, rng);
    auto x = lwe_compress(esk, ct, params);
    EXPECT_EQ(ClearAdditive::decrypt(kp, x.payload), 529);
    EXPECT_EQ(modified_lwe_decrypt(kp, x, params), 1u);
    EXPECT_EQ(x.layout.slot_count, 1u);
    EXPECT_EQ(x.layout.slot_width_bits, 14u);  // bitlen(8256)

    // Same chain through real Paillier.
    auto pkp = toy_paillier();
    auto pesk = encrypt_lattice_key<Paillier>(pkp.pk, sk, params, rng);
    auto px = lwe_compress(pesk, ct, params);
    EXPECT_EQ(Paillier::decrypt(pkp, px.payload), 529);
    EXPECT_EQ(modified_lwe_decrypt(pkp, px, params), 1u);
}

TEST(LweCompress, AllZeroCiphertext) {
    auto params = toy_lwe_params();
    LweSecretKey sk{{3, 5}};
    LweCiphertext ct;
    ct.a = {0, 0};
    ct.b = 0;
    auto kp = toy_paillier();
    auto rng = fixed_rng(82);
    auto esk = encrypt_lattice_key<Paillier>(kp.pk, sk, params, rng);
    auto x = lwe_compress(esk, ct, params);
    // (q - 0) = q contributes q*sk[i]; the value still reduces to b - 0 = 0 mod q.
    EXPECT_EQ(Paillier::decrypt(kp, x.payload), BigUint(64) * (3 + 5));
    EXPECT_EQ(modified_lwe_decrypt(kp, x, params), 0u);
}

TEST(LweCompress, MatchesDirectDecryptionIncludingProcessed) {
    const auto& kp = small_paillier();
    auto rng = fixed_rng(83);
    for (unsigned log2q : {6u, 16u, 64u}) {
        auto params = make_lwe_params("t", 12, log2q, 16, 1.0);
        ASSERT_TRUE(check_compatibility(kp.pk.modulus, params.q, params.n));
        auto sk = lwe_keygen(params, rng);
        auto esk = encrypt_lattice_key<Paillier>(kp.pk, sk, params, rng);
        std::uniform_int_distribution<std::uint64_t> dist(0, params.p - 1);
        for (int trial = 0; trial < 60; ++trial) {
            auto ct = lwe_encrypt(sk, dist(rng), params, rng);
            if (trial % 3 == 1) ct = lwe_add(ct, lwe_encrypt(sk, dist(rng), params, rng), params);
            if (trial % 3 == 2) ct = lwe_plain_mul(ct, dist(rng), params);
            ASSERT_EQ(modified_lwe_decrypt(kp, lwe_compress(esk, ct, params), params),
                      lwe_decrypt(sk, ct, params));
        }
    }
}

TEST(LweCompress, NoOverflowInvariant) {
    // The exact value held by the additive scheme stays below m and below
    // q + n*q^2 for random ciphertexts.
    auto params = make_lwe_params("t", 20, 16, 16, 1.0);
    BigUint m = linear_phase_bound(params.q, params.n) + 12345;
    auto kp = clear_key(m);
    auto rng = fixed_rng(84);
    auto sk = lwe_keygen(params, rng);
    auto esk = encrypt_lattice_key<ClearAdditive>(kp.pk, sk, params, rng);
    for (int trial = 0; trial < 100; ++trial) {
        auto ct = lwe_encrypt(sk, trial % params.p, params, rng);
        auto x = lwe_compress(esk, ct, params);
        BigUint clear = testsupport::clear_lwe_linear_value(sk, ct, params);
        EXPECT_EQ(ClearAdditive::decrypt(kp, x.payload), clear);
        EXPECT_LE(clear, linear_phase_bound(params.q, params.n));
        EXPECT_LT(clear, m);
    }
}

TEST(LweCompress, FingerprintMismatchFails) {
    auto params = toy_lwe_params();
    auto other = make_lwe_params("other", 2, 6, 2, 0.16);  // different p
    auto kp = toy_paillier();
    auto rng = fixed_rng(85);
    auto sk = lwe_keygen(params, rng);
    auto esk = encrypt_lattice_key<Paillier>(kp.pk, sk, params, rng);
    auto ct = lwe_encrypt(sk, 1, params, rng);
    EXPECT_THROW(lwe_compress(esk, ct, other), std::invalid_argument);
}

TEST(RlweCompress, ForcedInstanceBothCoefficients) {
    auto params = toy_rlwe_params();
    RlweSecretKey sk{Polynomial({3, 5})};
    auto ct = rlwe_encrypt_with(sk, Polynomial({1, 0}), Polynomial({2, 4}), {1, 0}, params);
    auto kp = toy_paillier();
    auto rng = fixed_rng(86);
    auto esk = encrypt_lattice_key<Paillier>(kp.pk, sk, params, rng);
    for (std::size_t k = 0; k < params.N; ++k) {
        auto x = rlwe_compress(esk, ct, k, params);
        EXPECT_EQ(modified_rlwe_decrypt(kp, x, params),
                  rlwe_extract_coeff_plain(sk, ct, k, params));
    }
    EXPECT_THROW(rlwe_compress(esk, ct, params.N, params), std::out_of_range);
}

TEST(RlweCompress, ZeroCiphertext) {
    auto params = toy_rlwe_params();
    RlweSecretKey sk{Polynomial({3, 5})};
    RlweCiphertext ct;
    ct.a = Polynomial(2);
    ct.b = Polynomial(2);
    auto kp = toy_paillier();
    auto rng = fixed_rng(87);
    auto esk = encrypt_lattice_key<Paillier>(kp.pk, sk, params, rng);
    EXPECT_EQ(modified_rlwe_decrypt(kp, rlwe_compress(esk, ct, 0, params), params), 0u);
}

TEST(RlweCompress, ExhaustiveSmallRing) {
    auto params = toy_rlwe_params(16);
    const auto& kp = small_paillier();
    auto rng = fixed_rng(88);
    auto sk = rlwe_keygen(params, rng);
    auto esk = encrypt_lattice_key<Paillier>(kp.pk, sk, params, rng);
    std::uniform_int_distribution<std::uint64_t> dist(0, params.p - 1);
    for (int trial = 0; trial < 10; ++trial) {
        Polynomial mu(params.N);
        for (auto& c : mu.coeffs) c = dist(rng);
        auto ct = rlwe_encrypt(sk, mu, params, rng);
        auto full = rlwe_decrypt(sk, ct, params);
        for (std::size_t k = 0; k < params.N; ++k) {
            ASSERT_EQ(modified_rlwe_decrypt(kp, rlwe_compress(esk, ct, k, params), params),
                      full[k]);
        }
    }
}

TEST(RlweCompress, NoOverflowInvariant) {
    auto params = toy_rlwe_params(8);
    BigUint m = linear_phase_bound(params.q, params.N) + 999;
    auto kp = clear_key(m);
    auto rng = fixed_rng(89);
    auto sk = rlwe_keygen(params, rng);
    auto esk = encrypt_lattice_key<ClearAdditive>(kp.pk, sk, params, rng);
    for (int trial = 0; trial < 50; ++trial) {
        Polynomial mu(params.N);
        mu[trial % params.N] = trial % params.p;
        auto ct = rlwe_encrypt(sk, mu, params, rng);
        std::size_t k = trial % params.N;
        auto x = rlwe_compress(esk, ct, k, params);
        BigUint clear = testsupport::clear_rlwe_linear_value(sk, ct, k, params);
        EXPECT_EQ(ClearAdditive::decrypt(kp, x.payload), clear);
        EXPECT_LE(clear, linear_phase_bound(params.q, params.N));
        EXPECT_LT(clear, m);
    }
}

TEST(ModifiedDecrypt, LayoutErrors) {
    auto params = toy_lwe_params();
    LweSecretKey sk{{3, 5}};
    auto ct = lwe_encrypt_with(sk, 1, {2, 4}, 0, params);
    auto kp = toy_paillier();
    auto rng = fixed_rng(90);
    auto esk = encrypt_lattice_key<Paillier>(kp.pk, sk, params, rng);
    auto x = lwe_compress(esk, ct, params);

    auto other = make_lwe_params("other", 2, 6, 2, 0.16);
    EXPECT_THROW(modified_lwe_decrypt(kp, x, other), std::invalid_argument);

    auto multi = x;
    multi.layout.slot_count = 2;
    EXPECT_THROW(modified_lwe_decrypt(kp, multi, params), std::invalid_argument);

    auto wrong_scheme = x;
    wrong_scheme.layout.scheme = SchemeKind::rlwe;
    EXPECT_THROW(modified_lwe_decrypt(kp, wrong_scheme, params), std::invalid_argument);
}

TEST(BatchCapacity, ToyAndProductionValues) {
    // m = 10403: floor(log2 m) = 13 < slot width 14, so nothing batches even
    // though single-value compression is legal.
    Zq q6 = Zq::pow2(6);
    EXPECT_EQ(slot_width_bits(q6, 2), 14u);
    EXPECT_EQ(batch_capacity(q6, 2, BigUint(10403)), 0u);

    // n=630, q=2^64, 3072-bit m: slot width 138, capacity floor(3071/138) = 22.
    Zq q64 = Zq::pow2(64);
    BigUint m3072 = (BigUint(1) << 3071) + 12345;  // any 3072-bit modulus
    EXPECT_EQ(slot_width_bits(q64, 630), 138u);
    EXPECT_EQ(batch_capacity(q64, 630, m3072), 22u);
    EXPECT_GE(bit_length(m3072) - 1, 22u * 138u);

    // m just above the theorem bound: capacity 0, single-slot still correct.
    BigUint just_above = linear_phase_bound(q6, 2) + 1;
    EXPECT_EQ(batch_capacity(q6, 2, just_above), 0u);
    EXPECT_TRUE(check_compatibility(just_above, q6, 2));
}

TEST(BatchCapacity, SingleSlotStillCorrectAtBoundary) {
    auto params = toy_lwe_params();
    BigUint m = linear_phase_bound(params.q, params.n) + 1;
    auto kp = clear_key(m);
    auto rng = fixed_rng(91);
    auto sk = lwe_keygen(params, rng);
    auto esk = encrypt_lattice_key<ClearAdditive>(kp.pk, sk, params, rng);
    for (std::uint64_t mu = 0; mu < params.p; ++mu) {
        auto ct = lwe_encrypt(sk, mu, params, rng);
        EXPECT_EQ(modified_lwe_decrypt(kp, lwe_compress(esk, ct, params), params),
                  lwe_decrypt(sk, ct, params));
    }
}

TEST(LweBatch, PackedLayoutMatchesShiftFormula) {
    // The batch payload must hold sum_j 2^(j*w) * value_j exactly.
    auto params = make_lwe_params("t", 4, 8, 16, 1.0);
    unsigned w = slot_width_bits(params.q, params.n);
    BigUint m = BigUint(1) << (3 * w + 5);  // capacity 3
    auto kp = clear_key(m);
    auto rng = fixed_rng(92);
    auto sk = lwe_keygen(params, rng);
    auto esk = encrypt_lattice_key<ClearAdditive>(kp.pk, sk, params, rng);
    ASSERT_EQ(batch_capacity(params.q, params.n, m), 3u);

    std::vector<LweCiphertext> cts;
    for (int j = 0; j < 3; ++j) cts.push_back(lwe_encrypt(sk, j + 1, params, rng));
    auto batch = lwe_compress_batch(esk, cts, params);

    BigUint expected = 0;
    for (int j = 0; j < 3; ++j) {
        BigUint vj = ClearAdditive::decrypt(kp, lwe_compress(esk, cts[j], params).payload);
        EXPECT_LT(vj, BigUint(1) << w);  // slot width sufficiency
        expected += vj << (j * w);
    }
    EXPECT_EQ(ClearAdditive::decrypt(kp, batch.payload), expected);

    auto decoded = modified_lwe_decrypt_batch(kp, batch, params);
    ASSERT_EQ(decoded.size(), 3u);
    for (int j = 0; j < 3; ++j) EXPECT_EQ(decoded[j], lwe_decrypt(sk, cts[j], params));
}

TEST(LweBatch, SingletonEqualsSingleCompression) {
    auto params = make_lwe_params("t", 4, 8, 16, 1.0);
    const auto& kp = small_paillier();
    auto rng = fixed_rng(93);
    auto sk = lwe_keygen(params, rng);
    auto esk = encrypt_lattice_key<Paillier>(kp.pk, sk, params, rng);
    auto ct = lwe_encrypt(sk, 5, params, rng);
    auto single = lwe_compress(esk, ct, params);
    std::vector<LweCiphertext> one{ct};
    auto batch = lwe_compress_batch(esk, std::span<const LweCiphertext>(one), params);
    EXPECT_EQ(Paillier::decrypt(kp, single.payload), Paillier::decrypt(kp, batch.payload));
    EXPECT_EQ(modified_lwe_decrypt_batch(kp, batch, params).at(0),
              modified_lwe_decrypt(kp, single, params));
}

TEST(LweBatch, CapacityEnforced) {
    auto params = toy_lwe_params();
    auto kp = toy_paillier();  // capacity 0 at m = 10403
    auto rng = fixed_rng(94);
    auto sk = lwe_keygen(params, rng);
    auto esk = encrypt_lattice_key<Paillier>(kp.pk, sk, params, rng);
    std::vector<LweCiphertext> cts{lwe_encrypt(sk, 1, params, rng)};
    EXPECT_THROW(lwe_compress_batch(esk, std::span<const LweCiphertext>(cts), params), batch_error);
    EXPECT_THROW(lwe_compress_batch(esk, std::span<const LweCiphertext>{}, params),
                 std::invalid_argument);
}

TEST(LweBatch, SlotIsolationSmallScale) {
    auto params = make_lwe_params("t", 4, 8, 16, 1.0);
    const auto& kp = small_paillier();
    auto rng = fixed_rng(95);
    auto sk = lwe_keygen(params, rng);
    auto esk = encrypt_lattice_key<Paillier>(kp.pk, sk, params, rng);
    std::size_t capacity = std::min<std::size_t>(
        batch_capacity(params.q, params.n, kp.pk.modulus), 6);
    ASSERT_GE(capacity, 2u);

    std::vector<LweCiphertext> cts;
    std::vector<std::uint64_t> mus;
    for (std::size_t j = 0; j < capacity; ++j) {
        mus.push_back(j % params.p);
        cts.push_back(lwe_encrypt(sk, mus.back(), params, rng));
    }
    auto baseline = modified_lwe_decrypt_batch(
        kp, lwe_compress_batch(esk, std::span<const LweCiphertext>(cts), params), params);
    for (int trial = 0; trial < 50; ++trial) {
        std::size_t victim = trial % capacity;
        auto perturbed = cts;
        std::uint64_t new_mu = (mus[victim] + 1 + trial) % params.p;
        if (new_mu == mus[victim]) new_mu = (new_mu + 1) % params.p;
        perturbed[victim] = lwe_encrypt(sk, new_mu, params, rng);
        auto decoded = modified_lwe_decrypt_batch(
            kp, lwe_compress_batch(esk, std::span<const LweCiphertext>(perturbed), params), params);
        for (std::size_t j = 0; j < capacity; ++j) {
            if (j == victim) {
                ASSERT_NE(decoded[j], baseline[j]);
            } else {
                ASSERT_EQ(decoded[j], baseline[j]);
            }
        }
    }
}

TEST(RlweBatch, SingleIndexAndPairs) {
    auto params = toy_rlwe_params();
    const auto& kp = small_paillier();
    auto rng = fixed_rng(96);
    RlweSecretKey sk{Polynomial({3, 5})};
    auto ct = rlwe_encrypt_with(sk, Polynomial({1, 0}), Polynomial({2, 4}), {1, 0}, params);
    auto esk = encrypt_lattice_key<Paillier>(kp.pk, sk, params, rng);

    std::vector<std::size_t> one{0};
    auto single = rlwe_compress(esk, ct, 0, params);
    auto batch1 = rlwe_compress_batch(esk, ct, std::span<const std::size_t>(one), params);
    EXPECT_EQ(Paillier::decrypt(kp, single.payload), Paillier::decrypt(kp, batch1.payload));

    // Both coefficients in one payload; duplicates are allowed.
    std::vector<std::size_t> ks{0, 1, 0};
    auto batch = rlwe_compress_batch(esk, ct, std::span<const std::size_t>(ks), params);
    auto decoded = modified_rlwe_decrypt_batch(kp, batch, params);
    auto full = rlwe_decrypt(sk, ct, params);
    ASSERT_EQ(decoded.size(), 3u);
    EXPECT_EQ(decoded[0], full[0]);
    EXPECT_EQ(decoded[1], full[1]);
    EXPECT_EQ(decoded[2], full[0]);

    std::vector<std::size_t> bad{0, params.N};
    EXPECT_THROW(rlwe_compress_batch(esk, ct, std::span<const std::size_t>(bad), params),
                 std::out_of_range);
}

TEST(TheoremEquality, HoldsEvenBeyondNoiseBudget) {
    // Both sides decode the same mu*, noise and all; equality is with the
    // decryption output, not with the original plaintext.
    auto params = toy_lwe_params();
    const auto& kp = small_paillier();
    auto rng = fixed_rng(97);
    LweSecretKey sk{{3, 5}};
    auto esk = encrypt_lattice_key<Paillier>(kp.pk, sk, params, rng);
    auto ct = lwe_encrypt_with(sk, 1, {2, 4}, 7, params);  // |e| = 7, just under delta/2 = 8
    auto noisy = lwe_add(ct, ct, params);                  // noise now breaks correctness
    EXPECT_EQ(modified_lwe_decrypt(kp, lwe_compress(esk, noisy, params), params),
              lwe_decrypt(sk, noisy, params));
}
