#include <gtest/gtest.h>

#include "hecomp/compression.hpp"
#include "hecomp/paillier.hpp"
#include "hecomp/serialize.hpp"
#include "test_support.hpp"

using namespace hecomp;
using testsupport::fixed_rng;
using testsupport::small_paillier;
using testsupport::toy_paillier;

static_assert(additive_scheme<Paillier>);

TEST(PaillierKeygen, PinnedToyPrimes) {
    auto kp = toy_paillier();
    EXPECT_EQ(kp.pk.modulus, 10403);                 // 101 * 103
    EXPECT_EQ(kp.lambda, 5100);                      // lcm(100, 102)
    EXPECT_EQ(kp.pk.modulus_sq, BigUint(10403) * 10403);
    EXPECT_EQ(mod_q(kp.mu_inv * mod_q(kp.lambda, kp.pk.modulus), kp.pk.modulus), 1);
    EXPECT_THROW(Paillier::from_primes(101, 101), std::invalid_argument);
}

TEST(PaillierKeygen, ExactModulusSize) {
    auto rng = fixed_rng(60);
    for (unsigned bits : {64u, 128u, 256u}) {
        auto kp = Paillier::keygen(bits, rng);
        EXPECT_EQ(bit_length(kp.pk.modulus), bits);
        EXPECT_EQ(kp.pk.bits, bits);
    }
    auto kp1 = Paillier::keygen(128, rng);
    auto kp2 = Paillier::keygen(128, rng);
    EXPECT_NE(kp1.pk.modulus, kp2.pk.modulus);
    EXPECT_THROW(Paillier::keygen(63, rng), std::invalid_argument);
    EXPECT_THROW(Paillier::keygen(32, rng), std::invalid_argument);
}

TEST(PaillierKeygen, CiphertextWidthFollowsKeySize) {
    // 3072-bit keys give 2 * 384 = 768-byte ciphertexts; derived from the
    // key size alone, no keygen needed.
    Paillier::PublicKey pk;
    pk.bits = 3072;
    EXPECT_EQ(Paillier::ciphertext_bytes(pk), 768u);
    EXPECT_EQ(Paillier::ciphertext_bytes(small_paillier().pk), 64u);
}

TEST(PaillierEncrypt, PinnedRandomnessMatchesDirectFormula) {
    auto kp = toy_paillier();
    // Independent oracle: c = (1+N)^2 * 3^N mod N^2 via raw mpz arithmetic.
    BigUint n = 10403, n2 = n * n;
    BigUint expected;
    mpz_powm(expected.get_mpz_t(), BigUint(n + 1).get_mpz_t(), BigUint(2).get_mpz_t(),
             n2.get_mpz_t());
    BigUint r_pow;
    mpz_powm(r_pow.get_mpz_t(), BigUint(3).get_mpz_t(), n.get_mpz_t(), n2.get_mpz_t());
    expected = mod_q(expected * r_pow, n2);

    auto ct = Paillier::encrypt_with(kp.pk, 2, 3);
    EXPECT_EQ(ct.value, expected);
    EXPECT_EQ(Paillier::decrypt(kp, ct), 2);
}

TEST(PaillierEncrypt, RoundTripBoundaries) {
    auto kp = toy_paillier();
    auto rng = fixed_rng(61);
    EXPECT_EQ(Paillier::decrypt(kp, Paillier::encrypt(kp.pk, 0, rng)), 0);
    BigUint top = kp.pk.modulus - 1;
    EXPECT_EQ(Paillier::decrypt(kp, Paillier::encrypt(kp.pk, top, rng)), top);
    EXPECT_THROW(Paillier::encrypt(kp.pk, kp.pk.modulus, rng), std::invalid_argument);
    EXPECT_THROW(Paillier::encrypt_with(kp.pk, 1, 0), std::invalid_argument);
    EXPECT_THROW(Paillier::encrypt_with(kp.pk, 1, 101), std::invalid_argument);  // shares a factor
}

TEST(PaillierEncrypt, Probabilistic) {
    auto kp = toy_paillier();
    auto rng = fixed_rng(62);
    auto c1 = Paillier::encrypt(kp.pk, 7, rng);
    auto c2 = Paillier::encrypt(kp.pk, 7, rng);
    EXPECT_NE(c1.value, c2.value);
    EXPECT_EQ(Paillier::decrypt(kp, c1), Paillier::decrypt(kp, c2));
}

TEST(PaillierDecrypt, DeterministicAndValidated) {
    auto kp = toy_paillier();
    auto rng = fixed_rng(63);
    auto ct = Paillier::encrypt(kp.pk, 99, rng);
    EXPECT_EQ(Paillier::decrypt(kp, ct), Paillier::decrypt(kp, ct));
    Paillier::Ciphertext junk{kp.pk.modulus_sq};
    EXPECT_THROW(Paillier::decrypt(kp, junk), std::invalid_argument);
}

TEST(PaillierDecrypt, RandomRoundTrips) {
    auto kp = toy_paillier();
    auto rng = fixed_rng(64);
    for (int trial = 0; trial < 1000; ++trial) {
        BigUint x = random_below(kp.pk.modulus, rng);
        ASSERT_EQ(Paillier::decrypt(kp, Paillier::encrypt(kp.pk, x, rng)), x);
    }
}

TEST(PaillierAdd, Basics) {
    auto kp = toy_paillier();
    auto rng = fixed_rng(65);
    auto cx = Paillier::encrypt(kp.pk, 5, rng);
    auto cy = Paillier::encrypt(kp.pk, 7, rng);
    EXPECT_EQ(Paillier::decrypt(kp, Paillier::add(kp.pk, cx, cy)), 12);
    // x (+) Enc(0) keeps the plaintext and rerandomizes the ciphertext.
    auto zero = Paillier::encrypt(kp.pk, 0, rng);
    auto rerandomized = Paillier::add(kp.pk, cx, zero);
    EXPECT_EQ(Paillier::decrypt(kp, rerandomized), 5);
    EXPECT_NE(rerandomized.value, cx.value);
    // (m-1) + 1 wraps to 0.
    auto ctop = Paillier::encrypt(kp.pk, kp.pk.modulus - 1, rng);
    auto cone = Paillier::encrypt(kp.pk, 1, rng);
    EXPECT_EQ(Paillier::decrypt(kp, Paillier::add(kp.pk, ctop, cone)), 0);
}

TEST(PaillierPlainMul, Basics) {
    auto kp = toy_paillier();
    auto rng = fixed_rng(66);
    auto cx = Paillier::encrypt(kp.pk, 9, rng);
    auto identity = Paillier::plain_mul(kp.pk, cx, 1);
    EXPECT_EQ(Paillier::decrypt(kp, identity), 9);
    EXPECT_EQ(Paillier::decrypt(kp, Paillier::plain_mul(kp.pk, cx, 0)), 0);
    // Scalars far larger than m reduce mod m, matching big-int arithmetic.
    BigUint k = (BigUint(1) << 64) - 62;  // a (q - a[i])-style scalar
    BigUint expected = mod_q(k * 9, kp.pk.modulus);
    EXPECT_EQ(Paillier::decrypt(kp, Paillier::plain_mul(kp.pk, cx, k)), expected);
}

TEST(PaillierAddPlain, MatchesEncryptThenAdd) {
    auto kp = toy_paillier();
    auto rng = fixed_rng(67);
    for (int trial = 0; trial < 50; ++trial) {
        BigUint x = random_below(kp.pk.modulus, rng);
        BigUint k = random_below(kp.pk.modulus, rng);
        auto cx = Paillier::encrypt(kp.pk, x, rng);
        EXPECT_EQ(Paillier::decrypt(kp, Paillier::add_plain(kp.pk, cx, k)),
                  mod_q(x + k, kp.pk.modulus));
    }
}

TEST(PaillierHomomorphism, RandomizedToyKey) {
    auto kp = toy_paillier();
    auto rng = fixed_rng(68);
    for (int trial = 0; trial < 2000; ++trial) {
        BigUint x = random_below(kp.pk.modulus, rng);
        BigUint y = random_below(kp.pk.modulus, rng);
        BigUint k = random_below(kp.pk.modulus, rng);
        auto cx = Paillier::encrypt(kp.pk, x, rng);
        auto cy = Paillier::encrypt(kp.pk, y, rng);
        ASSERT_EQ(Paillier::decrypt(kp, Paillier::add(kp.pk, cx, cy)),
                  mod_q(x + y, kp.pk.modulus));
        ASSERT_EQ(Paillier::decrypt(kp, Paillier::plain_mul(kp.pk, cx, k)),
                  mod_q(k * x, kp.pk.modulus));
    }
}

TEST(PaillierWeightedSum, MatchesPairwiseOps) {
    const auto& kp = small_paillier();
    auto rng = fixed_rng(69);
    std::vector<BigUint> scalars;
    std::vector<Paillier::Ciphertext> cts;
    BigUint expected = 0;
    for (int i = 0; i < 12; ++i) {
        BigUint x = random_below(kp.pk.modulus, rng);
        BigUint k = random_bits(65, rng);  // exponents up to q = 2^64 included
        scalars.push_back(k);
        cts.push_back(Paillier::encrypt(kp.pk, x, rng));
        expected = mod_q(expected + k * x, kp.pk.modulus);
    }
    auto fused = Paillier::weighted_sum(kp.pk, scalars, cts);
    EXPECT_EQ(Paillier::decrypt(kp, fused), expected);

    // Pairwise evaluation of the same sum.
    auto acc = Paillier::plain_mul(kp.pk, cts[0], scalars[0]);
    for (std::size_t i = 1; i < cts.size(); ++i) {
        acc = Paillier::add(kp.pk, acc, Paillier::plain_mul(kp.pk, cts[i], scalars[i]));
    }
    EXPECT_EQ(Paillier::decrypt(kp, acc), expected);
}

TEST(PaillierSerialize, CiphertextAndKeys) {
    const auto& kp = small_paillier();
    auto rng = fixed_rng(70);
    auto ct = Paillier::encrypt(kp.pk, 12345, rng);
    auto bytes = to_bytes(ct, kp.pk);
    EXPECT_EQ(bytes.size(), 2 * (256 / 8));
    EXPECT_EQ(paillier_ciphertext_from_bytes(bytes, kp.pk), ct);
    std::vector<std::uint8_t> wrong(bytes.begin(), bytes.end() - 1);
    EXPECT_THROW(paillier_ciphertext_from_bytes(wrong, kp.pk), format_error);

    auto pk_back = paillier_public_key_from_bytes(to_bytes(kp.pk));
    EXPECT_EQ(pk_back.modulus, kp.pk.modulus);
    EXPECT_EQ(pk_back.bits, kp.pk.bits);
    auto kp_back = paillier_keypair_from_bytes(to_bytes(kp));
    EXPECT_EQ(kp_back.lambda, kp.lambda);
    EXPECT_EQ(kp_back.mu_inv, kp.mu_inv);
    EXPECT_EQ(Paillier::decrypt(kp_back, ct), 12345);
}
