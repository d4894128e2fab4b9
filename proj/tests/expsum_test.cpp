#include "klab/expsum.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace klab;

namespace {

// Reference implementation kept deliberately separate from the library path:
// plain powmod inverses and std::polar, no tables.
Complex s_sum_reference(uint64_t m, uint64_t n, uint64_t q) {
    Complex acc{};
    for (uint64_t u = 1; u < q; ++u) {
        uint64_t ub = pow_mod(u, q - 2, q);
        uint64_t ex = (mul_mod(m % q, mul_mod(ub, ub, q), q) + mul_mod(n % q, u, q)) % q;
        double ang = 2.0 * M_PI * static_cast<double>(ex) / static_cast<double>(q);
        acc += std::polar(1.0, ang);
    }
    return acc;
}

// Gauss sum tau_q = sum over all x mod q of e_q(x^2): sqrt(q) for q = 1 (4),
// i sqrt(q) for q = 3 (4).
Complex gauss_tau(uint64_t q) {
    double rq = std::sqrt(static_cast<double>(q));
    return q % 4 == 1 ? Complex(rq, 0) : Complex(0, rq);
}

}  // namespace

TEST(SSum, ClosedFormsAtZeroArguments) {
    for (uint64_t qv : {5ull, 7ull, 11ull, 101ull}) {
        PrimeModulus q(qv);
        EXPECT_NEAR(std::abs(s_sum(0, 0, q) - Complex(static_cast<double>(qv - 1), 0)), 0.0, 1e-9);
        for (uint64_t n = 1; n < qv; ++n)
            EXPECT_NEAR(std::abs(s_sum(0, n, q) - Complex(-1, 0)), 0.0, 1e-9) << qv << " " << n;
    }
}

// S(m,0;q) is the unit-restricted Gauss sum chi(m) tau_q - 1; its modulus is
// sqrt(q) -+ 1 (q = 1 mod 4, chi(m) = +-1) or sqrt(q+1) (q = 3 mod 4) -- not
// sqrt(q) itself.
TEST(SSum, GaussValueAtNZero) {
    for (uint64_t qv : {5ull, 7ull, 11ull, 13ull, 101ull}) {
        PrimeModulus q(qv);
        for (uint64_t m = 1; m < qv; ++m) {
            Complex expected = static_cast<double>(legendre(Residue(m, qv))) * gauss_tau(qv) -
                               Complex(1, 0);
            EXPECT_NEAR(std::abs(s_sum(m, 0, q) - expected), 0.0, 1e-8) << qv << " " << m;
        }
    }
}

TEST(SSum, MatchesReferenceAndWeilBound) {
    PrimeModulus q7(7);
    Complex v = s_sum(1, 1, q7);
    EXPECT_NEAR(std::abs(v - s_sum_reference(1, 1, 7)), 0.0, 1e-10);
    EXPECT_LE(std::abs(v), 3.0 * std::sqrt(7.0));

    PrimeModulus q(31);
    for (uint64_t m = 1; m < 31; ++m)
        for (uint64_t n = 0; n < 31; ++n) {
            Complex a = s_sum(m, n, q);
            EXPECT_NEAR(std::abs(a - s_sum_reference(m, n, 31)), 0.0, 1e-9);
            EXPECT_LE(std::abs(a), 3.0 * std::sqrt(31.0) + 1e-6);
        }
}

TEST(SSum, ConjugationSymmetry) {
    std::mt19937_64 rng(11);
    PrimeModulus q(211);
    for (int iter = 0; iter < 1000; ++iter) {
        uint64_t m = rng() % 211, n = rng() % 211;
        Complex a = s_sum(m, n, q);
        Complex b = s_sum(q.neg(m), q.neg(n), q);
        EXPECT_NEAR(std::abs(b - std::conj(a)), 0.0, 1e-8);
    }
}

TEST(SRow, MatchesPointwiseEvaluation) {
    for (uint64_t qv : {7ull, 101ull, 211ull}) {
        PrimeModulus q(qv);
        for (uint64_t m : {uint64_t{1}, uint64_t{2}, qv - 1}) {
            std::vector<Complex> row = s_row(m, q);
            ASSERT_EQ(row.size(), qv);
            for (uint64_t n = 0; n < qv; ++n)
                EXPECT_NEAR(std::abs(row[n] - s_sum(m, n, q)), 0.0, 1e-6) << qv << " " << m << " " << n;
        }
    }
}

TEST(SRow, ParsevalMass) {
    for (uint64_t qv : {101ull, 211ull}) {
        PrimeModulus q(qv);
        std::vector<Complex> row = s_row(3, q);
        double mass = 0.0;
        for (auto& z : row) mass += std::norm(z);
        EXPECT_NEAR(mass, static_cast<double>(qv) * static_cast<double>(qv - 1), 1e-4);
    }
}

TEST(SRow, ChirpPathAgreesWithDirectSums) {
    PrimeModulus q(12289);  // above the direct-row threshold, so Bluestein runs
    std::vector<Complex> row = s_row(5, q);
    std::mt19937_64 rng(7);
    for (int iter = 0; iter < 12; ++iter) {
        uint64_t n = rng() % 12289;
        EXPECT_NEAR(std::abs(row[n] - s_sum(5, n, q)), 0.0, 1e-6) << n;
    }
    double mass = 0.0;
    for (auto& z : row) mass += std::norm(z);
    EXPECT_NEAR(mass, 12289.0 * 12288.0, 1e-2);
}

TEST(EqTransform, BluesteinMatchesDirect) {
    PrimeModulus q(911);
    std::mt19937_64 rng(13);
    std::vector<Complex> c(911);
    for (auto& z : c) z = Complex(static_cast<double>(rng() % 1000) / 1000.0 - 0.5,
                                  static_cast<double>(rng() % 1000) / 1000.0 - 0.5);
    std::vector<Complex> direct = eq_transform(c, q);  // 911 < 4096: direct path
    std::vector<Complex> fast = detail::eq_transform_bluestein(c, q);
    for (uint64_t t = 0; t < 911; ++t)
        EXPECT_NEAR(std::abs(direct[t] - fast[t]), 0.0, 1e-7) << t;
}

TEST(Kloosterman, DefinitionCases) {
    PrimeModulus q(13);
    for (uint64_t t = 1; t < 13; ++t) {
        // k = 1 degenerates to a single character value
        EXPECT_NEAR(std::abs(kloosterman_k(t, 1, q) - q.e(t)), 0.0, 1e-12);
        Complex k2 = kloosterman_k(t, 2, q);
        EXPECT_NEAR(k2.imag(), 0.0, 1e-9);  // u -> -u, v -> -v symmetry
        EXPECT_LE(std::abs(k2), 2.0 + 1e-6);
        EXPECT_LE(std::abs(kloosterman_k(t, 3, q)), 3.0 + 1e-6);
    }
    EXPECT_THROW(kloosterman_k(0, 2, q), std::domain_error);
    EXPECT_THROW(kloosterman_k(1, 4, q), std::domain_error);
    EXPECT_THROW(kloosterman_k(1, 3, PrimeModulus(601)), std::domain_error);
}

TEST(Kloosterman, K2AgainstDirectConvolutionOracle) {
    PrimeModulus q(17);
    for (uint64_t t = 1; t < 17; ++t) {
        Complex brute{};
        for (uint64_t u = 1; u < 17; ++u)
            for (uint64_t v = 1; v < 17; ++v)
                if (q.mul(u, v) == t) brute += q.e(q.add(u, v));
        brute /= std::sqrt(17.0);
        EXPECT_NEAR(std::abs(kloosterman_k(t, 2, q) - brute), 0.0, 1e-10);
    }
}

TEST(KernelSpec, ValidatesParameters) {
    PrimeModulus q(11);
    EXPECT_THROW(KernelSpec(KernelVariant::K1, q, 0, 1), std::domain_error);
    EXPECT_THROW(KernelSpec(KernelVariant::K2, q, 1, 11), std::domain_error);  // b = 0 mod q
    EXPECT_THROW(KernelSpec(KernelVariant::Klk, q, 1, 1, 5), std::domain_error);
    KernelSpec ok(KernelVariant::K1, q, 12, 1);  // 12 reduces to 1
    EXPECT_EQ(ok.a, 1u);
}

TEST(KernelEval, DefinitionAndBounds) {
    PrimeModulus q(101);
    const double rq = std::sqrt(101.0);
    for (auto [a, b] : {std::pair<uint64_t, uint64_t>{1, 1}, {2, 3}}) {
        KernelSpec k1(KernelVariant::K1, q, a, b);
        KernelSpec k2(KernelVariant::K2, q, a, b);
        for (uint64_t t = 0; t < 101; ++t) {
            EXPECT_NEAR(std::abs(rq * kernel_eval(k1, t) - s_sum(a, q.mul(b, t), q)), 0.0, 1e-8);
            EXPECT_NEAR(std::abs(rq * kernel_eval(k2, t) - s_sum(q.mul(a, t), b, q)), 0.0, 1e-8);
            EXPECT_LE(std::abs(kernel_eval(k1, t)), 3.0);
            EXPECT_LE(std::abs(kernel_eval(k2, t)), 3.0);
        }
    }
}

// K2 at a square argument s t0^2 collapses to a K1-type sum by the linear
// change of variables u -> bbar t0 u.
TEST(KernelEval, K2SquareArgumentIdentity) {
    PrimeModulus q(13);
    uint64_t a = 2, b = 5;
    KernelSpec k2(KernelVariant::K2, q, a, b);
    for (uint64_t s = 0; s < 13; ++s) {
        for (uint64_t t0 = 1; t0 < 13; ++t0) {
            uint64_t arg = q.mul(s, q.mul(t0, t0));
            Complex direct{};
            uint64_t ab2s = q.mul(a, q.mul(q.mul(b, b), s));
            for (uint64_t u = 1; u < 13; ++u) {
                uint64_t ub = q.inv(u);
                direct += q.e(q.add(q.mul(ab2s, q.mul(ub, ub)), q.mul(t0, u)));
            }
            direct /= std::sqrt(13.0);
            EXPECT_NEAR(std::abs(kernel_eval(k2, arg) - direct), 0.0, 1e-9) << s << " " << t0;
        }
    }
}

// K2(eta t^2) = K1 with a replaced by eta a, for eta in {1, xi}.
TEST(KernelEval, K2EtaSquareEqualsTwistedK1) {
    PrimeModulus q(29);
    uint64_t a = 3, b = 7;
    uint64_t xi = least_nonresidue(q);
    KernelSpec k2(KernelVariant::K2, q, a, b);
    for (uint64_t eta : {uint64_t{1}, xi}) {
        KernelSpec k1eta(KernelVariant::K1, q, q.mul(eta, a), b);
        for (uint64_t t = 1; t < 29; ++t) {
            uint64_t arg = q.mul(eta, q.mul(t, t));
            EXPECT_NEAR(std::abs(kernel_eval(k2, arg) - kernel_eval(k1eta, t)), 0.0, 1e-9)
                << eta << " " << t;
        }
    }
}

TEST(KernelTable, MatchesPointwiseEval) {
    PrimeModulus q(101);
    for (KernelVariant v : {KernelVariant::SRaw, KernelVariant::K1, KernelVariant::K2}) {
        KernelSpec spec(v, q, 2, 3);
        std::vector<Complex> tab = kernel_table(spec);
        ASSERT_EQ(tab.size(), 101u);
        for (uint64_t t = 0; t < 101; ++t)
            EXPECT_NEAR(std::abs(tab[t] - kernel_eval(spec, t)), 0.0, 1e-6) << kernel_name(v) << " " << t;
    }
    KernelSpec kl(KernelVariant::Klk, PrimeModulus(31), 1, 1, 2);
    std::vector<Complex> tab = kernel_table(kl);
    EXPECT_EQ(tab[0], Complex{});  // table placeholder; pointwise eval rejects t = 0
    for (uint64_t t = 1; t < 31; ++t)
        EXPECT_NEAR(std::abs(tab[t] - kernel_eval(kl, t)), 0.0, 1e-9);
}
