#include "klab/square_lemmas.hpp"

#include <gtest/gtest.h>

using namespace klab;

TEST(TwoPole, ClosedFormCriterion) {
    PrimeModulus q(7);
    // A = B = (rho1 - rho2)^2 is a square: (1 + d/(X-r1) - d/(X-r2))^2
    TwoPoleSpec good(q, 4, 4, 0, 2);  // (0-2)^2 = 4
    EXPECT_TRUE(two_pole_is_square(good));
    EXPECT_TRUE(rat_is_square_closure(two_pole_assemble(good)));

    TwoPoleSpec bad(q, 2, 1, 0, 1);
    EXPECT_FALSE(two_pole_is_square(bad));
    EXPECT_FALSE(rat_is_square_closure(two_pole_assemble(bad)));

    EXPECT_THROW(TwoPoleSpec(q, 0, 1, 0, 1), std::domain_error);
    EXPECT_THROW(TwoPoleSpec(q, 1, 1, 3, 3), std::domain_error);
}

TEST(TwoPole, CriterionMatchesOracleExhaustively) {
    for (uint64_t qv : {5ull, 7ull}) {
        PrimeModulus q(qv);
        for (uint64_t A = 1; A < qv; ++A)
            for (uint64_t B = 1; B < qv; ++B)
                for (uint64_t r1 = 0; r1 < qv; ++r1)
                    for (uint64_t r2 = 0; r2 < qv; ++r2) {
                        if (r1 == r2) continue;
                        TwoPoleSpec spec(q, A, B, r1, r2);
                        EXPECT_EQ(two_pole_is_square(spec),
                                  rat_is_square_closure(two_pole_assemble(spec)))
                            << qv << ": " << A << "," << B << "," << r1 << "," << r2;
                    }
    }
}

TEST(ThreePole, NecessaryConditionProperties) {
    PrimeModulus q(7);
    // independent scan for vanishing pole-difference sums over F_7
    int vanishing = 0;
    for (uint64_t r1 = 0; r1 < 7; ++r1)
        for (uint64_t r2 = 0; r2 < 7; ++r2)
            for (uint64_t r3 = 0; r3 < 7; ++r3) {
                if (r1 == r2 || r2 == r3 || r3 == r1) continue;
                Residue a(r1, 7), b(r2, 7), c(r3, 7);
                bool pred = three_pole_necessary(a, b, c);
                uint64_t s = q.add(q.add(q.inv(q.sub(r1, r2)), q.inv(q.sub(r2, r3))),
                                   q.inv(q.sub(r3, r1)));
                EXPECT_EQ(pred, s == 0);
                if (pred) ++vanishing;
                // cyclic invariance
                EXPECT_EQ(pred, three_pole_necessary(b, c, a));
                EXPECT_EQ(pred, three_pole_necessary(c, a, b));
            }
    EXPECT_GT(vanishing, 0);  // the locus is nonempty over F_7
    EXPECT_THROW(three_pole_necessary(Residue(1, 7), Residue(1, 7), Residue(2, 7)),
                 std::domain_error);
}

// Contrapositive of the three-pole lemma: where the pole condition fails, no
// choice of nonzero coefficients produces a square.
TEST(ThreePole, NoSquareWhenConditionFails) {
    for (uint64_t qv : {5ull, 7ull, 11ull, 13ull}) {
        PrimeModulus q(qv);
        for (uint64_t r1 = 0; r1 < qv; ++r1)
            for (uint64_t r2 = r1 + 1; r2 < qv; ++r2)
                for (uint64_t r3 = r2 + 1; r3 < qv; ++r3) {
                    if (three_pole_necessary(Residue(r1, qv), Residue(r2, qv), Residue(r3, qv)))
                        continue;
                    for (uint64_t A = 1; A < qv; ++A)
                        for (uint64_t B = 1; B < qv; ++B)
                            for (uint64_t C = 1; C < qv; ++C)
                                EXPECT_FALSE(rat_is_square_closure(
                                    three_pole_assemble(q, A, B, C, r1, r2, r3)))
                                    << qv << ": " << A << "," << B << "," << C << " at " << r1
                                    << "," << r2 << "," << r3;
                }
    }
}

TEST(FAlphaBeta, DegenerateAndSymmetricCases) {
    // alpha=1, beta=0: the two subtracted terms collapse against the leading
    // ones and f vanishes identically.
    RatFq f10 = f_alpha_beta(Residue(1, 7), Residue(0, 7));
    EXPECT_TRUE(f10.is_zero());
    RatFq f01 = f_alpha_beta(Residue(0, 7), Residue(1, 7));
    EXPECT_TRUE(f01.is_zero());

    // undefined when a linear form vanishes identically
    EXPECT_THROW(f_alpha_beta(Residue(0, 7), Residue(0, 7)), std::domain_error);
    EXPECT_THROW(f_alpha_beta(Residue(1, 7), Residue(1, 7)), std::domain_error);

    // f_{alpha,beta} = f_{1-alpha,1-beta} as canonical forms
    for (uint64_t qv : {7ull, 13ull}) {
        for (uint64_t a = 0; a < qv; ++a)
            for (uint64_t b = 0; b < qv; ++b) {
                if ((a == 0 && b == 0) || (a == 1 && b == 1)) continue;
                PrimeModulus q(qv);
                RatFq f = f_alpha_beta(Residue(a, qv), Residue(b, qv));
                RatFq g = f_alpha_beta(Residue(q.sub(1, a), qv), Residue(q.sub(1, b), qv));
                EXPECT_EQ(f, g) << qv << ": " << a << "," << b;
            }
    }
}

TEST(FAlphaBeta, GenericDegrees) {
    RatFq f = f_alpha_beta(Residue(2, 7), Residue(3, 7));
    EXPECT_EQ(f.num().degree(), 6);
    EXPECT_EQ(f.den().degree(), 6);
    EXPECT_TRUE(f.den().is_monic());
}

// Direct expansion oracle: f equals
// (L^2 Lt^2 (X^2+1) - X^2 (Lt^2 + L^2)) / (X^2 L^2 Lt^2) before reduction.
TEST(FAlphaBeta, MatchesDirectExpansion) {
    for (uint64_t qv : {5ull, 11ull}) {
        PrimeModulus q(qv);
        for (uint64_t a = 0; a < qv; ++a)
            for (uint64_t b = 0; b < qv; ++b) {
                if ((a == 0 && b == 0) || (a == 1 && b == 1)) continue;
                PolyFq X = PolyFq::x(q);
                PolyFq L(q, {static_cast<int64_t>(b), static_cast<int64_t>(a)});
                PolyFq Lt(q, {static_cast<int64_t>(q.sub(1, b)), static_cast<int64_t>(q.sub(1, a))});
                PolyFq X2 = X * X, L2 = L * L, Lt2 = Lt * Lt;
                PolyFq one = PolyFq::constant(q, 1);
                RatFq expected(L2 * Lt2 * (X2 + one) - X2 * (Lt2 + L2), X2 * L2 * Lt2);
                EXPECT_EQ(f_alpha_beta(Residue(a, qv), Residue(b, qv)), expected)
                    << qv << ": " << a << "," << b;
            }
    }
}

TEST(ExceptionSet, ContainsListedPairsAndQuarticRoots) {
    for (uint64_t qv : {5ull, 7ull, 13ull, 101ull}) {
        PrimeModulus q(qv);
        ExceptionSet E = exception_set(q);
        EXPECT_LE(E.size(), 14u) << qv;
        // the six explicitly known degenerate pairs
        EXPECT_TRUE(E.contains(0, 0));
        EXPECT_TRUE(E.contains(0, 1));
        EXPECT_TRUE(E.contains(0, q.reduce(-1)));
        EXPECT_TRUE(E.contains(1, 0));
        EXPECT_TRUE(E.contains(1, 1));
        EXPECT_TRUE(E.contains(1, 2));
        // quartic roots pair as (alpha, 1-alpha)
        for (const Residue& r : quartic_roots(PolyFq(q, {1, -4, 5, -2, 1})))
            EXPECT_TRUE(E.contains(r.value, q.sub(1, r.value))) << qv << " " << r.value;
        for (const Residue& r : quartic_roots(PolyFq(q, {1, -2, 3, -2, 1})))
            EXPECT_TRUE(E.contains(r.value, r.value)) << qv << " " << r.value;
    }
}

// The semantic sweep never strays outside the listed pairs plus the two
// quartic families; at q = 13 both quartics split and the square pairs are
// known explicitly.
TEST(ExceptionSet, SemanticMembersStayInsideKnownFamilies) {
    for (uint64_t qv : {5ull, 7ull, 11ull, 13ull, 53ull}) {
        PrimeModulus q(qv);
        ExceptionSet E = exception_set(q);
        std::set<std::pair<uint64_t, uint64_t>> allowed;
        for (auto [a, b] : std::initializer_list<std::pair<int64_t, int64_t>>{
                 {0, 0}, {0, 1}, {0, -1}, {1, 0}, {1, 1}, {1, 2}})
            allowed.emplace(q.reduce(a), q.reduce(b));
        for (const Residue& r : quartic_roots(PolyFq(q, {1, -4, 5, -2, 1})))
            allowed.emplace(r.value, q.sub(1, r.value));
        for (const Residue& r : quartic_roots(PolyFq(q, {1, -2, 3, -2, 1})))
            allowed.emplace(r.value, r.value);
        for (auto& p : E.pairs) EXPECT_TRUE(allowed.count(p)) << qv << ": (" << p.first << "," << p.second << ")";
    }
    // q = 13: the quartic families genuinely contribute squares
    PrimeModulus q13(13);
    ExceptionSet E13 = exception_set(q13);
    for (auto [a, b] : {std::pair<uint64_t, uint64_t>{2, 12}, {5, 9}, {9, 5}, {12, 2}}) {
        EXPECT_TRUE(E13.contains(a, b));
        EXPECT_TRUE(rat_is_square_closure(f_alpha_beta(Residue(a, 13), Residue(b, 13))));
    }
    for (auto [a, b] : {std::pair<uint64_t, uint64_t>{4, 4}, {10, 10}})
        EXPECT_TRUE(rat_is_square_closure(f_alpha_beta(Residue(a, 13), Residue(b, 13))));
    EXPECT_EQ(E13.size(), 12u);
}
