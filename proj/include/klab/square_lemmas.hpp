#pragma once

// Square-detection criteria for the pole patterns that drive the diagonal
// classification: the two-pole iff criterion, the three-pole necessary
// condition, the family f_{alpha,beta}, and its exception set.

#include <array>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <vector>

#include "modarith.hpp"

namespace klab {

/// 1 + A/(X-rho1)^2 + B/(X-rho2)^2 with A, B nonzero and rho1 != rho2.
struct TwoPoleSpec {
    PrimeModulus q;
    uint64_t A, B, rho1, rho2;

    TwoPoleSpec(const PrimeModulus& mod, uint64_t A_, uint64_t B_, uint64_t rho1_, uint64_t rho2_)
        : q(mod), A(A_ % mod.q()), B(B_ % mod.q()), rho1(rho1_ % mod.q()), rho2(rho2_ % mod.q()) {
        if (A == 0 || B == 0) throw std::domain_error("TwoPoleSpec: A and B must be nonzero");
        if (rho1 == rho2) throw std::domain_error("TwoPoleSpec: poles must be distinct");
    }
};

inline RatFq two_pole_assemble(const TwoPoleSpec& s) {
    PolyFq p1(s.q, {static_cast<int64_t>(s.q.neg(s.rho1)), 1});  // X - rho1
    PolyFq p2(s.q, {static_cast<int64_t>(s.q.neg(s.rho2)), 1});
    RatFq one = RatFq::constant(s.q, 1);
    RatFq tA = RatFq(PolyFq::constant(s.q, s.A), p1 * p1);
    RatFq tB = RatFq(PolyFq::constant(s.q, s.B), p2 * p2);
    return one + tA + tB;
}

/// Closed-form criterion: the two-pole function is a square over the closure
/// iff A = B = (rho1 - rho2)^2.
inline bool two_pole_is_square(const TwoPoleSpec& s) {
    uint64_t d = s.q.sub(s.rho1, s.rho2);
    uint64_t d2 = s.q.mul(d, d);
    return s.A == d2 && s.B == d2;
}

/// Necessary condition for 1 + A/(X-rho1)^2 + B/(X-rho2)^2 + C/(X-rho3)^2 to
/// be a square (any nonzero A, B, C):
/// 1/(rho1-rho2) + 1/(rho2-rho3) + 1/(rho3-rho1) = 0.
inline bool three_pole_necessary(const Residue& rho1, const Residue& rho2, const Residue& rho3) {
    if (rho1 == rho2 || rho2 == rho3 || rho3 == rho1)
        throw std::domain_error("three_pole_necessary: poles must be pairwise distinct");
    Residue s = mod_inv(rho1 - rho2) + mod_inv(rho2 - rho3) + mod_inv(rho3 - rho1);
    return s.value == 0;
}

inline RatFq three_pole_assemble(const PrimeModulus& q, uint64_t A, uint64_t B, uint64_t C,
                                 uint64_t r1, uint64_t r2, uint64_t r3) {
    RatFq acc = RatFq::constant(q, 1);
    const std::array<std::pair<uint64_t, uint64_t>, 3> terms{{{A, r1}, {B, r2}, {C, r3}}};
    for (auto [coef, rho] : terms) {
        PolyFq lin(q, {static_cast<int64_t>(q.neg(rho)), 1});
        acc = acc + RatFq(PolyFq::constant(q, coef), lin * lin);
    }
    return acc;
}

/// f_{alpha,beta}(X) = 1 + 1/X^2 - 1/(alpha X + beta)^2 - 1/((1-alpha)X + (1-beta))^2.
/// Nonconstant and constant-nonzero linear forms are handled uniformly by the
/// rational arithmetic; an identically zero form leaves f undefined.
inline RatFq f_alpha_beta(const Residue& alpha, const Residue& beta) {
    if (alpha.modulus != beta.modulus) throw std::invalid_argument("alpha, beta from different fields");
    PrimeModulus q(alpha.modulus);
    const uint64_t a = alpha.value, b = beta.value;
    PolyFq L(q, {static_cast<int64_t>(b), static_cast<int64_t>(a)});
    PolyFq Lt(q, {static_cast<int64_t>(q.sub(1, b)), static_cast<int64_t>(q.sub(1, a))});
    if (L.is_zero() || Lt.is_zero())
        throw std::domain_error("f_alpha_beta: a linear form vanishes identically");
    PolyFq X = PolyFq::x(q);
    RatFq f = RatFq::constant(q, 1);
    f = f + RatFq(PolyFq::constant(q, 1), X * X);
    f = f - RatFq(PolyFq::constant(q, 1), L * L);
    f = f - RatFq(PolyFq::constant(q, 1), Lt * Lt);
    return f;
}

/// The pairs (alpha, beta) in F_q^2 for which f_{alpha,beta} degenerates:
/// undefined, identically zero, or a square over the closure.  The set also
/// carries the explicitly known degenerate pairs and the roots of the two
/// degeneracy quartics, so it is the full exception set for the diagonal
/// construction; its cardinality never exceeds 14.
struct ExceptionSet {
    uint64_t q = 0;
    std::set<std::pair<uint64_t, uint64_t>> pairs;

    bool contains(uint64_t alpha, uint64_t beta) const {
        return pairs.count({alpha % q, beta % q}) > 0;
    }
    size_t size() const { return pairs.size(); }
};

inline ExceptionSet exception_set(const PrimeModulus& q) {
    const uint64_t Q = q.q();
    ExceptionSet E;
    E.q = Q;

    // Known degenerate pairs (undefined or identically-zero cases and their mirrors).
    for (auto [a, b] : std::initializer_list<std::pair<int64_t, int64_t>>{
             {0, 0}, {0, 1}, {0, -1}, {1, 0}, {1, 1}, {1, 2}})
        E.pairs.emplace(q.reduce(a), q.reduce(b));

    // Roots of the two degeneracy quartics, paired as (alpha, 1-alpha) and
    // (alpha, alpha) respectively.
    PolyFq quartic1(q, {1, -4, 5, -2, 1});
    for (const Residue& r : quartic_roots(quartic1))
        E.pairs.emplace(r.value, q.sub(1, r.value));
    PolyFq quartic2(q, {1, -2, 3, -2, 1});
    for (const Residue& r : quartic_roots(quartic2))
        E.pairs.emplace(r.value, r.value);

    // Semantic sweep: every pair whose f is undefined, zero, or a square.
    for (uint64_t a = 0; a < Q; ++a) {
        for (uint64_t b = 0; b < Q; ++b) {
            bool exceptional;
            if ((a == 0 && b == 0) || (a == 1 && b == 1)) {
                exceptional = true;  // a linear form vanishes, f undefined
            } else {
                RatFq f = f_alpha_beta(Residue(a, Q), Residue(b, Q));
                exceptional = f.is_zero() || rat_is_square_closure(f);
            }
            if (exceptional) E.pairs.emplace(a, b);
        }
    }
    return E;
}

}  // namespace klab
