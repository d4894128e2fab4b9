#pragma once

// Complete exponential sums S(m,n;q) = sum over units u of e_q(m*ubar^2 + n*u),
// their normalized kernels K1, K2, and hyper-Kloosterman sums Kl_k, with a
// batched whole-row path (direct below q = 4096, chirp-transform DFT above).
//
// All functions are pure; the per-modulus tables live inside PrimeModulus.

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "modarith.hpp"

namespace klab {

using Complex = std::complex<double>;

namespace detail {

inline size_t next_pow2(size_t n) {
    size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

// In-place iterative radix-2 FFT, sign = -1 forward / +1 inverse (unscaled).
inline void fft_pow2(std::vector<Complex>& a, int sign) {
    const size_t n = a.size();
    for (size_t i = 1, j = 0; i < n; ++i) {
        size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (size_t len = 2; len <= n; len <<= 1) {
        double ang = sign * 2.0 * M_PI / static_cast<double>(len);
        Complex wl(std::cos(ang), std::sin(ang));
        for (size_t i = 0; i < n; i += len) {
            Complex w(1.0, 0.0);
            for (size_t k = 0; k < len / 2; ++k) {
                Complex u = a[i + k];
                Complex v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

// r[t] = sum_v c[v] e_q(t v) for t = 0..q-1, via Bluestein's chirp transform:
// e_q(tv) = psi^{t^2} psi^{v^2} psi^{-(t-v)^2} with psi a primitive 2q-th root.
inline std::vector<Complex> eq_transform_bluestein(const std::vector<Complex>& c, const PrimeModulus& q) {
    const uint64_t Q = q.q();
    const uint64_t twoQ = 2 * Q;
    const double ang = M_PI / static_cast<double>(Q);
    auto psi_pow = [&](uint64_t e) {  // psi^e, e reduced mod 2q
        double a = ang * static_cast<double>(e % twoQ);
        return Complex(std::cos(a), std::sin(a));
    };
    const size_t L = next_pow2(3 * Q);
    std::vector<Complex> A(L, Complex{}), B(L, Complex{});
    for (uint64_t v = 0; v < Q; ++v) {
        uint64_t sq = (v * v) % twoQ;
        A[v] = c[v] * psi_pow(sq);
    }
    // B holds psi^{-w^2} for w in (-q, q), centred so indices stay nonnegative.
    for (uint64_t w = 0; w < Q; ++w) {
        uint64_t sq = (w * w) % twoQ;
        Complex val = std::conj(psi_pow(sq));
        B[w] = val;
        if (w != 0) B[L - w] = val;
    }
    fft_pow2(A, -1);
    fft_pow2(B, -1);
    for (size_t i = 0; i < L; ++i) A[i] *= B[i];
    fft_pow2(A, +1);
    std::vector<Complex> out(Q);
    const double scale = 1.0 / static_cast<double>(L);
    for (uint64_t t = 0; t < Q; ++t) {
        uint64_t sq = (t * t) % twoQ;
        out[t] = A[t] * scale * psi_pow(sq);
    }
    return out;
}

inline constexpr uint64_t kDirectRowLimit = 4096;

}  // namespace detail

/// r[t] = sum_{v mod q} c[v] e_q(t v).  Direct O(q^2) up to q = 4096,
/// chirp-transform above.
inline std::vector<Complex> eq_transform(const std::vector<Complex>& c, const PrimeModulus& q) {
    const uint64_t Q = q.q();
    if (c.size() != Q) throw std::invalid_argument("eq_transform: coefficient vector must have length q");
    if (Q > detail::kTableLimit) throw std::domain_error("eq_transform: q exceeds the table limit 2^20");
    if (Q > detail::kDirectRowLimit) return detail::eq_transform_bluestein(c, q);
    std::vector<Complex> out(Q, Complex{});
    for (uint64_t v = 0; v < Q; ++v) {
        if (c[v] == Complex{}) continue;
        uint64_t tv = 0;  // t*v mod q, updated additively
        for (uint64_t t = 0; t < Q; ++t) {
            out[t] += c[v] * q.e(tv);
            tv += v;
            if (tv >= Q) tv -= Q;
        }
    }
    return out;
}

/// S(m,n;q) = sum over units u of e_q(m ubar^2 + n u), by direct summation.
inline Complex s_sum(uint64_t m, uint64_t n, const PrimeModulus& q) {
    const uint64_t Q = q.q();
    m %= Q;
    n %= Q;
    Complex acc{};
    for (uint64_t u = 1; u < Q; ++u) {
        uint64_t ub = q.inv(u);
        uint64_t ex = q.add(q.mul(m, q.mul(ub, ub)), q.mul(n, u));
        acc += q.e(ex);
    }
    return acc;
}

/// Whole row n -> S(m,n;q), n = 0..q-1.  The row is the additive-character
/// transform of the unit-supported sequence u -> e_q(m ubar^2).
inline std::vector<Complex> s_row(uint64_t m, const PrimeModulus& q) {
    const uint64_t Q = q.q();
    if (Q > detail::kTableLimit) throw std::domain_error("s_row: q exceeds the table limit 2^20");
    m %= Q;
    std::vector<Complex> c(Q, Complex{});
    for (uint64_t u = 1; u < Q; ++u) {
        uint64_t ub = q.inv(u);
        c[u] = q.e(q.mul(m, q.mul(ub, ub)));
    }
    return eq_transform(c, q);
}

/// Hyper-Kloosterman sum Kl_k(t), t != 0, normalized by q^{-(k-1)/2};
/// brute force over the k-1 free unit variables.  k in {1,2,3}.
inline Complex kloosterman_k(uint64_t t, int k, const PrimeModulus& q) {
    const uint64_t Q = q.q();
    t %= Q;
    if (t == 0) throw std::domain_error("Kl_k is undefined at t = 0");
    if (k < 1 || k > 3) throw std::domain_error("kloosterman_k: k must be 1, 2 or 3");
    if (k == 3 && Q > 600) throw std::domain_error("kloosterman_k: q too large for the k=3 brute force");
    Complex acc{};
    if (k == 1) {
        acc = q.e(t);
    } else if (k == 2) {
        for (uint64_t u = 1; u < Q; ++u) acc += q.e(q.add(u, q.mul(t, q.inv(u))));
    } else {
        for (uint64_t u1 = 1; u1 < Q; ++u1) {
            uint64_t rest = q.mul(t, q.inv(u1));
            for (uint64_t u2 = 1; u2 < Q; ++u2)
                acc += q.e(q.add(q.add(u1, u2), q.mul(rest, q.inv(u2))));
        }
    }
    return acc / std::pow(static_cast<double>(Q), (k - 1) / 2.0);
}

enum class KernelVariant { SRaw, K1, K2, Klk };

inline std::string kernel_name(KernelVariant v) {
    switch (v) {
        case KernelVariant::SRaw: return "s";
        case KernelVariant::K1: return "k1";
        case KernelVariant::K2: return "k2";
        case KernelVariant::Klk: return "klk";
    }
    return "?";
}

/// A kernel K(t) built from S(.,.;q): SRaw(t) = S(a, bt), K1(t) = q^{-1/2} S(a, bt),
/// K2(t) = q^{-1/2} S(at, b), Klk(t) = Kl_k(t).
struct KernelSpec {
    KernelVariant variant = KernelVariant::K1;
    PrimeModulus q;
    uint64_t a = 1;
    uint64_t b = 1;
    int k = 2;  // Klk only

    KernelSpec(KernelVariant v, const PrimeModulus& mod, uint64_t a_ = 1, uint64_t b_ = 1, int k_ = 2)
        : variant(v), q(mod), a(a_ % mod.q()), b(b_ % mod.q()), k(k_) {
        if (variant != KernelVariant::Klk) {
            if (a == 0 || b == 0)
                throw std::domain_error("kernel parameters a, b must be coprime with q");
        } else if (k < 1 || k > 3) {
            throw std::domain_error("Kl_k supported for k in {1,2,3}");
        }
    }
};

/// Sup norm bound for the kernel: 3 sqrt(q) for the raw sum, 3 for K1/K2
/// (Weil), k for Kl_k (Deligne).
inline double kernel_sup(const KernelSpec& s) {
    switch (s.variant) {
        case KernelVariant::SRaw: return 3.0 * std::sqrt(static_cast<double>(s.q.q()));
        case KernelVariant::K1:
        case KernelVariant::K2: return 3.0;
        case KernelVariant::Klk: return static_cast<double>(s.k);
    }
    return 0.0;
}

inline Complex kernel_eval(const KernelSpec& s, uint64_t t) {
    const uint64_t Q = s.q.q();
    t %= Q;
    const double norm = std::sqrt(static_cast<double>(Q));
    switch (s.variant) {
        case KernelVariant::SRaw: return s_sum(s.a, s.q.mul(s.b, t), s.q);
        case KernelVariant::K1: return s_sum(s.a, s.q.mul(s.b, t), s.q) / norm;
        case KernelVariant::K2: return s_sum(s.q.mul(s.a, t), s.b, s.q) / norm;
        case KernelVariant::Klk: return kloosterman_k(t, s.k, s.q);
    }
    return {};
}

/// K(t) for every t mod q in one batched pass.
///
/// K1 rows come straight from s_row.  K2 rows use that S(at,b;q), as a
/// function of t, is the additive-character transform of
/// c[v] = sum_{u: a*ubar^2 = v} e_q(bu).  Kl_k tables are brute-forced and
/// carry K(0) = 0 as a table placeholder (the pointwise evaluator rejects t=0).
inline std::vector<Complex> kernel_table(const KernelSpec& s) {
    const uint64_t Q = s.q.q();
    const double norm = std::sqrt(static_cast<double>(Q));
    std::vector<Complex> out;
    switch (s.variant) {
        case KernelVariant::SRaw:
        case KernelVariant::K1: {
            std::vector<Complex> row = s_row(s.a, s.q);
            out.resize(Q);
            for (uint64_t t = 0; t < Q; ++t) out[t] = row[s.q.mul(s.b, t)];
            if (s.variant == KernelVariant::K1)
                for (auto& z : out) z /= norm;
            break;
        }
        case KernelVariant::K2: {
            std::vector<Complex> c(Q, Complex{});
            for (uint64_t u = 1; u < Q; ++u) {
                uint64_t ub = s.q.inv(u);
                uint64_t v = s.q.mul(s.a, s.q.mul(ub, ub));
                c[v] += s.q.e(s.q.mul(s.b, u));
            }
            out = eq_transform(c, s.q);
            for (auto& z : out) z /= norm;
            break;
        }
        case KernelVariant::Klk: {
            out.assign(Q, Complex{});
            for (uint64_t t = 1; t < Q; ++t) out[t] = kloosterman_k(t, s.k, s.q);
            break;
        }
    }
    return out;
}

}  // namespace klab
