#pragma once

// Bilinear sums sum_m sum_n alpha_m K(m n^j), the complete two-variable sums
// Sigma_j(K, b, h), the diagonal quadruple set, the fourth-moment completion
// identity, and the scan that calibrates the Sigma_j / q ratio.

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "expsum.hpp"
#include "harness.hpp"
#include "modarith.hpp"
#include "square_lemmas.hpp"

namespace klab {

/// Quadruple b = (b1,b2,b3,b4) of integers in the dyadic window (B/2, B].
struct Quadruple {
    std::array<uint32_t, 4> b{};
    uint32_t B = 0;

    Quadruple() = default;
    Quadruple(uint32_t b1, uint32_t b2, uint32_t b3, uint32_t b4, uint32_t B_)
        : b{b1, b2, b3, b4}, B(B_) {
        for (uint32_t v : b)
            if (v <= B / 2 || v > B)
                throw std::domain_error("quadruple entry outside (B/2, B]");
    }

    friend bool operator==(const Quadruple& x, const Quadruple& y) { return x.b == y.b; }
    friend bool operator<(const Quadruple& x, const Quadruple& y) { return x.b < y.b; }
};

inline uint32_t window_lo(uint32_t B) { return B / 2 + 1; }

/// All quadruples over (B/2, B], lexicographic.
inline std::vector<Quadruple> all_quadruples(uint32_t B) {
    std::vector<Quadruple> out;
    const uint32_t lo = window_lo(B);
    for (uint32_t b1 = lo; b1 <= B; ++b1)
        for (uint32_t b2 = lo; b2 <= B; ++b2)
            for (uint32_t b3 = lo; b3 <= B; ++b3)
                for (uint32_t b4 = lo; b4 <= B; ++b4) out.push_back(Quadruple(b1, b2, b3, b4, B));
    return out;
}

/// The diagonal exception set: D = {b1 = b2, b3 = b4} together with the
/// window solutions of b1 = alpha(b3-b4)+b4, b2 = beta(b3-b4)+b4 and the dual
/// system, for every (alpha, beta) in the exception set of f_{alpha,beta}.
struct DiagonalSet {
    uint32_t B = 0;
    uint64_t q = 0;
    std::set<std::array<uint32_t, 4>> members;

    bool contains(const Quadruple& x) const { return members.count(x.b) > 0; }
    size_t size() const { return members.size(); }
};

namespace detail {

// Representatives of the class (r mod q) inside [lo, hi].
inline void range_reps(uint64_t r, uint64_t q, uint32_t lo, uint32_t hi, std::vector<uint32_t>& out) {
    out.clear();
    uint64_t x = r == 0 ? q : r;  // smallest positive representative
    if (x < lo) x += ((lo - x) + q - 1) / q * q;
    for (; x <= hi; x += q) out.push_back(static_cast<uint32_t>(x));
}

}  // namespace detail

inline DiagonalSet diagonal_set(uint32_t B, const PrimeModulus& q, const ExceptionSet& E) {
    if (B < 2) throw std::domain_error("diagonal_set: B must be at least 2");
    DiagonalSet out;
    out.B = B;
    out.q = q.q();
    const uint32_t lo = window_lo(B);

    for (uint32_t x = lo; x <= B; ++x)
        for (uint32_t y = lo; y <= B; ++y) out.members.insert({x, x, y, y});

    std::vector<uint32_t> reps1, reps2;
    for (auto [alpha, beta] : E.pairs) {
        for (uint32_t c = lo; c <= B; ++c) {
            for (uint32_t d = lo; d <= B; ++d) {
                if (c == d) continue;  // the degenerate rows collapse into D
                uint64_t diff = q.reduce(static_cast<int64_t>(c) - static_cast<int64_t>(d));
                // primal: (b1, b2) solved from (b3, b4) = (c, d)
                uint64_t s1 = q.add(q.mul(alpha, diff), d % q.q());
                uint64_t s2 = q.add(q.mul(beta, diff), d % q.q());
                detail::range_reps(s1, q.q(), lo, B, reps1);
                detail::range_reps(s2, q.q(), lo, B, reps2);
                for (uint32_t r1 : reps1)
                    for (uint32_t r2 : reps2) out.members.insert({r1, r2, c, d});
                // dual: (b3, b4) solved from (b1, b2) = (c, d)
                for (uint32_t r1 : reps1)
                    for (uint32_t r2 : reps2) out.members.insert({c, d, r1, r2});
            }
        }
    }
    return out;
}

inline DiagonalSet diagonal_set(uint32_t B, const PrimeModulus& q) {
    return diagonal_set(B, q, exception_set(q));
}

/// Sigma_j(K; b, h) = sum_{r,s mod q} K(s(r+b1)^j) K(s(r+b2)^j)
///                    conj(K(s(r+b3)^j) K(s(r+b4)^j)) e_q(hs)
/// for every h at once: the inner sum over r gives G(s), and the h-row is the
/// additive-character transform of G.
inline std::vector<Complex> sigma_all_h(const std::vector<Complex>& ktab, const PrimeModulus& q,
                                        int j, const Quadruple& b) {
    const uint64_t Q = q.q();
    if (ktab.size() != Q) throw std::invalid_argument("sigma_all_h: kernel table has wrong length");
    std::array<std::vector<uint64_t>, 4> shifted;
    for (int i = 0; i < 4; ++i) {
        shifted[i].resize(Q);
        for (uint64_t r = 0; r < Q; ++r) {
            uint64_t base = q.add(r, b.b[i] % Q);
            uint64_t p = base;
            for (int e = 1; e < j; ++e) p = q.mul(p, base);
            shifted[i][r] = p;
        }
    }
    std::vector<Complex> G(Q, Complex{});
    for (uint64_t s = 0; s < Q; ++s) {
        Complex acc{};
        for (uint64_t r = 0; r < Q; ++r) {
            Complex v = ktab[q.mul(s, shifted[0][r])] * ktab[q.mul(s, shifted[1][r])] *
                        std::conj(ktab[q.mul(s, shifted[2][r])] * ktab[q.mul(s, shifted[3][r])]);
            acc += v;
        }
        G[s] = acc;
    }
    return eq_transform(G, q);
}

/// Single Sigma_j value; builds the kernel table internally (q <= 2000).
inline Complex sigma_j(const KernelSpec& spec, int j, const Quadruple& b, uint64_t h) {
    if (spec.q.q() > 2000) throw std::domain_error("sigma_j: q above the quadratic-loop budget");
    std::vector<Complex> ktab = kernel_table(spec);
    return sigma_all_h(ktab, spec.q, j, b)[h % spec.q.q()];
}

/// Both sides of the completion split of sum_r |K1(r)|^4: the off-diagonal
/// part of the unit-quadruple sum against q|K1(0)|^4 minus the full moment.
/// lhs is brute-forced over all unit quadruples with u1+u2-u3-u4 != 0.
struct FourthMomentSplit {
    Complex lhs;
    Complex rhs;
};

inline FourthMomentSplit fourth_moment_split(const KernelSpec& spec) {
    if (spec.variant != KernelVariant::K1)
        throw std::domain_error("fourth_moment_split expects a K1 kernel");
    const uint64_t Q = spec.q.q();
    if (Q > 31) throw std::domain_error("fourth_moment_split: q above the quartic brute-force budget");
    const PrimeModulus& q = spec.q;

    std::vector<uint64_t> invsq(Q, 0);
    for (uint64_t u = 1; u < Q; ++u) {
        uint64_t ub = q.inv(u);
        invsq[u] = q.mul(ub, ub);
    }
    Complex lhs{};
    for (uint64_t u1 = 1; u1 < Q; ++u1)
        for (uint64_t u2 = 1; u2 < Q; ++u2)
            for (uint64_t u3 = 1; u3 < Q; ++u3)
                for (uint64_t u4 = 1; u4 < Q; ++u4) {
                    if (q.add(q.add(u1, u2), q.neg(q.add(u3, u4))) == 0) continue;
                    uint64_t phase = q.sub(q.add(invsq[u1], invsq[u2]), q.add(invsq[u3], invsq[u4]));
                    lhs += q.e(q.mul(spec.a, phase));
                }
    lhs /= static_cast<double>(Q);

    std::vector<Complex> k1 = kernel_table(spec);
    double moment = 0.0, k0 = std::norm(k1[0]);
    for (uint64_t r = 0; r < Q; ++r) moment += std::norm(k1[r]) * std::norm(k1[r]);
    double rhs = static_cast<double>(Q) * k0 * k0 - moment;
    return {lhs, Complex(rhs, 0.0)};
}

/// The shift parameters of the amplification step; the defaults are the
/// floor of N^{2/(j+2)} M^{-1/(j+2)} and N^{j/(j+2)} M^{1/(j+2)}.
struct ShiftParams {
    uint64_t A = 1;
    uint64_t B = 1;
};

inline ShiftParams default_shift_params(int j, double M, double N) {
    double e = 1.0 / (j + 2);
    ShiftParams p;
    p.A = static_cast<uint64_t>(std::max(1.0, std::floor(std::pow(N, 2 * e) * std::pow(M, -e))));
    p.B = static_cast<uint64_t>(std::max(1.0, std::floor(std::pow(N, j * e) * std::pow(M, e))));
    return p;
}

inline bool shift_params_valid(const ShiftParams& p, int j, double M, double N, uint64_t q) {
    double Aj = std::pow(static_cast<double>(p.A), j);
    return static_cast<double>(p.A) * static_cast<double>(p.B) <= N &&
           Aj * M < static_cast<double>(q);
}

/// Configuration of the bilinear sum sum_{m<=M} sum_{n in N-window} alpha_m K(m n^j).
struct BilinearConfig {
    KernelSpec spec;
    int j = 2;
    uint64_t M = 1;
    uint64_t n0 = 1;  // window is [n0, n0 + N - 1], a subinterval of [1, q-1]
    uint64_t N = 1;
    std::vector<Complex> alpha;  // indexed by m-1, |alpha_m| <= 1

    BilinearConfig(KernelSpec s, int j_, uint64_t M_, uint64_t n0_, uint64_t N_,
                   std::vector<Complex> alpha_)
        : spec(std::move(s)), j(j_), M(M_), n0(n0_), N(N_), alpha(std::move(alpha_)) {
        if (j != 1 && j != 2) throw std::domain_error("bilinear: j must be 1 or 2");
        if (alpha.size() != M) throw std::invalid_argument("bilinear: |alpha| must equal M");
        for (const Complex& a : alpha)
            if (std::abs(a) > 1.0 + 1e-9) throw std::domain_error("bilinear: coefficients must be bounded by 1");
        if (n0 < 1 || n0 + N - 1 > spec.q.q() - 1)
            throw std::domain_error("bilinear: the n-window must sit inside [1, q-1]");
    }

    bool hyp_m_le_n2() const { return static_cast<double>(M) <= static_cast<double>(N) * N; }
    bool hyp_n_lt_q() const { return N < spec.q.q(); }
    bool hyp_mn_range() const {
        double lhs = static_cast<double>(M) * std::pow(static_cast<double>(N), j);
        return lhs < std::pow(static_cast<double>(spec.q.q()), (j + 2) / 2.0);
    }
};

struct BilinearResult {
    Complex value{};
    double abs = 0.0;
    double norm1 = 0.0;          // sum |alpha_m|
    double norm2 = 0.0;          // (sum |alpha_m|^2)^{1/2}
    double trivial_bound = 0.0;  // norm1 * N * sup|K|
    double theorem_bound = 0.0;
    double ratio_trivial = 0.0;
    double ratio_theorem = 0.0;
    bool hypotheses_ok = true;
    std::vector<std::string> warnings;
};

inline double bilinear_theorem_bound(int j, double M, double N, double q, double norm1, double norm2) {
    double tail = std::pow(std::pow(q, j + 2) / (std::pow(M, j + 1) * std::pow(N, j + 4)),
                           1.0 / (4.0 * (j + 2)));
    return std::sqrt(norm1 * norm2) * std::pow(M, 0.25) * N * tail;
}

inline BilinearResult bilinear_sum(const BilinearConfig& cfg) {
    const PrimeModulus& q = cfg.spec.q;
    const uint64_t Q = q.q();
    if (Q > 10000) throw std::domain_error("bilinear_sum: q above the direct double-loop budget");
    std::vector<Complex> ktab = kernel_table(cfg.spec);

    BilinearResult res;
    std::vector<uint64_t> npow(cfg.N);
    for (uint64_t i = 0; i < cfg.N; ++i) {
        uint64_t n = (cfg.n0 + i) % Q;
        uint64_t p = n;
        for (int e = 1; e < cfg.j; ++e) p = q.mul(p, n);
        npow[i] = p;
    }
    for (uint64_t m = 1; m <= cfg.M; ++m) {
        const Complex am = cfg.alpha[m - 1];
        if (am == Complex{}) continue;
        Complex inner{};
        for (uint64_t i = 0; i < cfg.N; ++i) inner += ktab[q.mul(m % Q, npow[i])];
        res.value += am * inner;
    }
    res.abs = std::abs(res.value);
    for (const Complex& a : cfg.alpha) {
        res.norm1 += std::abs(a);
        res.norm2 += std::norm(a);
    }
    res.norm2 = std::sqrt(res.norm2);
    res.trivial_bound = res.norm1 * static_cast<double>(cfg.N) * kernel_sup(cfg.spec);
    res.theorem_bound = bilinear_theorem_bound(cfg.j, static_cast<double>(cfg.M),
                                               static_cast<double>(cfg.N), static_cast<double>(Q),
                                               res.norm1, res.norm2);
    res.ratio_trivial = res.trivial_bound > 0 ? res.abs / res.trivial_bound : 0.0;
    res.ratio_theorem = res.theorem_bound > 0 ? res.abs / res.theorem_bound : 0.0;
    if (!cfg.hyp_m_le_n2()) res.warnings.push_back("hypothesis M <= N^2 violated");
    if (!cfg.hyp_n_lt_q()) res.warnings.push_back("hypothesis N < q violated");
    if (!cfg.hyp_mn_range()) res.warnings.push_back("hypothesis M N^j < q^{(j+2)/2} violated");
    res.hypotheses_ok = res.warnings.empty();
    return res;
}

/// One evaluated cell of a scan.
struct ScanRow {
    Quadruple b;
    uint64_t h = 0;
    double abs_sigma = 0.0;
    double ratio = 0.0;  // abs_sigma / q
    bool in_diagonal = false;
};

struct ScanReport {
    uint64_t q = 0;
    int j = 0;
    uint32_t B = 0;
    bool empty = false;       // no nondiagonal quadruple exists
    bool exhaustive = false;  // all nondiagonal b and all h evaluated
    size_t total_quadruples = 0;
    size_t diagonal_members = 0;  // |B_Delta restricted to the window|
    size_t evaluated_b = 0;
    size_t evaluated_cells = 0;
    double max_ratio = 0.0;
    double mean_ratio = 0.0;
    Quadruple argmax_b;
    uint64_t argmax_h = 0;
    double diag_max_ratio = 0.0;  // only when diagonal controls were requested
    uint64_t seed = 0;
    std::vector<ScanRow> rows;
};

struct ScanOptions {
    uint64_t sample_size = 500;  // quadruple draws when sampling
    uint64_t h_samples = 50;     // h draws when sampling
    uint64_t budget = 2'000'000; // exhaustive when |nondiag| * q fits
    uint64_t seed = 1;
    unsigned workers = 0;        // 0 = resolve via environment/hardware
    bool diagonal_controls = false;
};

/// Scans b outside the diagonal set (exhaustively when the budget allows,
/// otherwise with seeded uniform samples) and reports max and mean of
/// |Sigma_j| / q together with the arg-max witness.  Deterministic for a
/// fixed seed, independent of the worker count.
inline ScanReport nondiagonal_scan(const KernelSpec& spec, int j, uint32_t B,
                                   const ScanOptions& opt = {}) {
    const PrimeModulus& q = spec.q;
    if (q.q() > 2000) throw std::domain_error("nondiagonal_scan: q above the quadratic budget");
    ScanReport rep;
    rep.q = q.q();
    rep.j = j;
    rep.B = B;
    rep.seed = opt.seed;

    std::vector<Quadruple> all = all_quadruples(B);
    rep.total_quadruples = all.size();
    DiagonalSet diag = diagonal_set(B, q);
    rep.diagonal_members = diag.size();
    std::vector<Quadruple> nondiag;
    for (const Quadruple& b : all)
        if (!diag.contains(b)) nondiag.push_back(b);
    if (nondiag.empty()) {
        rep.empty = true;
        return rep;
    }

    rep.exhaustive = nondiag.size() * q.q() <= opt.budget;
    std::vector<Quadruple> chosen_b;
    std::vector<uint64_t> chosen_h;
    if (rep.exhaustive) {
        chosen_b = nondiag;
        chosen_h.resize(q.q());
        for (uint64_t h = 0; h < q.q(); ++h) chosen_h[h] = h;
    } else {
        TaskRng rng_b(opt.seed, 0);
        std::set<size_t> picked;
        for (uint64_t i = 0; i < opt.sample_size; ++i) picked.insert(rng_b.below(nondiag.size()));
        for (size_t i : picked) chosen_b.push_back(nondiag[i]);
        TaskRng rng_h(opt.seed, 1);
        std::set<uint64_t> hs;
        for (uint64_t i = 0; i < opt.h_samples; ++i) hs.insert(rng_h.below(q.q()));
        chosen_h.assign(hs.begin(), hs.end());
    }
    rep.evaluated_b = chosen_b.size();

    std::vector<Complex> ktab = kernel_table(spec);
    struct PerB {
        double max = 0.0, sum = 0.0;
        uint64_t argmax_h = 0;
        std::vector<double> values;
    };
    auto eval_b = [&](const Quadruple& b) {
        PerB r;
        std::vector<Complex> sig = sigma_all_h(ktab, q, j, b);
        r.values.reserve(chosen_h.size());
        for (uint64_t h : chosen_h) {
            double ratio = std::abs(sig[h]) / static_cast<double>(q.q());
            r.values.push_back(ratio);
            r.sum += ratio;
            if (ratio > r.max) {
                r.max = ratio;
                r.argmax_h = h;
            }
        }
        return r;
    };

    unsigned workers = effective_workers(opt.workers);
    std::vector<PerB> results =
        parallel_map<PerB>(chosen_b.size(), workers, [&](size_t i) { return eval_b(chosen_b[i]); });

    double sum = 0.0;
    for (size_t i = 0; i < chosen_b.size(); ++i) {
        const PerB& r = results[i];
        sum += r.sum;
        if (r.max > rep.max_ratio) {
            rep.max_ratio = r.max;
            rep.argmax_b = chosen_b[i];
            rep.argmax_h = r.argmax_h;
        }
        for (size_t k = 0; k < chosen_h.size(); ++k)
            rep.rows.push_back({chosen_b[i], chosen_h[k], r.values[k] * static_cast<double>(q.q()),
                                r.values[k], false});
    }
    rep.evaluated_cells = chosen_b.size() * chosen_h.size();
    rep.mean_ratio = sum / static_cast<double>(rep.evaluated_cells);

    if (opt.diagonal_controls) {
        const uint32_t lo = window_lo(B);
        std::vector<Quadruple> dctrl;
        for (uint32_t x = lo; x <= B; ++x)
            for (uint32_t y = lo; y <= B; ++y) dctrl.push_back(Quadruple(x, x, y, y, B));
        std::vector<PerB> dres =
            parallel_map<PerB>(dctrl.size(), workers, [&](size_t i) { return eval_b(dctrl[i]); });
        for (size_t i = 0; i < dctrl.size(); ++i) {
            rep.diag_max_ratio = std::max(rep.diag_max_ratio, dres[i].max);
            for (size_t k = 0; k < chosen_h.size(); ++k)
                rep.rows.push_back({dctrl[i], chosen_h[k],
                                    dres[i].values[k] * static_cast<double>(q.q()),
                                    dres[i].values[k], true});
        }
    }
    return rep;
}

}  // namespace klab
