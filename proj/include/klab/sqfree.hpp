#pragma once

// The squarefree-in-progressions pipeline: a segmented Moebius sieve, the
// progression error term E(X,q,a) computed along two independent routes, the
// progression discrepancy Delta as an exact rational, the smooth dyadic sums
// S_V, and their double-Poisson dual evaluation with a computable truncation
// tail.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "expsum.hpp"
#include "harness.hpp"
#include "modarith.hpp"

namespace klab {

inline uint64_t isqrt_u64(uint64_t n) {
    uint64_t r = static_cast<uint64_t>(std::sqrt(static_cast<double>(n)));
    while (r > 0 && r * r > n) --r;
    while ((r + 1) * (r + 1) <= n) ++r;
    return r;
}

/// mu(n) by trial division; the slow reference path used by the
/// decomposition identity so it stays independent of the sieve.
inline int mobius_td(uint64_t n) {
    if (n == 0) throw std::domain_error("mu(0) is undefined");
    int sign = 1;
    for (uint64_t p = 2; p * p <= n; ++p) {
        if (n % p) continue;
        n /= p;
        if (n % p == 0) return 0;
        sign = -sign;
    }
    if (n > 1) sign = -sign;
    return sign;
}

/// mu^2(n) = sum over n1 n2^2 = n of mu(n2), evaluated exactly on both sides.
inline bool mu_square_decomposition_check(uint64_t n) {
    if (n == 0) throw std::domain_error("decomposition check needs n >= 1");
    int lhs = mobius_td(n);
    lhs = lhs * lhs;
    int64_t rhs = 0;
    for (uint64_t d = 1; d * d <= n; ++d)
        if (n % (d * d) == 0) rhs += mobius_td(d);
    return lhs == rhs;
}

/// mu(1..X), sieved segment by segment.
class MobiusTable {
  public:
    static constexpr uint64_t kDefaultCapacity = uint64_t(1) << 28;

    static MobiusTable build(uint64_t X, uint64_t capacity = kDefaultCapacity) {
        if (X < 1) throw std::domain_error("MobiusTable: X must be >= 1");
        if (X + 1 > capacity)
            throw std::length_error("MobiusTable: X exceeds the storage budget of " +
                                    std::to_string(capacity) + " entries");
        MobiusTable t;
        t.limit_ = X;
        t.mu_.assign(X + 1, 1);
        t.mu_[0] = 0;

        uint64_t root = isqrt_u64(X);
        std::vector<uint64_t> primes;
        {
            std::vector<bool> comp(root + 1, false);
            for (uint64_t p = 2; p <= root; ++p) {
                if (comp[p]) continue;
                primes.push_back(p);
                for (uint64_t m = p * p; m <= root; m += p) comp[m] = true;
            }
        }

        const uint64_t seg = uint64_t(1) << 20;
        std::vector<uint64_t> rem(seg);
        for (uint64_t lo = 1; lo <= X; lo += seg) {
            uint64_t hi = std::min(X, lo + seg - 1);  // inclusive
            uint64_t len = hi - lo + 1;
            for (uint64_t i = 0; i < len; ++i) rem[i] = lo + i;
            for (uint64_t p : primes) {
                uint64_t start = (lo + p - 1) / p * p;
                for (uint64_t m = start; m <= hi; m += p) {
                    t.mu_[m] = -t.mu_[m];
                    rem[m - lo] /= p;
                }
                uint64_t p2 = p * p;
                uint64_t start2 = (lo + p2 - 1) / p2 * p2;
                for (uint64_t m = start2; m <= hi; m += p2) t.mu_[m] = 0;
            }
            for (uint64_t i = 0; i < len; ++i) {
                // a leftover factor is a single prime above sqrt(X)
                if (t.mu_[lo + i] != 0 && rem[i] > 1) t.mu_[lo + i] = -t.mu_[lo + i];
            }
        }
        return t;
    }

    uint64_t limit() const { return limit_; }
    int mu(uint64_t n) const {
        if (n < 1 || n > limit_) throw std::out_of_range("MobiusTable: index out of range");
        return mu_[n];
    }
    bool squarefree(uint64_t n) const { return mu(n) != 0; }

  private:
    uint64_t limit_ = 0;
    std::vector<int8_t> mu_;
};

inline MobiusTable mobius_sieve(uint64_t X, uint64_t capacity = MobiusTable::kDefaultCapacity) {
    return MobiusTable::build(X, capacity);
}

/// Exact value carried as numerator over phi(q); the identity checks in this
/// module must compare without rounding.
struct RationalPhi {
    int64_t num = 0;
    int64_t phi = 1;

    double value() const { return static_cast<double>(num) / static_cast<double>(phi); }
    friend bool operator==(const RationalPhi& a, const RationalPhi& b) {
        return static_cast<__int128>(a.num) * b.phi == static_cast<__int128>(b.num) * a.phi;
    }
};

namespace detail {

// #{m <= Y : m = r (mod q)} for the least nonnegative representative r.
inline uint64_t count_class(uint64_t Y, uint64_t q, uint64_t r) {
    if (r == 0) return Y / q;
    return Y >= r ? (Y - r) / q + 1 : 0;
}

inline uint64_t count_coprime(uint64_t Y, uint64_t q) { return Y - Y / q; }

}  // namespace detail

/// Delta(x, q, a) = #{m <= x : m = a (q)} - #{m <= x : (m,q) = 1} / phi(q),
/// exact.  For a = 0 the first count is the number of multiples of q.
inline RationalPhi delta_ap(double x, const PrimeModulus& q, uint64_t a) {
    if (x < 0) throw std::domain_error("delta_ap: x must be nonnegative");
    uint64_t Y = x < 1 ? 0 : static_cast<uint64_t>(std::floor(x));
    a %= q.q();
    int64_t phi = static_cast<int64_t>(q.q() - 1);
    int64_t n1 = static_cast<int64_t>(detail::count_class(Y, q.q(), a));
    int64_t n2 = static_cast<int64_t>(detail::count_coprime(Y, q.q()));
    return {phi * n1 - n2, phi};
}

/// One measurement of the progression error E(X, q, a), carried exactly along
/// both computation routes, plus the square-root-barrier reference bound.
struct ErrorRecord {
    uint64_t X = 0;
    uint64_t q = 0;
    uint64_t a = 0;
    RationalPhi E_direct;
    RationalPhi E_decomp;
    double hooley_bound = 0.0;  // X^{1/2} q^{-1/2} + q^{1/2}
    double ratio = 0.0;         // |E| / hooley_bound
};

namespace detail {

inline RationalPhi error_direct_from_counts(uint64_t cnt_a, uint64_t cnt_coprime, uint64_t q) {
    int64_t phi = static_cast<int64_t>(q - 1);
    return {phi * static_cast<int64_t>(cnt_a) - static_cast<int64_t>(cnt_coprime), phi};
}

// E = sum_{n <= sqrt(X), (n,q)=1} mu(n) Delta(X/n^2, q, a nbar^2), exact
// numerator over phi(q).  Classes with q | n contribute nothing.
inline RationalPhi error_decomposed(uint64_t X, const PrimeModulus& q, uint64_t a,
                                    const MobiusTable& mu) {
    int64_t phi = static_cast<int64_t>(q.q() - 1);
    int64_t acc = 0;
    for (uint64_t n = 1; n * n <= X; ++n) {
        if (n % q.q() == 0) continue;
        int m = mu.mu(n);
        if (m == 0) continue;
        uint64_t Y = X / (n * n);
        uint64_t nb = q.inv(n % q.q());
        uint64_t r = q.mul(a % q.q(), q.mul(nb, nb));
        int64_t d = phi * static_cast<int64_t>(count_class(Y, q.q(), r)) -
                    static_cast<int64_t>(count_coprime(Y, q.q()));
        acc += m * d;
    }
    return {acc, phi};
}

}  // namespace detail

inline double hooley_reference_bound(uint64_t X, uint64_t q) {
    return std::sqrt(static_cast<double>(X) / static_cast<double>(q)) +
           std::sqrt(static_cast<double>(q));
}

/// E(X,q,a) for every unit class a in one sieve pass; index i holds a = i+1.
inline std::vector<ErrorRecord> error_term_all(uint64_t X, const PrimeModulus& q,
                                               const MobiusTable& mu) {
    if (q.q() >= X) throw std::domain_error("error_term: requires q < X");
    if (mu.limit() < X) throw std::invalid_argument("error_term: Moebius table too short");
    std::vector<uint64_t> class_count(q.q(), 0);
    for (uint64_t n = 1; n <= X; ++n)
        if (mu.mu(n) != 0) ++class_count[n % q.q()];
    uint64_t coprime = 0;
    for (uint64_t r = 1; r < q.q(); ++r) coprime += class_count[r];

    double bound = hooley_reference_bound(X, q.q());
    std::vector<ErrorRecord> out;
    out.reserve(q.q() - 1);
    for (uint64_t a = 1; a < q.q(); ++a) {
        ErrorRecord rec;
        rec.X = X;
        rec.q = q.q();
        rec.a = a;
        rec.E_direct = detail::error_direct_from_counts(class_count[a], coprime, q.q());
        rec.E_decomp = detail::error_decomposed(X, q, a, mu);
        rec.hooley_bound = bound;
        rec.ratio = std::abs(rec.E_direct.value()) / bound;
        out.push_back(rec);
    }
    return out;
}

inline ErrorRecord error_term(uint64_t X, const PrimeModulus& q, uint64_t a,
                              const MobiusTable& mu) {
    a %= q.q();
    if (a == 0) throw std::domain_error("error_term: a must be coprime with q");
    if (q.q() >= X) throw std::domain_error("error_term: requires q < X");
    if (mu.limit() < X) throw std::invalid_argument("error_term: Moebius table too short");
    uint64_t cnt_a = 0, coprime = 0;
    for (uint64_t n = 1; n <= X; ++n) {
        if (mu.mu(n) == 0) continue;
        uint64_t r = n % q.q();
        if (r != 0) ++coprime;
        if (r == a) ++cnt_a;
    }
    ErrorRecord rec;
    rec.X = X;
    rec.q = q.q();
    rec.a = a;
    rec.E_direct = detail::error_direct_from_counts(cnt_a, coprime, q.q());
    rec.E_decomp = detail::error_decomposed(X, q, a, mu);
    rec.hooley_bound = hooley_reference_bound(X, q.q());
    rec.ratio = std::abs(rec.E_direct.value()) / rec.hooley_bound;
    return rec;
}

// ---------------------------------------------------------------------------
// Smooth cutoff and the double Poisson dual sum.
// ---------------------------------------------------------------------------

namespace detail {

inline double bump_side(double t) {  // exp(-1/t) / (exp(-1/t) + exp(-1/(1-t))) on (0,1)
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    double a = std::exp(-1.0 / t);
    double b = std::exp(-1.0 / (1.0 - t));
    return a / (a + b);
}

template <class F>
std::complex<double> adaptive_simpson(const F& f, double a, double b, double fa_w, double tol,
                                      std::complex<double> fa, std::complex<double> fm,
                                      std::complex<double> fb, std::complex<double> whole,
                                      int depth, bool& converged) {
    (void)fa_w;
    double m = 0.5 * (a + b);
    std::complex<double> flm = f(0.5 * (a + m));
    std::complex<double> frm = f(0.5 * (m + b));
    std::complex<double> left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    std::complex<double> right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    std::complex<double> delta = left + right - whole;
    if (std::abs(delta) <= 15.0 * tol || depth <= 0) {
        if (depth <= 0 && std::abs(delta) > 15.0 * tol) converged = false;
        return left + right + delta / 15.0;
    }
    return adaptive_simpson(f, a, m, fa_w, tol / 2, fa, flm, fm, left, depth - 1, converged) +
           adaptive_simpson(f, m, b, fa_w, tol / 2, fm, frm, fb, right, depth - 1, converged);
}

template <class F>
std::complex<double> integrate_oscillatory(const F& f, double a, double b, double xi, double tol,
                                           bool& converged) {
    // Pre-split so each panel covers at most about a quarter oscillation.
    int panels = std::max<int>(1, static_cast<int>(std::ceil((b - a) * std::max(1.0, std::abs(xi)) * 4.0)));
    std::complex<double> acc{};
    double step = (b - a) / panels;
    for (int i = 0; i < panels; ++i) {
        double x0 = a + i * step, x1 = x0 + step, xm = 0.5 * (x0 + x1);
        std::complex<double> f0 = f(x0), f1 = f(x1), fm = f(xm);
        std::complex<double> whole = (x1 - x0) / 6.0 * (f0 + 4.0 * fm + f1);
        acc += adaptive_simpson(f, x0, x1, 0.0, tol / panels, f0, fm, f1, whole, 30, converged);
    }
    return acc;
}

}  // namespace detail

/// The fixed C-infinity window: 0 outside [1/2, 4], 1 on [1, 2], glued with
/// the exp(-1/t) transition on [1/2, 1] and [2, 4].
class SmoothCutoff {
  public:
    double eval(double x) const {
        if (x <= 0.5 || x >= 4.0) return 0.0;
        if (x >= 1.0 && x <= 2.0) return 1.0;
        if (x < 1.0) return detail::bump_side((x - 0.5) / 0.5);
        return detail::bump_side((4.0 - x) / 2.0);
    }

    /// hat V(xi) = integral of V(x) e^{-2 pi i xi x} dx, absolute error <= 1e-10.
    std::complex<double> hat(double xi) const {
        bool negate = xi < 0;
        double key = std::abs(xi);
        {
            std::lock_guard<std::mutex> lock(mu_);
            auto it = cache_.find(key);
            if (it != cache_.end()) return negate ? std::conj(it->second) : it->second;
        }
        auto f = [&](double x) {
            double ph = -2.0 * M_PI * key * x;
            return eval(x) * std::complex<double>(std::cos(ph), std::sin(ph));
        };
        bool ok = true;
        std::complex<double> v{};
        for (auto [a, b] : {std::pair<double, double>{0.5, 1.0}, {1.0, 2.0}, {2.0, 4.0}})
            v += detail::integrate_oscillatory(f, a, b, key, 1e-11, ok);
        if (!ok)
            throw std::runtime_error("cutoff_hat: quadrature did not converge at xi = " +
                                     format_double(key));
        {
            std::lock_guard<std::mutex> lock(mu_);
            cache_.emplace(key, v);
        }
        return negate ? std::conj(v) : v;
    }

    double integral() const { return hat(0.0).real(); }

    /// Measured constant C with |hat V(xi)| <= C / xi^2 on [1, 100].
    double envelope_c2() const {
        std::lock_guard<std::mutex> lock(c2_mu_);
        if (!c2_) {
            double c = 0.0;
            for (double xi = 1.0; xi <= 100.0; xi += 0.5)
                c = std::max(c, std::abs(hat(xi)) * xi * xi);
            c2_ = c;
        }
        return *c2_;
    }

  private:
    mutable std::mutex mu_;
    mutable std::map<double, std::complex<double>> cache_;
    mutable std::mutex c2_mu_;
    mutable std::optional<double> c2_;
};

inline const SmoothCutoff& standard_cutoff() {
    static SmoothCutoff v;
    return v;
}

inline double cutoff_eval(double x) { return standard_cutoff().eval(x); }
inline std::complex<double> cutoff_hat(double xi) { return standard_cutoff().hat(xi); }

/// S_V(M,N;q,a) = sum over m n^2 = a (mod q) of V(m/M) V(n/N), by direct
/// enumeration over the support.
inline double s_v_direct(double M, double N, const PrimeModulus& q, uint64_t a,
                         uint64_t pair_budget = 1'000'000'000ull,
                         const SmoothCutoff& V = standard_cutoff()) {
    a %= q.q();
    if (a == 0) throw std::domain_error("s_v_direct: a must be coprime with q");
    uint64_t n_lo = static_cast<uint64_t>(std::max(1.0, std::ceil(N / 2)));
    uint64_t n_hi = static_cast<uint64_t>(std::floor(4 * N));
    uint64_t m_lo = static_cast<uint64_t>(std::max(1.0, std::ceil(M / 2)));
    uint64_t m_hi = static_cast<uint64_t>(std::floor(4 * M));
    double m_span = m_hi >= m_lo ? static_cast<double>(m_hi - m_lo + 1) : 0.0;
    double est = static_cast<double>(n_hi - n_lo + 1) * (m_span / static_cast<double>(q.q()) + 1.0);
    if (est > static_cast<double>(pair_budget))
        throw std::length_error("s_v_direct: enumeration budget exceeded");

    double acc = 0.0;
    for (uint64_t n = n_lo; n <= n_hi; ++n) {
        if (n % q.q() == 0) continue;  // n^2 is then 0 mod q, never a unit
        double vn = V.eval(static_cast<double>(n) / N);
        if (vn == 0.0) continue;
        uint64_t nb = q.inv(n % q.q());
        uint64_t r = q.mul(a, q.mul(nb, nb));  // m = a nbar^2 (mod q)
        uint64_t m = r == 0 ? q.q() : r;
        if (m < m_lo) m += (m_lo - m + q.q() - 1) / q.q() * q.q();
        for (; m <= m_hi; m += q.q()) acc += V.eval(static_cast<double>(m) / M) * vn;
    }
    return acc;
}

/// The truncated dual of S_V after Poisson summation in both variables:
///   (MN/q^2) sum_{|m|<=Tq/M} sum_{|n|<=Tq/N} hatV(mM/q) hatV(nN/q) S(am, n; q),
/// together with a tail estimate derived from the measured |hatV| <= C/xi^2
/// envelope and the 3 sqrt(q) bound on the omitted complete sums.
struct PoissonResult {
    std::complex<double> value{};
    double tail_estimate = 0.0;
    uint64_t m_cut = 0;  // |m| <= m_cut
    uint64_t n_cut = 0;
    uint64_t terms = 0;
};

inline PoissonResult s_v_poisson(double M, double N, const PrimeModulus& q, uint64_t a,
                                 uint64_t cutoff_T = 8,
                                 const SmoothCutoff& V = standard_cutoff()) {
    a %= q.q();
    if (a == 0) throw std::domain_error("s_v_poisson: a must be coprime with q");
    const uint64_t Q = q.q();
    const double qd = static_cast<double>(Q);
    PoissonResult out;
    out.m_cut = static_cast<uint64_t>(std::floor(cutoff_T * qd / M));
    out.n_cut = static_cast<uint64_t>(std::floor(cutoff_T * qd / N));
    if (cutoff_T < 1 || out.m_cut < 1 || out.n_cut < 1)
        throw std::domain_error("s_v_poisson: truncation window is empty (T q/M and T q/N must be >= 1)");

    // Rows of S(.,.;q) on demand, keyed by the first argument.
    std::vector<std::optional<std::vector<Complex>>> rows(Q);
    auto srow_at = [&](uint64_t first) -> const std::vector<Complex>& {
        if (!rows[first]) rows[first] = s_row(first, q);
        return *rows[first];
    };

    std::complex<double> acc{};
    double total_m = 0.0, total_n = 0.0;
    for (int64_t n = -static_cast<int64_t>(out.n_cut); n <= static_cast<int64_t>(out.n_cut); ++n)
        total_n += std::abs(V.hat(static_cast<double>(n) * N / qd));
    for (int64_t m = -static_cast<int64_t>(out.m_cut); m <= static_cast<int64_t>(out.m_cut); ++m) {
        std::complex<double> vm = V.hat(static_cast<double>(m) * M / qd);
        total_m += std::abs(vm);
        if (std::abs(vm) < 1e-16) continue;
        uint64_t am = q.mul(q.reduce(m), a);
        const std::vector<Complex>& row = srow_at(am);
        for (int64_t n = -static_cast<int64_t>(out.n_cut); n <= static_cast<int64_t>(out.n_cut); ++n) {
            std::complex<double> vn = V.hat(static_cast<double>(n) * N / qd);
            acc += vm * vn * row[q.reduce(n)];
            ++out.terms;
        }
    }
    out.value = acc * (M * N / (qd * qd));

    // Tail: the omitted cells all carry |S| <= 3 sqrt(q); the omitted hatV
    // mass is bounded through the C/xi^2 envelope, sum_{k>T} k^-2 < 1/T.
    double C2 = V.envelope_c2();
    double tail_m = 2.0 * C2 * (qd / M) * (qd / M) / static_cast<double>(out.m_cut);
    double tail_n = 2.0 * C2 * (qd / N) * (qd / N) / static_cast<double>(out.n_cut);
    out.tail_estimate = (M * N / (qd * qd)) * 3.0 * std::sqrt(qd) *
                        (tail_m * (total_n + tail_n) + total_m * tail_n);
    return out;
}

// ---------------------------------------------------------------------------
// Exponent sweep.
// ---------------------------------------------------------------------------

inline uint64_t next_odd_prime_at_least(uint64_t n) {
    if (n <= 3) return 3;
    if (n % 2 == 0) ++n;
    while (!is_prime(n)) n += 2;
    return n;
}

/// Flat key=value sweep configuration (keys: X_grid, theta_grid, A_list,
/// seed, workers, out).
struct SweepConfig {
    std::vector<uint64_t> X_grid;
    std::vector<double> theta_grid;
    std::vector<double> A_list{1.0, 2.0, 5.0};
    uint64_t seed = 1;
    unsigned workers = 0;
    std::string out;

    static SweepConfig parse(const std::string& text);
    std::string canonical() const {
        std::string s = "A_list=";
        for (size_t i = 0; i < A_list.size(); ++i) s += (i ? "," : "") + format_double(A_list[i]);
        s += ";X_grid=";
        for (size_t i = 0; i < X_grid.size(); ++i) s += (i ? "," : "") + format_u64(X_grid[i]);
        s += ";seed=" + format_u64(seed) + ";theta_grid=";
        for (size_t i = 0; i < theta_grid.size(); ++i) s += (i ? "," : "") + format_double(theta_grid[i]);
        return s;
    }
    uint64_t hash() const { return fnv1a(canonical()); }
};

inline SweepConfig SweepConfig::parse(const std::string& text) {
    SweepConfig cfg;
    size_t pos = 0;
    auto split_list = [](const std::string& v) {
        std::vector<std::string> parts;
        size_t p = 0;
        while (p <= v.size()) {
            size_t c = v.find(',', p);
            if (c == std::string::npos) c = v.size();
            parts.push_back(v.substr(p, c - p));
            p = c + 1;
        }
        return parts;
    };
    while (pos < text.size()) {
        size_t eol = text.find('\n', pos);
        if (eol == std::string::npos) eol = text.size();
        std::string line = text.substr(pos, eol - pos);
        pos = eol + 1;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        size_t first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') continue;
        size_t eq = line.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("sweep config: expected key=value, got: " + line);
        std::string key = line.substr(first, eq - first);
        while (!key.empty() && (key.back() == ' ' || key.back() == '\t')) key.pop_back();
        std::string val = line.substr(eq + 1);
        size_t vf = val.find_first_not_of(" \t");
        val = vf == std::string::npos ? "" : val.substr(vf);
        while (!val.empty() && (val.back() == ' ' || val.back() == '\t')) val.pop_back();
        if (key == "X_grid") {
            cfg.X_grid.clear();
            for (const auto& p : split_list(val)) cfg.X_grid.push_back(std::stoull(p));
        } else if (key == "theta_grid") {
            cfg.theta_grid.clear();
            for (const auto& p : split_list(val)) cfg.theta_grid.push_back(std::stod(p));
        } else if (key == "A_list") {
            cfg.A_list.clear();
            for (const auto& p : split_list(val)) cfg.A_list.push_back(std::stod(p));
        } else if (key == "seed") {
            cfg.seed = std::stoull(val);
        } else if (key == "workers") {
            cfg.workers = static_cast<unsigned>(std::stoul(val));
        } else if (key == "out") {
            cfg.out = val;
        } else {
            throw std::invalid_argument("sweep config: unknown key: " + key);
        }
    }
    if (cfg.X_grid.empty() || cfg.theta_grid.empty())
        throw std::invalid_argument("sweep config: X_grid and theta_grid are required");
    return cfg;
}

/// One sweep cell: the worst unit class at (X, theta) and the comparison columns.
struct SweepRecord {
    uint64_t X = 0;
    double theta = 0.0;
    uint64_t q = 0;
    uint64_t a = 0;  // arg max of |E|
    RationalPhi E;
    double hooley_bound = 0.0;
    double hooley_ratio = 0.0;
    std::vector<double> log_bounds;  // X / (q log^A X) for each configured A
    bool paper_exponent = false;     // theta is the 13/19 landmark
};

inline bool theta_is_13_19(double theta) { return std::abs(theta - 13.0 / 19.0) < 1e-9; }

inline std::vector<SweepRecord> exponent_sweep(const SweepConfig& cfg) {
    for (uint64_t X : cfg.X_grid)
        if (X < 10 || X > 100'000'000ull)
            throw std::domain_error("sweep: X must lie in [10, 1e8]");
    uint64_t maxX = *std::max_element(cfg.X_grid.begin(), cfg.X_grid.end());
    MobiusTable mu = MobiusTable::build(maxX);

    struct Cell {
        uint64_t X;
        double theta;
    };
    std::vector<Cell> cells;
    for (uint64_t X : cfg.X_grid)
        for (double th : cfg.theta_grid) cells.push_back({X, th});
    std::sort(cells.begin(), cells.end(), [](const Cell& a, const Cell& b) {
        return a.X != b.X ? a.X < b.X : a.theta < b.theta;
    });

    auto eval_cell = [&](size_t i) {
        const Cell& c = cells[i];
        SweepRecord rec;
        rec.X = c.X;
        rec.theta = c.theta;
        uint64_t q0 = next_odd_prime_at_least(static_cast<uint64_t>(
            std::ceil(std::pow(static_cast<double>(c.X), c.theta))));
        if (q0 >= c.X)
            throw std::domain_error("sweep: theta = " + format_double(c.theta) +
                                    " gives q >= X at X = " + format_u64(c.X));
        PrimeModulus q(q0);
        rec.q = q0;
        auto records = error_term_all(c.X, q, mu);
        const ErrorRecord* best = &records.front();
        for (const auto& r : records)
            if (std::abs(r.E_direct.value()) > std::abs(best->E_direct.value())) best = &r;
        rec.a = best->a;
        rec.E = best->E_direct;
        rec.hooley_bound = best->hooley_bound;
        rec.hooley_ratio = std::abs(rec.E.value()) / rec.hooley_bound;
        double lx = std::log(static_cast<double>(c.X));
        for (double A : cfg.A_list)
            rec.log_bounds.push_back(static_cast<double>(c.X) /
                                     (static_cast<double>(q0) * std::pow(lx, A)));
        rec.paper_exponent = theta_is_13_19(c.theta);
        return rec;
    };

    unsigned workers = effective_workers(cfg.workers);
    return parallel_map<SweepRecord>(cells.size(), workers, eval_cell);
}

/// Serialises sweep output; identical configuration (and build) yields
/// byte-identical files regardless of the worker count.
inline void write_sweep_csv(const SweepConfig& cfg, const std::vector<SweepRecord>& records,
                            const std::string& path, const std::string& build_id) {
    std::vector<std::string> cols{"schema_version", "config_hash", "seed",    "X",
                                  "theta",          "q",           "a",       "E_num",
                                  "phi_q",          "E",           "hooley_bound", "hooley_ratio"};
    for (double A : cfg.A_list) cols.push_back("logA_" + format_double(A));
    cols.push_back("paper_exponent");
    ResultStore store(path, cols, "sweep-v1 build=" + build_id);
    const std::string hash = hex_u64(cfg.hash());
    for (const auto& r : records) {
        std::vector<std::string> row{"1",
                                     hash,
                                     format_u64(cfg.seed),
                                     format_u64(r.X),
                                     format_double(r.theta),
                                     format_u64(r.q),
                                     format_u64(r.a),
                                     format_i64(r.E.num),
                                     format_i64(r.E.phi),
                                     format_double(r.E.value()),
                                     format_double(r.hooley_bound),
                                     format_double(r.hooley_ratio)};
        for (double v : r.log_bounds) row.push_back(format_double(v));
        row.push_back(r.paper_exponent ? "1" : "0");
        store.write_row(row);
    }
    store.flush();
}

}  // namespace klab
