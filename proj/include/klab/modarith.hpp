#pragma once

// Exact arithmetic modulo an odd prime q, dense polynomial and rational
// function algebra over F_q, and a multiplicity-parity square test for
// rational functions over the algebraic closure of F_q.
//
// Everything here is immutable after construction and safe to share across
// threads; the precomputed tables inside PrimeModulus are read-only.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace klab {

inline uint64_t mul_mod(uint64_t a, uint64_t b, uint64_t m) {
    return static_cast<uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

inline uint64_t pow_mod(uint64_t a, uint64_t e, uint64_t m) {
    uint64_t r = 1 % m;
    a %= m;
    while (e > 0) {
        if (e & 1) r = mul_mod(r, a, m);
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    return r;
}

/// Deterministic Miller-Rabin, valid for every n < 2^64.
inline bool is_prime(uint64_t n) {
    if (n < 2) return false;
    for (uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (n % p == 0) return n == p;
    }
    uint64_t d = n - 1;
    int s = 0;
    while ((d & 1) == 0) { d >>= 1; ++s; }
    // This witness set is known to be deterministic for all 64-bit inputs.
    for (uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        uint64_t x = pow_mod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int i = 1; i < s; ++i) {
            x = mul_mod(x, x, n);
            if (x == n - 1) { composite = false; break; }
        }
        if (composite) return false;
    }
    return true;
}

namespace detail {

// Table sizes are capped so that a modulus handle stays desk-scale cheap.
inline constexpr uint64_t kTableLimit = 1u << 20;

struct ModulusTables {
    std::vector<uint32_t> inv;                    // x -> x^{-1} mod q, x in [1, q)
    std::vector<std::complex<double>> roots;      // k -> e^{2 pi i k / q}
};

inline std::shared_ptr<const ModulusTables> build_tables(uint64_t q) {
    auto t = std::make_shared<ModulusTables>();
    t->inv.resize(q);
    t->inv[0] = 0;
    if (q > 1) t->inv[1] = 1;
    for (uint64_t x = 2; x < q; ++x) {
        // inv(x) = -(q/x) * inv(q mod x)
        uint64_t v = q - mul_mod(q / x, t->inv[q % x], q);
        t->inv[x] = static_cast<uint32_t>(v % q);
    }
    t->roots.resize(q);
    const double step = 2.0 * M_PI / static_cast<double>(q);
    std::complex<double> w(std::cos(step), std::sin(step));
    std::complex<double> cur(1.0, 0.0);
    for (uint64_t k = 0; k < q; ++k) {
        // Renormalise periodically so the running product cannot drift.
        if ((k & 63u) == 0) cur = {std::cos(step * static_cast<double>(k)), std::sin(step * static_cast<double>(k))};
        t->roots[k] = cur;
        cur *= w;
    }
    return t;
}

}  // namespace detail

/// A validated odd prime modulus.  Copies share the precomputed tables.
class PrimeModulus {
  public:
    explicit PrimeModulus(uint64_t q) : q_(q) {
        if (q < 3 || q % 2 == 0 || !is_prime(q))
            throw std::domain_error("PrimeModulus: " + std::to_string(q) + " is not an odd prime");
        if (q <= detail::kTableLimit) tables_ = detail::build_tables(q);
    }

    uint64_t q() const { return q_; }
    uint64_t unit_count() const { return q_ - 1; }
    bool has_tables() const { return tables_ != nullptr; }

    uint64_t reduce(int64_t v) const {
        int64_t r = v % static_cast<int64_t>(q_);
        if (r < 0) r += static_cast<int64_t>(q_);
        return static_cast<uint64_t>(r);
    }
    uint64_t add(uint64_t a, uint64_t b) const { uint64_t s = a + b; return s >= q_ ? s - q_ : s; }
    uint64_t sub(uint64_t a, uint64_t b) const { return a >= b ? a - b : a + q_ - b; }
    uint64_t neg(uint64_t a) const { return a == 0 ? 0 : q_ - a; }
    uint64_t mul(uint64_t a, uint64_t b) const { return mul_mod(a, b, q_); }
    uint64_t pow(uint64_t a, uint64_t e) const { return pow_mod(a, e, q_); }

    uint64_t inv(uint64_t x) const {
        if (x == 0) throw std::domain_error("inverse of zero mod " + std::to_string(q_));
        if (tables_) return tables_->inv[x];
        return pow_mod(x, q_ - 2, q_);
    }

    /// e_q(x) = exp(2 pi i x / q).
    std::complex<double> e(uint64_t x) const {
        x %= q_;
        if (tables_) return tables_->roots[x];
        double a = 2.0 * M_PI * static_cast<double>(x) / static_cast<double>(q_);
        return {std::cos(a), std::sin(a)};
    }

    friend bool operator==(const PrimeModulus& a, const PrimeModulus& b) { return a.q_ == b.q_; }

  private:
    uint64_t q_;
    std::shared_ptr<const detail::ModulusTables> tables_;
};

/// Least nonnegative representative of a residue class, tagged with its modulus.
struct Residue {
    uint64_t value = 0;
    uint64_t modulus = 0;

    Residue() = default;
    Residue(uint64_t v, uint64_t q) : value(v % q), modulus(q) {}
    Residue(int64_t v, const PrimeModulus& q) : value(q.reduce(v)), modulus(q.q()) {}

    friend bool operator==(const Residue& a, const Residue& b) {
        return a.modulus == b.modulus && a.value == b.value;
    }
};

namespace detail {
inline void check_same_modulus(const Residue& a, const Residue& b) {
    if (a.modulus != b.modulus) throw std::invalid_argument("residues from different moduli");
}
}  // namespace detail

inline Residue operator+(const Residue& a, const Residue& b) {
    detail::check_same_modulus(a, b);
    uint64_t s = a.value + b.value;
    return {s >= a.modulus ? s - a.modulus : s, a.modulus};
}
inline Residue operator-(const Residue& a, const Residue& b) {
    detail::check_same_modulus(a, b);
    return {a.value >= b.value ? a.value - b.value : a.value + a.modulus - b.value, a.modulus};
}
inline Residue operator-(const Residue& a) { return {a.value == 0 ? 0 : a.modulus - a.value, a.modulus}; }
inline Residue operator*(const Residue& a, const Residue& b) {
    detail::check_same_modulus(a, b);
    return {mul_mod(a.value, b.value, a.modulus), a.modulus};
}

/// Multiplicative inverse; domain error on zero.
inline Residue mod_inv(const Residue& x) {
    if (x.value == 0) throw std::domain_error("mod_inv: zero has no inverse");
    return {pow_mod(x.value, x.modulus - 2, x.modulus), x.modulus};
}

/// Legendre symbol (x|q) in {-1, 0, +1} via Euler's criterion.
inline int legendre(const Residue& x) {
    if (x.value == 0) return 0;
    uint64_t e = pow_mod(x.value, (x.modulus - 1) / 2, x.modulus);
    return e == 1 ? 1 : -1;
}

/// Smallest positive quadratic nonresidue mod q (the xi used to split F_q^* into eta*square classes).
inline uint64_t least_nonresidue(const PrimeModulus& q) {
    for (uint64_t x = 2; x < q.q(); ++x) {
        if (legendre(Residue(x, q.q())) == -1) return x;
    }
    throw std::logic_error("no quadratic nonresidue found");  // unreachable for q >= 3
}

/// Dense univariate polynomial over F_q, coefficients constant-first,
/// no trailing zeros; the zero polynomial has an empty coefficient list.
class PolyFq {
  public:
    explicit PolyFq(const PrimeModulus& q) : q_(q) {}
    PolyFq(const PrimeModulus& q, std::vector<int64_t> coeffs) : q_(q) {
        c_.reserve(coeffs.size());
        for (int64_t v : coeffs) c_.push_back(q.reduce(v));
        trim();
    }
    static PolyFq from_raw(const PrimeModulus& q, std::vector<uint64_t> coeffs) {
        PolyFq p(q);
        p.c_ = std::move(coeffs);
        p.trim();
        return p;
    }
    static PolyFq constant(const PrimeModulus& q, uint64_t v) { return from_raw(q, {v % q.q()}); }
    static PolyFq x(const PrimeModulus& q) { return from_raw(q, {0, 1}); }

    const PrimeModulus& field() const { return q_; }
    const std::vector<uint64_t>& coeffs() const { return c_; }
    bool is_zero() const { return c_.empty(); }
    bool is_constant() const { return c_.size() <= 1; }
    int degree() const { return static_cast<int>(c_.size()) - 1; }
    uint64_t leading() const { return c_.empty() ? 0 : c_.back(); }
    uint64_t coeff(size_t i) const { return i < c_.size() ? c_[i] : 0; }
    Residue coeff_residue(size_t i) const { return Residue(coeff(i), q_.q()); }
    bool is_monic() const { return leading() == 1; }

    uint64_t eval(uint64_t x) const {
        uint64_t acc = 0;
        for (size_t i = c_.size(); i-- > 0;) acc = q_.add(q_.mul(acc, x), c_[i]);
        return acc;
    }

    PolyFq derivative() const {
        if (c_.size() <= 1) return PolyFq(q_);
        std::vector<uint64_t> d(c_.size() - 1);
        for (size_t i = 1; i < c_.size(); ++i) d[i - 1] = q_.mul(c_[i], i % q_.q());
        return from_raw(q_, std::move(d));
    }

    PolyFq monic() const {
        if (is_zero() || is_monic()) return *this;
        return scaled(q_.inv(leading()));
    }

    PolyFq scaled(uint64_t s) const {
        std::vector<uint64_t> d(c_.size());
        for (size_t i = 0; i < c_.size(); ++i) d[i] = q_.mul(c_[i], s);
        return from_raw(q_, std::move(d));
    }

    friend PolyFq operator+(const PolyFq& a, const PolyFq& b) {
        check_field(a, b);
        std::vector<uint64_t> d(std::max(a.c_.size(), b.c_.size()), 0);
        for (size_t i = 0; i < d.size(); ++i) d[i] = a.q_.add(a.coeff(i), b.coeff(i));
        return from_raw(a.q_, std::move(d));
    }
    friend PolyFq operator-(const PolyFq& a, const PolyFq& b) {
        check_field(a, b);
        std::vector<uint64_t> d(std::max(a.c_.size(), b.c_.size()), 0);
        for (size_t i = 0; i < d.size(); ++i) d[i] = a.q_.sub(a.coeff(i), b.coeff(i));
        return from_raw(a.q_, std::move(d));
    }
    friend PolyFq operator*(const PolyFq& a, const PolyFq& b) {
        check_field(a, b);
        if (a.is_zero() || b.is_zero()) return PolyFq(a.q_);
        std::vector<uint64_t> d(a.c_.size() + b.c_.size() - 1, 0);
        for (size_t i = 0; i < a.c_.size(); ++i) {
            if (a.c_[i] == 0) continue;
            for (size_t j = 0; j < b.c_.size(); ++j)
                d[i + j] = a.q_.add(d[i + j], a.q_.mul(a.c_[i], b.c_[j]));
        }
        return from_raw(a.q_, std::move(d));
    }
    friend bool operator==(const PolyFq& a, const PolyFq& b) {
        return a.q_.q() == b.q_.q() && a.c_ == b.c_;
    }

    /// Euclidean division: returns (quotient, remainder) with deg rem < deg divisor.
    std::pair<PolyFq, PolyFq> divmod(const PolyFq& divisor) const {
        check_field(*this, divisor);
        if (divisor.is_zero()) throw std::domain_error("polynomial division by zero");
        if (degree() < divisor.degree()) return {PolyFq(q_), *this};
        std::vector<uint64_t> rem = c_;
        std::vector<uint64_t> quo(c_.size() - divisor.c_.size() + 1, 0);
        uint64_t lead_inv = q_.inv(divisor.leading());
        for (size_t k = quo.size(); k-- > 0;) {
            uint64_t top = rem[k + divisor.c_.size() - 1];
            if (top == 0) continue;
            uint64_t f = q_.mul(top, lead_inv);
            quo[k] = f;
            for (size_t j = 0; j < divisor.c_.size(); ++j)
                rem[k + j] = q_.sub(rem[k + j], q_.mul(f, divisor.c_[j]));
        }
        return {from_raw(q_, std::move(quo)), from_raw(q_, std::move(rem))};
    }

    PolyFq pow_int(unsigned e) const {
        PolyFq r = constant(q_, 1), b = *this;
        while (e > 0) {
            if (e & 1) r = r * b;
            b = b * b;
            e >>= 1;
        }
        return r;
    }

  private:
    static void check_field(const PolyFq& a, const PolyFq& b) {
        if (a.q_.q() != b.q_.q()) throw std::invalid_argument("polynomials over different fields");
    }
    void trim() {
        while (!c_.empty() && c_.back() == 0) c_.pop_back();
    }

    PrimeModulus q_;
    std::vector<uint64_t> c_;
};

inline PolyFq operator/(const PolyFq& a, const PolyFq& b) { return a.divmod(b).first; }
inline PolyFq operator%(const PolyFq& a, const PolyFq& b) { return a.divmod(b).second; }

/// Monic gcd.
inline PolyFq poly_gcd(PolyFq a, PolyFq b) {
    while (!b.is_zero()) {
        PolyFq r = a % b;
        a = std::move(b);
        b = std::move(r).monic();
    }
    return a.monic();
}

/// Squarefree decomposition of a nonzero polynomial: returns monic, squarefree,
/// pairwise coprime g_i with multiplicities m_i such that f = lc(f) * prod g_i^{m_i}.
/// Handles the characteristic-p collapse f' = 0 via coefficient-wise p-th roots.
inline std::vector<std::pair<PolyFq, unsigned>> squarefree_decomposition(const PolyFq& f) {
    if (f.is_zero()) throw std::domain_error("squarefree decomposition of zero");
    const PrimeModulus& q = f.field();
    std::vector<std::pair<PolyFq, unsigned>> out;

    auto pth_root = [&](const PolyFq& g) {
        // g(X) = h(X)^p with h obtained by keeping every p-th coefficient
        // (Frobenius is the identity on F_p coefficients).
        uint64_t p = q.q();
        std::vector<uint64_t> h;
        for (size_t i = 0; i <= static_cast<size_t>(g.degree()); i += p) h.push_back(g.coeff(i));
        return PolyFq::from_raw(q, std::move(h));
    };

    // Iterative worklist: (polynomial, outer multiplicity multiplier).
    std::vector<std::pair<PolyFq, unsigned>> work;
    work.emplace_back(f.monic(), 1u);
    while (!work.empty()) {
        auto [g, outer] = std::move(work.back());
        work.pop_back();
        if (g.is_constant()) continue;
        PolyFq d = g.derivative();
        if (d.is_zero()) {
            work.emplace_back(pth_root(g), outer * static_cast<unsigned>(q.q()));
            continue;
        }
        PolyFq c = poly_gcd(g, d);
        PolyFq w = g / c;
        unsigned i = 1;
        while (!w.is_constant()) {
            PolyFq y = poly_gcd(w, c);
            PolyFq z = w / y;
            if (!z.is_constant()) out.emplace_back(z.monic(), outer * i);
            ++i;
            w = std::move(y);
            c = c / w;
        }
        if (!c.is_constant()) work.emplace_back(pth_root(c), outer * static_cast<unsigned>(q.q()));
    }
    return out;
}

/// Reduced rational function over F_q: monic denominator, gcd(num, den) = 1.
/// The canonical form is unique for a given function.
class RatFq {
  public:
    explicit RatFq(const PrimeModulus& q)
        : num_(PolyFq(q)), den_(PolyFq::constant(q, 1)) {}
    RatFq(PolyFq num, PolyFq den) : num_(std::move(num)), den_(std::move(den)) {
        if (den_.is_zero()) throw std::domain_error("rational function with zero denominator");
        reduce();
    }
    static RatFq constant(const PrimeModulus& q, uint64_t v) {
        return RatFq(PolyFq::constant(q, v), PolyFq::constant(q, 1));
    }
    static RatFq from_poly(PolyFq p) {
        const PrimeModulus q = p.field();
        return RatFq(std::move(p), PolyFq::constant(q, 1));
    }

    const PolyFq& num() const { return num_; }
    const PolyFq& den() const { return den_; }
    const PrimeModulus& field() const { return num_.field(); }
    bool is_zero() const { return num_.is_zero(); }

    RatFq reciprocal() const {
        if (is_zero()) throw std::domain_error("reciprocal of the zero function");
        return RatFq(den_, num_);
    }

    friend RatFq operator+(const RatFq& a, const RatFq& b) {
        return RatFq(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
    }
    friend RatFq operator-(const RatFq& a, const RatFq& b) {
        return RatFq(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
    }
    friend RatFq operator*(const RatFq& a, const RatFq& b) {
        return RatFq(a.num_ * b.num_, a.den_ * b.den_);
    }
    friend RatFq operator/(const RatFq& a, const RatFq& b) {
        if (b.is_zero()) throw std::domain_error("division by the zero function");
        return RatFq(a.num_ * b.den_, a.den_ * b.num_);
    }
    friend bool operator==(const RatFq& a, const RatFq& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }

  private:
    void reduce() {
        if (num_.is_zero()) {
            den_ = PolyFq::constant(den_.field(), 1);
            return;
        }
        PolyFq g = poly_gcd(num_, den_);
        if (g.degree() > 0) {
            num_ = num_ / g;
            den_ = den_ / g;
        }
        if (!den_.is_monic()) {
            uint64_t s = den_.field().inv(den_.leading());
            num_ = num_.scaled(s);
            den_ = den_.scaled(s);
        }
    }

    PolyFq num_, den_;
};

/// True iff f is a square in closure(F_q)(X): every irreducible factor of the
/// (reduced) numerator and denominator occurs with even multiplicity.
/// Constants are always squares over the algebraic closure.
inline bool rat_is_square_closure(const RatFq& f) {
    if (f.is_zero()) throw std::domain_error("square test on the zero function");
    for (const PolyFq* part : {&f.num(), &f.den()}) {
        if (part->is_constant()) continue;
        for (const auto& [g, m] : squarefree_decomposition(*part)) {
            (void)g;
            if (m % 2 == 1) return false;
        }
    }
    return true;
}

/// When f is a square over the closure, returns a monic g with g^2 = c*f for
/// some constant c (the constant itself need not be a square in F_q).
inline std::optional<RatFq> rat_square_witness(const RatFq& f) {
    if (!rat_is_square_closure(f)) return std::nullopt;
    const PrimeModulus& q = f.field();
    PolyFq num = PolyFq::constant(q, 1), den = PolyFq::constant(q, 1);
    for (bool top : {true, false}) {
        const PolyFq& part = top ? f.num() : f.den();
        if (part.is_constant()) continue;
        for (const auto& [g, m] : squarefree_decomposition(part)) {
            PolyFq piece = g.pow_int(m / 2);
            if (top) num = num * piece; else den = den * piece;
        }
    }
    return RatFq(std::move(num), std::move(den));
}

/// All roots in F_q of a polynomial of degree <= 4, by exhaustive scan.
/// Requires q < 2^20 so the scan stays trivial.
inline std::vector<Residue> quartic_roots(const PolyFq& p) {
    if (p.degree() > 4) throw std::domain_error("quartic_roots: degree exceeds 4");
    const PrimeModulus& q = p.field();
    if (q.q() >= detail::kTableLimit) throw std::domain_error("quartic_roots: modulus too large for scan");
    if (p.is_zero()) throw std::domain_error("quartic_roots: zero polynomial");
    std::vector<Residue> roots;
    for (uint64_t x = 0; x < q.q(); ++x)
        if (p.eval(x) == 0) roots.emplace_back(x, q.q());
    return roots;
}

}  // namespace klab
