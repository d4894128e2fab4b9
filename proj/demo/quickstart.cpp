// A short tour of the library: complete exponential sums, the square
// detection oracle, and the progression error term.

#include <cstdio>

#include "klab/bilinear.hpp"
#include "klab/expsum.hpp"
#include "klab/modarith.hpp"
#include "klab/sqfree.hpp"
#include "klab/square_lemmas.hpp"

int main() {
    using namespace klab;

    // Complete sums S(m,n;q) over the units mod q, with the Weil reference.
    PrimeModulus q(101);
    Complex s = s_sum(1, 1, q);
    std::printf("S(1,1;101) = %.6f %+.6fi, |S| = %.6f, 3 sqrt(q) = %.6f\n", s.real(), s.imag(),
                std::abs(s), 3.0 * std::sqrt(101.0));

    // Normalized kernels stay bounded by 3.
    KernelSpec k2(KernelVariant::K2, q, 1, 1);
    double worst = 0.0;
    for (uint64_t t = 0; t < q.q(); ++t) worst = std::max(worst, std::abs(kernel_eval(k2, t)));
    std::printf("max_t |K2(t)| = %.6f\n", worst);

    // Square detection over the algebraic closure.
    TwoPoleSpec two(q, 4, 4, 3, 5);  // A = B = (3-5)^2
    std::printf("1 + 4/(X-3)^2 + 4/(X-5)^2 is a square: %s\n",
                two_pole_is_square(two) ? "yes" : "no");
    ExceptionSet E = exception_set(PrimeModulus(13));
    std::printf("|exception set of f_alpha_beta over F_13| = %zu (cap 14)\n", E.size());

    // Squarefree numbers in progressions: both routes to E(X,q,a) agree exactly.
    MobiusTable mu = MobiusTable::build(10'000);
    ErrorRecord rec = error_term(10'000, q, 7, mu);
    std::printf("E(10^4, 101, 7) = %lld/%lld (direct) = %lld/%lld (decomposed), |E|/bound = %.4f\n",
                static_cast<long long>(rec.E_direct.num), static_cast<long long>(rec.E_direct.phi),
                static_cast<long long>(rec.E_decomp.num), static_cast<long long>(rec.E_decomp.phi),
                rec.ratio);
    return 0;
}
