#pragma once

// Constrained prime-triple counts and their main-term prediction.
//
// Triples (p1, p2, p3) are primes in the fixed intervals I1 = (X, 3X],
// I2 = (5X, 7X], I3 = (3X, 5X] with m = -p1 + p2 - p3 for an odd target m.
// Optional constraints: no prime square <= w^2 divides A - p1 or
// A - p1 + p2; or congruences p1 = a1, p2 = a2 (mod k^2) for squarefree k.
// The expected main term is G(m) * S(m) / (log X)^3 scaled by the k-class
// factor f((k,m)) g(k) / (k phi(k)^3), with G the integer lattice count and
// S the singular series.

#include <gmpxx.h>

#include "lmlab/sieve.hpp"

namespace lmlab {

struct TripleSpec {
    u64 X = 0;    // scale; counting needs X >= 20 so the intervals hold primes
    i64 m = 1;    // odd target in [-X, X]
    i64 A = 0;    // shift for the truncated-squarefree conditions
    u64 w = 1;    // truncation bound; w <= 1 disables the squarefree conditions
    u64 k = 1;    // congruence modulus (1 = none); squarefree
    u64 a1 = 0;
    u64 a2 = 0;
};

// Exact count with the squarefree-shift conditions (congruence fields are
// ignored here).  Even m is rejected: -p1 + p2 - p3 is odd for odd primes.
u64 count_triples(const TripleSpec& spec);

// Exact count with p1 = a1, p2 = a2 (mod k^2); no squarefree conditions.
// k = 1 reduces to the unconstrained count.
u64 count_triples_in_classes(const TripleSpec& spec);

// G(m) = #{(n1,n2,n3) in I1 x I2 x I3 : m = -n1 + n2 - n3}, counted over all
// integers by the closed-form convolution (piecewise quadratic in m).
u64 lattice_count(i64 m, u64 X);

struct SingularData {
    i64 m = 0;
    double value = 0.0;      // truncated singular series
    u64 cutoff = 0;          // primes <= cutoff in the product (plus p | m exactly)
    double tail_bound = 0.0; // |true - value| <= tail_bound
};

// S(m) = prod_{p | m} (1 - 1/(p-1)^2) * prod_{p !| m} (1 + 1/(p-1)^3) for
// odd nonzero m.  Primes dividing m enter exactly at any size; the remaining
// tail factors are 1 + O(1/p^3), bounded by 2/cutoff^2 in log.
SingularData singular_series(i64 m, u64 cutoff = 100000);

// f(p) = (1 + 1/(p-1)^3) / (1 - 1/(p-1)^2), g(p) = (1 + 1/(p-1)^3)^{-1},
// as exact rationals.  f(2) divides by zero and is rejected.
std::pair<mpq_class, mpq_class> fg_values(u64 p);

// Products of f(p) / g(p) over the distinct primes of n (f(p^a) = f(p)).
mpq_class f_multiplicative(u64 n);  // n must be odd
mpq_class g_multiplicative(u64 n);

u64 euler_phi(u64 n);

struct MainTermPrediction {
    double value = 0.0;      // full main term
    u64 lattice = 0;         // G(m)
    double singular = 0.0;   // S(m)
    double tail_bound = 0.0;
    bool indicator = true;   // the three gcd conditions
};

// G(m) S(m) / (log X)^3 * 1_{(k,-a1+a2-m)=(k,a1)=(k,a2)=1} * f((k,m)) g(k) / (k phi(k)^3).
MainTermPrediction main_term_prediction(const TripleSpec& spec, u64 cutoff = 100000);

}  // namespace lmlab
