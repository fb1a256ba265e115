#include "lmlab/circle_method.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace lmlab {

namespace {

void check_counting_spec(const TripleSpec& spec) {
    if (spec.X < 20) throw parameter_error("triples: X must be >= 20");
    if (spec.m % 2 == 0)
        throw parameter_error("triples: m must be odd (even m has no solutions by parity)");
    if (spec.m > static_cast<i64>(spec.X) || spec.m < -static_cast<i64>(spec.X))
        throw parameter_error("triples: m must lie in [-X, X]");
}

struct IntervalPrimeData {
    std::vector<u64> i1, i3;    // prime lists
    std::vector<u8> is_p2;      // membership bitmap over (5X, 7X]
    u64 X;

    bool p2_prime(i64 p2) const {
        return p2 > static_cast<i64>(5 * X) && p2 <= static_cast<i64>(7 * X) &&
               is_p2[static_cast<u64>(p2) - 5 * X - 1];
    }
};

IntervalPrimeData interval_primes(u64 X) {
    IntervalPrimeData data;
    data.X = X;
    data.is_p2.assign(2 * X, 0);
    for (u32 p : primes_up_to(7 * X)) {
        if (p > X && p <= 3 * X) data.i1.push_back(p);
        if (p > 3 * X && p <= 5 * X) data.i3.push_back(p);
        if (p > 5 * X && p <= 7 * X) data.is_p2[p - 5 * X - 1] = 1;
    }
    return data;
}

// No p <= w has p^2 | t (works for negative and zero t; p^2 | 0 for all p).
bool squarefree_w_signed(i64 t, const std::vector<u32>& small_primes, u64 w) {
    for (u32 p : small_primes) {
        if (p > w) break;
        const u64 p2 = static_cast<u64>(p) * p;
        if (mod_floor(t, p2) == 0) return false;
    }
    return true;
}

}  // namespace

u64 count_triples(const TripleSpec& spec) {
    check_counting_spec(spec);
    const auto data = interval_primes(spec.X);
    const auto small_primes = spec.w >= 2 ? primes_up_to(spec.w) : std::vector<u32>{};

    u64 count = 0;
    for (u64 p1 : data.i1) {
        if (spec.w >= 2 &&
            !squarefree_w_signed(spec.A - static_cast<i64>(p1), small_primes, spec.w))
            continue;
        for (u64 p3 : data.i3) {
            const i64 p2 = spec.m + static_cast<i64>(p1) + static_cast<i64>(p3);
            if (!data.p2_prime(p2)) continue;
            if (spec.w >= 2 &&
                !squarefree_w_signed(spec.A - static_cast<i64>(p1) + p2, small_primes, spec.w))
                continue;
            ++count;
        }
    }
    return count;
}

u64 count_triples_in_classes(const TripleSpec& spec) {
    check_counting_spec(spec);
    if (spec.k == 0) throw parameter_error("triples: k must be >= 1");
    if (spec.k > 1 && factor_oracle(spec.k).moebius() == 0)
        throw parameter_error("triples: k must be squarefree");
    const auto data = interval_primes(spec.X);
    const u64 k2 = checked_mul(spec.k, spec.k);

    u64 count = 0;
    for (u64 p1 : data.i1) {
        if (p1 % k2 != spec.a1 % k2) continue;
        for (u64 p3 : data.i3) {
            const i64 p2 = spec.m + static_cast<i64>(p1) + static_cast<i64>(p3);
            if (!data.p2_prime(p2)) continue;
            if (static_cast<u64>(p2) % k2 != spec.a2 % k2) continue;
            ++count;
        }
    }
    return count;
}

u64 lattice_count(i64 m, u64 X) {
    if (X < 1) throw parameter_error("lattice_count: X must be >= 1");
    // s = n1 + n3 has the triangular representation count
    //   r(s) = s - (4X+1)     for 4X+2 <= s <= 6X+1
    //   r(s) = (8X+1) - s     for 6X+1 <= s <= 8X
    // and G(m) = sum of r(s) over s in [5X+1-m, 7X-m].
    const i64 Xs = static_cast<i64>(X);
    auto tri = [](i64 v) -> i128 { return v <= 0 ? 0 : (i128)v * (v + 1) / 2; };
    // R(t) = sum_{s <= t} r(s)
    auto cumulative = [&](i64 t) -> i128 {
        if (t < 4 * Xs + 2) return 0;
        if (t <= 6 * Xs + 1) return tri(t - (4 * Xs + 1));
        i128 rising = tri(2 * Xs);
        if (t >= 8 * Xs) return rising + tri(2 * Xs - 1);
        return rising + (tri(2 * Xs - 1) - tri(8 * Xs - t));
    };
    const i64 s_lo = 5 * Xs + 1 - m;
    const i64 s_hi = 7 * Xs - m;
    i128 total = cumulative(s_hi) - cumulative(s_lo - 1);
    if (total < 0) throw std::logic_error("lattice_count: negative count");
    return static_cast<u64>(total);
}

SingularData singular_series(i64 m, u64 cutoff) {
    if (m == 0) throw parameter_error("singular_series: m must be nonzero");
    if (m % 2 == 0) throw parameter_error("singular_series: m must be odd");
    if (cutoff < 100) throw parameter_error("singular_series: cutoff must be >= 100");

    const u64 mag = static_cast<u64>(m < 0 ? -m : m);
    const auto factors = factor_oracle(mag).prime_powers;
    auto divides_m = [&](u64 p) {
        for (auto& [q, e] : factors)
            if (q == p) return true;
        return false;
    };

    double log_value = 0.0;
    for (u32 p : primes_up_to(cutoff)) {
        const double q = static_cast<double>(p) - 1.0;
        if (divides_m(p))
            log_value += std::log1p(-1.0 / (q * q));
        else
            log_value += std::log1p(1.0 / (q * q * q));
    }
    // Prime factors of m above the cutoff enter exactly.
    for (auto& [p, e] : factors) {
        if (p <= cutoff) continue;
        const double q = static_cast<double>(p) - 1.0;
        log_value += std::log1p(-1.0 / (q * q));
    }

    SingularData out;
    out.m = m;
    out.cutoff = cutoff;
    out.value = std::exp(log_value);
    // Remaining factors are 1 + 1/(p-1)^3 over p > cutoff, p coprime to m:
    // 0 < log tail <= sum_{n > cutoff} (n-1)^{-3} <= 2 / cutoff^2.
    out.tail_bound = out.value * 2.0 / (static_cast<double>(cutoff) * static_cast<double>(cutoff));
    return out;
}

std::pair<mpq_class, mpq_class> fg_values(u64 p) {
    if (!is_prime_u64(p)) throw parameter_error("fg_values: p must be prime");
    if (p == 2) throw parameter_error("fg_values: f(2) is singular (division by zero)");
    const mpz_class q = static_cast<unsigned long>(p - 1);
    const mpz_class q3 = q * q * q;
    // f(p) = (q^2 - q + 1) / (q (q - 1)) after simplification, g(p) = q^3 / (q^3 + 1).
    mpq_class f(q * q - q + 1, q * (q - 1));
    f.canonicalize();
    mpq_class g(q3, q3 + 1);
    g.canonicalize();
    return {f, g};
}

mpq_class f_multiplicative(u64 n) {
    if (n == 0) throw parameter_error("f_multiplicative: n must be >= 1");
    if (n % 2 == 0) throw parameter_error("f_multiplicative: argument must be odd (f(2) singular)");
    mpq_class out(1);
    for (auto& [p, e] : factor_oracle(n).prime_powers) out *= fg_values(p).first;
    return out;
}

mpq_class g_multiplicative(u64 n) {
    if (n == 0) throw parameter_error("g_multiplicative: n must be >= 1");
    mpq_class out(1);
    for (auto& [p, e] : factor_oracle(n).prime_powers) {
        if (p == 2) {
            // g(2) = (1 + 1/(2-1)^3)^{-1} = 1/2; fine even though f(2) is not.
            out *= mpq_class(1, 2);
        } else {
            out *= fg_values(p).second;
        }
    }
    return out;
}

u64 euler_phi(u64 n) {
    if (n == 0) throw parameter_error("euler_phi: n must be >= 1");
    u64 phi = n;
    for (auto& [p, e] : factor_oracle(n).prime_powers) phi = phi / p * (p - 1);
    return phi;
}

MainTermPrediction main_term_prediction(const TripleSpec& spec, u64 cutoff) {
    check_counting_spec(spec);
    if (spec.k == 0) throw parameter_error("main_term_prediction: k must be >= 1");
    if (spec.k > 1 && factor_oracle(spec.k).moebius() == 0)
        throw parameter_error("main_term_prediction: k must be squarefree");

    MainTermPrediction out;
    out.lattice = lattice_count(spec.m, spec.X);
    SingularData s = singular_series(spec.m, cutoff);
    out.singular = s.value;
    out.tail_bound = s.tail_bound;

    const u64 k = spec.k;
    const i64 combo = -static_cast<i64>(spec.a1 % k) + static_cast<i64>(spec.a2 % k) - spec.m;
    const u64 g1 = std::gcd(mod_floor(combo, k), k);
    const u64 g2 = std::gcd(spec.a1 % k, k);
    const u64 g3 = std::gcd(spec.a2 % k, k);
    out.indicator = (g1 == 1 && g2 == 1 && g3 == 1) || k == 1;
    if (!out.indicator) {
        out.value = 0.0;
        return out;
    }

    const u64 km = std::gcd(k, static_cast<u64>(spec.m < 0 ? -spec.m : spec.m));
    const mpq_class fk = f_multiplicative(km);
    const mpq_class gk = g_multiplicative(k);
    const double logX = std::log(static_cast<double>(spec.X));
    const double phi = static_cast<double>(euler_phi(k));
    out.value = static_cast<double>(out.lattice) * out.singular / (logX * logX * logX) *
                fk.get_d() * gk.get_d() /
                (static_cast<double>(k) * phi * phi * phi);
    return out;
}

}  // namespace lmlab
