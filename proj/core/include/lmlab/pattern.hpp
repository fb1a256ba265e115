#pragma once

// Sign-pattern matching and density estimation.
//
// A pattern is a string over {+,-,*} with a positional marker: "-*^+" places
// the marker on the last symbol, so n matches when lambda(n-2) = -1 and
// lambda(n) = +1, with lambda(n-1) unconstrained.  Matching requires n > k
// where k is the marker offset.  Densities are reported per scale window both
// as plain frequency and as the 1/n-weighted (logarithmic) frequency, with
// min/max over the scale ladder standing in for liminf/limsup.

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "lmlab/sieve.hpp"

namespace lmlab {

struct SignPattern {
    std::string symbols;     // characters '+', '-', '*'
    u64 marker_offset = 0;   // index of the marked symbol

    u64 k() const { return marker_offset; }                    // cells left of marker
    u64 l() const { return symbols.size() - 1 - marker_offset; }  // cells right

    // Text form: '^' immediately before the marked symbol ("^++", "-*^+").
    static SignPattern parse(std::string_view text);
    std::string to_string() const;

    bool operator==(const SignPattern&) const = default;
};

// Which value plane the pattern constrains.
//   lambda:     '+' means lambda = +1, '-' means lambda = -1
//   mu:         '+' means mu = +1, '-' means mu = -1 (mu = 0 matches neither)
//   mu_squared: '+' means mu^2 = 1, '-' means mu^2 = 0
enum class MatchFn { lambda, mu, mu_squared };

MatchFn match_fn_from_name(std::string_view name);  // "lambda" | "mu" | "musq"
std::string match_fn_name(MatchFn fn);

// Positions n in [n_lo, n_hi] with n > k matching the pattern.  The segment
// must cover [n_lo - k, n_hi + l]; otherwise a parameter error is thrown.
std::vector<u64> match_pattern(const SieveSegment& seg, const SignPattern& pattern,
                               MatchFn fn, u64 n_lo, u64 n_hi);

struct DensityEstimate {
    u64 matches = 0;
    u64 window_total = 0;
    double frequency = 0.0;      // matches / window_total
    double log_frequency = 0.0;  // sum of 1/n over matches / sum over window
    u64 window_lo = 0;
    u64 window_hi = 0;  // inclusive
};

struct PatternDensityReport {
    SignPattern pattern;
    MatchFn fn = MatchFn::lambda;
    std::vector<DensityEstimate> scales;
    // min/max over scales: liminf/limsup surrogates.
    double min_frequency = 0.0, max_frequency = 0.0;
    double min_log_frequency = 0.0, max_log_frequency = 0.0;
};

// Windows are [1, top] for each top in scale_tops (must be strictly
// increasing).  One sieve covers the largest scale.
PatternDensityReport pattern_density(const SignPattern& pattern, MatchFn fn,
                                     const std::vector<u64>& scale_tops,
                                     unsigned threads = 1);

// Default scale ladder N, N/2, ..., N/2^6 (deduplicated, ascending).
std::vector<u64> default_scale_ladder(u64 n);

// 3x3 table of (mu(n), mu(n+1)) over n in [1, N-1].
struct PairTable {
    u64 n_max = 0;       // N
    u64 counts[3][3]{};  // counts[a+1][b+1] for values a, b in {-1,0,+1}

    u64 total() const { return n_max - 1; }
    u64 count(int a, int b) const { return counts[a + 1][b + 1]; }
    double freq(int a, int b) const {
        return static_cast<double>(count(a, b)) / static_cast<double>(total());
    }
};

PairTable mobius_pair_table(u64 N, unsigned threads = 1);  // requires N >= 2

// Euler-product constants with a rigorous truncation bound.
struct PredictedConstants {
    double inv_zeta2 = 0.0;   // 1/zeta(2) = 6/pi^2, closed form
    double pair_c = 0.0;      // prod_p (1 - 2/p^2), truncated at `cutoff`
    double pair_00 = 0.0;     // 1 - 2/zeta(2) + c
    double pair_pm0 = 0.0;    // (1/2)(1/zeta(2) - c)
    u64 cutoff = 0;
    double tail_bound = 0.0;  // |true c - pair_c| <= tail_bound
};

PredictedConstants predicted_constants(u64 cutoff = 4'000'000);

// |freq_{n<=N}(P(qn+r)) - q * freq_{n<=N}(P(n) and n = r mod q)|.
// The predicate must be total on [1, q*N + r].
double change_of_variable_check(const std::function<bool(u64)>& property, u64 q, u64 r,
                                u64 N);
// Same with the property "pattern matches at n".
double change_of_variable_check(const SignPattern& pattern, MatchFn fn, u64 q, u64 r,
                                u64 N);

// Density over integer t in (a, N] of: lambda(n) = +1 for every integer n in
// the open window (t - a, t + a).
DensityEstimate run_density(double a, u64 N);

// Discrete maximal operator M(n) = sup_{r>=1} (1/r) sum_{|n-m|<=r} a_m for a
// nonnegative sequence indexed on [-N, N] (values[i] = a_{i-N}, odd length).
struct MaximalReport {
    std::vector<double> maximal;  // M(n), index n + N
    double avg_maximal = 0.0;     // (1/N) sum_{|n|<=N} M(n)
    double l2_rhs = 0.0;          // sqrt((1/N) sum a_n^2)
    double ratio = 0.0;           // avg_maximal / l2_rhs, 0 when rhs = 0
};

MaximalReport hl_maximal(const std::vector<double>& values);

}  // namespace lmlab
