#pragma once

// Short-interval averages of lambda, mu, and their real-character twists.
// The profile of f over windows of length h reports the distribution of
// |f(n) + f(n+1) + ... + f(n+h-1)| / h as n slides over a range; sums are
// maintained incrementally in exact integer arithmetic.

#include <optional>

#include "lmlab/sieve.hpp"

namespace lmlab {

enum class TwistKind { none, chi3, chi_eps };

struct TwistSpec {
    TwistKind kind = TwistKind::none;
    int eps = +1;  // chi_eps only: chi(2) = -eps, chi(p) = +1 for odd p

    static TwistSpec parse(std::string_view name);  // "none" | "chi3" | "chi+" | "chi-"
    std::string name() const;
    bool operator==(const TwistSpec&) const = default;
};

// Exact character value in {-1, 0, +1}.
int twist_value(u64 n, const TwistSpec& twist);

enum class BaseFn { lambda, mu };
BaseFn base_fn_from_name(std::string_view name);
std::string base_fn_name(BaseFn fn);

struct DiscrepancyProfile {
    BaseFn fn = BaseFn::lambda;
    TwistSpec twist;
    u64 h = 0;             // terms per window
    u64 window_lo = 0;     // n range, inclusive
    u64 window_hi = 0;
    double mean_abs = 0;   // average of |S(n)|/h
    double q50 = 0, q90 = 0, q99 = 0;  // quantiles of |S(n)|/h
    // fraction of n with |S(n)|/h strictly above eps, for eps = 1/20, 1/10, 1/5
    static constexpr int kExceedNum[3] = {1, 1, 1};
    static constexpr int kExceedDen[3] = {20, 10, 5};
    double exceed[3] = {0, 0, 0};
};

// Profile of f (optionally twisted) over all n in [lo, hi]; the underlying
// sieve covers [lo, hi + h - 1].
DiscrepancyProfile interval_profile(BaseFn fn, TwistSpec twist, u64 h, u64 lo, u64 hi,
                                    unsigned threads = 1);

// Among n <= N with mu^2(n) = mu^2(n+1) = 1, how often mu*chi(n) equals
// mu*chi(n+1), where chi is the chi_eps character.  Undefined (and reported
// absent) when the window has no squarefree pair.
struct CoincidenceResult {
    u64 pairs = 0;  // squarefree adjacent pairs seen
    u64 equal = 0;
    std::optional<double> fraction() const {
        if (pairs == 0) return std::nullopt;
        return static_cast<double>(equal) / static_cast<double>(pairs);
    }
};

CoincidenceResult mu_chi_coincidence(u64 N, int eps);

}  // namespace lmlab
