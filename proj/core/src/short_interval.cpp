#include "lmlab/short_interval.hpp"

#include <array>
#include <bit>
#include <cmath>

#include "lmlab/parallel.hpp"

namespace lmlab {

TwistSpec TwistSpec::parse(std::string_view name) {
    if (name == "none") return {TwistKind::none, +1};
    if (name == "chi3") return {TwistKind::chi3, +1};
    if (name == "chi+") return {TwistKind::chi_eps, +1};
    if (name == "chi-") return {TwistKind::chi_eps, -1};
    throw parameter_error("unknown twist: " + std::string(name));
}

std::string TwistSpec::name() const {
    switch (kind) {
        case TwistKind::none: return "none";
        case TwistKind::chi3: return "chi3";
        case TwistKind::chi_eps: return eps > 0 ? "chi+" : "chi-";
    }
    throw parameter_error("bad TwistSpec");
}

int twist_value(u64 n, const TwistSpec& twist) {
    if (n < 1) throw parameter_error("twist_value: n must be >= 1");
    switch (twist.kind) {
        case TwistKind::none:
            return +1;
        case TwistKind::chi3: {
            u64 r = n % 3;
            return r == 0 ? 0 : (r == 1 ? +1 : -1);
        }
        case TwistKind::chi_eps: {
            // Completely multiplicative, +1 at odd primes, -eps at 2, so the
            // value is (-eps)^v2(n).
            int v2 = std::countr_zero(n);
            return (twist.eps > 0 && (v2 & 1)) ? -1 : +1;
        }
    }
    throw parameter_error("bad TwistSpec");
}

BaseFn base_fn_from_name(std::string_view name) {
    if (name == "lambda") return BaseFn::lambda;
    if (name == "mu") return BaseFn::mu;
    throw parameter_error("unknown function name: " + std::string(name));
}

std::string base_fn_name(BaseFn fn) { return fn == BaseFn::lambda ? "lambda" : "mu"; }

namespace {

inline int twisted_value(const SieveSegment& seg, BaseFn fn, const TwistSpec& twist, u64 m) {
    int v = fn == BaseFn::lambda ? seg.lambda(m) : seg.mu(m);
    if (twist.kind == TwistKind::none) return v;
    return v * twist_value(m, twist);
}

}  // namespace

DiscrepancyProfile interval_profile(BaseFn fn, TwistSpec twist, u64 h, u64 lo, u64 hi,
                                    unsigned threads) {
    if (h < 1) throw parameter_error("interval_profile: h must be >= 1");
    if (lo < 1 || hi < lo) throw parameter_error("interval_profile: bad window");
    const u64 top = checked_add(hi, h - 1);

    SieveSegment seg = sieve_range(lo, top - lo + 1, 0);

    const u64 count = hi - lo + 1;
    // |S| takes integer values in [0, h]; per-block histograms merge exactly.
    const u64 bsize = 1u << 16;
    const u64 nblocks = block_count(count, bsize);
    std::vector<std::vector<u64>> hist_part(nblocks);
    std::vector<u64> abs_part(nblocks, 0);

    parallel_blocks(count, bsize, threads, [&](u64 b, u64 begin, u64 end) {
        std::vector<u64> hist(h + 1, 0);
        u64 abs_sum = 0;
        i64 s = 0;
        const u64 n0 = lo + begin;
        for (u64 j = 0; j < h; ++j) s += twisted_value(seg, fn, twist, n0 + j);
        for (u64 i = begin; i < end; ++i) {
            u64 a = static_cast<u64>(s < 0 ? -s : s);
            ++hist[a];
            abs_sum += a;
            if (i + 1 < end) {
                const u64 n = lo + i;
                s -= twisted_value(seg, fn, twist, n);
                s += twisted_value(seg, fn, twist, n + h);
            }
        }
        hist_part[b] = std::move(hist);
        abs_part[b] = abs_sum;
    });

    std::vector<u64> hist(h + 1, 0);
    u64 abs_sum = 0;
    for (u64 b = 0; b < nblocks; ++b) {
        for (u64 v = 0; v <= h; ++v) hist[v] += hist_part[b][v];
        abs_sum += abs_part[b];
    }

    DiscrepancyProfile prof;
    prof.fn = fn;
    prof.twist = twist;
    prof.h = h;
    prof.window_lo = lo;
    prof.window_hi = hi;
    prof.mean_abs = static_cast<double>(abs_sum) / (static_cast<double>(count) * static_cast<double>(h));

    auto quantile = [&](double q) {
        const u64 need = static_cast<u64>(std::ceil(q * static_cast<double>(count)));
        u64 cum = 0;
        for (u64 v = 0; v <= h; ++v) {
            cum += hist[v];
            if (cum >= need) return static_cast<double>(v) / static_cast<double>(h);
        }
        return 1.0;
    };
    prof.q50 = quantile(0.50);
    prof.q90 = quantile(0.90);
    prof.q99 = quantile(0.99);

    for (int e = 0; e < 3; ++e) {
        // |S|/h > num/den  <=>  |S| * den > h * num, evaluated in integers.
        const u64 num = static_cast<u64>(DiscrepancyProfile::kExceedNum[e]);
        const u64 den = static_cast<u64>(DiscrepancyProfile::kExceedDen[e]);
        u64 cnt = 0;
        for (u64 v = 0; v <= h; ++v)
            if (v * den > h * num) cnt += hist[v];
        prof.exceed[e] = static_cast<double>(cnt) / static_cast<double>(count);
    }
    return prof;
}

CoincidenceResult mu_chi_coincidence(u64 N, int eps) {
    if (N < 1) throw parameter_error("mu_chi_coincidence: N must be >= 1");
    SieveSegment seg = sieve_range(1, checked_add(N, 1), 0);
    TwistSpec chi{TwistKind::chi_eps, eps};
    CoincidenceResult res;
    for (u64 n = 1; n <= N; ++n) {
        if (!seg.mu_squared(n) || !seg.mu_squared(n + 1)) continue;
        ++res.pairs;
        int a = seg.mu(n) * twist_value(n, chi);
        int b = seg.mu(n + 1) * twist_value(n + 1, chi);
        if (a == b) ++res.equal;
    }
    return res;
}

}  // namespace lmlab
