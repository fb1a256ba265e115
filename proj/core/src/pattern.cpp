#include "lmlab/pattern.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "lmlab/parallel.hpp"

namespace lmlab {

SignPattern SignPattern::parse(std::string_view text) {
    SignPattern p;
    bool seen_marker = false;
    for (size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (c == '^') {
            if (seen_marker) throw parameter_error("pattern: duplicate marker");
            seen_marker = true;
            p.marker_offset = p.symbols.size();
            continue;
        }
        if (c != '+' && c != '-' && c != '*')
            throw parameter_error("pattern: invalid symbol '" + std::string(1, c) + "'");
        p.symbols.push_back(c);
    }
    if (p.symbols.empty()) throw parameter_error("pattern: empty");
    if (!seen_marker) throw parameter_error("pattern: missing '^' marker");
    if (p.marker_offset >= p.symbols.size())
        throw parameter_error("pattern: marker must precede a symbol");
    return p;
}

std::string SignPattern::to_string() const {
    std::string out;
    for (size_t i = 0; i < symbols.size(); ++i) {
        if (i == marker_offset) out.push_back('^');
        out.push_back(symbols[i]);
    }
    return out;
}

MatchFn match_fn_from_name(std::string_view name) {
    if (name == "lambda") return MatchFn::lambda;
    if (name == "mu") return MatchFn::mu;
    if (name == "musq") return MatchFn::mu_squared;
    throw parameter_error("unknown function name: " + std::string(name));
}

std::string match_fn_name(MatchFn fn) {
    switch (fn) {
        case MatchFn::lambda: return "lambda";
        case MatchFn::mu: return "mu";
        case MatchFn::mu_squared: return "musq";
    }
    throw parameter_error("bad MatchFn");
}

namespace {

// One pattern cell against one integer.
inline bool cell_matches(const SieveSegment& seg, MatchFn fn, char sym, u64 m) {
    if (sym == '*') return true;
    switch (fn) {
        case MatchFn::lambda: return seg.lambda(m) == (sym == '+' ? +1 : -1);
        case MatchFn::mu: return seg.mu(m) == (sym == '+' ? +1 : -1);
        case MatchFn::mu_squared: return seg.mu_squared(m) == (sym == '+');
    }
    return false;
}

inline bool pattern_matches_at(const SieveSegment& seg, const SignPattern& pat, MatchFn fn,
                               u64 n) {
    const u64 k = pat.k();
    if (n <= k) return false;  // definition guard
    for (size_t i = 0; i < pat.symbols.size(); ++i) {
        u64 m = n - k + i;
        if (!cell_matches(seg, fn, pat.symbols[i], m)) return false;
    }
    return true;
}

void require_coverage(const SieveSegment& seg, const SignPattern& pat, u64 n_lo, u64 n_hi) {
    if (n_lo > n_hi) throw parameter_error("match window empty");
    // n ranges over [n_lo, n_hi]; cells touch [n_lo - k, n_hi + l].  Guarded
    // positions n <= k never read below 1.
    u64 lo_cell = n_lo > pat.k() ? n_lo - pat.k() : 1;
    u64 hi_cell = checked_add(n_hi, pat.l());
    if (n_hi <= pat.k()) return;  // everything guarded away; nothing to read
    if (lo_cell < seg.start() || hi_cell >= seg.end())
        throw parameter_error("segment does not cover match window plus pattern width");
}

}  // namespace

std::vector<u64> match_pattern(const SieveSegment& seg, const SignPattern& pattern,
                               MatchFn fn, u64 n_lo, u64 n_hi) {
    require_coverage(seg, pattern, n_lo, n_hi);
    std::vector<u64> hits;
    for (u64 n = n_lo; n <= n_hi; ++n)
        if (pattern_matches_at(seg, pattern, fn, n)) hits.push_back(n);
    return hits;
}

std::vector<u64> default_scale_ladder(u64 n) {
    std::vector<u64> tops;
    for (int j = 6; j >= 0; --j) {
        u64 top = n >> j;
        if (top >= 2 && (tops.empty() || top != tops.back())) tops.push_back(top);
    }
    if (tops.empty()) tops.push_back(n);
    return tops;
}

PatternDensityReport pattern_density(const SignPattern& pattern, MatchFn fn,
                                     const std::vector<u64>& scale_tops,
                                     unsigned threads) {
    if (scale_tops.empty()) throw parameter_error("pattern_density: no scales");
    if (!std::is_sorted(scale_tops.begin(), scale_tops.end()) ||
        std::adjacent_find(scale_tops.begin(), scale_tops.end()) != scale_tops.end())
        throw parameter_error("pattern_density: scales must be strictly increasing");

    const u64 k = pattern.k();
    const u64 n_max = scale_tops.back();
    if (n_max <= k) throw parameter_error("pattern_density: largest scale below guard");

    SieveSegment seg = sieve_range(1, checked_add(n_max, pattern.l()), 0);

    // Match bitmap over n in [k+1, n_max]; filled blockwise (deterministic for
    // any thread count), then scanned serially for counts and 1/n weights.
    const u64 n0 = k + 1;
    const u64 count = n_max - k;
    std::vector<u8> hit(count, 0);
    parallel_blocks(count, 1u << 16, threads, [&](u64, u64 begin, u64 end) {
        for (u64 i = begin; i < end; ++i)
            hit[i] = pattern_matches_at(seg, pattern, fn, n0 + i) ? 1 : 0;
    });

    PatternDensityReport report;
    report.pattern = pattern;
    report.fn = fn;

    u64 matches = 0;
    double log_match = 0.0, log_all = 0.0;
    size_t next_scale = 0;
    for (u64 i = 0; i < count && next_scale < scale_tops.size(); ++i) {
        const u64 n = n0 + i;
        const double inv = 1.0 / static_cast<double>(n);
        log_all += inv;
        if (hit[i]) {
            ++matches;
            log_match += inv;
        }
        while (next_scale < scale_tops.size() && n == scale_tops[next_scale]) {
            DensityEstimate est;
            est.matches = matches;
            est.window_total = n - k;
            est.frequency = static_cast<double>(matches) / static_cast<double>(est.window_total);
            est.log_frequency = log_all > 0 ? log_match / log_all : 0.0;
            est.window_lo = 1;
            est.window_hi = n;
            report.scales.push_back(est);
            ++next_scale;
        }
    }
    if (report.scales.size() != scale_tops.size())
        throw parameter_error("pattern_density: scale below guard width");

    auto [fmin, fmax] = std::minmax_element(
        report.scales.begin(), report.scales.end(),
        [](const DensityEstimate& a, const DensityEstimate& b) { return a.frequency < b.frequency; });
    report.min_frequency = fmin->frequency;
    report.max_frequency = fmax->frequency;
    auto [lmin, lmax] = std::minmax_element(
        report.scales.begin(), report.scales.end(), [](const DensityEstimate& a, const DensityEstimate& b) {
            return a.log_frequency < b.log_frequency;
        });
    report.min_log_frequency = lmin->log_frequency;
    report.max_log_frequency = lmax->log_frequency;
    return report;
}

PairTable mobius_pair_table(u64 N, unsigned threads) {
    if (N < 2) throw parameter_error("mobius_pair_table: N must be >= 2");
    SieveSegment seg = sieve_range(1, N, 0);

    PairTable table;
    table.n_max = N;

    const u64 count = N - 1;  // n in [1, N-1]
    const u64 nblocks = block_count(count, 1u << 16);
    std::vector<std::array<u64, 9>> partial(nblocks, std::array<u64, 9>{});
    parallel_blocks(count, 1u << 16, threads, [&](u64 b, u64 begin, u64 end) {
        auto& local = partial[b];
        for (u64 i = begin; i < end; ++i) {
            u64 n = 1 + i;
            int a = seg.mu(n), c = seg.mu(n + 1);
            ++local[static_cast<size_t>((a + 1) * 3 + (c + 1))];
        }
    });
    for (const auto& local : partial)
        for (int a = 0; a < 3; ++a)
            for (int c = 0; c < 3; ++c) table.counts[a][c] += local[static_cast<size_t>(a * 3 + c)];
    return table;
}

PredictedConstants predicted_constants(u64 cutoff) {
    if (cutoff < 100) throw parameter_error("predicted_constants: cutoff too small");
    PredictedConstants out;
    out.cutoff = cutoff;
    out.inv_zeta2 = 6.0 / (std::numbers::pi * std::numbers::pi);

    double log_c = 0.0;
    for (u32 p : primes_up_to(cutoff)) {
        double pp = static_cast<double>(p) * static_cast<double>(p);
        log_c += std::log1p(-2.0 / pp);
    }
    out.pair_c = std::exp(log_c);
    // Missing factors: 0 < -sum_{p>P} log(1 - 2/p^2) <= sum_{n>P} 2.5/n^2 <= 2.5/P.
    out.tail_bound = out.pair_c * 3.0 / static_cast<double>(cutoff);
    out.pair_00 = 1.0 - 2.0 * out.inv_zeta2 + out.pair_c;
    out.pair_pm0 = 0.5 * (out.inv_zeta2 - out.pair_c);
    return out;
}

double change_of_variable_check(const std::function<bool(u64)>& property, u64 q, u64 r,
                                u64 N) {
    if (q < 1) throw parameter_error("change_of_variable_check: q must be >= 1");
    if (N < 1) throw parameter_error("change_of_variable_check: N must be >= 1");
    u64 lhs_count = 0, rhs_count = 0;
    for (u64 n = 1; n <= N; ++n) {
        if (property(checked_add(checked_mul(q, n), r))) ++lhs_count;
        if (n % q == r % q && property(n)) ++rhs_count;
    }
    double lhs = static_cast<double>(lhs_count) / static_cast<double>(N);
    double rhs = static_cast<double>(q) * static_cast<double>(rhs_count) / static_cast<double>(N);
    return std::abs(lhs - rhs);
}

double change_of_variable_check(const SignPattern& pattern, MatchFn fn, u64 q, u64 r,
                                u64 N) {
    u64 top = checked_add(checked_mul(q, N), r);
    SieveSegment seg = sieve_range(1, checked_add(top, pattern.l()), 0);
    auto prop = [&](u64 n) { return pattern_matches_at(seg, pattern, fn, n); };
    return change_of_variable_check(prop, q, r, N);
}

DensityEstimate run_density(double a, u64 N) {
    if (!(a > 0)) throw parameter_error("run_density: a must be > 0");
    if (N < 1) throw parameter_error("run_density: N must be >= 1");

    const u64 pad = static_cast<u64>(std::ceil(a)) + 1;
    SieveSegment seg = sieve_range(1, checked_add(N, pad), 0);
    const u64 top = N + pad - 1;

    // next_minus[i] = smallest m >= i with lambda(m) = -1 (top+1 if none).
    std::vector<u64> next_minus(top + 2);
    next_minus[top + 1] = top + 1;
    for (u64 m = top; m >= 1; --m)
        next_minus[m] = seg.lambda(m) == -1 ? m : next_minus[m + 1];

    const u64 t_min = static_cast<u64>(std::floor(a)) + 1;
    DensityEstimate est;
    est.window_lo = t_min;
    est.window_hi = N;
    if (t_min > N) throw parameter_error("run_density: N <= a leaves no window");

    double log_match = 0.0, log_all = 0.0;
    for (u64 t = t_min; t <= N; ++t) {
        const double td = static_cast<double>(t);
        const u64 lo = static_cast<u64>(std::floor(td - a)) + 1;
        const u64 hi = static_cast<u64>(std::ceil(td + a)) - 1;
        const double inv = 1.0 / td;
        log_all += inv;
        ++est.window_total;
        if (next_minus[lo] > hi) {  // window entirely lambda = +1
            ++est.matches;
            log_match += inv;
        }
    }
    est.frequency = static_cast<double>(est.matches) / static_cast<double>(est.window_total);
    est.log_frequency = log_all > 0 ? log_match / log_all : 0.0;
    return est;
}

MaximalReport hl_maximal(const std::vector<double>& values) {
    if (values.size() < 3 || values.size() % 2 == 0)
        throw parameter_error("hl_maximal: need odd length >= 3 (domain [-N, N])");
    for (double v : values)
        if (!(v >= 0.0)) throw parameter_error("hl_maximal: values must be nonnegative");

    const i64 N = static_cast<i64>(values.size() / 2);
    // prefix[i] = sum of values[0..i-1]
    std::vector<double> prefix(values.size() + 1, 0.0);
    for (size_t i = 0; i < values.size(); ++i) prefix[i + 1] = prefix[i] + values[i];
    const double total = prefix.back();

    auto window_sum = [&](i64 n, i64 r) {
        i64 lo = std::max<i64>(-N, n - r) + N;      // index into values
        i64 hi = std::min<i64>(N, n + r) + N;
        return prefix[static_cast<size_t>(hi + 1)] - prefix[static_cast<size_t>(lo)];
    };

    MaximalReport report;
    report.maximal.resize(values.size());
    double msum = 0.0, sqsum = 0.0;
    for (i64 n = -N; n <= N; ++n) {
        // Past r = |n| + N the window covers all support and the average only
        // shrinks with r, so the sup is attained by then.
        const i64 r_max = std::max<i64>(1, std::abs(n) + N);
        double best = 0.0;
        for (i64 r = 1; r < r_max; ++r) best = std::max(best, window_sum(n, r) / static_cast<double>(r));
        best = std::max(best, total / static_cast<double>(r_max));
        report.maximal[static_cast<size_t>(n + N)] = best;
        msum += best;
        const double v = values[static_cast<size_t>(n + N)];
        sqsum += v * v;
    }
    report.avg_maximal = msum / static_cast<double>(N);
    report.l2_rhs = std::sqrt(sqsum / static_cast<double>(N));
    report.ratio = report.l2_rhs > 0 ? report.avg_maximal / report.l2_rhs : 0.0;
    return report;
}

}  // namespace lmlab
