#include <doctest.h>

#include <cmath>
#include <random>

#include "lmlab/pattern.hpp"
#include "lmlab/rng.hpp"

using namespace lmlab;

namespace {

// Literal per-position rescan, independent of the match engine.
std::vector<u64> naive_matches(const SieveSegment& seg, const std::string& text, MatchFn fn,
                               u64 lo, u64 hi) {
    SignPattern pat = SignPattern::parse(text);
    std::vector<u64> hits;
    for (u64 n = lo; n <= hi; ++n) {
        if (n <= pat.k()) continue;
        bool ok = true;
        for (size_t i = 0; i < pat.symbols.size() && ok; ++i) {
            char c = pat.symbols[i];
            if (c == '*') continue;
            u64 m = n - pat.k() + i;
            int want = c == '+' ? +1 : -1;
            if (fn == MatchFn::lambda) ok = seg.lambda(m) == want;
            else if (fn == MatchFn::mu) ok = seg.mu(m) == want;
            else ok = seg.mu_squared(m) == (c == '+');
        }
        if (ok) hits.push_back(n);
    }
    return hits;
}

}  // namespace

TEST_CASE("pattern parsing round-trips and validates") {
    SignPattern p = SignPattern::parse("-*^+");
    CHECK(p.symbols == "-*+");
    CHECK(p.marker_offset == 2);
    CHECK(p.k() == 2);
    CHECK(p.l() == 0);
    CHECK(p.to_string() == "-*^+");
    CHECK(SignPattern::parse("^+++").k() == 0);
    CHECK_THROWS_AS(SignPattern::parse("++"), parameter_error);    // no marker
    CHECK_THROWS_AS(SignPattern::parse("^"), parameter_error);     // marker alone
    CHECK_THROWS_AS(SignPattern::parse("+^x+"), parameter_error);  // bad symbol
    CHECK_THROWS_AS(SignPattern::parse(""), parameter_error);
}

TEST_CASE("match positions for ^++ on lambda over [1,9]") {
    // Oracle route: lambda from factorizations, then a direct scan.
    SieveSegment seg = sieve_range(1, 16, 0);
    for (u64 n = 1; n <= 16; ++n) CHECK(seg.lambda(n) == factor_oracle(n).liouville());

    auto hits = match_pattern(seg, SignPattern::parse("^++"), MatchFn::lambda, 1, 9);
    CHECK(hits == std::vector<u64>{9});
    CHECK(hits == naive_matches(seg, "^++", MatchFn::lambda, 1, 9));
}

TEST_CASE("all-star pattern matches every position") {
    SieveSegment seg = sieve_range(1, 32, 0);
    auto hits = match_pattern(seg, SignPattern::parse("^*"), MatchFn::lambda, 1, 30);
    CHECK(hits.size() == 30);
}

TEST_CASE("marker guard: n must exceed the left width") {
    SieveSegment seg = sieve_range(1, 64, 0);
    // k = 2: no match below n = 3 regardless of values.
    auto hits = match_pattern(seg, SignPattern::parse("-*^+"), MatchFn::lambda, 1, 60);
    REQUIRE(!hits.empty());
    for (u64 n : hits) CHECK(n > 2);
    auto stars = match_pattern(seg, SignPattern::parse("**^*"), MatchFn::lambda, 1, 60);
    CHECK(stars.front() == 3);
}

TEST_CASE("segment must cover the window plus the pattern width") {
    SieveSegment seg = sieve_range(10, 20, 0);  // covers [10, 30)
    SignPattern pat = SignPattern::parse("^++");
    CHECK_THROWS_AS(match_pattern(seg, pat, MatchFn::lambda, 10, 29), parameter_error);
    CHECK_NOTHROW(match_pattern(seg, pat, MatchFn::lambda, 10, 27));
    CHECK_THROWS_AS(match_pattern(seg, pat, MatchFn::lambda, 5, 20), parameter_error);
}

TEST_CASE("mu and musq pattern planes") {
    SieveSegment seg = sieve_range(1, 12, 0);
    // mu = [1,-1,-1,0,-1,1,-1,0,0,1]
    auto mu_hits = match_pattern(seg, SignPattern::parse("^+"), MatchFn::mu, 1, 10);
    CHECK(mu_hits == std::vector<u64>{1, 6, 10});
    auto zero_hits = match_pattern(seg, SignPattern::parse("^-"), MatchFn::mu_squared, 1, 10);
    CHECK(zero_hits == std::vector<u64>{4, 8, 9});
}

TEST_CASE("pattern density: single + has frequency near 1/2") {
    auto rep = pattern_density(SignPattern::parse("^+"), MatchFn::lambda, {1'000'000});
    CHECK(rep.scales.size() == 1);
    CHECK(std::abs(rep.scales[0].frequency - 0.5) < 0.01);
    CHECK(std::abs(rep.scales[0].log_frequency - 0.5) < 0.01);
}

TEST_CASE("pattern density: all-star pattern has frequency exactly 1") {
    auto rep = pattern_density(SignPattern::parse("^**"), MatchFn::lambda, {1000, 10'000});
    for (const auto& s : rep.scales) CHECK(s.frequency == 1.0);
    CHECK(rep.min_frequency == 1.0);
    CHECK(rep.max_frequency == 1.0);
}

TEST_CASE("refinement consistency: ^+- plus ^++ equals ^+* window-for-window") {
    const std::vector<u64> scales = {1000, 40'000, 600'000};
    auto fine1 = pattern_density(SignPattern::parse("^+-"), MatchFn::lambda, scales);
    auto fine2 = pattern_density(SignPattern::parse("^++"), MatchFn::lambda, scales);
    auto coarse = pattern_density(SignPattern::parse("^+*"), MatchFn::lambda, scales);
    for (size_t i = 0; i < scales.size(); ++i) {
        CHECK(fine1.scales[i].matches + fine2.scales[i].matches == coarse.scales[i].matches);
        CHECK(fine1.scales[i].window_total == coarse.scales[i].window_total);
    }
}

TEST_CASE("pattern density matches the naive scan and is thread-count independent") {
    const u64 top = 200'000;
    SieveSegment seg = sieve_range(1, top + 2, 0);
    auto rep1 = pattern_density(SignPattern::parse("^++"), MatchFn::lambda, {top}, 1);
    auto rep4 = pattern_density(SignPattern::parse("^++"), MatchFn::lambda, {top}, 4);
    auto naive = naive_matches(seg, "^++", MatchFn::lambda, 1, top);
    CHECK(rep1.scales[0].matches == naive.size());
    CHECK(rep1.scales[0].matches == rep4.scales[0].matches);
    CHECK(rep1.scales[0].log_frequency == rep4.scales[0].log_frequency);
}

TEST_CASE("length-3 lambda patterns all exceed the positivity floor at desk scale") {
    const char* exprs[8] = {"^+++", "^++-", "^+-+", "^+--", "^-++", "^-+-", "^--+", "^---"};
    for (const char* e : exprs) {
        auto rep = pattern_density(SignPattern::parse(e), MatchFn::lambda, {1'000'000});
        CHECK(rep.scales[0].frequency > 0.05);
        // Chowla predicts 1/8; report-only, generous sanity interval here.
        CHECK(rep.scales[0].frequency < 0.25);
    }
}

TEST_CASE("scale ladder validation") {
    CHECK_THROWS_AS(pattern_density(SignPattern::parse("^+"), MatchFn::lambda, {}),
                    parameter_error);
    CHECK_THROWS_AS(pattern_density(SignPattern::parse("^+"), MatchFn::lambda, {100, 100}),
                    parameter_error);
    CHECK_THROWS_AS(pattern_density(SignPattern::parse("^+"), MatchFn::lambda, {200, 100}),
                    parameter_error);
    auto ladder = default_scale_ladder(1'280'000);
    CHECK(ladder.size() == 7);
    CHECK(ladder.front() == 20'000);
    CHECK(ladder.back() == 1'280'000);
}

TEST_CASE("mobius pair table at N = 10 by hand") {
    PairTable t = mobius_pair_table(10);
    CHECK(t.total() == 9);
    CHECK(t.count(-1, -1) == 1);  // n = 2
    CHECK(t.count(+1, -1) == 2);  // n = 1, 6
    CHECK(t.count(-1, 0) == 2);   // n = 3, 7
    CHECK(t.count(0, -1) == 1);   // n = 4
    CHECK(t.count(-1, +1) == 1);  // n = 5
    CHECK(t.count(0, 0) == 1);    // n = 8
    CHECK(t.count(0, +1) == 1);   // n = 9
    CHECK(t.count(+1, +1) == 0);
    CHECK(t.count(+1, 0) == 0);
    double total = 0;
    for (int a = -1; a <= 1; ++a)
        for (int b = -1; b <= 1; ++b) total += t.freq(a, b);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("mobius pair table approaches the predicted constants") {
    PairTable t = mobius_pair_table(1'000'000, 2);
    PredictedConstants c = predicted_constants(200'000);
    CHECK(std::abs(t.freq(0, 0) - c.pair_00) < 0.003);
    CHECK(std::abs(t.freq(+1, 0) - c.pair_pm0) < 0.003);
    CHECK(std::abs(t.freq(0, -1) - c.pair_pm0) < 0.003);
    CHECK(std::abs(t.freq(+1, -1) - t.freq(-1, +1)) < 0.005);
    CHECK(std::abs(t.freq(+1, +1) - t.freq(-1, -1)) < 0.005);
    // lambda sign symmetry at the same scale
    auto plus = pattern_density(SignPattern::parse("^+"), MatchFn::lambda, {1'000'000});
    CHECK(std::abs(2 * plus.scales[0].frequency - 1.0) < 0.01);
}

TEST_CASE("predicted constants reproduce the reference digits") {
    PredictedConstants c = predicted_constants();
    CHECK(std::abs(c.inv_zeta2 - 0.6079) < 1e-4);
    CHECK(std::abs(c.pair_c - 0.3226) < 1e-4);
    CHECK(std::abs(c.pair_00 - 0.1067) < 1e-4);
    CHECK(std::abs(c.pair_pm0 - 0.1426) < 1e-4);
    CHECK(c.tail_bound < 1e-6);

    PredictedConstants c5 = predicted_constants(100'000);
    PredictedConstants c6 = predicted_constants(1'000'000);
    CHECK(std::abs(c5.pair_c - c6.pair_c) < 1e-6);
}

TEST_CASE("change of variable: exact identity for parity") {
    auto even = [](u64 n) { return n % 2 == 0; };
    CHECK(change_of_variable_check(even, 2, 0, 1'000'000) < 1e-3);
}

TEST_CASE("change of variable on lambda patterns") {
    // q = 3, r = 1
    CHECK(change_of_variable_check(SignPattern::parse("^+"), MatchFn::lambda, 3, 1, 1'000'000) <
          0.01);
    // q = 1: translation invariance (r only shifts the window)
    CHECK(change_of_variable_check(SignPattern::parse("^+"), MatchFn::lambda, 1, 5, 1'000'000) <
          1e-3);
}

TEST_CASE("run density: a = 0.5 equals the single-point lambda density exactly") {
    const u64 n = 100'000;
    DensityEstimate est = run_density(0.5, n);
    SieveSegment seg = sieve_range(1, n + 2, 0);
    u64 plus = 0;
    for (u64 t = 1; t <= n; ++t) plus += seg.lambda(t) == +1;
    CHECK(est.matches == plus);
    CHECK(est.window_total == n);
}

TEST_CASE("run density: a = 1.5 counts three-term +1 runs exactly") {
    const u64 n = 100'000;
    DensityEstimate est = run_density(1.5, n);
    SieveSegment seg = sieve_range(1, n + 3, 0);
    u64 runs = 0;
    for (u64 t = 2; t <= n; ++t)
        runs += seg.lambda(t - 1) == +1 && seg.lambda(t) == +1 && seg.lambda(t + 1) == +1;
    CHECK(est.matches == runs);
    CHECK(est.matches > 0);
    CHECK(est.window_total == n - 1);
}

TEST_CASE("run density: monotone in the half-width") {
    const u64 n = 200'000;
    CHECK(run_density(5.0, n).frequency <= run_density(2.0, n).frequency);
    CHECK(run_density(8.0, n).frequency <= run_density(5.0, n).frequency);
}

TEST_CASE("maximal operator: point mass at 0") {
    const i64 n = 40;
    std::vector<double> a(2 * n + 1, 0.0);
    a[static_cast<size_t>(n)] = 1.0;  // a_0 = 1
    MaximalReport rep = hl_maximal(a);
    CHECK(rep.maximal[static_cast<size_t>(n)] >= 1.0);
    for (i64 i = 1; i <= n; ++i) {
        CHECK(rep.maximal[static_cast<size_t>(n + i)] ==
              doctest::Approx(1.0 / double(i)).epsilon(1e-12));
        CHECK(rep.maximal[static_cast<size_t>(n + i)] <=
              rep.maximal[static_cast<size_t>(n + i - 1)]);
    }
}

TEST_CASE("maximal operator: constant sequence") {
    const i64 n = 30;
    std::vector<double> a(2 * n + 1, 1.0);
    MaximalReport rep = hl_maximal(a);
    // sup attained at r = 1: three points over a denominator of 1.
    for (i64 i = -n + 1; i < n; ++i)
        CHECK(rep.maximal[static_cast<size_t>(n + i)] == doctest::Approx(3.0));
    CHECK(rep.ratio < 10.0);
}

TEST_CASE("maximal operator matches a brute-force sup on random input") {
    std::mt19937_64 rng(3);
    const i64 n = 24;
    std::vector<double> a(2 * n + 1);
    for (auto& v : a) v = double(rng() % 8) / 4.0;
    MaximalReport rep = hl_maximal(a);
    for (i64 pos = -n; pos <= n; ++pos) {
        double best = 0;
        for (i64 r = 1; r <= 4 * n; ++r) {
            double sum = 0;
            for (i64 m = pos - r; m <= pos + r; ++m)
                if (m >= -n && m <= n) sum += a[static_cast<size_t>(m + n)];
            best = std::max(best, sum / double(r));
        }
        CHECK(rep.maximal[static_cast<size_t>(pos + n)] == doctest::Approx(best).epsilon(1e-12));
    }
}

TEST_CASE("maximal operator: zero input reports zero ratio") {
    std::vector<double> a(41, 0.0);
    MaximalReport rep = hl_maximal(a);
    CHECK(rep.avg_maximal == 0.0);
    CHECK(rep.l2_rhs == 0.0);
    CHECK(rep.ratio == 0.0);
}

TEST_CASE("maximal operator input validation") {
    CHECK_THROWS_AS(hl_maximal({1.0, 2.0}), parameter_error);        // even length
    CHECK_THROWS_AS(hl_maximal({1.0, -0.5, 1.0}), parameter_error);  // negative
}
