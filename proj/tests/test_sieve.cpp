#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "lmlab/rng.hpp"
#include "lmlab/sieve.hpp"

using namespace lmlab;

TEST_CASE("lambda over 1..10 matches the definition") {
    SieveSegment seg = sieve_lambda(1, 10);
    const int expected[10] = {+1, -1, -1, +1, -1, +1, -1, -1, +1, +1};
    for (u64 n = 1; n <= 10; ++n) CHECK(seg.lambda(n) == expected[n - 1]);
}

TEST_CASE("lambda(1) is the empty product") {
    SieveSegment seg = sieve_lambda(1, 1);
    CHECK(seg.lambda(1) == +1);
}

TEST_CASE("mu over 1..10 matches the definition") {
    SieveSegment seg = sieve_mu(1, 10);
    const int expected[10] = {1, -1, -1, 0, -1, 1, -1, 0, 0, 1};
    for (u64 n = 1; n <= 10; ++n) CHECK(seg.mu(n) == expected[n - 1]);
    CHECK(sieve_mu(4, 1).mu(4) == 0);
}

TEST_CASE("segment at 10^6 agrees pointwise with the factorization oracle") {
    const u64 start = 1'000'000, len = 1'000;
    SieveSegment seg = sieve_range(start, len, 0);
    for (u64 n = start; n < start + len; ++n) {
        Factorization f = factor_oracle(n);
        CHECK(seg.lambda(n) == f.liouville());
        CHECK(seg.mu(n) == f.moebius());
    }
}

TEST_CASE("truncated squarefree indicator") {
    CHECK(sieve_squarefree_w(9, 1, 2).squarefree_w(9));    // 3^2 | 9 but 3 > w
    CHECK(!sieve_squarefree_w(4, 1, 2).squarefree_w(4));   // 2^2 | 4
    CHECK_THROWS_AS(sieve_squarefree_w(1, 10, 1), parameter_error);

    // Frequency near the finite Euler product prod_{p<=50} (1 - 1/p^2).
    const u64 n = 10'000;
    SieveSegment seg = sieve_squarefree_w(1, n, 50);
    u64 ones = 0;
    for (u64 m = 1; m <= n; ++m) ones += seg.squarefree_w(m);
    double product = 1.0;
    for (u32 p : primes_up_to(50)) product *= 1.0 - 1.0 / (double(p) * p);
    CHECK(std::abs(double(ones) / double(n) - product) < 0.02);
}

TEST_CASE("factor oracle basics") {
    Factorization f = factor_oracle(60);
    REQUIRE(f.prime_powers.size() == 3);
    CHECK(f.prime_powers[0] == std::pair<u64, u32>{2, 2});
    CHECK(f.prime_powers[1] == std::pair<u64, u32>{3, 1});
    CHECK(f.prime_powers[2] == std::pair<u64, u32>{5, 1});

    CHECK(factor_oracle(1).prime_powers.empty());
    CHECK_THROWS_AS(factor_oracle(0), parameter_error);

    // 999983: prime by trial division up to sqrt(n).
    bool divisor_found = false;
    for (u64 d = 2; d * d <= 999983; ++d)
        if (999983 % d == 0) divisor_found = true;
    REQUIRE(!divisor_found);
    Factorization p = factor_oracle(999983);
    REQUIRE(p.prime_powers.size() == 1);
    CHECK(p.prime_powers[0] == std::pair<u64, u32>{999983, 1});
}

TEST_CASE("factorizations multiply back and stay ordered") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 2000; ++i) {
        u64 n = rng() % 1'000'000'000 + 1;
        Factorization f = factor_oracle(n);
        u64 product = 1;
        u64 last_p = 0;
        for (auto [p, e] : f.prime_powers) {
            CHECK(p > last_p);
            CHECK(e >= 1);
            CHECK(is_prime_u64(p));
            last_p = p;
            for (u32 j = 0; j < e; ++j) product *= p;
        }
        CHECK(product == n);
    }
}

TEST_CASE("mu = lambda * [squarefree] against the oracle on random samples") {
    std::mt19937_64 rng(11);
    SieveSegment seg = sieve_range(1, 200'000, 0);
    for (int i = 0; i < 3000; ++i) {
        u64 n = rng() % 200'000 + 1;
        Factorization f = factor_oracle(n);
        bool squarefree = f.moebius() != 0;
        CHECK(seg.mu(n) == (squarefree ? seg.lambda(n) : 0));
        CHECK(seg.mu_squared(n) == squarefree);
    }
}

TEST_CASE("complete multiplicativity spot-check: lambda(mn) = lambda(m)lambda(n)") {
    const u64 top = 1u << 20;
    SieveSegment seg = sieve_range(1, top, 0);
    std::mt19937_64 rng(13);
    for (int i = 0; i < 10'000; ++i) {
        u64 m = rng() % 1024 + 1;
        u64 n = rng() % (top / m) + 1;
        CHECK(seg.lambda(m * n) == seg.lambda(m) * seg.lambda(n));
    }
}

TEST_CASE("segment boundary independence") {
    const u64 a = 999'000, L = 4'096;
    SieveSegment whole = sieve_range(a, 2 * L, 17);
    SieveSegment first = sieve_range(a, L, 17);
    SieveSegment second = sieve_range(a + L, L, 17);
    for (u64 n = a; n < a + 2 * L; ++n) {
        const SieveSegment& half = n < a + L ? first : second;
        CHECK(whole.lambda(n) == half.lambda(n));
        CHECK(whole.mu(n) == half.mu(n));
        CHECK(whole.squarefree_w(n) == half.squarefree_w(n));
    }
}

TEST_CASE("range overflow is rejected") {
    CHECK_THROWS_AS(sieve_range(std::numeric_limits<u64>::max() - 5, 10, 0), range_error);
    CHECK_THROWS_AS(sieve_range(0, 10, 0), parameter_error);
    CHECK_THROWS_AS(sieve_range(1, 0, 0), parameter_error);
}

TEST_CASE("segment cache round-trips and has the documented layout") {
    SieveSegment seg = sieve_range(97, 130, 5);
    std::stringstream buf;
    write_segment_cache(seg, buf);
    const std::string bytes = buf.str();

    // magic, version, start, len, w
    REQUIRE(bytes.size() >= 29);
    CHECK(bytes.substr(0, 4) == "LMSG");
    CHECK(bytes[4] == 1);
    auto u64_at = [&](size_t off) {
        u64 v = 0;
        for (int i = 0; i < 8; ++i) v |= u64(u8(bytes[off + i])) << (8 * i);
        return v;
    };
    CHECK(u64_at(5) == 97);
    CHECK(u64_at(13) == 130);
    CHECK(u64_at(21) == 5);
    const u64 lambda_words = (130 + 63) / 64, mu_words = (260 + 63) / 64, sf_words = lambda_words;
    CHECK(bytes.size() == 29 + 8 * (lambda_words + mu_words + sf_words));

    SieveSegment back = read_segment_cache(buf);
    CHECK(back == seg);

    std::stringstream bad("LMSX");
    CHECK_THROWS(read_segment_cache(bad));
    std::stringstream truncated(bytes.substr(0, 40));
    CHECK_THROWS(read_segment_cache(truncated));
}

TEST_CASE("squarefree density approaches 1/zeta(2)") {
    // Desk-size version; the 10^7 run lives in the acceptance suite.
    const u64 n = 2'000'000;
    SieveSegment seg = sieve_range(1, n, 0);
    u64 ones = 0;
    for (u64 m = 1; m <= n; ++m) ones += seg.mu_squared(m);
    CHECK(std::abs(double(ones) / double(n) - 0.6079) < 0.002);
}
