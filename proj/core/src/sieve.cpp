#include "lmlab/sieve.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace lmlab {

namespace {

struct io_failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Internal sieving block; bounds the rem/omega scratch arrays.
constexpr u64 kBlock = 1u << 20;

inline void set_bit(std::vector<u64>& words, u64 i) { words[i >> 6] |= u64{1} << (i & 63); }

u64 isqrt_u64(u64 n) {
    if (n == 0) return 0;
    u64 r = static_cast<u64>(std::sqrt(static_cast<double>(n)));
    while (r > 0 && (u128)r * r > n) --r;
    while ((u128)(r + 1) * (r + 1) <= n) ++r;
    return r;
}

u64 mulmod(u64 a, u64 b, u64 m) { return static_cast<u64>((u128)a * b % m); }

u64 powmod(u64 a, u64 e, u64 m) {
    u64 r = 1 % m;
    a %= m;
    while (e) {
        if (e & 1) r = mulmod(r, a, m);
        a = mulmod(a, a, m);
        e >>= 1;
    }
    return r;
}

}  // namespace

std::vector<u32> primes_up_to(u64 limit) {
    std::vector<u32> primes;
    if (limit < 2) return primes;
    std::vector<u8> composite(limit + 1, 0);
    for (u64 p = 2; p <= limit; ++p) {
        if (composite[p]) continue;
        primes.push_back(static_cast<u32>(p));
        for (u64 m = p * p; m <= limit; m += p) composite[m] = 1;
    }
    return primes;
}

bool is_prime_u64(u64 n) {
    if (n < 2) return false;
    for (u64 p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (n % p == 0) return n == p;
    }
    u64 d = n - 1;
    int s = 0;
    while ((d & 1) == 0) { d >>= 1; ++s; }
    // Deterministic base set for the full 64-bit range.
    for (u64 a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        u64 x = powmod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool witness = true;
        for (int r = 1; r < s; ++r) {
            x = mulmod(x, x, n);
            if (x == n - 1) { witness = false; break; }
        }
        if (witness) return false;
    }
    return true;
}

int Factorization::liouville() const {
    u64 omega_total = 0;
    for (auto& [p, e] : prime_powers) omega_total += e;
    return (omega_total & 1) ? -1 : +1;
}

int Factorization::moebius() const {
    for (auto& [p, e] : prime_powers)
        if (e >= 2) return 0;
    return (prime_powers.size() & 1) ? -1 : +1;
}

Factorization factor_oracle(u64 n) {
    if (n == 0) throw parameter_error("factor_oracle: n must be >= 1");
    Factorization f;
    f.n = n;
    u64 m = n;
    auto strip = [&](u64 p) {
        u32 e = 0;
        while (m % p == 0) { m /= p; ++e; }
        if (e) f.prime_powers.emplace_back(p, e);
    };
    strip(2);
    strip(3);
    strip(5);
    // mod-30 wheel from 7; Miller-Rabin short-circuits large prime cofactors.
    static constexpr u32 steps[8] = {4, 2, 4, 2, 4, 6, 2, 6};
    u64 d = 7;
    int w = 0;
    while (m > 1) {
        if ((u128)d * d > m || is_prime_u64(m)) { strip(m); break; }
        strip(d);
        d += steps[w];
        w = (w + 1) & 7;
    }
    return f;
}

SieveSegment sieve_range(u64 start, u64 len, u64 w) {
    if (start < 1) throw parameter_error("sieve: start must be >= 1");
    if (len < 1) throw parameter_error("sieve: len must be >= 1");
    u64 end = checked_add(start, len);

    SieveSegment seg;
    seg.start_ = start;
    seg.len_ = len;
    seg.w_ = w;
    seg.lambda_words_.assign((len + 63) / 64, 0);
    seg.mu_words_.assign((2 * len + 63) / 64, 0);
    if (w != 0) seg.sf_words_.assign((len + 63) / 64, 0);

    const u64 root = isqrt_u64(end - 1);
    const std::vector<u32> primes = primes_up_to(root);

    std::vector<u64> rem;
    std::vector<u32> omega;
    std::vector<u8> sqfree;       // globally squarefree
    std::vector<u8> sqfree_w;     // no p^2 | n for p <= w

    for (u64 blo = start; blo < end; blo += kBlock) {
        const u64 bhi = std::min(end, blo + kBlock);
        const u64 blen = bhi - blo;
        rem.resize(blen);
        omega.assign(blen, 0);
        sqfree.assign(blen, 1);
        if (w != 0) sqfree_w.assign(blen, 1);
        for (u64 i = 0; i < blen; ++i) rem[i] = blo + i;

        for (u32 p : primes) {
            u64 first = ((blo + p - 1) / p) * p;
            for (u64 m = first; m < bhi; m += p) {
                u64 i = m - blo;
                u32 e = 0;
                while (rem[i] % p == 0) { rem[i] /= p; ++e; }
                omega[i] += e;
                if (e >= 2) {
                    sqfree[i] = 0;
                    if (w != 0 && p <= w) sqfree_w[i] = 0;
                }
            }
        }

        for (u64 i = 0; i < blen; ++i) {
            u32 om = omega[i] + (rem[i] > 1 ? 1 : 0);  // leftover prime > sqrt(end)
            const u64 gi = (blo - start) + i;
            if (om & 1) set_bit(seg.lambda_words_, gi);
            if (sqfree[i]) {
                set_bit(seg.mu_words_, 2 * gi);                  // mu^2 = 1
                if (om & 1) set_bit(seg.mu_words_, 2 * gi + 1);  // sign
            }
            if (w != 0 && sqfree_w[i]) set_bit(seg.sf_words_, gi);
        }
    }
    return seg;
}

SieveSegment sieve_lambda(u64 start, u64 len) { return sieve_range(start, len, 0); }

SieveSegment sieve_mu(u64 start, u64 len) { return sieve_range(start, len, 0); }

SieveSegment sieve_squarefree_w(u64 start, u64 len, u64 w) {
    if (w < 2) throw parameter_error("sieve_squarefree_w: w must be >= 2");
    return sieve_range(start, len, w);
}

namespace {

void put_u64le(std::ostream& out, u64 v) {
    char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    out.write(b, 8);
}

u64 get_u64le(std::istream& in) {
    unsigned char b[8];
    in.read(reinterpret_cast<char*>(b), 8);
    if (!in) throw io_failure("segment cache: truncated");
    u64 v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<u64>(b[i]) << (8 * i);
    return v;
}

void put_words(std::ostream& out, const std::vector<u64>& words) {
    for (u64 wd : words) put_u64le(out, wd);
}

void get_words(std::istream& in, std::vector<u64>& words, u64 count) {
    words.resize(count);
    for (u64 i = 0; i < count; ++i) words[i] = get_u64le(in);
}

}  // namespace

void write_segment_cache(const SieveSegment& seg, std::ostream& out) {
    out.write("LMSG", 4);
    out.put(1);
    put_u64le(out, seg.start());
    put_u64le(out, seg.len());
    put_u64le(out, seg.w());
    put_words(out, seg.lambda_words());
    put_words(out, seg.mu_words());
    if (seg.has_squarefree_w()) put_words(out, seg.squarefree_words());
}

SieveSegment read_segment_cache(std::istream& in) {
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "LMSG", 4) != 0)
        throw io_failure("segment cache: bad magic");
    int version = in.get();
    if (version != 1) throw io_failure("segment cache: unsupported version");
    SieveSegment seg;
    seg.start_ = get_u64le(in);
    seg.len_ = get_u64le(in);
    seg.w_ = get_u64le(in);
    if (seg.start_ < 1 || seg.len_ < 1) throw io_failure("segment cache: bad header");
    checked_add(seg.start_, seg.len_);
    get_words(in, seg.lambda_words_, (seg.len_ + 63) / 64);
    get_words(in, seg.mu_words_, (2 * seg.len_ + 63) / 64);
    if (seg.w_ != 0) get_words(in, seg.sf_words_, (seg.len_ + 63) / 64);
    return seg;
}

void write_segment_cache_file(const SieveSegment& seg, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_failure("cannot open cache file for writing: " + path);
    write_segment_cache(seg, out);
    if (!out) throw io_failure("cache write failed: " + path);
}

SieveSegment read_segment_cache_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_failure("cannot open cache file: " + path);
    return read_segment_cache(in);
}

u64 fnv1a_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_failure("cannot open file for checksum: " + path);
    u64 h = 0xcbf29ce484222325ULL;
    char buf[4096];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<u8>(buf[i]);
            h *= 0x100000001b3ULL;
        }
        if (!in) break;
    }
    return h;
}

}  // namespace lmlab
