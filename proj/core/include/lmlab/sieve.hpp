#pragma once

// Segmented sieves for the Liouville function lambda(n) = (-1)^Omega(n), the
// Moebius function mu(n), and the w-truncated squarefree indicator
// (1 exactly when no prime p <= w has p^2 | n).  Segments are bit-packed:
// lambda 1 bit/integer, mu 2 bits/integer, little-endian within 64-bit words.
//
// A trial-division factorization oracle (with a deterministic 64-bit
// Miller-Rabin primality test) lives here too; tests use it as the
// independent route to lambda/mu values.

#include <iosfwd>
#include <vector>

#include "lmlab/common.hpp"

namespace lmlab {

// Primes <= limit, increasing.  Plain Eratosthenes; limit is a byte count in
// memory, callers keep it desk-scale (<= ~10^9).
std::vector<u32> primes_up_to(u64 limit);

// Deterministic for all 64-bit n (Miller-Rabin, 12 fixed bases).
bool is_prime_u64(u64 n);

struct Factorization {
    u64 n = 1;
    // (prime, exponent), primes strictly increasing, exponents >= 1.
    std::vector<std::pair<u64, u32>> prime_powers;

    int liouville() const;  // (-1)^Omega(n)
    int moebius() const;    // 0 if any exponent >= 2, else (-1)^omega(n)
};

// Complete factorization by trial division (mod-30 wheel) with a
// Miller-Rabin early exit on the remaining cofactor.  n = 0 is rejected.
Factorization factor_oracle(u64 n);

// Values of lambda/mu (and optionally the w-truncated squarefree indicator)
// over [start, start + len).
//
// Packing:
//   lambda: bit 0 -> +1, bit 1 -> -1
//   mu:     2 bits, bit0 = squarefree flag (mu^2), bit1 = sign (1 -> -1);
//           mu = 0 encodes as 00, +1 as 01, -1 as 11
//   squarefree_w: bit 1 -> no p <= w has p^2 | n
class SieveSegment {
public:
    SieveSegment() = default;

    u64 start() const { return start_; }
    u64 len() const { return len_; }
    u64 end() const { return start_ + len_; }  // exclusive
    bool contains(u64 n) const { return n >= start_ && n < end(); }

    int lambda(u64 n) const {
        u64 i = index(n);
        return (lambda_words_[i >> 6] >> (i & 63)) & 1 ? -1 : +1;
    }
    int mu(u64 n) const {
        u64 i = index(n) * 2;
        u64 bits = (mu_words_[i >> 6] >> (i & 63)) & 3;
        if (!(bits & 1)) return 0;
        return (bits & 2) ? -1 : +1;
    }
    bool mu_squared(u64 n) const {
        u64 i = index(n) * 2;
        return (mu_words_[i >> 6] >> (i & 63)) & 1;
    }

    bool has_squarefree_w() const { return w_ != 0; }
    u64 w() const { return w_; }
    bool squarefree_w(u64 n) const {
        if (!has_squarefree_w()) throw parameter_error("segment has no squarefree_w plane");
        u64 i = index(n);
        return (sf_words_[i >> 6] >> (i & 63)) & 1;
    }

    const std::vector<u64>& lambda_words() const { return lambda_words_; }
    const std::vector<u64>& mu_words() const { return mu_words_; }
    const std::vector<u64>& squarefree_words() const { return sf_words_; }

    bool operator==(const SieveSegment&) const = default;

private:
    friend SieveSegment sieve_range(u64 start, u64 len, u64 w);
    friend SieveSegment read_segment_cache(std::istream& in);

    u64 index(u64 n) const {
        if (!contains(n)) throw parameter_error("n outside sieve segment");
        return n - start_;
    }

    u64 start_ = 1;
    u64 len_ = 0;
    u64 w_ = 0;
    std::vector<u64> lambda_words_;
    std::vector<u64> mu_words_;
    std::vector<u64> sf_words_;
};

// One pass computes lambda and mu together (they share the factor counts);
// w != 0 additionally fills the truncated squarefree plane.
SieveSegment sieve_range(u64 start, u64 len, u64 w);

SieveSegment sieve_lambda(u64 start, u64 len);
SieveSegment sieve_mu(u64 start, u64 len);
SieveSegment sieve_squarefree_w(u64 start, u64 len, u64 w);  // requires w >= 2

// Binary segment cache.  Layout (all integers little-endian):
//   bytes 0..3   magic "LMSG"
//   byte  4      version (1)
//   bytes 5..12  start
//   bytes 13..20 len
//   bytes 21..28 w (0 if the squarefree plane is absent)
//   then the packed planes in order: lambda, mu, squarefree_w (if w != 0),
//   each as ceil(bits/64) 64-bit words.
void write_segment_cache(const SieveSegment& seg, std::ostream& out);
SieveSegment read_segment_cache(std::istream& in);
void write_segment_cache_file(const SieveSegment& seg, const std::string& path);
SieveSegment read_segment_cache_file(const std::string& path);

// FNV-1a over a file's bytes; manifests record cache checksums with this.
u64 fnv1a_file(const std::string& path);

}  // namespace lmlab
