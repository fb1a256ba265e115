#pragma once

// Monte-Carlo machinery for the random graph on squarefree shifts.
//
// A profinite integer is sampled as independent uniform residues mod p for
// primes p <= P, refined to residues mod p^2 for p <= w (the mod-p^2 draw is
// made first and reduced, so the inverse system stays consistent).  Vertices
// of a window graph are the shifts a with no p <= w dividing n + a twice;
// two vertices a != b are joined when |a - b| is an odd prime q with
// q | n + a.  Draws are counter-based per (trial, prime), so a master seed
// fixes every sample independently of thread scheduling.
//
// Integer mode plants a concrete n0 instead: residues are computed, and the
// exact squarefree vertex rule (every prime, not just p <= w) becomes
// available by sieving n0 + window.

#include <gmpxx.h>

#include <array>
#include <memory>
#include <optional>

#include "lmlab/rng.hpp"
#include "lmlab/sieve.hpp"

namespace lmlab {

class ProfiniteSample {
public:
    // Uniform residues; square residues for p <= w, plain residues for p <= P.
    static ProfiniteSample draw(u64 P, u64 w, u64 seed, u64 trial = 0);
    // Residues of the concrete integer n0.
    static ProfiniteSample from_integer(u64 n0, u64 P, u64 w);

    u64 prime_bound() const { return prime_bound_; }
    u64 square_bound() const { return square_bound_; }
    u64 seed() const { return seed_; }
    u64 trial() const { return trial_; }
    bool integer_mode() const { return integer_mode_; }
    u64 n0() const { return n0_; }

    const std::vector<u32>& primes() const { return *primes_; }
    size_t primes_upto_w() const { return n_square_; }

    // n mod p; p must be one of primes().
    u64 residue_mod(u32 p) const;
    u64 residue_mod_sq(u32 p) const;  // n mod p^2; requires p <= w

    u64 residue_by_index(size_t i) const { return residues_[i]; }
    u64 square_residue_by_index(size_t i) const { return square_residues_[i]; }

    // mu^2_w(n + shift): no p <= w with p^2 | n + shift.
    bool vertex_truncated(i64 shift) const;
    // q | n + shift for a sampled prime q.
    bool divides_shifted(u32 q, i64 shift) const;

private:
    u64 prime_bound_ = 0, square_bound_ = 0;
    u64 seed_ = 0, trial_ = 0;
    bool integer_mode_ = false;
    u64 n0_ = 0;
    std::shared_ptr<const std::vector<u32>> primes_;
    size_t n_square_ = 0;
    std::vector<u64> residues_;         // aligned with primes()
    std::vector<u64> square_residues_;  // first n_square_ primes
};

enum class VertexRule {
    truncated,  // mu^2_w via sampled square residues
    exact,      // true mu^2 by sieving n0 + window (integer mode only)
};

class GraphWindow {
public:
    i64 lo() const { return lo_; }
    i64 hi() const { return hi_; }
    u64 width() const { return static_cast<u64>(hi_ - lo_ + 1); }
    bool in_window(i64 a) const { return a >= lo_ && a <= hi_; }
    bool is_vertex(i64 a) const { return in_window(a) && vertex_[static_cast<size_t>(a - lo_)]; }
    u64 vertex_count() const { return vertex_count_; }
    u64 edge_count() const { return edge_count_; }
    std::vector<i64> vertices() const;

    // Neighbors of a as (other endpoint, gap prime); empty for non-vertices.
    const std::vector<std::pair<i64, u32>>& neighbors(i64 a) const;

    struct Edge {
        i64 a, b;  // a < b
        u32 gap;
    };
    std::vector<Edge> edges() const;

private:
    friend GraphWindow build_graph(const ProfiniteSample&, i64, i64, VertexRule);
    i64 lo_ = 0, hi_ = -1;
    u64 vertex_count_ = 0, edge_count_ = 0;
    std::vector<u8> vertex_;
    std::vector<std::vector<std::pair<i64, u32>>> adj_;
};

// Requires P >= window diameter (every candidate gap prime must be sampled).
GraphWindow build_graph(const ProfiniteSample& sample, i64 lo, i64 hi,
                        VertexRule rule = VertexRule::truncated);

// Union-find component labeling with path retrieval.
class Components {
public:
    explicit Components(const GraphWindow& graph);

    enum class Link { absent, disconnected, connected };
    Link connected(i64 a, i64 b) const;
    u64 component_count() const { return component_count_; }
    std::vector<u64> component_sizes() const;  // descending

private:
    const GraphWindow* graph_;
    std::vector<u32> label_;  // per window offset; vertex slots only
    u64 component_count_ = 0;
};

struct GraphPath {
    std::vector<i64> vertices;
    u64 length = 0;              // edges
    u64 max_abs_coordinate = 0;  // max |vertex|
};

// Shortest path by breadth-first search; nullopt when absent or disconnected.
std::optional<GraphPath> bfs_path(const GraphWindow& graph, i64 a, i64 b);

// Empirical P(q | n + a) over fresh samples, q = |a - b| an odd prime.
double edge_probability_test(i64 a, i64 b, u64 trials, u64 seed);

// Exhaustive CRT check over Z/(q1 q2): counts of the two edge-divisibility
// events and their conjunction.  Independence is exact:
// joint * (q1 q2) == first * second.
struct CrtIndependence {
    u64 modulus = 0, first = 0, second = 0, joint = 0;
    bool exact_independent() const { return joint * modulus == first * second; }
};
CrtIndependence crt_edge_independence(u32 q1, u32 q2, i64 a1, i64 a2);

// Prime triples (p1, p2, p3) in (X,3X] x (5X,7X] x (3X,5X] with
// -p1 + p2 - p3 = m; at most `limit` results.
std::vector<std::array<u64, 3>> prime_triples(u64 X, i64 m, size_t limit);

// Path of length 3 from an odd a in A to an even b in B:
// a, a-p1, a-p1+p2, b with the interval, vertex and divisibility conditions.
struct ThreeHopResult {
    bool vacuous = false;  // empty A or B
    std::optional<std::array<i64, 4>> path;
    std::array<u64, 3> gap_primes{0, 0, 0};
};
ThreeHopResult three_hop_search(const ProfiniteSample& sample, const std::vector<i64>& A,
                                const std::vector<i64>& B, u64 X);

// Weighted path ensemble: paths start, start+p1, ..., start+p1+...+pk with
// distinct primes from I = [imin, imax], every partial sum a truncated
// vertex.  Step weights are reciprocals of admissible 1/p sums, kept exact.
struct PathEnsembleParams {
    u64 k = 3;  // odd
    u64 imin = 100;
    u64 imax = 10000;
};

// Sum of 1/p over p in [imin, imax] with position + p a truncated vertex;
// nullopt when no prime is admissible (that branch of the tree is pruned).
std::optional<mpq_class> step_normalizer(const ProfiniteSample& sample, u64 imin, u64 imax,
                                         i64 position);
// Same sum in floating point (for large intervals).
double step_normalizer_approx(const ProfiniteSample& sample, u64 imin, u64 imax,
                              i64 position);

struct EnsembleStats {
    bool start_in_vertex_set = false;
    u64 realized_paths = 0;
    mpq_class s1_exact;         // sum of w_gamma over realized paths
    double s1 = 0.0;
    mpq_class collision_exact;  // sum over endpoint pairs gamma(k) = gamma'(k)
    double collision = 0.0;
    u64 distinct_endpoints = 0;
    std::vector<std::pair<i64, u64>> endpoint_counts;  // sorted by endpoint
};

EnsembleStats path_ensemble_stats(const ProfiniteSample& sample,
                                  const PathEnsembleParams& params, i64 start);

// Exact expectation of S1 over the divisibility randomness for k = 1:
// sum over admissible p of w/p.  Equals 1 whenever some p is admissible.
mpq_class one_step_expected_s1(const ProfiniteSample& sample, u64 imin, u64 imax,
                               i64 start);

}  // namespace lmlab
