#include "lmlab/random_graph.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <mutex>
#include <unordered_map>
#include <unordered_set>

namespace lmlab {

namespace {

// Trials share one prime table per bound.
std::shared_ptr<const std::vector<u32>> shared_primes(u64 P) {
    static std::mutex mu;
    static std::map<u64, std::shared_ptr<const std::vector<u32>>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(P);
    if (it != cache.end()) return it->second;
    auto ptr = std::make_shared<const std::vector<u32>>(primes_up_to(P));
    if (cache.size() > 16) cache.clear();
    cache.emplace(P, ptr);
    return ptr;
}

size_t count_upto(const std::vector<u32>& primes, u64 bound) {
    return static_cast<size_t>(
        std::upper_bound(primes.begin(), primes.end(), bound) - primes.begin());
}

}  // namespace

ProfiniteSample ProfiniteSample::draw(u64 P, u64 w, u64 seed, u64 trial) {
    if (w > P) throw parameter_error("profinite sample: w must be <= P");
    ProfiniteSample s;
    s.prime_bound_ = P;
    s.square_bound_ = w;
    s.seed_ = seed;
    s.trial_ = trial;
    s.primes_ = shared_primes(P);
    const auto& primes = *s.primes_;
    s.n_square_ = count_upto(primes, w);
    s.residues_.resize(primes.size());
    s.square_residues_.resize(s.n_square_);
    for (size_t i = 0; i < primes.size(); ++i) {
        const u64 p = primes[i];
        if (i < s.n_square_) {
            // Drawing mod p^2 first keeps the inverse system consistent.
            u64 sq = stream_below(seed, make_stream(StreamKind::residue_mod_p2, trial, p), p * p);
            s.square_residues_[i] = sq;
            s.residues_[i] = sq % p;
        } else {
            s.residues_[i] = stream_below(seed, make_stream(StreamKind::residue_mod_p, trial, p), p);
        }
    }
    return s;
}

ProfiniteSample ProfiniteSample::from_integer(u64 n0, u64 P, u64 w) {
    if (w > P) throw parameter_error("profinite sample: w must be <= P");
    if (n0 < 1) throw parameter_error("profinite sample: n0 must be >= 1");
    ProfiniteSample s;
    s.prime_bound_ = P;
    s.square_bound_ = w;
    s.integer_mode_ = true;
    s.n0_ = n0;
    s.primes_ = shared_primes(P);
    const auto& primes = *s.primes_;
    s.n_square_ = count_upto(primes, w);
    s.residues_.resize(primes.size());
    s.square_residues_.resize(s.n_square_);
    for (size_t i = 0; i < primes.size(); ++i) {
        const u64 p = primes[i];
        s.residues_[i] = n0 % p;
        if (i < s.n_square_) s.square_residues_[i] = n0 % (p * p);
    }
    return s;
}

u64 ProfiniteSample::residue_mod(u32 p) const {
    const auto& primes = *primes_;
    auto it = std::lower_bound(primes.begin(), primes.end(), p);
    if (it == primes.end() || *it != p)
        throw parameter_error("prime " + std::to_string(p) + " not sampled (P too small)");
    return residues_[static_cast<size_t>(it - primes.begin())];
}

u64 ProfiniteSample::residue_mod_sq(u32 p) const {
    const auto& primes = *primes_;
    auto it = std::lower_bound(primes.begin(), primes.end(), p);
    size_t i = static_cast<size_t>(it - primes.begin());
    if (it == primes.end() || *it != p || i >= n_square_)
        throw parameter_error("prime " + std::to_string(p) + " has no square residue (w too small)");
    return square_residues_[i];
}

bool ProfiniteSample::vertex_truncated(i64 shift) const {
    const auto& primes = *primes_;
    for (size_t i = 0; i < n_square_; ++i) {
        const u64 p2 = static_cast<u64>(primes[i]) * primes[i];
        if (mod_floor(static_cast<i64>(square_residues_[i]) + shift, p2) == 0) return false;
    }
    return true;
}

bool ProfiniteSample::divides_shifted(u32 q, i64 shift) const {
    return mod_floor(static_cast<i64>(residue_mod(q)) + shift, q) == 0;
}

std::vector<i64> GraphWindow::vertices() const {
    std::vector<i64> out;
    out.reserve(vertex_count_);
    for (i64 a = lo_; a <= hi_; ++a)
        if (vertex_[static_cast<size_t>(a - lo_)]) out.push_back(a);
    return out;
}

const std::vector<std::pair<i64, u32>>& GraphWindow::neighbors(i64 a) const {
    static const std::vector<std::pair<i64, u32>> kEmpty;
    if (!is_vertex(a)) return kEmpty;
    return adj_[static_cast<size_t>(a - lo_)];
}

std::vector<GraphWindow::Edge> GraphWindow::edges() const {
    std::vector<Edge> out;
    out.reserve(edge_count_);
    for (i64 a = lo_; a <= hi_; ++a)
        for (auto& [b, q] : neighbors(a))
            if (a < b) out.push_back({a, b, q});
    return out;
}

GraphWindow build_graph(const ProfiniteSample& sample, i64 lo, i64 hi, VertexRule rule) {
    if (lo > hi) throw parameter_error("build_graph: empty window");
    const u64 diameter = static_cast<u64>(hi - lo);
    if (sample.prime_bound() < diameter)
        throw parameter_error("build_graph: P smaller than window diameter, edges undecidable");

    GraphWindow g;
    g.lo_ = lo;
    g.hi_ = hi;
    const u64 width = g.width();
    g.vertex_.assign(width, 0);
    g.adj_.assign(width, {});

    if (rule == VertexRule::exact) {
        if (!sample.integer_mode())
            throw parameter_error("build_graph: exact vertex rule needs integer mode");
        const i64 first = static_cast<i64>(sample.n0()) + lo;
        if (first < 1) throw parameter_error("build_graph: n0 + window leaves positive range");
        SieveSegment seg = sieve_range(static_cast<u64>(first), width, 0);
        for (u64 i = 0; i < width; ++i)
            g.vertex_[i] = seg.mu_squared(static_cast<u64>(first) + i) ? 1 : 0;
    } else {
        for (u64 i = 0; i < width; ++i)
            g.vertex_[i] = sample.vertex_truncated(lo + static_cast<i64>(i)) ? 1 : 0;
    }
    for (u8 v : g.vertex_) g.vertex_count_ += v;

    // For each odd prime gap q, the admissible a form one residue class
    // mod q (q | n + a, and then automatically q | n + a + q).
    const auto& primes = sample.primes();
    for (size_t i = 0; i < primes.size(); ++i) {
        const u32 q = primes[i];
        if (q == 2) continue;
        if (static_cast<u64>(q) > diameter) break;
        const u64 r = sample.residue_by_index(i);
        // smallest a >= lo with a = -r (mod q)
        i64 a = lo + static_cast<i64>(mod_floor(-static_cast<i64>(r) - lo, q));
        for (; a + q <= hi; a += q) {
            const size_t ia = static_cast<size_t>(a - lo);
            const size_t ib = ia + q;
            if (g.vertex_[ia] && g.vertex_[ib]) {
                g.adj_[ia].emplace_back(a + q, q);
                g.adj_[ib].emplace_back(a, q);
                ++g.edge_count_;
            }
        }
    }
    return g;
}

Components::Components(const GraphWindow& graph) : graph_(&graph) {
    const u64 width = graph.width();
    std::vector<u32> parent(width);
    for (u64 i = 0; i < width; ++i) parent[i] = static_cast<u32>(i);
    std::function<u32(u32)> find = [&](u32 x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    for (i64 a = graph.lo(); a <= graph.hi(); ++a) {
        for (auto& [b, q] : graph.neighbors(a)) {
            (void)q;
            u32 ra = find(static_cast<u32>(a - graph.lo()));
            u32 rb = find(static_cast<u32>(b - graph.lo()));
            if (ra != rb) parent[ra] = rb;
        }
    }
    label_.assign(width, 0);
    std::unordered_map<u32, u32> relabel;
    for (i64 a = graph.lo(); a <= graph.hi(); ++a) {
        if (!graph.is_vertex(a)) continue;
        u32 root = find(static_cast<u32>(a - graph.lo()));
        auto [it, inserted] = relabel.emplace(root, static_cast<u32>(relabel.size()));
        label_[static_cast<size_t>(a - graph.lo())] = it->second;
    }
    component_count_ = relabel.size();
}

Components::Link Components::connected(i64 a, i64 b) const {
    if (!graph_->is_vertex(a) || !graph_->is_vertex(b)) return Link::absent;
    return label_[static_cast<size_t>(a - graph_->lo())] ==
                   label_[static_cast<size_t>(b - graph_->lo())]
               ? Link::connected
               : Link::disconnected;
}

std::vector<u64> Components::component_sizes() const {
    std::vector<u64> sizes(component_count_, 0);
    for (i64 a = graph_->lo(); a <= graph_->hi(); ++a)
        if (graph_->is_vertex(a)) ++sizes[label_[static_cast<size_t>(a - graph_->lo())]];
    std::sort(sizes.rbegin(), sizes.rend());
    return sizes;
}

std::optional<GraphPath> bfs_path(const GraphWindow& graph, i64 a, i64 b) {
    if (!graph.is_vertex(a) || !graph.is_vertex(b)) return std::nullopt;
    const u64 width = graph.width();
    std::vector<i64> prev(width, std::numeric_limits<i64>::min());
    std::deque<i64> queue{a};
    prev[static_cast<size_t>(a - graph.lo())] = a;
    while (!queue.empty()) {
        i64 cur = queue.front();
        queue.pop_front();
        if (cur == b) break;
        for (auto& [next, q] : graph.neighbors(cur)) {
            (void)q;
            auto& slot = prev[static_cast<size_t>(next - graph.lo())];
            if (slot == std::numeric_limits<i64>::min()) {
                slot = cur;
                queue.push_back(next);
            }
        }
    }
    if (prev[static_cast<size_t>(b - graph.lo())] == std::numeric_limits<i64>::min())
        return std::nullopt;

    GraphPath path;
    for (i64 v = b;; v = prev[static_cast<size_t>(v - graph.lo())]) {
        path.vertices.push_back(v);
        if (v == a) break;
    }
    std::reverse(path.vertices.begin(), path.vertices.end());
    path.length = path.vertices.size() - 1;
    for (i64 v : path.vertices)
        path.max_abs_coordinate =
            std::max<u64>(path.max_abs_coordinate, static_cast<u64>(v < 0 ? -v : v));
    return path;
}

double edge_probability_test(i64 a, i64 b, u64 trials, u64 seed) {
    const u64 gap = static_cast<u64>(a < b ? b - a : a - b);
    if (gap < 3 || gap % 2 == 0 || !is_prime_u64(gap))
        throw parameter_error("edge_probability_test: |a - b| must be an odd prime");
    if (trials == 0) throw parameter_error("edge_probability_test: trials must be >= 1");
    const u32 q = static_cast<u32>(gap);
    u64 hits = 0;
    for (u64 t = 0; t < trials; ++t) {
        u64 r = stream_below(seed, make_stream(StreamKind::residue_mod_p, t, q), q);
        if (mod_floor(static_cast<i64>(r) + a, q) == 0) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(trials);
}

CrtIndependence crt_edge_independence(u32 q1, u32 q2, i64 a1, i64 a2) {
    if (q1 == q2) throw parameter_error("crt_edge_independence: gaps must be distinct");
    if (!is_prime_u64(q1) || !is_prime_u64(q2) || q1 == 2 || q2 == 2)
        throw parameter_error("crt_edge_independence: gaps must be odd primes");
    CrtIndependence out;
    out.modulus = static_cast<u64>(q1) * q2;
    for (u64 n = 0; n < out.modulus; ++n) {
        bool e1 = mod_floor(static_cast<i64>(n) + a1, q1) == 0;
        bool e2 = mod_floor(static_cast<i64>(n) + a2, q2) == 0;
        out.first += e1;
        out.second += e2;
        out.joint += e1 && e2;
    }
    return out;
}

std::vector<std::array<u64, 3>> prime_triples(u64 X, i64 m, size_t limit) {
    if (X < 1) throw parameter_error("prime_triples: X must be >= 1");
    std::vector<std::array<u64, 3>> out;
    auto all = primes_up_to(7 * X);
    auto in_range = [&](u64 lo, u64 hi) {
        std::vector<u64> v;
        for (u32 p : all)
            if (p > lo && p <= hi) v.push_back(p);
        return v;
    };
    auto i1 = in_range(X, 3 * X);
    auto i3 = in_range(3 * X, 5 * X);
    std::vector<u8> is_p2(2 * X + 1, 0);  // offset over (5X, 7X]
    for (u32 p : all)
        if (p > 5 * X && p <= 7 * X) is_p2[p - 5 * X - 1] = 1;
    for (u64 p1 : i1) {
        for (u64 p3 : i3) {
            i64 p2 = m + static_cast<i64>(p1) + static_cast<i64>(p3);
            if (p2 <= static_cast<i64>(5 * X) || p2 > static_cast<i64>(7 * X)) continue;
            if (!is_p2[static_cast<u64>(p2) - 5 * X - 1]) continue;
            out.push_back({p1, static_cast<u64>(p2), p3});
            if (out.size() >= limit) return out;
        }
    }
    return out;
}

ThreeHopResult three_hop_search(const ProfiniteSample& sample, const std::vector<i64>& A,
                                const std::vector<i64>& B, u64 X) {
    ThreeHopResult res;
    if (A.empty() || B.empty()) {
        res.vacuous = true;
        return res;
    }
    for (i64 a : A)
        if (a < 0 || a > static_cast<i64>(X) || (a & 1) == 0)
            throw parameter_error("three_hop_search: A must be odd integers in [0, X]");
    for (i64 b : B)
        if (b < 0 || b > static_cast<i64>(X) || (b & 1) != 0)
            throw parameter_error("three_hop_search: B must be even integers in [0, X]");
    if (sample.prime_bound() < 7 * X)
        throw parameter_error("three_hop_search: need P >= 7X");

    const auto& primes = sample.primes();
    auto slice = [&](u64 lo, u64 hi) {
        auto first = std::upper_bound(primes.begin(), primes.end(), lo);
        auto last = std::upper_bound(primes.begin(), primes.end(), hi);
        return std::pair(first, last);
    };
    auto [i1_begin, i1_end] = slice(X, 3 * X);
    auto [i2_begin, i2_end] = slice(5 * X, 7 * X);
    auto [i3_begin, i3_end] = slice(3 * X, 5 * X);

    std::unordered_set<i64> b_set(B.begin(), B.end());

    auto validate = [&](i64 a, u64 p1, u64 p2, u64 p3, i64 b) {
        const i64 v1 = a - static_cast<i64>(p1);
        const i64 v2 = v1 + static_cast<i64>(p2);
        bool ok = b == v2 - static_cast<i64>(p3) && sample.vertex_truncated(a) &&
                  sample.vertex_truncated(v1) && sample.vertex_truncated(v2) &&
                  sample.vertex_truncated(b) && sample.divides_shifted(static_cast<u32>(p1), a) &&
                  sample.divides_shifted(static_cast<u32>(p2), v1) &&
                  sample.divides_shifted(static_cast<u32>(p3), v2);
        if (!ok) throw std::logic_error("three_hop_search: path failed re-validation");
    };

    for (i64 a : A) {
        if (!sample.vertex_truncated(a)) continue;
        for (auto it1 = i1_begin; it1 != i1_end; ++it1) {
            const u32 p1 = *it1;
            if (!sample.divides_shifted(p1, a)) continue;
            const i64 v1 = a - static_cast<i64>(p1);
            if (!sample.vertex_truncated(v1)) continue;
            for (auto it2 = i2_begin; it2 != i2_end; ++it2) {
                const u32 p2 = *it2;
                if (!sample.divides_shifted(p2, v1)) continue;
                const i64 v2 = v1 + static_cast<i64>(p2);
                if (!sample.vertex_truncated(v2)) continue;
                for (auto it3 = i3_begin; it3 != i3_end; ++it3) {
                    const u32 p3 = *it3;
                    if (!sample.divides_shifted(p3, v2)) continue;
                    const i64 b = v2 - static_cast<i64>(p3);
                    if (!b_set.count(b) || !sample.vertex_truncated(b)) continue;
                    validate(a, p1, p2, p3, b);
                    res.path = {a, v1, v2, b};
                    res.gap_primes = {p1, p2, p3};
                    return res;
                }
            }
        }
    }
    return res;
}

namespace {

struct IntervalPrimes {
    std::vector<u32>::const_iterator begin, end;
};

IntervalPrimes odd_primes_in(const ProfiniteSample& sample, u64 imin, u64 imax) {
    if (imax > sample.prime_bound())
        throw parameter_error("prime interval exceeds sampled bound P");
    const auto& primes = sample.primes();
    auto first = std::lower_bound(primes.begin(), primes.end(), std::max<u64>(imin, 3));
    auto last = std::upper_bound(primes.begin(), primes.end(), imax);
    if (first > last) first = last;
    return {first, last};
}

}  // namespace

std::optional<mpq_class> step_normalizer(const ProfiniteSample& sample, u64 imin, u64 imax,
                                         i64 position) {
    auto [first, last] = odd_primes_in(sample, imin, imax);
    std::vector<u32> admissible;
    for (auto it = first; it != last; ++it)
        if (sample.vertex_truncated(position + static_cast<i64>(*it))) admissible.push_back(*it);
    if (admissible.empty()) return std::nullopt;
    // sum 1/p = (sum_i prod_{j != i} p_j) / prod_j p_j, built without
    // intermediate gcd passes.
    mpz_class denom = 1;
    for (u32 p : admissible) denom *= p;
    mpz_class numer = 0;
    for (u32 p : admissible) numer += denom / p;
    mpq_class q(numer, denom);
    q.canonicalize();
    return q;
}

double step_normalizer_approx(const ProfiniteSample& sample, u64 imin, u64 imax,
                              i64 position) {
    auto [first, last] = odd_primes_in(sample, imin, imax);
    double sum = 0.0;
    for (auto it = first; it != last; ++it)
        if (sample.vertex_truncated(position + static_cast<i64>(*it)))
            sum += 1.0 / static_cast<double>(*it);
    return sum;
}

EnsembleStats path_ensemble_stats(const ProfiniteSample& sample,
                                  const PathEnsembleParams& params, i64 start) {
    if (params.k < 1 || params.k % 2 == 0)
        throw parameter_error("path ensemble: k must be odd and >= 1");
    auto [first, last] = odd_primes_in(sample, params.imin, params.imax);
    if (static_cast<u64>(last - first) < params.k)
        throw parameter_error("path ensemble: interval holds fewer than k odd primes");

    EnsembleStats stats;
    stats.s1_exact = 0;
    stats.collision_exact = 0;
    stats.start_in_vertex_set = sample.vertex_truncated(start);
    if (!stats.start_in_vertex_set) return stats;

    std::map<i64, std::optional<mpq_class>> normalizer_cache;
    auto normalizer = [&](i64 pos) -> const std::optional<mpq_class>& {
        auto it = normalizer_cache.find(pos);
        if (it == normalizer_cache.end())
            it = normalizer_cache.emplace(pos, step_normalizer(sample, params.imin, params.imax, pos))
                     .first;
        return it->second;
    };

    std::map<i64, mpq_class> endpoint_weight;
    std::map<i64, u64> endpoint_count;
    std::vector<u32> used;

    // DFS over realized prefixes only: a step needs p | n + position, which
    // thins the branching to ~sum 1/p.
    std::function<void(u64, i64, const mpq_class&)> descend = [&](u64 depth, i64 position,
                                                                  const mpq_class& weight) {
        if (depth == params.k) {
            ++stats.realized_paths;
            stats.s1_exact += weight;
            endpoint_weight[position] += weight;
            ++endpoint_count[position];
            return;
        }
        const auto& d = normalizer(position);
        if (!d) return;  // no admissible continuation anywhere below this node
        mpq_class step = weight / *d;
        for (auto it = first; it != last; ++it) {
            const u32 p = *it;
            if (!sample.divides_shifted(p, position)) continue;
            if (!sample.vertex_truncated(position + static_cast<i64>(p))) continue;
            if (std::find(used.begin(), used.end(), p) != used.end()) continue;
            used.push_back(p);
            descend(depth + 1, position + static_cast<i64>(p), step);
            used.pop_back();
        }
    };
    descend(0, start, mpq_class(1));

    for (auto& [endpoint, wsum] : endpoint_weight) {
        stats.collision_exact += wsum * wsum;
        stats.endpoint_counts.emplace_back(endpoint, endpoint_count[endpoint]);
    }
    stats.distinct_endpoints = endpoint_weight.size();
    stats.s1 = stats.s1_exact.get_d();
    stats.collision = stats.collision_exact.get_d();
    return stats;
}

mpq_class one_step_expected_s1(const ProfiniteSample& sample, u64 imin, u64 imax,
                               i64 start) {
    if (!sample.vertex_truncated(start)) return mpq_class(0);
    auto d = step_normalizer(sample, imin, imax, start);
    if (!d) return mpq_class(0);
    auto [first, last] = odd_primes_in(sample, imin, imax);
    mpq_class weight = 1 / *d;
    mpq_class expect = 0;
    for (auto it = first; it != last; ++it) {
        const u32 p = *it;
        if (!sample.vertex_truncated(start + static_cast<i64>(p))) continue;
        expect += weight / p;
    }
    return expect;
}

}  // namespace lmlab
