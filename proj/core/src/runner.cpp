#include "lmlab/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>

#include "lmlab/circle_method.hpp"
#include "lmlab/parallel.hpp"
#include "lmlab/pattern.hpp"
#include "lmlab/random_graph.hpp"
#include "lmlab/short_interval.hpp"
#include "lmlab/sieve.hpp"

namespace lmlab {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

u64 need_u64(const json& p, const std::string& key) {
    if (!p.contains(key)) throw config_error("params." + key, "required");
    if (!p[key].is_number_unsigned()) throw config_error("params." + key, "must be unsigned");
    return p[key].get<u64>();
}

u64 get_u64(const json& p, const std::string& key, u64 def) {
    if (!p.contains(key)) return def;
    if (!p[key].is_number_unsigned()) throw config_error("params." + key, "must be unsigned");
    return p[key].get<u64>();
}

i64 get_i64(const json& p, const std::string& key, i64 def) {
    if (!p.contains(key)) return def;
    if (!p[key].is_number_integer()) throw config_error("params." + key, "must be an integer");
    return p[key].get<i64>();
}

i64 need_i64(const json& p, const std::string& key) {
    if (!p.contains(key)) throw config_error("params." + key, "required");
    if (!p[key].is_number_integer()) throw config_error("params." + key, "must be an integer");
    return p[key].get<i64>();
}

double need_double(const json& p, const std::string& key) {
    if (!p.contains(key)) throw config_error("params." + key, "required");
    if (!p[key].is_number()) throw config_error("params." + key, "must be a number");
    return p[key].get<double>();
}

std::string get_str(const json& p, const std::string& key, const std::string& def) {
    if (!p.contains(key)) return def;
    if (!p[key].is_string()) throw config_error("params." + key, "must be a string");
    return p[key].get<std::string>();
}

std::string resolve_cache_path(const std::string& path) {
    namespace fs = std::filesystem;
    if (fs::path(path).is_absolute()) return path;
    if (const char* dir = std::getenv("LMLAB_CACHE_DIR"))
        return (fs::path(dir) / path).string();
    return path;
}

json estimate_to_json(const DensityEstimate& e) {
    json j;
    j["window_lo"] = e.window_lo;
    j["window_hi"] = e.window_hi;
    j["matches"] = e.matches;
    j["total"] = e.window_total;
    j["frequency"] = e.frequency;
    j["log_frequency"] = e.log_frequency;
    return j;
}

// ---- commands ---------------------------------------------------------

json cmd_sieve(const ExperimentConfig& cfg, RunManifest& manifest) {
    const auto& p = cfg.params;
    const u64 start = need_u64(p, "start");
    const u64 len = need_u64(p, "len");
    const u64 w = get_u64(p, "w", 0);
    if (w == 1) throw config_error("params.w", "w must be 0 (off) or >= 2");

    SieveSegment seg = w >= 2 ? sieve_squarefree_w(start, len, w) : sieve_range(start, len, 0);

    u64 lp = 0, mz = 0, mp = 0, sf = 0;
    for (u64 n = start; n < seg.end(); ++n) {
        if (seg.lambda(n) == +1) ++lp;
        int m = seg.mu(n);
        if (m == 0) ++mz;
        if (m == +1) ++mp;
        if (w >= 2 && seg.squarefree_w(n)) ++sf;
    }
    json out;
    out["command"] = "sieve";
    out["start"] = start;
    out["len"] = len;
    out["w"] = w;
    json counts;
    counts["lambda_plus"] = lp;
    counts["lambda_minus"] = len - lp;
    counts["mu_zero"] = mz;
    counts["mu_plus"] = mp;
    counts["mu_minus"] = len - mz - mp;
    if (w >= 2) counts["squarefree_w"] = sf;
    out["counts"] = counts;

    if (p.contains("cache")) {
        const std::string path = resolve_cache_path(get_str(p, "cache", ""));
        write_segment_cache_file(seg, path);
        char hex[20];
        std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(fnv1a_file(path)));
        out["cache"] = {{"path", path}, {"fnv64", hex}};
        manifest.cache_checksums.emplace_back(path, hex);
    }
    return out;
}

json cmd_pattern(const ExperimentConfig& cfg) {
    const auto& p = cfg.params;
    const SignPattern pattern = SignPattern::parse(get_str(p, "expr", ""));
    const MatchFn fn = match_fn_from_name(get_str(p, "fn", "lambda"));
    std::vector<u64> scales;
    if (p.contains("scales")) {
        if (!p["scales"].is_array()) throw config_error("params.scales", "must be an array");
        for (const auto& s : p["scales"]) {
            if (!s.is_number_unsigned()) throw config_error("params.scales", "entries must be unsigned");
            scales.push_back(s.get<u64>());
        }
    } else {
        scales = default_scale_ladder(need_u64(p, "n"));
    }
    PatternDensityReport rep = pattern_density(pattern, fn, scales, cfg.threads);

    json out;
    out["command"] = "pattern";
    out["pattern"] = pattern.to_string();
    out["fn"] = match_fn_name(fn);
    json js = json::array();
    for (const auto& e : rep.scales) js.push_back(estimate_to_json(e));
    out["scales"] = js;
    out["min_frequency"] = rep.min_frequency;
    out["max_frequency"] = rep.max_frequency;
    out["min_log_frequency"] = rep.min_log_frequency;
    out["max_log_frequency"] = rep.max_log_frequency;
    return out;
}

json cmd_pairs(const ExperimentConfig& cfg) {
    const u64 n = need_u64(cfg.params, "n");
    if (n < 2) throw config_error("params.n", "must be >= 2");
    PairTable t = mobius_pair_table(n, cfg.threads);
    json out;
    out["command"] = "pairs";
    out["n"] = n;
    json table = json::array();
    for (int a = -1; a <= 1; ++a)
        for (int b = -1; b <= 1; ++b) {
            json row;
            row["a"] = a;
            row["b"] = b;
            row["count"] = t.count(a, b);
            row["frequency"] = t.freq(a, b);
            table.push_back(row);
        }
    out["table"] = table;
    double sq_first = 0, sq_pair = 0;
    for (int a = -1; a <= 1; a += 2) {
        for (int b = -1; b <= 1; ++b) sq_first += t.freq(a, b);
        for (int b = -1; b <= 1; b += 2) sq_pair += t.freq(a, b);
    }
    out["musq_density"] = sq_first;
    out["musq_pair_density"] = sq_pair;
    return out;
}

json cmd_interval(const ExperimentConfig& cfg) {
    const auto& p = cfg.params;
    const BaseFn fn = base_fn_from_name(get_str(p, "fn", "lambda"));
    const TwistSpec twist = TwistSpec::parse(get_str(p, "twist", "none"));
    const u64 h = need_u64(p, "h");
    u64 lo = get_u64(p, "lo", 1);
    u64 hi = p.contains("hi") ? need_u64(p, "hi") : need_u64(p, "n");
    DiscrepancyProfile prof = interval_profile(fn, twist, h, lo, hi, cfg.threads);

    json out;
    out["command"] = "interval";
    out["fn"] = base_fn_name(fn);
    out["twist"] = twist.name();
    out["h"] = h;
    out["window"] = {lo, hi};
    out["mean_abs"] = prof.mean_abs;
    out["quantiles"] = {{"q50", prof.q50}, {"q90", prof.q90}, {"q99", prof.q99}};
    out["exceed"] = {{"0.05", prof.exceed[0]}, {"0.1", prof.exceed[1]}, {"0.2", prof.exceed[2]}};
    return out;
}

json cmd_rundensity(const ExperimentConfig& cfg) {
    const double a = need_double(cfg.params, "a");
    const u64 n = need_u64(cfg.params, "n");
    DensityEstimate est = run_density(a, n);
    json out;
    out["command"] = "rundensity";
    out["a"] = a;
    out["n"] = n;
    out["estimate"] = estimate_to_json(est);
    return out;
}

json graph_trial_record(u64 trial, const ProfiniteSample& sample, i64 lo, i64 hi, u64 x,
                        VertexRule rule, const json* ensemble_params) {
    GraphWindow g = build_graph(sample, lo, hi, rule);
    Components comps(g);
    json rec;
    rec["trial"] = trial;
    rec["vertices"] = g.vertex_count();
    rec["edges"] = g.edge_count();
    rec["components"] = comps.component_count();
    auto sizes = comps.component_sizes();
    rec["largest_component"] = sizes.empty() ? 0 : sizes.front();
    json hist = json::array();
    for (u64 s : sizes) hist.push_back(s);
    rec["component_sizes"] = hist;

    auto link = comps.connected(0, static_cast<i64>(x));
    rec["link_0_X"] = link == Components::Link::connected      ? "connected"
                      : link == Components::Link::disconnected ? "disconnected"
                                                                : "absent";
    if (link == Components::Link::connected) {
        auto path = bfs_path(g, 0, static_cast<i64>(x));
        rec["path_length"] = path->length;
        rec["path_max_abs"] = path->max_abs_coordinate;
    }
    if (ensemble_params) {
        PathEnsembleParams ep;
        ep.k = get_u64(*ensemble_params, "k", 3);
        ep.imin = get_u64(*ensemble_params, "imin", 100);
        ep.imax = get_u64(*ensemble_params, "imax", 10000);
        EnsembleStats st = path_ensemble_stats(sample, ep, 0);
        rec["s1"] = st.s1;
        rec["realized_paths"] = st.realized_paths;
        rec["distinct_endpoints"] = st.distinct_endpoints;
    }
    return rec;
}

json cmd_graph(const ExperimentConfig& cfg) {
    const auto& p = cfg.params;
    const std::string mode = get_str(p, "mode", "profinite");
    if (mode != "profinite" && mode != "integer")
        throw config_error("params.mode", "expected profinite|integer");
    const u64 x = need_u64(p, "x");
    const u64 w = get_u64(p, "w", 50);
    const i64 lo = get_i64(p, "window_lo", 0);
    const i64 hi = get_i64(p, "window_hi", static_cast<i64>(2 * x));
    if (lo > hi) throw config_error("params.window_hi", "window empty");
    const u64 diameter = static_cast<u64>(hi - lo);
    const json* ens = p.contains("ensemble") ? &p["ensemble"] : nullptr;
    u64 p_auto = std::max(diameter, w);
    if (ens) p_auto = std::max(p_auto, get_u64(*ens, "imax", 10000));
    const u64 P = get_u64(p, "p", p_auto);
    if (P < diameter) throw config_error("params.p", "P below window diameter");
    const u64 trials = get_u64(p, "trials", 1);
    if (trials < 1) throw config_error("params.trials", "must be >= 1");
    VertexRule rule = get_str(p, "vertex_rule", "truncated") == "exact" ? VertexRule::exact
                                                                        : VertexRule::truncated;
    if (mode == "integer" && trials != 1)
        throw config_error("params.trials", "integer mode fixes one n0; use trials = 1");
    if (rule == VertexRule::exact && mode != "integer")
        throw config_error("params.vertex_rule", "exact rule requires integer mode");
    const u64 n0 = mode == "integer" ? need_u64(p, "n0") : 0;

    std::vector<json> records(trials);
    parallel_blocks(trials, 8, cfg.threads, [&](u64, u64 begin, u64 end) {
        for (u64 t = begin; t < end; ++t) {
            ProfiniteSample sample = mode == "integer"
                                         ? ProfiniteSample::from_integer(n0, P, w)
                                         : ProfiniteSample::draw(P, w, *cfg.seed, t);
            records[t] = graph_trial_record(t, sample, lo, hi, x, rule, ens);
        }
    });

    json out;
    out["command"] = "graph";
    out["mode"] = mode;
    out["x"] = x;
    out["w"] = w;
    out["p"] = P;
    out["window"] = {lo, hi};
    out["trials"] = trials;
    if (cfg.seed) out["seed"] = *cfg.seed;
    json recs = json::array();
    u64 conn = 0, disc = 0, absent = 0;
    double vertex_density_sum = 0;
    for (auto& r : records) {
        const std::string link = r["link_0_X"].get<std::string>();
        if (link == "connected") ++conn;
        else if (link == "disconnected") ++disc;
        else ++absent;
        vertex_density_sum +=
            static_cast<double>(r["vertices"].get<u64>()) / static_cast<double>(diameter + 1);
        recs.push_back(std::move(r));
    }
    out["records"] = recs;
    json summary;
    summary["connected"] = conn;
    summary["disconnected"] = disc;
    summary["absent"] = absent;
    summary["vertex_density_mean"] = vertex_density_sum / static_cast<double>(trials);
    if (conn + disc > 0)
        summary["connected_fraction_given_present"] =
            static_cast<double>(conn) / static_cast<double>(conn + disc);
    out["summary"] = summary;
    return out;
}

json cmd_ensemble(const ExperimentConfig& cfg) {
    const auto& p = cfg.params;
    PathEnsembleParams ep;
    ep.k = get_u64(p, "k", 3);
    ep.imin = get_u64(p, "imin", 100);
    ep.imax = get_u64(p, "imax", 10000);
    const u64 w = get_u64(p, "w", 50);
    const u64 P = get_u64(p, "p", std::max(ep.imax, w));
    const i64 start = get_i64(p, "start", 0);
    const u64 trials = get_u64(p, "trials", 1000);
    if (trials < 1) throw config_error("params.trials", "must be >= 1");

    // Trials are conditioned on the start vertex lying in the truncated
    // vertex set; attempts that miss are recorded only in the attempt count.
    std::vector<json> records;
    records.reserve(trials);
    u64 attempt = 0;
    double s1_sum = 0, s1_sq_sum = 0, coll_sum = 0;
    u64 with_paths = 0;
    const u64 attempt_cap = checked_mul(trials, 1000);
    const u64 wave = 256;
    std::vector<std::optional<EnsembleStats>> wave_stats(wave);
    while (records.size() < trials) {
        if (attempt >= attempt_cap)
            throw std::runtime_error("ensemble: conditioning rejected too many samples");
        const u64 wave_n = std::min<u64>(wave, attempt_cap - attempt);
        parallel_blocks(wave_n, 8, cfg.threads, [&](u64, u64 begin, u64 end) {
            for (u64 i = begin; i < end; ++i) {
                ProfiniteSample sample = ProfiniteSample::draw(P, w, *cfg.seed, attempt + i);
                EnsembleStats st = path_ensemble_stats(sample, ep, start);
                wave_stats[i] = st.start_in_vertex_set ? std::optional(std::move(st)) : std::nullopt;
            }
        });
        for (u64 i = 0; i < wave_n && records.size() < trials; ++i) {
            if (!wave_stats[i]) continue;
            const EnsembleStats& st = *wave_stats[i];
            json rec;
            rec["trial"] = attempt + i;
            rec["s1"] = st.s1;
            rec["realized_paths"] = st.realized_paths;
            rec["distinct_endpoints"] = st.distinct_endpoints;
            rec["collision"] = st.collision;
            records.push_back(std::move(rec));
            s1_sum += st.s1;
            s1_sq_sum += st.s1 * st.s1;
            coll_sum += st.collision;
            if (st.realized_paths > 0) ++with_paths;
        }
        attempt += wave_n;
    }

    json out;
    out["command"] = "ensemble";
    out["k"] = ep.k;
    out["imin"] = ep.imin;
    out["imax"] = ep.imax;
    out["w"] = w;
    out["p"] = P;
    out["start"] = start;
    out["trials"] = trials;
    out["seed"] = *cfg.seed;
    json recs = json::array();
    for (auto& r : records) recs.push_back(std::move(r));
    out["records"] = recs;
    json summary;
    summary["attempts"] = attempt;
    summary["mean_s1"] = s1_sum / static_cast<double>(trials);
    summary["mean_s1_sq"] = s1_sq_sum / static_cast<double>(trials);
    summary["mean_collision"] = coll_sum / static_cast<double>(trials);
    summary["trials_with_paths"] = with_paths;
    out["summary"] = summary;
    return out;
}

json cmd_triples(const ExperimentConfig& cfg) {
    const auto& p = cfg.params;
    TripleSpec spec;
    spec.X = need_u64(p, "x");
    spec.m = need_i64(p, "m");
    spec.A = get_i64(p, "shift", 0);
    spec.w = get_u64(p, "w", 1);
    spec.k = get_u64(p, "k", 1);
    spec.a1 = get_u64(p, "a1", 0);
    spec.a2 = get_u64(p, "a2", 0);

    const u64 count = spec.k > 1 ? count_triples_in_classes(spec) : count_triples(spec);
    MainTermPrediction pred = main_term_prediction(spec);

    json out;
    out["command"] = "triples";
    out["X"] = spec.X;
    out["m"] = spec.m;
    out["A"] = spec.A;
    out["w"] = spec.w;
    out["k"] = spec.k;
    out["a1"] = spec.a1;
    out["a2"] = spec.a2;
    out["count"] = count;
    out["G_m"] = pred.lattice;
    out["S_m"] = pred.singular;
    out["prediction"] = pred.value;
    out["tail_bound"] = pred.tail_bound;
    if (pred.value > 0)
        out["ratio"] = static_cast<double>(count) / pred.value;
    else
        out["ratio"] = nullptr;
    return out;
}

// ---- report -----------------------------------------------------------

struct Claim {
    std::string name;
    double lo, hi;
    std::function<std::optional<double>(const std::vector<json>&)> extract;
};

std::optional<double> from_pairs(const std::vector<json>& results,
                                 const std::function<double(const json&)>& f) {
    for (const auto& r : results)
        if (r.value("command", "") == "pairs") return f(r);
    return std::nullopt;
}

double pair_freq(const json& r, int a, int b) {
    for (const auto& row : r.at("table"))
        if (row.at("a").get<int>() == a && row.at("b").get<int>() == b)
            return row.at("frequency").get<double>();
    return std::numeric_limits<double>::quiet_NaN();
}

std::vector<Claim> claim_registry() {
    constexpr double kInf = std::numeric_limits<double>::infinity();
    std::vector<Claim> claims;
    auto pairs_claim = [&](std::string name, double lo, double hi,
                           std::function<double(const json&)> f) {
        claims.push_back({std::move(name), lo, hi,
                          [f](const std::vector<json>& rs) { return from_pairs(rs, f); }});
    };
    pairs_claim("squarefree density 1/zeta(2)", 0.6079 - 0.002, 0.6079 + 0.002,
                [](const json& r) { return r.at("musq_density").get<double>(); });
    pairs_claim("adjacent squarefree pair constant c", 0.3226 - 0.003, 0.3226 + 0.003,
                [](const json& r) { return r.at("musq_pair_density").get<double>(); });
    pairs_claim("mu pair (0,0)", 0.1067 - 0.003, 0.1067 + 0.003,
                [](const json& r) { return pair_freq(r, 0, 0); });
    for (auto [a, b] : {std::pair{+1, 0}, {-1, 0}, {0, +1}, {0, -1}}) {
        pairs_claim("mu pair (" + std::to_string(a) + "," + std::to_string(b) + ")",
                    0.1426 - 0.003, 0.1426 + 0.003,
                    [a, b](const json& r) { return pair_freq(r, a, b); });
    }
    pairs_claim("mu pair symmetry |(+1,-1)-(-1,+1)|", 0.0, 0.005, [](const json& r) {
        return std::abs(pair_freq(r, 1, -1) - pair_freq(r, -1, 1));
    });
    pairs_claim("mu pair symmetry |(+1,+1)-(-1,-1)|", 0.0, 0.005, [](const json& r) {
        return std::abs(pair_freq(r, 1, 1) - pair_freq(r, -1, -1));
    });

    claims.push_back({"lambda short-interval mean_abs (h=1000)", 0.0, 0.1,
                      [](const std::vector<json>& rs) -> std::optional<double> {
                          for (const auto& r : rs)
                              if (r.value("command", "") == "interval" &&
                                  r.value("fn", "") == "lambda" && r.value("h", u64{0}) == 1000)
                                  return r.at("mean_abs").get<double>();
                          return std::nullopt;
                      }});
    claims.push_back({"run density positive (a<=3)", std::nextafter(0.0, 1.0), kInf,
                      [](const std::vector<json>& rs) -> std::optional<double> {
                          for (const auto& r : rs)
                              if (r.value("command", "") == "rundensity" &&
                                  r.value("a", 0.0) <= 3.0)
                                  return r.at("estimate").at("frequency").get<double>();
                          return std::nullopt;
                      }});
    claims.push_back({"triple count / main term", 0.5, 2.0,
                      [](const std::vector<json>& rs) -> std::optional<double> {
                          for (const auto& r : rs)
                              if (r.value("command", "") == "triples" && r.contains("ratio") &&
                                  r["ratio"].is_number())
                                  return r["ratio"].get<double>();
                          return std::nullopt;
                      }});
    return claims;
}

}  // namespace

std::vector<ReportRow> build_report(const std::vector<json>& results) {
    std::vector<ReportRow> rows;
    for (const auto& claim : claim_registry()) {
        ReportRow row;
        row.claim = claim.name;
        row.lo = claim.lo;
        row.hi = claim.hi;
        row.measured = claim.extract(results);
        if (!row.measured) {
            row.verdict = "not run";
        } else if (std::isnan(*row.measured)) {
            row.verdict = "fail";
        } else {
            row.verdict = (*row.measured >= claim.lo && *row.measured <= claim.hi) ? "pass" : "fail";
        }
        rows.push_back(std::move(row));
    }
    // Dynamic rows: every length-3 lambda pattern result gets the positive
    // lower-density floor.
    for (const auto& r : results) {
        if (r.value("command", "") != "pattern" || r.value("fn", "") != "lambda") continue;
        const std::string expr = r.value("pattern", "");
        if (expr.size() != 4 || expr.find('*') != std::string::npos) continue;  // "^+±±"
        ReportRow row;
        row.claim = "lambda pattern " + expr + " density";
        row.lo = 0.05;
        row.hi = std::numeric_limits<double>::infinity();
        row.measured = r.at("min_frequency").get<double>();
        row.verdict = *row.measured > row.lo ? "pass" : "fail";
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string render_report(const std::vector<ReportRow>& rows) {
    std::ostringstream out;
    out << "claim                                            reference            measured     verdict\n";
    out << std::string(100, '-') << "\n";
    char buf[256];
    for (const auto& row : rows) {
        std::string ref;
        if (std::isinf(row.hi))
            ref = "> " + std::to_string(row.lo);
        else {
            std::snprintf(buf, sizeof buf, "[%.4f, %.4f]", row.lo, row.hi);
            ref = buf;
        }
        std::string measured = row.measured ? std::to_string(*row.measured) : "-";
        std::snprintf(buf, sizeof buf, "%-48s %-20s %-12s %s\n", row.claim.c_str(), ref.c_str(),
                      measured.c_str(), row.verdict.c_str());
        out << buf;
    }
    return out.str();
}

namespace {

json cmd_report(const ExperimentConfig& cfg, std::string& rendered, int& exit_code) {
    const auto& p = cfg.params;
    std::vector<json> results;
    if (p.contains("in")) {
        if (!p["in"].is_array()) throw config_error("params.in", "must be an array of paths");
        for (const auto& f : p["in"]) {
            std::ifstream in(f.get<std::string>());
            if (!in) throw std::runtime_error("report: cannot open " + f.get<std::string>());
            json r;
            in >> r;
            results.push_back(std::move(r));
        }
    }
    auto rows = build_report(results);
    rendered = render_report(rows);
    for (const auto& row : rows)
        if (row.verdict == "fail") exit_code = kExitCheckFailed;

    json out;
    out["command"] = "report";
    json jr = json::array();
    for (const auto& row : rows) {
        json one;
        one["claim"] = row.claim;
        one["reference_lo"] = row.lo;
        one["reference_hi"] = row.hi;
        if (row.measured)
            one["measured"] = *row.measured;
        else
            one["measured"] = nullptr;
        one["verdict"] = row.verdict;
        jr.push_back(one);
    }
    out["rows"] = jr;
    return out;
}

std::string render_result(const ExperimentConfig& cfg, const json& result,
                          const std::string& report_text) {
    if (cfg.format == "json") return result.dump(2) + "\n";
    if (cfg.format == "text") {
        if (cfg.command == "report") return report_text;
        return result.dump(2) + "\n";
    }
    if (cfg.format == "jsonl") {
        if (cfg.command != "graph" && cfg.command != "ensemble")
            throw config_error("format", "jsonl applies to graph or ensemble results");
        std::string out;
        for (const auto& rec : result.at("records")) out += rec.dump() + "\n";
        json summary = result;
        summary.erase("records");
        out += summary.dump() + "\n";
        return out;
    }
    if (cfg.format == "csv") {
        if (cfg.command == "pattern") return density_scales_to_csv(result.at("scales"));
        if (cfg.command == "pairs") return pair_table_to_csv(result);
        throw config_error("format", "csv applies to pattern or pairs results");
    }
    if (cfg.format == "edgelist") {
        throw config_error("format", "edgelist is handled by the graph command");
    }
    throw config_error("format", "unsupported format " + cfg.format);
}

std::string render_edgelist(const ExperimentConfig& cfg) {
    const auto& p = cfg.params;
    if (get_u64(p, "trials", 1) != 1)
        throw config_error("params.trials", "edgelist export needs trials = 1");
    const std::string mode = get_str(p, "mode", "profinite");
    const u64 x = need_u64(p, "x");
    const u64 w = get_u64(p, "w", 50);
    const i64 lo = get_i64(p, "window_lo", 0);
    const i64 hi = get_i64(p, "window_hi", static_cast<i64>(2 * x));
    const u64 P = get_u64(p, "p", std::max<u64>(static_cast<u64>(hi - lo), w));
    VertexRule rule = get_str(p, "vertex_rule", "truncated") == "exact" ? VertexRule::exact
                                                                        : VertexRule::truncated;
    ProfiniteSample sample = mode == "integer"
                                 ? ProfiniteSample::from_integer(need_u64(p, "n0"), P, w)
                                 : ProfiniteSample::draw(P, w, *cfg.seed, 0);
    GraphWindow g = build_graph(sample, lo, hi, rule);
    std::string out;
    for (const auto& e : g.edges())
        out += std::to_string(e.a) + " " + std::to_string(e.b) + " " + std::to_string(e.gap) + "\n";
    return out;
}

}  // namespace

RunOutcome run(const ExperimentConfig& config) {
    RunOutcome outcome;
    const auto t0 = Clock::now();
    RunManifest manifest;
    manifest.config_echo = serialize_config(config);

    json result;
    std::string rendered;
    try {
        std::string report_text;
        int exit_code = kExitOk;
        const auto t_cmd = Clock::now();
        if (config.command == "graph" && config.format == "edgelist") {
            rendered = render_edgelist(config);
        } else {
            if (config.command == "sieve") result = cmd_sieve(config, manifest);
            else if (config.command == "pattern") result = cmd_pattern(config);
            else if (config.command == "pairs") result = cmd_pairs(config);
            else if (config.command == "interval") result = cmd_interval(config);
            else if (config.command == "rundensity") result = cmd_rundensity(config);
            else if (config.command == "graph") result = cmd_graph(config);
            else if (config.command == "ensemble") result = cmd_ensemble(config);
            else if (config.command == "triples") result = cmd_triples(config);
            else if (config.command == "report") result = cmd_report(config, report_text, exit_code);
            else throw config_error("command", "unknown command " + config.command);
            rendered = render_result(config, result, report_text);
        }
        manifest.timings_ms.emplace_back(config.command, ms_since(t_cmd));
        outcome.exit_code = exit_code;
    } catch (const config_error& e) {
        outcome.exit_code = kExitConfig;
        outcome.error = e.what();
        return outcome;
    } catch (const parameter_error& e) {
        outcome.exit_code = kExitConfig;
        outcome.error = std::string("parameter error: ") + e.what();
        return outcome;
    } catch (const std::exception& e) {
        outcome.exit_code = kExitRuntime;
        outcome.error = e.what();
        return outcome;
    }

    manifest.wall_ms = ms_since(t0);
    try {
        if (config.out.empty()) {
            outcome.stdout_text = rendered;
        } else {
            atomic_write_file(config.out, rendered);
            outcome.result_path = config.out;
            outcome.manifest_path = config.out + ".manifest.json";
            atomic_write_file(outcome.manifest_path, manifest.to_json().dump(2) + "\n");
        }
        if (config.command == "report") outcome.stdout_text = rendered;
    } catch (const std::exception& e) {
        outcome.exit_code = kExitRuntime;
        outcome.error = e.what();
    }
    return outcome;
}

}  // namespace lmlab
