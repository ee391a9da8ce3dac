// Acceptance gate: one binary re-checks every promised behavior end to end
// and prints a verdict line per criterion, with the evidence underneath.
// Expensive proof segments are cached on disk keyed by engine version and
// exact configuration, so an interrupted run resumes instead of repeating
// hours of search; delete the cache directory to force everything fresh.
//
// Environment:
//   SEQPROVE_ACCEPT_CACHE        cache directory (default: acceptance-cache)
//   SEQPROVE_ACCEPT_TMPDIR       scratch space for transcripts under test
//   SEQPROVE_ACCEPT_BUDGET_SECS  soft wall budget; expensive units that would
//                                start after it is spent are skipped and the
//                                criteria that needed them fail honestly
//                                (unset or 0 = no budget)
//   SEQPROVE_ACCEPT_FULL_K10     attempt every general k=10 segment instead
//                                of the calibration subset; expect weeks

#include <seqprove/compression.hpp>
#include <seqprove/exact_linalg.hpp>
#include <seqprove/group.hpp>
#include <seqprove/nullstellensatz.hpp>
#include <seqprove/search.hpp>
#include <seqprove/transcript.hpp>

#include "helpers.hpp"

#include <json.hpp>

#include <chrono>
#include <cinttypes>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

using namespace seqprove;
using nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

const auto t_start = std::chrono::steady_clock::now();

double elapsed() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double budget_secs() {
    const char* e = std::getenv("SEQPROVE_ACCEPT_BUDGET_SECS");
    return e && *e ? std::atof(e) : 0.0;
}

bool budget_left() {
    double b = budget_secs();
    return b <= 0 || elapsed() < b;
}

bool full_k10() {
    const char* e = std::getenv("SEQPROVE_ACCEPT_FULL_K10");
    return e && *e && std::string(e) != "0";
}

fs::path env_dir(const char* var, const char* fallback) {
    const char* e = std::getenv(var);
    return fs::path(e && *e ? e : fallback);
}

fs::path cache_dir() { return env_dir("SEQPROVE_ACCEPT_CACHE", "acceptance-cache"); }
fs::path reports_dir() { return fs::path("acceptance-reports"); }

fs::path scratch_dir() {
    const char* e = std::getenv("SEQPROVE_ACCEPT_TMPDIR");
    return e && *e ? fs::path(e) : fs::temp_directory_path();
}

std::string fmt(const char* f, ...) {
    char buf[1024];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

// ------------------------------------------------------------------ cache --

std::optional<ordered_json> cache_load(const std::string& unit, const ordered_json& config) {
    std::ifstream f(cache_dir() / (unit + ".json"));
    if (!f) return std::nullopt;
    try {
        auto j = ordered_json::parse(f);
        if (j.at("engine") != engine_version || j.at("config") != config) return std::nullopt;
        return j;
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

void cache_store(const std::string& unit, const ordered_json& rec) {
    fs::create_directories(cache_dir());
    std::ofstream f(cache_dir() / (unit + ".json"));
    f << rec.dump(2) << '\n';
}

// --------------------------------------------------------- engine plumbing --

ModeConfig base_config(int k, Mode m, Arith a) {
    ModeConfig cfg;
    cfg.k = k;
    cfg.mode = m;
    cfg.arith = a;
    return cfg;
}

ordered_json config_json(const ModeConfig& cfg, const std::optional<MergeScenario>& sc,
                         int threads) {
    ordered_json j;
    j["k"] = cfg.k;
    j["mode"] = to_string(cfg.mode);
    j["arith"] = to_string(cfg.arith);
    j["dup_policy"] = to_string(cfg.dup_policy);
    j["interval_policy"] = to_string(cfg.interval_policy);
    j["leaf_policy"] = to_string(cfg.leaf_policy);
    j["max_depth"] = cfg.max_depth ? ordered_json(*cfg.max_depth) : ordered_json(nullptr);
    j["max_nodes"] = cfg.max_nodes ? ordered_json(*cfg.max_nodes) : ordered_json(nullptr);
    j["seed"] = cfg.seed;
    j["merge_index"] = sc ? ordered_json(sc->merge_index) : ordered_json(nullptr);
    j["threads"] = threads;
    return j;
}

ordered_json result_json(const ProofResult& r) {
    ordered_json j;
    j["verdict"] = to_string(r.verdict);
    j["aborted"] = r.aborted;
    j["nodes"] = r.node_count;
    j["max_depth"] = r.max_depth_reached;
    ordered_json by;
    by["zero_element"] = r.certificates_by_kind[0];
    by["equality"] = r.certificates_by_kind[1];
    by["inverse_pair"] = r.certificates_by_kind[2];
    by["compression"] = r.certificates_by_kind[3];
    j["certificates"] = std::move(by);
    j["max_witness_denominator"] = r.max_witness_denominator.get_str();
    j["open_childless"] = r.open_childless;
    j["open_unprocessed"] = r.open_unprocessed;
    j["suppressed"] = r.suppressed;
    return j;
}

enum class Check { none, file, stream };

struct Unit {
    ordered_json rec;
    bool cached = false;
    bool ran = false;  // false when skipped for budget
};

// One proof segment. Check::file writes a real transcript, verifies it from
// disk, fingerprints it, and deletes it; Check::stream pipes the same bytes
// through the checker without touching disk; Check::none just runs.
Unit proof_unit(const std::string& name, const ModeConfig& cfg,
                const std::optional<MergeScenario>& sc, Check check) {
    auto cj = config_json(cfg, sc, 1);
    if (auto hit = cache_load(name, cj)) return {*hit, true, true};
    if (!budget_left()) return {};

    auto cons = sc ? initial_constraints(*sc) : std::vector<RowMask>{};
    auto seeds = seed_rows(cfg.k, cfg.mode);
    EngineOptions opt;
    opt.scenario = sc;
    opt.progress = [&](const LevelProgress& p) {
        if (p.total_nodes >= 5'000'000)
            std::fprintf(stderr, "    [%s] depth %d: %" PRIu64 " nodes, %.0fs\n", name.c_str(),
                         p.depth, p.total_nodes, p.seconds);
    };

    ordered_json tj;
    ProofResult res;
    auto t0 = std::chrono::steady_clock::now();
    if (check == Check::file) {
        fs::path p = scratch_dir() / (name + ".jsonl");
        {
            TranscriptOutFile out(p.string());
            TranscriptWriter w(out.stream());
            opt.sink = &w;
            res = bfs_prove(cfg, cons, seeds, opt);
        }
        auto rep = verify_transcript_file(p.string());
        std::uint64_t h = detail::fnv1a64_seed;
        std::uint64_t bytes = 0;
        std::ifstream in(p, std::ios::binary);
        char buf[1 << 16];
        while (in.read(buf, sizeof buf), in.gcount() > 0) {
            h = detail::fnv1a64_step(h, buf, static_cast<std::size_t>(in.gcount()));
            bytes += static_cast<std::uint64_t>(in.gcount());
        }
        fs::remove(p);
        tj["checked"] = "file";
        tj["accepted"] = rep.accepted;
        tj["defect"] = rep.defect;
        tj["bytes"] = bytes;
        tj["fnv"] = detail::hex64(h);
    } else if (check == Check::stream) {
        VerifyingSink sink;
        opt.sink = &sink;
        res = bfs_prove(cfg, cons, seeds, opt);
        auto rep = sink.report();
        tj["checked"] = "stream";
        tj["accepted"] = rep.accepted;
        tj["defect"] = rep.defect;
        tj["bytes"] = sink.bytes();
        tj["fnv"] = detail::hex64(sink.hash());
    } else {
        res = bfs_prove(cfg, cons, seeds, opt);
    }

    ordered_json rec;
    rec["engine"] = engine_version;
    rec["unit"] = name;
    rec["config"] = cj;
    rec["result"] = result_json(res);
    if (check != Check::none) rec["transcript"] = std::move(tj);
    rec["seconds"] = seconds_since(t0);
    cache_store(name, rec);
    return {std::move(rec), false, true};
}

// Rerun a segment at a given thread count, keeping only the transcript
// fingerprint.
Unit hash_unit(const std::string& name, const ModeConfig& cfg,
               const std::optional<MergeScenario>& sc, int threads) {
    auto cj = config_json(cfg, sc, threads);
    if (auto hit = cache_load(name, cj)) return {*hit, true, true};
    if (!budget_left()) return {};

    auto cons = sc ? initial_constraints(*sc) : std::vector<RowMask>{};
    auto seeds = seed_rows(cfg.k, cfg.mode);
    HashingSink sink;
    EngineOptions opt;
    opt.threads = threads;
    opt.scenario = sc;
    opt.sink = &sink;
    auto t0 = std::chrono::steady_clock::now();
    bfs_prove(cfg, cons, seeds, opt);
    ordered_json rec;
    rec["engine"] = engine_version;
    rec["unit"] = name;
    rec["config"] = cj;
    rec["bytes"] = sink.bytes();
    rec["fnv"] = detail::hex64(sink.hash());
    rec["seconds"] = seconds_since(t0);
    cache_store(name, rec);
    return {std::move(rec), false, true};
}

bool unit_proved(const ordered_json& rec) {
    const auto& r = rec.at("result");
    return r.at("verdict") == "proved" && r.at("aborted") == false;
}

bool unit_leaves_certified(const ordered_json& rec) {
    const auto& r = rec.at("result");
    return r.at("open_childless") == 0 && r.at("open_unprocessed") == 0;
}

bool unit_verified(const ordered_json& rec) {
    return rec.contains("transcript") && rec.at("transcript").at("accepted") == true;
}

std::uint64_t unit_nodes(const ordered_json& rec) {
    return rec.at("result").at("nodes").get<std::uint64_t>();
}

// ---------------------------------------------------------------- reporting --

struct Criterion {
    int id;
    std::string name;
    bool pass;
    bool gating;
    std::string note;
};

std::vector<Criterion> results;

void detail_line(const std::string& s) {
    std::printf("    %s\n", s.c_str());
    std::fflush(stdout);
}

void verdict_line(int id, const std::string& name, bool pass, bool gating,
                  const std::string& note) {
    results.push_back({id, name, pass, gating, note});
    std::printf("criterion %2d %-28s %s  %s\n", id, name.c_str(),
                pass        ? "PASS"
                : !gating   ? "INFO"
                            : "FAIL",
                note.c_str());
    std::fflush(stdout);
}

const char* mode_tag(Mode m) {
    switch (m) {
        case Mode::general: return "general";
        case Mode::zero_sum: return "zs";
        default: return "zsd";
    }
}

// Units completed this run (or pulled from cache), so later criteria can
// audit the same segments without recomputing them.
std::map<std::string, ordered_json> done;

// ---------------------------------------------------------------- criteria --

// Published coefficient table, recomputed exactly.
void criterion1() {
    auto t0 = std::chrono::steady_clock::now();
    auto check = verify_coefficient_table(10, 23);
    double s = seconds_since(t0);
    int ok = 0;
    for (const auto& r : check.rows)
        if (r.match) ++ok;
    verdict_line(1, "coefficient-table", check.all_match, true,
                 fmt("%d/14 rows exact, %.1fs%s", ok, s, s < 60 ? "" : " (over the 60s target)"));
}

// Determinant fast path against the expansion oracle.
void criterion2() {
    auto t0 = std::chrono::steady_clock::now();
    bool pass = true;
    for (int k = 3; k <= 8; ++k) {
        Int fast = fk_coefficient(k);
        Int brute = fk_coefficient_by_expansion(k);
        if (fast != brute) {
            pass = false;
            detail_line(fmt("k=%d: determinant %s, expansion %s", k, fast.get_str().c_str(),
                            brute.get_str().c_str()));
        }
    }
    verdict_line(2, "fast-vs-brute-coefficients", pass, true,
                 fmt("k=3..8 agree, %.1fs", seconds_since(t0)));
}

// The three-symbol worked example, straight down to the bytes of the two
// transcript lines on the branch that assumes a_1 + a_2 = 0 first.
void criterion3() {
    static const char* const want1 =
        R"({"type":"node","id":1,"parent":0,"depth":1,"ordering":[1,3,2],"interval":[0,1],"row":[1,1,0],"status":"expanded","children":2})";
    static const char* const want4 =
        R"({"type":"node","id":4,"parent":1,"depth":2,"ordering":[3,1,2],"interval":[1,2],"row":[0,1,1],"status":"certified","cert":{"kind":"equality","i":1,"j":3,"target":[1,0,-1],"multipliers":["1","-1"],"denominator":"1"}})";

    testing::CollectSink sink;
    EngineOptions opt;
    opt.sink = &sink;
    auto res = bfs_prove(base_config(3, Mode::general, Arith::integer), {}, {}, opt);

    bool pass = res.verdict == Verdict::proved && res.node_count == 7;
    std::string got1, got4;
    for (const auto& r : sink.records) {
        std::string line;
        append_node_line(line, r, 3);
        if (r.id == 1) got1 = line;
        if (r.id == 4) got4 = line;
    }
    if (got1 != want1) {
        pass = false;
        detail_line("first swap line:    " + got1);
        detail_line("expected:           " + std::string(want1));
    }
    if (got4 != want4) {
        pass = false;
        detail_line("certificate line:   " + got4);
        detail_line("expected:           " + std::string(want4));
    }
    verdict_line(3, "worked-example-bytes", pass, true,
                 pass ? "7-node run, both branch lines byte-exact" : "divergence above");
}

struct DeskTally {
    int total = 0;
    int proved = 0;
    int verified = 0;
    int certified_leaves = 0;
    int cached = 0;
    int skipped = 0;
    std::uint64_t nodes = 0;
    double secs = 0;

    void add(const Unit& u) {
        ++total;
        if (!u.ran) {
            ++skipped;
            return;
        }
        if (u.cached) ++cached;
        if (unit_proved(u.rec)) ++proved;
        if (unit_verified(u.rec)) ++verified;
        if (unit_leaves_certified(u.rec)) ++certified_leaves;
        nodes += unit_nodes(u.rec);
        secs += u.rec.at("seconds").get<double>();
    }

    bool complete() const {
        return skipped == 0 && proved == total && verified == total && certified_leaves == total;
    }
};

std::string desk_unit_name(Mode m, int k, int mi, Arith a) {
    return fmt("prove-%s-k%d-mi%d-%s", mode_tag(m), k, mi, to_string(a));
}

// Desk-scale proofs with independent verification of every transcript.
void criterion4() {
    bool pass = true;
    std::string note;
    int budget_skips = 0;

    for (Mode m : {Mode::zero_sum, Mode::zero_sum_no_inverse}) {
        DeskTally t;
        for (int k = 4; k <= 12; ++k) {
            MergeScenario sc{k, m, 1};
            auto u = proof_unit(desk_unit_name(m, k, 1, Arith::integer),
                                base_config(k, m, Arith::integer), sc, Check::file);
            t.add(u);
            if (u.ran) done[desk_unit_name(m, k, 1, Arith::integer)] = u.rec;
        }
        detail_line(fmt("%s k=4..12: %d/%d proved, %d/%d transcripts verified, %" PRIu64
                        " nodes, %.1fs (%d cached, %d skipped)",
                        to_string(m), t.proved, t.total, t.verified, t.total, t.nodes, t.secs,
                        t.cached, t.skipped));
        pass = pass && t.complete();
        budget_skips += t.skipped;
    }

    for (int k = 4; k <= 9; ++k) {
        DeskTally t;
        for (const auto& sc : scenarios_for(k, Mode::general)) {
            auto name = desk_unit_name(Mode::general, k, sc.merge_index, Arith::integer);
            auto u = proof_unit(name, base_config(k, Mode::general, Arith::integer), sc,
                                k <= 8 ? Check::file : Check::stream);
            t.add(u);
            if (u.ran) done[name] = u.rec;
        }
        detail_line(fmt("general k=%d: %d/%d scenarios proved, %d/%d verified, %" PRIu64
                        " nodes, %.1fs (%d cached, %d skipped)",
                        k, t.proved, t.total, t.verified, t.total, t.nodes, t.secs, t.cached,
                        t.skipped));
        pass = pass && t.complete();
        budget_skips += t.skipped;
    }

    // k=10 outgrows this hardware: segment sizes climb steeply with the
    // merge index (measured below), and the fourth segment alone projects
    // past 10^9 nodes. Unless asked for the full attempt, run the leading
    // segments as calibration and fail the criterion honestly.
    {
        DeskTally t;
        int attempted = 0;
        const int k = 10;
        for (const auto& sc : scenarios_for(k, Mode::general)) {
            bool attempt = full_k10() || sc.merge_index <= 3;
            if (!attempt) continue;
            auto name = desk_unit_name(Mode::general, k, sc.merge_index, Arith::integer);
            auto u = proof_unit(name, base_config(k, Mode::general, Arith::integer), sc,
                                Check::stream);
            ++attempted;
            t.add(u);
            if (u.ran) {
                done[name] = u.rec;
                detail_line(fmt("general k=10 mi=%d: %s, %" PRIu64 " nodes, %.1fs%s",
                                sc.merge_index, unit_proved(u.rec) ? "proved" : "NOT proved",
                                unit_nodes(u.rec), u.rec.at("seconds").get<double>(),
                                u.cached ? " (cached)" : ""));
            }
        }
        int total_scenarios = static_cast<int>(scenarios_for(k, Mode::general).size());
        bool k10_complete = attempted == total_scenarios && t.complete();
        if (!k10_complete && !full_k10()) {
            detail_line(fmt(
                "general k=10: %d/%d segments run; the rest are out of reach here "
                "(per-index node counts grow ~30x from k=9, putting mi>=4 near 10^10..10^11 "
                "nodes and terabytes of transcript; set SEQPROVE_ACCEPT_FULL_K10=1 to try)",
                attempted, total_scenarios));
        }
        budget_skips += t.skipped;
        pass = pass && k10_complete;
        note = budget_skips > 0
                   ? fmt("budget exhausted with %d segments unrun", budget_skips)
               : k10_complete
                   ? "all desk sizes proved and verified"
                   : "general k=10 exceeds this host; smaller sizes all proved+verified";
    }

    verdict_line(4, "desk-scale-proofs", pass, true, note);
}

// Rational reruns of every proved desk segment; integer companions must
// prove too, and the largest witness denominator is recorded.
void criterion5() {
    bool pass = true;
    ordered_json report = ordered_json::array();
    std::map<std::string, std::string> mode_denoms;

    std::vector<std::pair<std::string, ordered_json>> snapshot(done.begin(), done.end());
    int reruns = 0, cached = 0, skipped = 0, diverged = 0;
    Int global_max(0);
    for (const auto& [name, rec] : snapshot) {
        if (!unit_proved(rec)) continue;
        const auto& cj = rec.at("config");
        if (cj.at("arith") != "integer") continue;
        ModeConfig cfg = base_config(cj.at("k").get<int>(),
                                     mode_from_string(cj.at("mode").get<std::string>()),
                                     Arith::rational);
        MergeScenario sc{cfg.k, cfg.mode, cj.at("merge_index").get<int>()};
        std::string rname = desk_unit_name(cfg.mode, cfg.k, sc.merge_index, Arith::rational);
        auto u = proof_unit(rname, cfg, sc, Check::none);
        if (!u.ran) {
            ++skipped;
            continue;
        }
        ++reruns;
        if (u.cached) ++cached;
        bool rational_proved = unit_proved(u.rec);
        if (!rational_proved) {
            ++diverged;
            pass = false;
            detail_line(fmt("divergence: %s proved in integer mode but not rationally", rname.c_str()));
        }
        Int d(u.rec.at("result").at("max_witness_denominator").get<std::string>());
        if (d > global_max) global_max = d;
        auto& cur = mode_denoms[cj.at("mode").get<std::string>()];
        if (cur.empty() || Int(cur) < d) cur = d.get_str();
        ordered_json row;
        row["unit"] = rname;
        row["rational_proved"] = rational_proved;
        row["max_witness_denominator"] = d.get_str();
        row["nodes"] = unit_nodes(u.rec);
        report.push_back(std::move(row));
    }

    fs::create_directories(reports_dir());
    std::ofstream f(reports_dir() / "denominators.json");
    f << report.dump(2) << '\n';

    std::string denoms;
    for (const auto& [m, d] : mode_denoms) denoms += fmt(" %s=%s", m.c_str(), d.c_str());
    detail_line(fmt("%d rational reruns (%d cached, %d skipped), %d divergences; "
                    "max witness denominator by mode:%s",
                    reruns, cached, skipped, diverged, denoms.c_str()));
    pass = pass && skipped == 0 && reruns > 0;
    verdict_line(5, "denominator-audit", pass, true,
                 fmt("largest witness denominator %s; report archived", global_max.get_str().c_str()));
}

// The membership split that separates the two arithmetics.
void criterion6() {
    std::vector<IntVec> rows = {{Int(1), Int(1), Int(0)},
                                {Int(1), Int(0), Int(1)},
                                {Int(0), Int(1), Int(1)}};
    IntVec e1 = {Int(1), Int(0), Int(0)};
    auto rat = rational_span_member(rows, 3, e1);
    auto integral = integer_span_member(rows, 3, e1);
    bool pass = rat.has_value() && rat->denominator == 2 && !integral.has_value();
    verdict_line(6, "rational-integer-divergence", pass, true,
                 pass ? "e_1 rational with denominator 2, no integer witness"
                      : fmt("rational %s denominator %s, integer %s",
                            rat ? "witness" : "none",
                            rat ? rat->denominator.get_str().c_str() : "-",
                            integral ? "witness" : "none"));
}

// Every abelian group of order at most 16, exhaustively.
void criterion7() {
    auto t0 = std::chrono::steady_clock::now();
    bool pass = true;
    int groups = 0, cached = 0, skipped = 0;
    std::uint64_t sequenced = 0;
    for (const auto& G : all_abelian_groups(16)) {
        ++groups;
        std::string name = "group-" + G.name();
        ordered_json cj;
        cj["group"] = G.name();
        cj["order"] = G.order();
        if (auto hit = cache_load(name, cj)) {
            ++cached;
            sequenced += hit->at("graham_subsets").get<std::uint64_t>();
            pass = pass && hit->at("ok") == true;
            continue;
        }
        if (!budget_left()) {
            ++skipped;
            pass = false;
            continue;
        }
        auto graham = check_graham_exhaustive(G, G.order() - 1);
        auto charac = verify_characterization(G);
        auto dich = verify_merge_dichotomy(G);
        bool ok = graham.all_sequenceable() && charac.ok() && dich.ok();
        if (!ok)
            detail_line(fmt("%s: %zu unsequenceable, %zu closure violations, %zu dichotomy "
                            "violations",
                            G.name().c_str(), graham.failures.size(), charac.violations.size(),
                            dich.violations.size()));
        sequenced += graham.subsets_checked;
        ordered_json rec;
        rec["engine"] = engine_version;
        rec["unit"] = name;
        rec["config"] = cj;
        rec["ok"] = ok;
        rec["graham_subsets"] = graham.subsets_checked;
        rec["characterization_sets"] = charac.sets_checked;
        rec["pair_exceptions"] = charac.pair_exceptions;
        rec["dichotomy_sets"] = dich.sets_checked;
        rec["seconds"] = seconds_since(t0);
        cache_store(name, rec);
        pass = pass && ok;
    }
    verdict_line(7, "small-group-exhaustion", pass && skipped == 0, true,
                 fmt("%d groups, %" PRIu64 " subsets sequenced, characterization and merge "
                     "dichotomy clean, %.1fs (%d cached, %d skipped)",
                     groups, sequenced, seconds_since(t0), cached, skipped));
}

// Random concrete instantiations of the merge premise, one thousand per mode.
void criterion8() {
    auto t0 = std::chrono::steady_clock::now();
    bool pass = true;
    std::string counts;
    for (Mode m : {Mode::general, Mode::zero_sum, Mode::zero_sum_no_inverse}) {
        std::string name = fmt("crossval-%s", mode_tag(m));
        ordered_json cj;
        cj["mode"] = to_string(m);
        cj["target"] = 1000;
        cj["k"] = "4..10";
        cj["modulus"] = "k+2..997";
        cj["base_seed"] = 20250815;
        std::uint64_t performed = 0, failures = 0, unseq = 0, draws = 0;
        if (auto hit = cache_load(name, cj)) {
            performed = hit->at("performed").get<std::uint64_t>();
            failures = hit->at("constraint_failures").get<std::uint64_t>();
            unseq = hit->at("unsequenceable").get<std::uint64_t>();
            draws = hit->at("draws").get<std::uint64_t>();
        } else {
            std::mt19937_64 master(20250815 ^ std::hash<std::string>{}(to_string(m)));
            while (performed < 1000 && draws < 1500) {
                ++draws;
                int k = 4 + static_cast<int>(master() % 7);
                int mi = m == Mode::general ? 1 + static_cast<int>(master() % (k - 1)) : 1;
                int modulus = k + 2 + static_cast<int>(master() % (997 - k - 1));
                MergeScenario sc{k, m, mi};
                auto rep = cross_validate_scenario(sc, modulus, 1, master());
                performed += rep.performed;
                failures += rep.constraint_failures;
                unseq += rep.unsequenceable;
            }
            ordered_json rec;
            rec["engine"] = engine_version;
            rec["unit"] = name;
            rec["config"] = cj;
            rec["performed"] = performed;
            rec["constraint_failures"] = failures;
            rec["unsequenceable"] = unseq;
            rec["draws"] = draws;
            cache_store(name, rec);
        }
        bool ok = performed == 1000 && failures == 0 && unseq == 0;
        pass = pass && ok;
        counts += fmt(" %s=%" PRIu64 "/1000", mode_tag(m), performed);
        if (!ok)
            detail_line(fmt("%s: %" PRIu64 " performed, %" PRIu64 " constraint failures, %" PRIu64
                            " unsequenceable in %" PRIu64 " draws",
                            to_string(m), performed, failures, unseq, draws));
    }
    verdict_line(8, "cross-validation", pass, true,
                 fmt("%s, all constraints nonzero, all sets sequenced, %.1fs", counts.c_str() + 1,
                     seconds_since(t0)));
}

// Where the proof stalls once the merge premise and its certificates are
// withheld. Qualitative, archived, non-gating.
void criterion9() {
    auto t0 = std::chrono::steady_clock::now();
    const std::uint64_t node_cap = 50'000'000;
    ordered_json report = ordered_json::array();
    std::string summary;
    bool cut_short = false;
    for (Mode m : {Mode::general, Mode::zero_sum, Mode::zero_sum_no_inverse}) {
        int largest = 0;
        bool hit_scan_end = false;
        for (int k = 4; k <= 16; ++k) {
            std::string name = fmt("baseline-%s-k%d", mode_tag(m), k);
            ModeConfig cfg = base_config(k, m, Arith::integer);
            cfg.max_nodes = node_cap;
            auto u = proof_unit(name, cfg, std::nullopt, Check::none);
            if (!u.ran) {
                cut_short = true;
                break;
            }
            ordered_json row;
            row["mode"] = to_string(m);
            row["k"] = k;
            row["verdict"] = u.rec.at("result").at("verdict");
            row["aborted"] = u.rec.at("result").at("aborted");
            row["nodes"] = unit_nodes(u.rec);
            row["seconds"] = u.rec.at("seconds");
            report.push_back(std::move(row));
            if (!unit_proved(u.rec)) break;
            largest = k;
            if (k == 16) hit_scan_end = true;
        }
        summary += fmt(" %s<=%d%s", mode_tag(m), largest, hit_scan_end ? "+" : "");
    }
    fs::create_directories(reports_dir());
    std::ofstream f(reports_dir() / "baseline.json");
    f << report.dump(2) << '\n';
    verdict_line(9, "no-compression-baseline", true, false,
                 fmt("largest k proved within %.0fM nodes:%s%s; report archived (non-gating), %.1fs",
                     node_cap / 1e6, summary.c_str(),
                     cut_short ? " (budget exhausted, scan incomplete)" : "",
                     seconds_since(t0)));
}

// Byte-identical transcripts across thread counts, for every desk segment
// small enough to rerun twice more.
void criterion10() {
    auto t0 = std::chrono::steady_clock::now();
    const std::uint64_t rerun_cap = 10'000'000;
    std::vector<int> thread_counts = {1, 4};
    unsigned hw = std::thread::hardware_concurrency();
    if (hw > 4) thread_counts.push_back(static_cast<int>(hw));

    bool pass = true;
    int compared = 0, cached = 0, skipped = 0, excluded = 0;
    std::vector<std::string> excluded_names;
    for (const auto& [name, rec] : std::map<std::string, ordered_json>(done)) {
        if (!rec.contains("transcript")) continue;  // only primary desk segments
        if (unit_nodes(rec) > rerun_cap) {
            ++excluded;
            excluded_names.push_back(name);
            continue;
        }
        const auto& cj = rec.at("config");
        ModeConfig cfg = base_config(cj.at("k").get<int>(),
                                     mode_from_string(cj.at("mode").get<std::string>()),
                                     Arith::integer);
        MergeScenario sc{cfg.k, cfg.mode, cj.at("merge_index").get<int>()};
        std::string want = rec.at("transcript").at("fnv").get<std::string>();
        for (int t : thread_counts) {
            auto u = hash_unit(fmt("hash-%s-t%d", name.c_str(), t), cfg, sc, t);
            if (!u.ran) {
                ++skipped;
                pass = false;
                continue;
            }
            ++compared;
            if (u.cached) ++cached;
            if (u.rec.at("fnv") != want) {
                pass = false;
                detail_line(fmt("%s at %d threads: fnv %s, primary %s", name.c_str(), t,
                                u.rec.at("fnv").get<std::string>().c_str(), want.c_str()));
            }
        }
    }
    pass = pass && compared > 0;  // vacuous agreement is no agreement
    std::string threads_shown;
    for (int t : thread_counts) threads_shown += fmt(",%d", t);
    if (excluded) {
        std::string biggest;
        for (const auto& n : excluded_names) biggest += " " + n;
        detail_line(fmt("excluded from reruns (>%.0fM nodes, hours each):%s", rerun_cap / 1e6,
                        biggest.c_str()));
    }
    verdict_line(10, "thread-determinism", pass, true,
                 fmt("%d reruns at threads {%s} matched the primary transcripts byte for byte "
                     "(%d cached, %d skipped, %d segments excluded for size), %.1fs",
                     compared, threads_shown.c_str() + 1, cached, skipped, excluded,
                     seconds_since(t0)));
}

}  // namespace

int main() {
    std::printf("seqprove acceptance gate (engine %s)\n", engine_version);
    std::printf("cache: %s   scratch: %s   budget: %s   hardware threads: %u\n\n",
                fs::absolute(cache_dir()).string().c_str(),
                fs::absolute(scratch_dir()).string().c_str(),
                budget_secs() > 0 ? fmt("%.0fs", budget_secs()).c_str() : "none",
                std::thread::hardware_concurrency());

    struct Step {
        void (*run)();
        const char* name;
        int id;
    };
    const Step steps[] = {
        {criterion1, "coefficient-table", 1},
        {criterion2, "fast-vs-brute-coefficients", 2},
        {criterion3, "worked-example-bytes", 3},
        {criterion4, "desk-scale-proofs", 4},
        {criterion5, "denominator-audit", 5},
        {criterion6, "rational-integer-divergence", 6},
        {criterion7, "small-group-exhaustion", 7},
        {criterion8, "cross-validation", 8},
        {criterion9, "no-compression-baseline", 9},
        {criterion10, "thread-determinism", 10},
    };
    for (const auto& s : steps) {
        try {
            s.run();
        } catch (const std::exception& e) {
            verdict_line(s.id, s.name, false, true, fmt("threw: %s", e.what()));
        }
    }

    int gating_fail = 0;
    ordered_json rep = ordered_json::array();
    for (const auto& c : results) {
        if (c.gating && !c.pass) ++gating_fail;
        ordered_json j;
        j["id"] = c.id;
        j["name"] = c.name;
        j["pass"] = c.pass;
        j["gating"] = c.gating;
        j["note"] = c.note;
        rep.push_back(std::move(j));
    }
    fs::create_directories(reports_dir());
    {
        ordered_json j;
        j["engine"] = engine_version;
        j["criteria"] = std::move(rep);
        j["seconds"] = elapsed();
        std::ofstream f(reports_dir() / "acceptance.json");
        f << j.dump(2) << '\n';
    }

    std::printf("\nACCEPTANCE: %zu criteria, %d gating failure%s, %.1fs\n", std::size(steps),
                gating_fail, gating_fail == 1 ? "" : "s", elapsed());
    return gating_fail ? 1 : 0;
}
