// Command-line front end: prove sequenceability statements with the certified
// search engine, check transcripts independently, recompute the polynomial
// coefficient table, and stress the pipeline against brute-force group
// oracles on concrete finite abelian groups.
//
// Output contract: progress and the resolved configuration go to stderr,
// human-readable results go to stdout, and the last stdout line is always a
// machine-readable JSON summary. Exit codes: 0 proved/verified/all-pass,
// 1 inconclusive or mismatch, 2 invalid input, 3 budget exceeded,
// 4 internal error.

#include <seqprove/compression.hpp>
#include <seqprove/group.hpp>
#include <seqprove/nullstellensatz.hpp>
#include <seqprove/search.hpp>
#include <seqprove/transcript.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

using namespace seqprove;
using nlohmann::ordered_json;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void emit_summary(const ordered_json& j) { std::cout << j.dump() << std::endl; }

// ---------------------------------------------------------------- prove --

struct ProveOptions {
    int k = 0;
    std::string mode;
    std::string arith = "integer";
    std::string dup = "skip";
    std::string intervals = "paper";
    std::string leaf = "strict";
    bool no_seed_ones = false;
    bool no_compression = false;
    std::string transcript;
    int threads = 1;
    int max_depth = -1;        // negative means unlimited
    std::int64_t max_nodes = -1;
    std::uint64_t seed = 0;
};

ordered_json certificates_json(const ProofResult& r) {
    ordered_json by;
    by["zero_element"] = r.certificates_by_kind[0];
    by["equality"] = r.certificates_by_kind[1];
    by["inverse_pair"] = r.certificates_by_kind[2];
    by["compression"] = r.certificates_by_kind[3];
    return by;
}

int run_prove(const ProveOptions& po) {
    ModeConfig cfg;
    cfg.k = po.k;
    cfg.mode = mode_from_string(po.mode);
    cfg.arith = arith_from_string(po.arith);
    cfg.dup_policy = dup_policy_from_string(po.dup);
    cfg.interval_policy = interval_policy_from_string(po.intervals);
    cfg.leaf_policy = leaf_policy_from_string(po.leaf);
    if (po.max_depth >= 0) cfg.max_depth = po.max_depth;
    if (po.max_nodes >= 0) cfg.max_nodes = static_cast<std::uint64_t>(po.max_nodes);
    cfg.seed = po.seed;
    cfg.validate();
    require(po.threads >= 1, "thread count must be positive");
    // Without the full-sum seed row the zero-sum premise is gone, and the
    // merge constraints derived from it would no longer be justified.
    if (po.no_seed_ones && !po.no_compression)
        throw InvalidInput("--no-seed-ones weakens the hypotheses the merge constraints "
                           "rest on; combine it with --no-compression");

    bool seed_ones = !po.no_seed_ones && !seed_rows(cfg.k, cfg.mode).empty();
    ordered_json ec;
    ec["command"] = "prove";
    ec["k"] = cfg.k;
    ec["mode"] = to_string(cfg.mode);
    ec["arith"] = to_string(cfg.arith);
    ec["dup_policy"] = to_string(cfg.dup_policy);
    ec["interval_policy"] = to_string(cfg.interval_policy);
    ec["leaf_policy"] = to_string(cfg.leaf_policy);
    ec["seed_ones"] = seed_ones;
    ec["compression"] = !po.no_compression;
    ec["transcript"] = po.transcript.empty() ? ordered_json(nullptr) : ordered_json(po.transcript);
    ec["threads"] = po.threads;
    ec["max_depth"] = cfg.max_depth ? ordered_json(*cfg.max_depth) : ordered_json(nullptr);
    ec["max_nodes"] = cfg.max_nodes ? ordered_json(*cfg.max_nodes) : ordered_json(nullptr);
    ec["seed"] = cfg.seed;
    std::cerr << "config: " << ec.dump() << '\n';

    std::optional<TranscriptOutFile> out;
    std::optional<TranscriptWriter> writer;
    if (!po.transcript.empty()) {
        out.emplace(po.transcript);
        writer.emplace(out->stream());
    }

    struct Segment {
        std::optional<int> merge_index;
        ProofResult res;
        double secs;
    };
    std::vector<Segment> segments;

    auto run_one = [&](const std::optional<MergeScenario>& sc) {
        auto cons = sc ? initial_constraints(*sc) : std::vector<RowMask>{};
        auto seeds = po.no_seed_ones ? std::vector<RowMask>{} : seed_rows(cfg.k, cfg.mode);
        std::string tag = sc ? "mi=" + std::to_string(sc->merge_index) : "direct";
        EngineOptions opt;
        opt.threads = po.threads;
        opt.scenario = sc;
        if (writer) opt.sink = &*writer;
        opt.progress = [&](const LevelProgress& p) {
            std::fprintf(stderr, "[%s] depth %d: %" PRIu64 " in level, %" PRIu64 " nodes, %.1fs\n",
                         tag.c_str(), p.depth, p.level_size, p.total_nodes, p.seconds);
        };
        auto t0 = std::chrono::steady_clock::now();
        ProofResult res = bfs_prove(cfg, cons, seeds, opt);
        double secs = seconds_since(t0);
        std::printf("segment %s: %s, %" PRIu64 " nodes, depth %d, %" PRIu64
                    " certificates, %.2fs\n",
                    tag.c_str(), to_string(res.verdict), res.node_count, res.max_depth_reached,
                    res.certified(), secs);
        std::fflush(stdout);
        segments.push_back(
            {sc ? std::optional<int>(sc->merge_index) : std::nullopt, std::move(res), secs});
    };

    auto t0 = std::chrono::steady_clock::now();
    if (po.no_compression) {
        run_one(std::nullopt);
    } else {
        for (const auto& sc : scenarios_for(cfg.k, cfg.mode)) run_one(sc);
    }

    bool all_proved = true;
    bool any_aborted = false;
    std::uint64_t nodes = 0;
    int max_depth = 0;
    Int max_denom = 1;
    ordered_json segj = ordered_json::array();
    for (const auto& s : segments) {
        all_proved = all_proved && s.res.verdict == Verdict::proved;
        any_aborted = any_aborted || s.res.aborted;
        nodes += s.res.node_count;
        max_depth = std::max(max_depth, s.res.max_depth_reached);
        if (s.res.max_witness_denominator > max_denom) max_denom = s.res.max_witness_denominator;
        ordered_json j;
        j["merge_index"] = s.merge_index ? ordered_json(*s.merge_index) : ordered_json(nullptr);
        j["verdict"] = to_string(s.res.verdict);
        j["aborted"] = s.res.aborted;
        j["nodes"] = s.res.node_count;
        j["max_depth"] = s.res.max_depth_reached;
        j["certificates"] = certificates_json(s.res);
        j["max_witness_denominator"] = s.res.max_witness_denominator.get_str();
        j["open_childless"] = s.res.open_childless;
        j["open_unprocessed"] = s.res.open_unprocessed;
        j["suppressed"] = s.res.suppressed;
        j["seconds"] = s.secs;
        segj.push_back(std::move(j));
    }

    ordered_json sum;
    sum["command"] = "prove";
    sum["k"] = cfg.k;
    sum["mode"] = to_string(cfg.mode);
    sum["verdict"] = all_proved ? "proved" : "inconclusive";
    sum["aborted"] = any_aborted;
    sum["nodes"] = nodes;
    sum["max_depth"] = max_depth;
    sum["max_witness_denominator"] = max_denom.get_str();
    sum["segments"] = std::move(segj);
    sum["seconds"] = seconds_since(t0);
    emit_summary(sum);
    if (any_aborted) return 3;
    return all_proved ? 0 : 1;
}

// --------------------------------------------------------------- verify --

int run_verify(const std::string& path) {
    auto rep = verify_transcript_file(path);
    bool all_proved = rep.accepted;
    ordered_json verdicts = ordered_json::array();
    for (Verdict v : rep.verdicts) {
        verdicts.push_back(to_string(v));
        all_proved = all_proved && v == Verdict::proved;
    }
    if (rep.accepted) {
        std::printf("accepted: %" PRIu64 " segments, %" PRIu64 " nodes\n", rep.segments,
                    rep.nodes);
    } else {
        std::printf("rejected at line %zu: %s\n", rep.line, rep.defect.c_str());
    }
    ordered_json sum;
    sum["command"] = "verify";
    sum["transcript"] = path;
    sum["accepted"] = rep.accepted;
    sum["defect"] = rep.defect;
    sum["line"] = rep.line;
    sum["segments"] = rep.segments;
    sum["nodes"] = rep.nodes;
    sum["verdicts"] = std::move(verdicts);
    emit_summary(sum);
    return all_proved ? 0 : 1;
}

// ---------------------------------------------------------- coefficients --

int run_coeff(int k, bool brute) {
    Int c = brute ? fk_coefficient_by_expansion(k) : fk_coefficient(k);
    std::printf("coefficient of the degree target in f_%d: %s (%s)\n", k, c.get_str().c_str(),
                brute ? "expansion oracle" : "determinant");
    ordered_json sum;
    sum["command"] = "coeff";
    sum["k"] = k;
    sum["method"] = brute ? "expansion" : "determinant";
    sum["coefficient"] = c.get_str();
    emit_summary(sum);
    return 0;
}

int run_coeff_table(int from, int to) {
    auto check = verify_coefficient_table(from, to);
    ordered_json rows = ordered_json::array();
    for (const auto& r : check.rows) {
        std::printf("k=%2d computed=%6s published=%6s %s\n", r.k, r.computed.get_str().c_str(),
                    r.expected.get_str().c_str(), r.match ? "ok" : "MISMATCH");
        ordered_json j;
        j["k"] = r.k;
        j["computed"] = r.computed.get_str();
        j["published"] = r.expected.get_str();
        j["match"] = r.match;
        rows.push_back(std::move(j));
    }
    ordered_json sum;
    sum["command"] = "coeff-table";
    sum["from"] = from;
    sum["to"] = to;
    sum["all_match"] = check.all_match;
    sum["rows"] = std::move(rows);
    emit_summary(sum);
    return check.all_match ? 0 : 1;
}

// --------------------------------------------------------------- oracle --

void print_failures(const FiniteAbelianGroup& G, const std::vector<std::vector<Elem>>& sets) {
    for (const auto& A : sets) {
        std::string line = "  {";
        for (std::size_t i = 0; i < A.size(); ++i) {
            if (i) line += ", ";
            line += G.show(A[i]);
        }
        line += "}";
        std::puts(line.c_str());
    }
}

int run_graham(const std::string& spec, int size_cap, std::uint64_t budget) {
    auto G = FiniteAbelianGroup::parse(spec);
    int cap = size_cap > 0 ? size_cap : G.order() - 1;
    auto rep = check_graham_exhaustive(G, cap, budget);
    std::printf("%s: %" PRIu64 " subsets of size <= %d checked, %zu not sequenceable\n",
                G.name().c_str(), rep.subsets_checked, cap, rep.failures.size());
    print_failures(G, rep.failures);
    ordered_json sum;
    sum["command"] = "oracle graham";
    sum["group"] = G.name();
    sum["size_cap"] = cap;
    sum["subsets_checked"] = rep.subsets_checked;
    sum["failures"] = rep.failures.size();
    sum["all_sequenceable"] = rep.all_sequenceable();
    emit_summary(sum);
    return rep.all_sequenceable() ? 0 : 1;
}

int run_characterize(const std::string& spec, std::uint64_t budget) {
    auto G = FiniteAbelianGroup::parse(spec);
    auto rep = verify_characterization(G, budget);
    std::printf("%s: %" PRIu64 " sets checked, %" PRIu64 " closed, %" PRIu64
                " subgroups confirmed, %" PRIu64 " inverse-pair exceptions, %zu violations\n",
                G.name().c_str(), rep.sets_checked, rep.closed_sets, rep.subgroups_confirmed,
                rep.pair_exceptions, rep.violations.size());
    print_failures(G, rep.violations);
    ordered_json sum;
    sum["command"] = "oracle characterize";
    sum["group"] = G.name();
    sum["sets_checked"] = rep.sets_checked;
    sum["closed_sets"] = rep.closed_sets;
    sum["subgroups_confirmed"] = rep.subgroups_confirmed;
    sum["pair_exceptions"] = rep.pair_exceptions;
    sum["violations"] = rep.violations.size();
    sum["ok"] = rep.ok();
    emit_summary(sum);
    return rep.ok() ? 0 : 1;
}

int run_dichotomy(const std::string& spec, std::uint64_t budget) {
    auto G = FiniteAbelianGroup::parse(spec);
    auto rep = verify_merge_dichotomy(G, budget);
    std::printf("%s merge dichotomy: %" PRIu64 " sets, %" PRIu64 " with a merge pair, %" PRIu64
                " subgroup cases, %" PRIu64 " inverse-pair exceptions, %zu violations\n",
                G.name().c_str(), rep.sets_checked, rep.merges_found, rep.subgroup_cases,
                rep.pair_exceptions, rep.violations.size());
    print_failures(G, rep.violations);
    bool ok = rep.ok();

    ordered_json sum;
    sum["command"] = "oracle dichotomy";
    sum["group"] = G.name();
    sum["sets_checked"] = rep.sets_checked;
    sum["merges_found"] = rep.merges_found;
    sum["subgroup_cases"] = rep.subgroup_cases;
    sum["pair_exceptions"] = rep.pair_exceptions;
    sum["violations"] = rep.violations.size();
    // The translation form of the dichotomy only makes sense in cyclic
    // groups, so it rides along when the spec names one.
    if (G.factors().size() == 1) {
        auto tr = verify_translation_exhaustive(G, budget);
        std::printf("%s translation dichotomy: %" PRIu64 " cases, %" PRIu64 " escapes, %" PRIu64
                    " structural, %zu violations\n",
                    G.name().c_str(), tr.cases_checked, tr.escapes, tr.structural,
                    tr.violations.size());
        sum["translation_cases"] = tr.cases_checked;
        sum["translation_escapes"] = tr.escapes;
        sum["translation_structural"] = tr.structural;
        sum["translation_violations"] = tr.violations.size();
        ok = ok && tr.ok();
    }
    sum["ok"] = ok;
    emit_summary(sum);
    return ok ? 0 : 1;
}

int run_cross_validate(int k, const std::string& mode_name, int modulus, std::uint64_t samples,
                       std::uint64_t seed) {
    Mode mode = mode_from_string(mode_name);
    CrossValidationReport total;
    total.seed = seed;
    ordered_json per = ordered_json::array();
    for (const auto& sc : scenarios_for(k, mode)) {
        // Derive a per-scenario stream so scenarios cannot replay each
        // other's draws.
        auto rep = cross_validate_scenario(sc, modulus, samples,
                                           seed + static_cast<std::uint64_t>(sc.merge_index));
        std::printf("mi=%d: %" PRIu64 "/%" PRIu64 " instantiated, %" PRIu64
                    " constraint failures, %" PRIu64 " unsequenceable, %" PRIu64 " skipped\n",
                    sc.merge_index, rep.performed, rep.requested, rep.constraint_failures,
                    rep.unsequenceable, rep.skipped);
        total.requested += rep.requested;
        total.performed += rep.performed;
        total.constraint_failures += rep.constraint_failures;
        total.unsequenceable += rep.unsequenceable;
        total.skipped += rep.skipped;
        ordered_json j;
        j["merge_index"] = sc.merge_index;
        j["requested"] = rep.requested;
        j["performed"] = rep.performed;
        j["constraint_failures"] = rep.constraint_failures;
        j["unsequenceable"] = rep.unsequenceable;
        j["skipped"] = rep.skipped;
        per.push_back(std::move(j));
    }
    ordered_json sum;
    sum["command"] = "oracle cross-validate";
    sum["k"] = k;
    sum["mode"] = mode_name;
    sum["modulus"] = modulus;
    sum["seed"] = seed;
    sum["requested"] = total.requested;
    sum["performed"] = total.performed;
    sum["constraint_failures"] = total.constraint_failures;
    sum["unsequenceable"] = total.unsequenceable;
    sum["skipped"] = total.skipped;
    sum["ok"] = total.ok();
    sum["scenarios"] = std::move(per);
    emit_summary(sum);
    return total.ok() ? 0 : 1;
}

int dispatch(int argc, char** argv) {
    CLI::App app{"seqprove: certified exhaustive search for sequenceable sets"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Read options from an INI file (same keys as the long flags, "
                                   "one [section] per subcommand); command-line flags win");

    ProveOptions po;
    auto* prove = app.add_subcommand(
        "prove", "Run every merge scenario for one set size and mode, aggregating verdicts");
    prove->add_option("--k", po.k, "Set size (number of labels)")->required();
    prove->add_option("--mode", po.mode, "general, zero-sum, or zero-sum-distinct")->required();
    prove->add_option("--arith", po.arith, "Certificate arithmetic: integer or rational");
    prove->add_option("--dup", po.dup, "Duplicate-row intervals: skip or follow");
    prove->add_option("--intervals", po.intervals, "Interval admissibility: paper or conservative");
    prove->add_option("--leaf", po.leaf, "Uncertified childless leaves: strict or paper");
    prove->add_flag("--no-seed-ones", po.no_seed_ones,
                    "Drop the full-sum row the zero-sum modes seed (needs --no-compression)");
    prove->add_flag("--no-compression", po.no_compression,
                    "Prove the statement directly: no merge premise, no compression "
                    "constraints or certificates (the pure-tree baseline)");
    prove->add_option("--transcript", po.transcript,
                      "Write the proof transcript here (a .gz suffix compresses)");
    prove->add_option("--threads", po.threads, "Worker threads (result is thread-count invariant)")
        ->envname("SEQPROVE_THREADS");
    prove->add_option("--max-depth", po.max_depth, "Stop expanding below this depth");
    prove->add_option("--max-nodes", po.max_nodes, "Abort a segment after this many nodes");
    prove->add_option("--seed", po.seed, "Selects the modular screening prime");

    std::string transcript_path;
    auto* verify = app.add_subcommand("verify", "Independently check a proof transcript");
    verify->add_option("--transcript", transcript_path, "Transcript file (gzip accepted)")
        ->required();

    int coeff_k = 0;
    bool coeff_brute = false;
    auto* coeff =
        app.add_subcommand("coeff", "Coefficient of the degree target in the polynomial f_k");
    coeff->add_option("--k", coeff_k, "Set size")->required();
    coeff->add_flag("--brute", coeff_brute, "Use the k <= 8 expansion oracle instead");

    int table_from = 10, table_to = 23;
    auto* table =
        app.add_subcommand("coeff-table", "Recompute the published coefficient table and diff it");
    table->add_option("--from", table_from, "First k");
    table->add_option("--to", table_to, "Last k");

    auto* oracle = app.add_subcommand("oracle", "Brute-force checks on concrete groups");
    oracle->require_subcommand(1);
    std::string group_spec;
    int size_cap = 0;
    std::uint64_t budget = default_enumeration_budget;
    auto* graham = oracle->add_subcommand(
        "graham", "Sequence every subset of the nonzero elements, up to a size cap");
    graham->add_option("--group", group_spec, "Group spec, e.g. Z12 or Z2xZ4")->required();
    graham->add_option("--size-cap", size_cap, "Largest subset size (default: all sizes)");
    graham->add_option("--budget", budget, "Refuse enumerations beyond this many subsets");

    auto* charac = oracle->add_subcommand(
        "characterize", "Check that distinct-sum-closed subsets are subgroups minus identity");
    charac->add_option("--group", group_spec, "Group spec, e.g. Z12 or Z2xZ4")->required();
    charac->add_option("--budget", budget, "Refuse enumerations beyond this many subsets");

    auto* dich = oracle->add_subcommand(
        "dichotomy", "Check merge-pair-or-subgroup (and, in cyclic groups, translation) splits");
    dich->add_option("--group", group_spec, "Group spec, e.g. Z12 or Z2xZ4")->required();
    dich->add_option("--budget", budget, "Refuse enumerations beyond this many subsets");

    int cv_k = 0, cv_modulus = 0;
    std::string cv_mode;
    std::uint64_t cv_samples = 100, cv_seed = 1;
    auto* cv = oracle->add_subcommand(
        "cross-validate", "Instantiate merge scenarios with random concrete sets in Z_n");
    cv->add_option("--k", cv_k, "Set size after the merge is undone")->required();
    cv->add_option("--mode", cv_mode, "general, zero-sum, or zero-sum-distinct")->required();
    cv->add_option("--modulus", cv_modulus, "Cyclic group order")->required();
    cv->add_option("--samples", cv_samples, "Instantiations per scenario");
    cv->add_option("--seed", cv_seed, "Base RNG seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (prove->parsed()) return run_prove(po);
    if (verify->parsed()) return run_verify(transcript_path);
    if (coeff->parsed()) return run_coeff(coeff_k, coeff_brute);
    if (table->parsed()) return run_coeff_table(table_from, table_to);
    if (graham->parsed()) return run_graham(group_spec, size_cap, budget);
    if (charac->parsed()) return run_characterize(group_spec, budget);
    if (dich->parsed()) return run_dichotomy(group_spec, budget);
    if (cv->parsed()) return run_cross_validate(cv_k, cv_mode, cv_modulus, cv_samples, cv_seed);
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return dispatch(argc, argv);
    } catch (const InvalidInput& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const BudgetExceeded& e) {
        std::cerr << "budget exceeded: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 4;
    }
}
