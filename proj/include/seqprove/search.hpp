#pragma once

// Breadth-first counterexample search with exact certificates.
//
// A node holds an ordering of the k symbols and a system of 0/1 rows; every
// row asserts that the corresponding subset of a hypothetical counterexample
// sums to zero. The root carries the ambient seed rows. Expanding a node
// walks all admissible index intervals of its ordering: each interval's
// incidence vector becomes a new row in the child, and the child's ordering
// moves one boundary element across the interval edge, which is exactly the
// move that makes the new row a forced partial-sum coincidence in the child.
// A node dies when its rows linearly force an impossibility: some e_i (an
// element would be zero), some e_i - e_j (two elements equal), in the
// distinct mode some e_i + e_j (a forbidden inverse pair), or one of the
// ambient compression constraints. Forcing means span membership, over Z or
// over Q depending on the configured arithmetic, and each certificate ships
// its multiplier vector.
//
// If every branch dies, no counterexample ordering survives, which is the
// sequenceability statement for the configured mode. The engine is level
// synchronous so that runs are reproducible: workers expand disjoint chunks
// of a level into preassigned slots and a single merge pass assigns ids and
// emits records in canonical order, making transcripts byte-identical for
// any thread count.

#include <seqprove/common.hpp>
#include <seqprove/compression.hpp>
#include <seqprove/exact_linalg.hpp>

#include <atomic>
#include <chrono>
#include <cstring>
#include <functional>
#include <optional>
#include <thread>

namespace seqprove {

using Ordering = std::vector<std::uint8_t>;  // permutation of 1..k

inline Ordering identity_ordering(int k) {
    Ordering o(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) o[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(i + 1);
    return o;
}

// Closed index interval [lo, hi] into an ordering, 0-based.
struct Interval {
    int lo = 0;
    int hi = 0;
    bool operator==(const Interval&) const = default;
};

// Semantic run parameters. Everything here changes either the tree or the
// meaning of its verdict, so all of it lands in the transcript header.
// Thread count is deliberately absent: it may never affect output.
struct ModeConfig {
    int k = 0;
    Mode mode = Mode::general;
    Arith arith = Arith::integer;
    DupPolicy dup_policy = DupPolicy::skip;
    IntervalPolicy interval_policy = IntervalPolicy::capped;
    LeafPolicy leaf_policy = LeafPolicy::strict;
    std::optional<int> max_depth;
    std::optional<std::uint64_t> max_nodes;
    std::uint64_t seed = 0;  // selects the screening prime

    void validate() const {
        require(k >= 2 && k <= max_k, "k out of range");
        if (max_depth) require(*max_depth >= 0, "negative depth limit");
        if (max_nodes) require(*max_nodes >= 1, "node budget must be positive");
    }
};

// Proper intervals only: the full interval's sum is the whole-set sum, which
// no premise constrains. In the zero-sum modes the complement of an interval
// carries the negated sum, so the paper policy keeps only widths up to
// floor(k/2); the conservative policy keeps every proper interval.
inline std::vector<Interval> admissible_intervals(int k, Mode mode, IntervalPolicy pol) {
    require(k >= 2 && k <= max_k, "k out of range");
    std::vector<Interval> out;
    for (int i = 0; i < k; ++i) {
        for (int j = i + 1; j < k; ++j) {
            if (i == 0 && j == k - 1) continue;
            if (pol == IntervalPolicy::paper && mode != Mode::general && j - i > k / 2)
                continue;
            out.push_back({i, j});
        }
    }
    return out;
}

inline std::vector<Interval> admissible_intervals(const ModeConfig& c) {
    return admissible_intervals(c.k, c.mode, c.interval_policy);
}

inline RowMask incidence_mask(const Ordering& o, Interval iv) {
    require(iv.lo >= 0 && iv.lo < iv.hi && iv.hi < static_cast<int>(o.size()),
            "interval out of range");
    RowMask m = 0;
    for (int p = iv.lo; p <= iv.hi; ++p)
        m |= RowMask(1) << (o[static_cast<std::size_t>(p)] - 1);
    return m;
}

inline IntVec incidence_vector(const Ordering& o, Interval iv) {
    return mask_to_vec(incidence_mask(o, iv), static_cast<int>(o.size()));
}

// The child ordering: one element crosses the interval boundary, so the
// interval's element set appears in the child as a run of positions whose
// partial sums collide, which is what justified adding the row.
inline Ordering child_ordering(const Ordering& o, Interval iv) {
    Ordering c = o;
    if (iv.lo >= 1)
        std::swap(c[static_cast<std::size_t>(iv.lo)], c[static_cast<std::size_t>(iv.lo - 1)]);
    else
        std::swap(c[static_cast<std::size_t>(iv.hi)], c[static_cast<std::size_t>(iv.hi + 1)]);
    return c;
}

struct SearchNode {
    std::uint64_t id = 0;
    std::optional<std::uint64_t> parent_id;
    int depth = 0;
    Ordering ordering;
    std::vector<RowMask> rows;  // seed rows first, then added rows in edge order
    std::optional<Interval> via;
    bool via_follow = false;
    // Orderings of the ancestors sharing this node's row set, oldest first.
    // Only the follow policy populates it; it is the cycle guard.
    std::vector<Ordering> follow_streak;
};

inline SearchNode make_root(const ModeConfig& cfg, const std::vector<RowMask>& seeded) {
    cfg.validate();
    SearchNode n;
    n.ordering = identity_ordering(cfg.k);
    n.rows = seeded;
    return n;
}

enum class CertKind { zero_element, equality, inverse_pair, compression };

inline const char* to_string(CertKind k) {
    switch (k) {
        case CertKind::zero_element: return "zero_element";
        case CertKind::equality: return "equality";
        case CertKind::inverse_pair: return "inverse_pair";
        default: return "compression";
    }
}

struct Certificate {
    CertKind kind = CertKind::zero_element;
    int i = 0, j = 0;  // 1-based symbols for the element-level kinds
    RowMask w = 0;     // the matched constraint for compression kind
    IntVec target;
    SpanWitness witness;
};

struct Candidate {
    CertKind kind;
    int i, j;
    RowMask w;
    IntVec target;
};

// Candidate impossibilities in canonical order; the checker takes the first
// span member. Inverse pairs (including 2 e_i, a forced involution) are
// contradictions only when the mode outlaws them.
inline std::vector<Candidate> certificate_candidates(int k, Mode mode,
                                                     const std::vector<RowMask>& cons) {
    std::vector<Candidate> out;
    for (int i = 1; i <= k; ++i) {
        IntVec t(static_cast<std::size_t>(k), 0);
        t[static_cast<std::size_t>(i - 1)] = 1;
        out.push_back({CertKind::zero_element, i, 0, 0, std::move(t)});
    }
    for (int i = 1; i <= k; ++i)
        for (int j = i + 1; j <= k; ++j) {
            IntVec t(static_cast<std::size_t>(k), 0);
            t[static_cast<std::size_t>(i - 1)] = 1;
            t[static_cast<std::size_t>(j - 1)] = -1;
            out.push_back({CertKind::equality, i, j, 0, std::move(t)});
        }
    if (mode == Mode::zero_sum_no_inverse)
        for (int i = 1; i <= k; ++i)
            for (int j = i; j <= k; ++j) {
                IntVec t(static_cast<std::size_t>(k), 0);
                t[static_cast<std::size_t>(i - 1)] += 1;
                t[static_cast<std::size_t>(j - 1)] += 1;
                out.push_back({CertKind::inverse_pair, i, j, 0, std::move(t)});
            }
    for (RowMask w : cons)
        out.push_back({CertKind::compression, 0, 0, w, mask_to_vec(w, k)});
    return out;
}

// Candidates plus their reductions modulo the screening prime.
struct CandidateSet {
    int k = 0;
    Arith arith = Arith::integer;
    std::vector<Candidate> list;
    std::uint64_t prime = 0;
    std::vector<std::vector<std::uint64_t>> reduced;

    static CandidateSet build(const ModeConfig& cfg, const std::vector<RowMask>& cons,
                              bool with_prefilter = true) {
        CandidateSet cs;
        cs.k = cfg.k;
        cs.arith = cfg.arith;
        cs.list = certificate_candidates(cfg.k, cfg.mode, cons);
        if (with_prefilter) {
            cs.prime = prefilter_prime(cfg.seed);
            ModpEchelon scratch(cfg.k, cs.prime);
            for (const auto& c : cs.list) cs.reduced.push_back(scratch.reduce_vec(c.target));
        }
        return cs;
    }
};

// First certificate the rows force, in candidate order. The mod-p screen
// discards most non-members cheaply; integer combinations always survive
// reduction, so in integer arithmetic a screen miss is exact. In rational
// arithmetic a member whose witness denominator is divisible by the prime
// would be screened out; that can only delay certification, never falsify it.
inline std::optional<Certificate> check_certificates(const std::vector<RowMask>& rows,
                                                     const CandidateSet& cs) {
    std::optional<ModpEchelon> screen;
    if (cs.prime) {
        screen.emplace(cs.k, cs.prime);
        for (RowMask r : rows) screen->add_mask(r);
    }
    for (std::size_t ci = 0; ci < cs.list.size(); ++ci) {
        if (screen && !screen->contains_reduced(cs.reduced[ci])) continue;
        const Candidate& c = cs.list[ci];
        auto w = cs.arith == Arith::integer
                     ? integer_span_member_masks(rows, cs.k, c.target)
                     : rational_span_member_masks(rows, cs.k, c.target);
        if (!w) continue;
        return Certificate{c.kind, c.i, c.j, c.w, c.target, std::move(*w)};
    }
    return std::nullopt;
}

// Reference form: builds the candidate list on the fly and skips the screen.
inline std::optional<Certificate> check_certificates(const SearchNode& n,
                                                     const ModeConfig& cfg,
                                                     const std::vector<RowMask>& cons) {
    ModeConfig c = cfg;
    c.validate();
    CandidateSet cs = CandidateSet::build(c, cons, false);
    return check_certificates(n.rows, cs);
}

// All children of a node in interval order. Duplicate-row intervals are
// dropped (skip) or become pure reordering edges (follow); a follow child
// repeating an ancestor state with the same rows would loop forever, so it
// is suppressed and counted instead.
inline std::vector<SearchNode> expand(const SearchNode& n, const ModeConfig& cfg,
                                      std::uint64_t* suppressed = nullptr) {
    cfg.validate();
    std::vector<SearchNode> out;
    for (Interval iv : admissible_intervals(cfg)) {
        RowMask m = incidence_mask(n.ordering, iv);
        bool dup = std::find(n.rows.begin(), n.rows.end(), m) != n.rows.end();
        if (dup && cfg.dup_policy == DupPolicy::skip) continue;
        SearchNode child;
        child.parent_id = n.id;
        child.depth = n.depth + 1;
        child.ordering = child_ordering(n.ordering, iv);
        child.via = iv;
        if (dup) {
            bool seen = child.ordering == n.ordering;
            for (const auto& o : n.follow_streak) seen = seen || o == child.ordering;
            if (seen) {
                if (suppressed) ++*suppressed;
                continue;
            }
            child.rows = n.rows;
            child.via_follow = true;
            child.follow_streak = n.follow_streak;
            child.follow_streak.push_back(n.ordering);
        } else {
            child.rows = n.rows;
            child.rows.push_back(m);
        }
        out.push_back(std::move(child));
    }
    return out;
}

enum class Verdict { proved, inconclusive };

inline const char* to_string(Verdict v) {
    return v == Verdict::proved ? "proved" : "inconclusive";
}

enum class NodeStatus { open, expanded, certified };

inline const char* to_string(NodeStatus s) {
    switch (s) {
        case NodeStatus::open: return "open";
        case NodeStatus::expanded: return "expanded";
        default: return "certified";
    }
}

struct NodeRecord {
    std::uint64_t id = 0;
    std::optional<std::uint64_t> parent;
    int depth = 0;
    Ordering ordering;
    std::optional<Interval> interval;
    std::optional<RowMask> row;  // absent on the root and on follow edges
    NodeStatus status = NodeStatus::open;
    std::uint64_t children = 0;
    std::optional<Certificate> cert;
};

struct RunHeader {
    ModeConfig config;
    std::optional<MergeScenario> scenario;
    std::vector<RowMask> seeded_rows;
    std::vector<RowMask> initial_cons;
};

struct ProofResult {
    Verdict verdict = Verdict::inconclusive;
    bool aborted = false;
    std::uint64_t node_count = 0;
    int max_depth_reached = 0;
    std::uint64_t certificates_by_kind[4] = {};
    Int max_witness_denominator = 1;
    std::uint64_t open_childless = 0;    // expanded to nothing, uncertified
    std::uint64_t open_unprocessed = 0;  // cut off by depth or node budget
    std::uint64_t suppressed = 0;        // follow-cycle children not created

    std::uint64_t certified() const {
        return certificates_by_kind[0] + certificates_by_kind[1] +
               certificates_by_kind[2] + certificates_by_kind[3];
    }
};

// Observer for run output. Records arrive strictly in id order; ids are
// dense, the root is 0, and levels are contiguous.
struct RunSink {
    virtual void on_header(const RunHeader&) {}
    virtual void on_node(const NodeRecord&) {}
    virtual void on_summary(const ProofResult&) {}
    virtual ~RunSink() = default;
};

struct LevelProgress {
    int depth;
    std::uint64_t level_size;
    std::uint64_t total_nodes;
    double seconds;
};

struct EngineOptions {
    int threads = 1;
    bool use_prefilter = true;
    std::optional<MergeScenario> scenario;  // provenance for the header only
    RunSink* sink = nullptr;
    std::function<void(const LevelProgress&)> progress;
};

namespace detail {

// Compact engine records. A pending node is one byte-packed edge out of an
// already-expanded node; its ordering, rows, and cycle guard replay from the
// chain of pooled edges, so a queued node costs eight bytes instead of three
// heap vectors and the frontier of a hundred-million-node level fits in
// memory.
struct EdgeRef {
    std::uint32_t parent = 0;  // pool index of the expanded parent
    std::uint8_t lo = 0, hi = 0;
    std::uint8_t flags = 0;
};

constexpr std::uint8_t edge_follow = 1;  // reordering edge, no row added
constexpr std::uint8_t edge_root = 2;

// Edge queued during expansion; the owning entry is implicit in stream order.
struct PendingEdge {
    std::uint8_t lo, hi, flags;
};

enum class EntryState : std::uint8_t { certified, expanded, childless, unprocessed };

// Node state replayed from the pooled edge chain, with reusable buffers.
struct ReplayBuf {
    Ordering ordering;
    std::vector<RowMask> rows;
    std::vector<Ordering> streak;
    std::vector<std::uint32_t> chain;
};

inline void replay_state(const std::vector<EdgeRef>& pool, std::uint32_t idx, int k,
                         const std::vector<RowMask>& seeded, ReplayBuf& out,
                         bool want_streak) {
    out.chain.clear();
    for (std::uint32_t cur = idx; !(pool[cur].flags & edge_root); cur = pool[cur].parent)
        out.chain.push_back(cur);
    out.ordering = identity_ordering(k);
    out.rows = seeded;
    out.streak.clear();
    for (auto it = out.chain.rbegin(); it != out.chain.rend(); ++it) {
        const EdgeRef& e = pool[*it];
        const Interval iv{e.lo, e.hi};
        if (e.flags & edge_follow) {
            if (want_streak) out.streak.push_back(out.ordering);
        } else {
            if (want_streak) out.streak.clear();
            out.rows.push_back(incidence_mask(out.ordering, iv));
        }
        out.ordering = child_ordering(out.ordering, iv);
    }
}

inline std::uint64_t modp_inverse(std::uint64_t a, std::uint64_t p) {
    std::uint64_t r = 1, b = a % p, e = p - 2;
    while (e) {
        if (e & 1) r = r * b % p;
        b = b * b % p;
        e >>= 1;
    }
    return r;
}

// Membership-only certificate decision for a standalone row set; the root is
// the one node with no sibling group to amortise a screen over.
inline std::optional<std::uint16_t> decide_certificates(const std::vector<RowMask>& rows,
                                                        const CandidateSet& cs) {
    std::optional<ModpEchelon> screen;
    if (cs.prime) {
        screen.emplace(cs.k, cs.prime);
        for (RowMask r : rows) screen->add_mask(r);
    }
    for (std::size_t ci = 0; ci < cs.list.size(); ++ci) {
        if (screen && !screen->contains_reduced(cs.reduced[ci])) continue;
        auto w = cs.arith == Arith::integer
                     ? integer_span_member_masks(rows, cs.k, cs.list[ci].target, false)
                     : rational_span_member_masks(rows, cs.k, cs.list[ci].target, false);
        if (w) return static_cast<std::uint16_t>(ci);
    }
    return std::nullopt;
}

}  // namespace detail

// Level-synchronous proof search. Expands the root's tree until every branch
// is certified, exhausted, or cut by a limit, and reports verdict plus
// accounting.
//
// The frontier is a flat array of edges in parent-major order. The parallel
// phase computes, for every pending node, its certificate decision and its
// outgoing edges; all of that is a pure function of the edge and the pool, so
// any thread partition produces the same per-entry results. Siblings are
// contiguous, and a worker reconstructs each parent once: it replays the
// parent's state, builds the parent's mod-p echelon, reduces every candidate
// against it, and then screens each child by a single row update instead of
// a from-scratch elimination. A sequential merge pass then assigns dense ids
// in frontier order, re-solves the exact witness for each certified node,
// emits records, and queues the next level, making transcripts byte-identical
// for any thread count.
inline ProofResult bfs_prove(const ModeConfig& cfg, const std::vector<RowMask>& initial_cons,
                             const std::vector<RowMask>& seeded,
                             const EngineOptions& opt = {}) {
    cfg.validate();
    require(opt.threads >= 1, "thread count must be positive");
    for (RowMask w : initial_cons)
        require(w != 0 && w < (RowMask(1) << cfg.k), "constraint row out of range");
    for (RowMask w : seeded) require(w < (RowMask(1) << cfg.k), "seed row out of range");

    const auto t0 = std::chrono::steady_clock::now();
    const CandidateSet cands = CandidateSet::build(cfg, initial_cons, opt.use_prefilter);
    const std::vector<Interval> intervals = admissible_intervals(cfg);
    const std::size_t ncand = cands.list.size();
    const int k = cfg.k;

    if (opt.sink) opt.sink->on_header({cfg, opt.scenario, seeded, initial_cons});

    ProofResult res;
    res.node_count = 1;

    std::vector<detail::EdgeRef> pool;    // expanded nodes, the replay spine
    std::vector<std::uint64_t> pool_ids;  // node id per pool entry

    std::vector<detail::EdgeRef> level{{0, 0, 0, detail::edge_root}};
    std::uint64_t level_base = 0;  // id of the first entry of the level
    int level_depth = 0;
    bool aborting = false;

    // Per-entry outputs of the parallel phase.
    std::vector<detail::EntryState> state;
    std::vector<std::uint16_t> hit;  // candidate index for certified entries
    std::vector<std::uint32_t> nchild;

    while (!level.empty()) {
        res.max_depth_reached = level_depth;
        const std::size_t n = level.size();
        const bool depth_cut = cfg.max_depth && level_depth >= *cfg.max_depth;
        const bool expanding = !depth_cut && !aborting;

        state.assign(n, detail::EntryState::unprocessed);
        hit.assign(n, 0);
        nchild.assign(n, 0);

        const std::size_t nthreads = std::min<std::size_t>(
            static_cast<std::size_t>(opt.threads), std::max<std::size_t>(n, 1));
        std::vector<std::vector<detail::PendingEdge>> chunk_edges(nthreads);
        std::vector<std::uint64_t> chunk_suppressed(nthreads, 0);

        auto work = [&](std::size_t t) {
            const std::size_t begin = n * t / nthreads, end = n * (t + 1) / nthreads;
            auto& edges = chunk_edges[t];
            std::uint64_t suppressed = 0;

            detail::ReplayBuf parent;
            std::uint32_t cached = 0;
            bool cache_valid = false;
            std::optional<ModpEchelon> screen;
            std::vector<std::vector<std::uint64_t>> resid(ncand);
            std::vector<std::uint8_t> resid_zero(ncand, 0);
            std::vector<std::uint64_t> rrow;
            Ordering node_ord;

            auto rebuild_parent = [&](std::uint32_t pidx) {
                detail::replay_state(pool, pidx, k, seeded, parent, true);
                if (cands.prime) {
                    screen.emplace(k, cands.prime);
                    for (RowMask r : parent.rows) screen->add_mask(r);
                    for (std::size_t c = 0; c < ncand; ++c) {
                        resid[c] = cands.reduced[c];
                        screen->residual_inplace(resid[c]);
                        bool z = true;
                        for (auto x : resid[c]) z = z && x == 0;
                        resid_zero[c] = z;
                    }
                }
                cached = pidx;
                cache_valid = true;
            };

            auto exact_member = [&](const std::vector<RowMask>& rows, std::size_t c) {
                auto w = cands.arith == Arith::integer
                             ? integer_span_member_masks(rows, k, cands.list[c].target, false)
                             : rational_span_member_masks(rows, k, cands.list[c].target, false);
                return w.has_value();
            };

            for (std::size_t i = begin; i < end; ++i) {
                const detail::EdgeRef f = level[i];
                const bool is_root = f.flags & detail::edge_root;
                const bool follow = f.flags & detail::edge_follow;

                bool have_cert = false;
                std::uint16_t cidx = 0;
                bool pushed = false;

                if (is_root) {
                    node_ord = identity_ordering(k);
                    if (auto c = detail::decide_certificates(seeded, cands)) {
                        have_cert = true;
                        cidx = *c;
                    }
                } else {
                    if (!cache_valid || cached != f.parent) rebuild_parent(f.parent);
                    const Interval iv{f.lo, f.hi};
                    node_ord = child_ordering(parent.ordering, iv);
                    if (!follow) {
                        // A new row extends the parent system; the screen only
                        // needs a single update against the parent basis. A
                        // certificate candidate survives in the child iff its
                        // parent residual was already zero or is a multiple of
                        // the new row's residual.
                        const RowMask new_row = incidence_mask(parent.ordering, iv);
                        parent.rows.push_back(new_row);
                        pushed = true;
                        const std::uint64_t p = cands.prime;
                        if (p) {
                            rrow.assign(static_cast<std::size_t>(k), 0);
                            for (int b = 0; b < k; ++b)
                                if (new_row >> b & 1u) rrow[static_cast<std::size_t>(b)] = 1;
                            screen->residual_inplace(rrow);
                            int piv = -1;
                            for (int c2 = 0; c2 < k && piv < 0; ++c2)
                                if (rrow[static_cast<std::size_t>(c2)]) piv = c2;
                            if (piv >= 0) {
                                const std::uint64_t f0 =
                                    detail::modp_inverse(rrow[static_cast<std::size_t>(piv)], p);
                                for (auto& x : rrow) x = x * f0 % p;
                            }
                            for (std::size_t c = 0; c < ncand && !have_cert; ++c) {
                                bool screened_in;
                                if (resid_zero[c]) {
                                    screened_in = true;
                                } else if (piv < 0) {
                                    screened_in = false;
                                } else {
                                    const auto& rc = resid[c];
                                    const std::uint64_t f1 = rc[static_cast<std::size_t>(piv)];
                                    screened_in = f1 != 0;
                                    for (int c2 = 0; screened_in && c2 < k; ++c2) {
                                        const std::uint64_t sub =
                                            f1 * rrow[static_cast<std::size_t>(c2)] % p;
                                        const std::uint64_t v = rc[static_cast<std::size_t>(c2)];
                                        screened_in = (v >= sub ? v - sub : v + p - sub) == 0;
                                    }
                                }
                                if (screened_in && exact_member(parent.rows, c)) {
                                    have_cert = true;
                                    cidx = static_cast<std::uint16_t>(c);
                                }
                            }
                        } else {
                            for (std::size_t c = 0; c < ncand && !have_cert; ++c)
                                if (exact_member(parent.rows, c)) {
                                    have_cert = true;
                                    cidx = static_cast<std::uint16_t>(c);
                                }
                        }
                    }
                    // A follow edge keeps the parent's rows, and the parent
                    // expanded, so the same decision already came back empty.
                }

                if (have_cert) {
                    state[i] = detail::EntryState::certified;
                    hit[i] = cidx;
                } else if (expanding) {
                    const std::vector<RowMask>& rows = is_root ? seeded : parent.rows;
                    std::uint32_t cc = 0;
                    for (const Interval iv2 : intervals) {
                        const RowMask m2 = incidence_mask(node_ord, iv2);
                        const bool dup =
                            std::find(rows.begin(), rows.end(), m2) != rows.end();
                        std::uint8_t fl = 0;
                        if (dup) {
                            if (cfg.dup_policy == DupPolicy::skip) continue;
                            const Ordering o2 = child_ordering(node_ord, iv2);
                            bool seen = o2 == node_ord;
                            if (!is_root && follow) {
                                seen = seen || o2 == parent.ordering;
                                for (const auto& o : parent.streak) seen = seen || o == o2;
                            }
                            if (seen) {
                                ++suppressed;
                                continue;
                            }
                            fl = detail::edge_follow;
                        }
                        edges.push_back({static_cast<std::uint8_t>(iv2.lo),
                                         static_cast<std::uint8_t>(iv2.hi), fl});
                        ++cc;
                    }
                    nchild[i] = cc;
                    state[i] = cc ? detail::EntryState::expanded
                                  : detail::EntryState::childless;
                }
                if (pushed) parent.rows.pop_back();
            }
            chunk_suppressed[t] = suppressed;
        };

        if (nthreads <= 1) {
            work(0);
        } else {
            std::vector<std::thread> workers;
            for (std::size_t t = 0; t < nthreads; ++t) workers.emplace_back(work, t);
            for (auto& th : workers) th.join();
        }

        // Merge pass in frontier order: ids, records, accounting, next level.
        std::uint64_t total_children = 0;
        for (std::size_t i = 0; i < n; ++i) total_children += nchild[i];
        std::vector<detail::EdgeRef> next_level;
        next_level.reserve(total_children);

        detail::ReplayBuf rp;
        std::uint32_t rp_cached = 0;
        bool rp_valid = false;
        std::size_t echunk = 0, eoff = 0;

        for (std::size_t i = 0; i < n; ++i) {
            const detail::EdgeRef f = level[i];
            const bool is_root = f.flags & detail::edge_root;
            const bool follow = f.flags & detail::edge_follow;
            const std::uint64_t id = level_base + i;

            // Parent state is needed to name the node in a record and to
            // re-solve a certificate; skip the replay when neither applies.
            // Without a sink an integer-arithmetic certificate needs no
            // re-solve at all: only its kind is accounted, and an integer
            // witness always has denominator one.
            const bool want_witness =
                opt.sink || (state[i] == detail::EntryState::certified &&
                             cands.arith == Arith::rational);
            const bool want_state = want_witness;
            RowMask new_row = 0;
            if (want_state && !is_root && (!rp_valid || rp_cached != f.parent)) {
                detail::replay_state(pool, f.parent, k, seeded, rp, false);
                rp_cached = f.parent;
                rp_valid = true;
            }

            NodeRecord rec;
            if (want_state) {
                rec.id = id;
                rec.depth = level_depth;
                if (is_root) {
                    rec.ordering = identity_ordering(k);
                } else {
                    const Interval iv{f.lo, f.hi};
                    rec.parent = pool_ids[f.parent];
                    rec.interval = iv;
                    rec.ordering = child_ordering(rp.ordering, iv);
                    if (!follow) {
                        new_row = incidence_mask(rp.ordering, iv);
                        rec.row = new_row;
                    }
                }
            }

            switch (state[i]) {
                case detail::EntryState::certified: {
                    const Candidate& c = cands.list[hit[i]];
                    ++res.certificates_by_kind[static_cast<int>(c.kind)];
                    rec.status = NodeStatus::certified;
                    if (want_witness) {
                        bool pushed = false;
                        if (!is_root && !follow) {
                            rp.rows.push_back(new_row);
                            pushed = true;
                        }
                        const std::vector<RowMask>& rows = is_root ? seeded : rp.rows;
                        auto w = cands.arith == Arith::integer
                                     ? integer_span_member_masks(rows, k, c.target)
                                     : rational_span_member_masks(rows, k, c.target);
                        if (pushed) rp.rows.pop_back();
                        require(w.has_value(), "certificate vanished on re-solve");
                        if (w->denominator > res.max_witness_denominator)
                            res.max_witness_denominator = w->denominator;
                        rec.cert =
                            Certificate{c.kind, c.i, c.j, c.w, c.target, std::move(*w)};
                    }
                    break;
                }
                case detail::EntryState::expanded: {
                    rec.status = NodeStatus::expanded;
                    rec.children = nchild[i];
                    res.node_count += nchild[i];
                    pool.push_back(f);
                    pool_ids.push_back(id);
                    const auto self = static_cast<std::uint32_t>(pool.size() - 1);
                    for (std::uint32_t e = 0; e < nchild[i]; ++e) {
                        while (eoff == chunk_edges[echunk].size()) {
                            ++echunk;
                            eoff = 0;
                        }
                        const detail::PendingEdge& pe = chunk_edges[echunk][eoff++];
                        next_level.push_back({self, pe.lo, pe.hi, pe.flags});
                    }
                    break;
                }
                case detail::EntryState::childless:
                    rec.status = NodeStatus::open;
                    ++res.open_childless;
                    break;
                case detail::EntryState::unprocessed:
                    rec.status = NodeStatus::open;
                    ++res.open_unprocessed;
                    // Attribution: a level at the depth limit is a configured
                    // horizon; anything else unprocessed means the node
                    // budget fired.
                    if (!depth_cut) res.aborted = true;
                    break;
            }
            if (opt.sink) opt.sink->on_node(rec);
        }
        for (auto s : chunk_suppressed) res.suppressed += s;

        if (cfg.max_nodes && res.node_count > *cfg.max_nodes) aborting = true;
        if (opt.progress) {
            std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
            opt.progress({level_depth, n, res.node_count, dt.count()});
        }
        level = std::move(next_level);
        level_base += n;
        ++level_depth;
    }

    const bool complete = !res.aborted && res.open_unprocessed == 0 && res.suppressed == 0;
    const bool leaves_ok =
        cfg.leaf_policy == LeafPolicy::paper || res.open_childless == 0;
    res.verdict = complete && leaves_ok ? Verdict::proved : Verdict::inconclusive;
    if (opt.sink) opt.sink->on_summary(res);
    return res;
}

}  // namespace seqprove
