#pragma once

// Shared scalar types and error taxonomy. Everything downstream works with
// exact arithmetic (GMP): results are proofs, so no floating point anywhere.

#include <gmpxx.h>

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace seqprove {

using Int = mpz_class;
using Rat = mpq_class;
using IntVec = std::vector<Int>;

// Row of a constraint system over k symbols, stored as a bitset. Bit (i-1)
// set means symbol i participates with coefficient 1. All constraint rows
// produced by the search and by compression are 0/1 vectors, so this is
// lossless; general integer vectors only appear as certificate targets.
using RowMask = std::uint32_t;

// Bitset rows cap the symbol count. Everything desk-sized lives well below
// this; the published computations stop at k = 23.
inline constexpr int max_k = 30;

inline constexpr const char* engine_version = "1.0.0";

// Caller handed us something malformed (bad k, ragged matrix, unparsable
// group spec, ...). Maps to CLI exit code 2.
struct InvalidInput : std::runtime_error {
    explicit InvalidInput(const std::string& what) : std::runtime_error(what) {}
};

// An operation refused to start or continue because it would blow an explicit
// budget (node cap, subset-enumeration cap). Maps to CLI exit code 3.
struct BudgetExceeded : std::runtime_error {
    explicit BudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};

// Which sequenceability statement is being attacked. general places no
// condition on the set; zero-sum requires the elements to sum to zero;
// zero-sum-distinct additionally forbids {x, -x} pairs (and involutions),
// which is what unlocks the inverse-pair certificate.
enum class Mode { general, zero_sum, zero_sum_no_inverse };

// Certificate arithmetic: integer demands multipliers in Z (valid in every
// abelian group); rational allows denominators (valid only where they are
// invertible, e.g. groups of odd prime order).
enum class Arith { integer, rational };

// What to do with an interval whose incidence vector is already a row:
// skip drops the edge, follow takes it as a pure reordering step.
enum class DupPolicy { skip, follow };

// Interval admissibility: capped drops widths past half in the zero-sum
// modes (a wide block and its complement carry the same relation there);
// conservative keeps every proper interval.
enum class IntervalPolicy { capped, conservative };

// How an uncertified leaf with no admissible children counts: strict says
// the run is inconclusive, lenient accepts such leaves as closed.
enum class LeafPolicy { strict, lenient };

inline const char* to_string(Mode m) {
    switch (m) {
        case Mode::general: return "general";
        case Mode::zero_sum: return "zero-sum";
        default: return "zero-sum-distinct";
    }
}
inline const char* to_string(Arith a) {
    return a == Arith::integer ? "integer" : "rational";
}
inline const char* to_string(DupPolicy d) {
    return d == DupPolicy::skip ? "skip" : "follow";
}
inline const char* to_string(IntervalPolicy p) {
    return p == IntervalPolicy::capped ? "capped" : "conservative";
}
inline const char* to_string(LeafPolicy p) {
    return p == LeafPolicy::strict ? "strict" : "lenient";
}

inline Mode mode_from_string(const std::string& s) {
    if (s == "general") return Mode::general;
    if (s == "zero-sum") return Mode::zero_sum;
    if (s == "zero-sum-distinct") return Mode::zero_sum_no_inverse;
    throw InvalidInput("unknown mode: " + s);
}
inline Arith arith_from_string(const std::string& s) {
    if (s == "integer") return Arith::integer;
    if (s == "rational") return Arith::rational;
    throw InvalidInput("unknown arithmetic: " + s);
}
inline DupPolicy dup_policy_from_string(const std::string& s) {
    if (s == "skip") return DupPolicy::skip;
    if (s == "follow") return DupPolicy::follow;
    throw InvalidInput("unknown duplicate policy: " + s);
}
inline IntervalPolicy interval_policy_from_string(const std::string& s) {
    if (s == "capped") return IntervalPolicy::capped;
    if (s == "conservative") return IntervalPolicy::conservative;
    throw InvalidInput("unknown interval policy: " + s);
}
inline LeafPolicy leaf_policy_from_string(const std::string& s) {
    if (s == "strict") return LeafPolicy::strict;
    if (s == "lenient") return LeafPolicy::lenient;
    throw InvalidInput("unknown leaf policy: " + s);
}

inline IntVec mask_to_vec(RowMask m, int k) {
    IntVec v(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i)
        if (m >> i & 1u) v[static_cast<std::size_t>(i)] = 1;
    return v;
}

inline int mask_popcount(RowMask m) { return std::popcount(m); }

inline void require(bool ok, const std::string& what) {
    if (!ok) throw InvalidInput(what);
}

}  // namespace seqprove
