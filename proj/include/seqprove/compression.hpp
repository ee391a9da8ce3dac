#pragma once

// Constraint lifting for the merge recursion.
//
// The recursion replaces two set members a_1, a_2 by their sum and asks for a
// sequencing of the smaller set. If x_1 .. x_{k-1} is such a sequencing with
// the merged element at position merge_index, every contiguous block sum
// x_{s+1} + .. + x_t is a difference of two distinct partial sums and hence
// nonzero, except the whole sequence, whose sum may legitimately vanish.
// Lifting each block back through the relabeling (the merged element expands
// to symbols 1 and 2, survivors keep one symbol each) yields rows over the
// original k symbols that the search may treat as ambient constraints: any
// ordering killed by one of them cannot arise from this merge scenario.

#include <seqprove/common.hpp>

#include <algorithm>

namespace seqprove {

struct MergeScenario {
    int k;            // size of the original set
    Mode mode;
    int merge_index;  // position (1-based) of the merged element among k-1

    void validate() const {
        require(k >= 3 && k <= max_k, "merge scenario needs 3 <= k <= max_k");
        require(merge_index >= 1 && merge_index <= k - 1, "merge index out of range");
        // With a zero-sum set, translating the compressed sequencing cyclically
        // is free, so position 1 is representative; the general statement has
        // no such translation and needs every position.
        if (mode != Mode::general)
            require(merge_index == 1, "zero-sum scenarios fix the merge at position 1");
    }
};

inline std::vector<MergeScenario> scenarios_for(int k, Mode mode) {
    require(k >= 3 && k <= max_k, "merge scenarios need 3 <= k <= max_k");
    std::vector<MergeScenario> out;
    if (mode == Mode::general) {
        for (int m = 1; m <= k - 1; ++m) out.push_back({k, mode, m});
    } else {
        out.push_back({k, mode, 1});
    }
    return out;
}

// Symbols occupied by position p (1-based) of the compressed sequence: the
// merged element owns symbols 1 and 2, survivors shift to make room.
inline RowMask position_bits(const MergeScenario& sc, int p) {
    sc.validate();
    require(p >= 1 && p <= sc.k - 1, "compressed position out of range");
    if (p == sc.merge_index) return 0b11;
    int label = p < sc.merge_index ? p + 2 : p + 1;
    return RowMask(1) << (label - 1);
}

inline std::vector<std::vector<int>> position_labels(const MergeScenario& sc) {
    std::vector<std::vector<int>> out;
    for (int p = 1; p <= sc.k - 1; ++p) {
        RowMask m = position_bits(sc, p);
        std::vector<int> labels;
        for (int b = 0; b < sc.k; ++b)
            if (m >> b & 1u) labels.push_back(b + 1);
        out.push_back(std::move(labels));
    }
    return out;
}

// All lifted block constraints, shortest blocks first and left to right
// within a length, first occurrence kept on collision. The full block is
// excluded: its sum is the set sum, which the premises leave unconstrained.
inline std::vector<RowMask> initial_constraints(const MergeScenario& sc) {
    sc.validate();
    const int n = sc.k - 1;  // positions in the compressed sequence
    std::vector<RowMask> out;
    std::size_t generated = 0;
    for (int len = 1; len <= n; ++len) {
        for (int s = 0; s + len <= n; ++s) {
            int t = s + len;
            if (s == 0 && t == n) continue;  // whole sequence
            ++generated;
            RowMask w = 0;
            for (int p = s + 1; p <= t; ++p) w |= position_bits(sc, p);
            if (std::find(out.begin(), out.end(), w) == out.end()) out.push_back(w);
        }
    }
    // (s, t) pairs with 0 <= s < t <= n, minus the excluded whole block.
    require(generated == static_cast<std::size_t>(sc.k) * (sc.k - 1) / 2 - 1,
            "constraint census mismatch");
    return out;
}

// Ambient rows every ordering satisfies by assumption. A zero-sum set makes
// the all-ones row a genuine linear relation among the symbols; the general
// problem has nothing of the sort.
inline std::vector<RowMask> seed_rows(int k, Mode mode) {
    require(k >= 2 && k <= max_k, "k out of range");
    if (mode == Mode::general) return {};
    return {(RowMask(1) << k) - 1};
}

}  // namespace seqprove
