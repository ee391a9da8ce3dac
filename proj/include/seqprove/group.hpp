#pragma once

// Concrete finite abelian groups and brute-force ground truth.
//
// Everything here is deliberately naive: sequencings are found by exhaustive
// backtracking, conjectures are checked by enumerating every subset, and the
// structural statements behind the merge recursion are verified element by
// element. The symbolic engine never calls into this header; it exists to
// check the engine's premises and conclusions against reality on groups small
// enough to enumerate.

#include <seqprove/common.hpp>
#include <seqprove/compression.hpp>

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace seqprove {

// Elements are indices into the mixed-radix enumeration of the factor
// product: index 0 is the identity, and arithmetic goes through lookup
// tables when the order permits.
using Elem = int;

class FiniteAbelianGroup {
  public:
    explicit FiniteAbelianGroup(std::vector<int> factors) : factors_(std::move(factors)) {
        require(!factors_.empty(), "group needs at least one cyclic factor");
        long long ord = 1;
        for (int f : factors_) {
            require(f >= 2, "cyclic factor must be at least 2");
            ord *= f;
            require(ord <= (1 << 20), "group order too large for brute force");
        }
        order_ = static_cast<int>(ord);
        neg_.resize(static_cast<std::size_t>(order_));
        for (Elem a = 0; a < order_; ++a) neg_[static_cast<std::size_t>(a)] = negate(a);
        if (order_ <= table_cap) {
            add_.resize(static_cast<std::size_t>(order_) * static_cast<std::size_t>(order_));
            for (Elem a = 0; a < order_; ++a)
                for (Elem b = 0; b < order_; ++b)
                    add_[static_cast<std::size_t>(a) * static_cast<std::size_t>(order_) +
                         static_cast<std::size_t>(b)] = add_slow(a, b);
        }
    }

    // Grammar: "Z" INT ("x" "Z" INT)*, e.g. Z12 or Z2xZ4.
    static FiniteAbelianGroup parse(const std::string& spec) {
        std::vector<int> factors;
        std::size_t i = 0;
        while (i < spec.size()) {
            if (!factors.empty()) {
                require(spec[i] == 'x', "group spec: expected 'x' between factors");
                ++i;
            }
            require(i < spec.size() && spec[i] == 'Z', "group spec: expected 'Z'");
            ++i;
            std::size_t start = i;
            while (i < spec.size() && spec[i] >= '0' && spec[i] <= '9') ++i;
            require(i > start, "group spec: 'Z' without an order");
            require(i - start <= 7, "group spec: factor too large");
            factors.push_back(std::stoi(spec.substr(start, i - start)));
        }
        require(!factors.empty(), "group spec: empty");
        return FiniteAbelianGroup(std::move(factors));
    }

    int order() const { return order_; }
    const std::vector<int>& factors() const { return factors_; }
    Elem zero() const { return 0; }

    Elem add(Elem a, Elem b) const {
        if (!add_.empty())
            return add_[static_cast<std::size_t>(a) * static_cast<std::size_t>(order_) +
                        static_cast<std::size_t>(b)];
        return add_slow(a, b);
    }

    Elem neg(Elem a) const { return neg_[static_cast<std::size_t>(a)]; }

    Elem sub(Elem a, Elem b) const { return add(a, neg(b)); }

    std::vector<int> residues(Elem a) const {
        std::vector<int> r(factors_.size());
        for (std::size_t t = factors_.size(); t-- > 0;) {
            r[t] = a % factors_[t];
            a /= factors_[t];
        }
        return r;
    }

    Elem element(const std::vector<int>& residues) const {
        require(residues.size() == factors_.size(), "residue tuple length mismatch");
        Elem a = 0;
        for (std::size_t t = 0; t < factors_.size(); ++t) {
            int f = factors_[t];
            int r = residues[t] % f;
            if (r < 0) r += f;
            a = a * f + r;
        }
        return a;
    }

    std::string show(Elem a) const {
        if (factors_.size() == 1) return std::to_string(a);
        auto r = residues(a);
        std::string s = "(";
        for (std::size_t t = 0; t < r.size(); ++t) {
            if (t) s += ",";
            s += std::to_string(r[t]);
        }
        return s + ")";
    }

    std::string name() const {
        std::string s;
        for (std::size_t t = 0; t < factors_.size(); ++t) {
            if (t) s += "x";
            s += "Z" + std::to_string(factors_[t]);
        }
        return s;
    }

    // Canonical invariant factors d_1 | d_2 | ... | d_t, ascending. Reporting
    // only; arithmetic always uses the factors as given.
    std::vector<int> invariant_factors() const {
        // Split every factor into prime powers, then zip the largest powers
        // across primes into one invariant factor, the second largest into
        // the next, and so on.
        std::vector<std::pair<int, std::vector<int>>> primes;  // prime -> powers, descending
        for (int f : factors_) {
            int rem = f;
            for (int p = 2; p * p <= rem; ++p) {
                if (rem % p) continue;
                int q = 1;
                while (rem % p == 0) {
                    rem /= p;
                    q *= p;
                }
                powers_for(primes, p).push_back(q);
            }
            if (rem > 1) powers_for(primes, rem).push_back(rem);
        }
        std::size_t depth = 0;
        for (auto& [p, pw] : primes) {
            std::sort(pw.begin(), pw.end(), std::greater<int>());
            depth = std::max(depth, pw.size());
        }
        std::vector<int> inv(depth, 1);
        for (auto& [p, pw] : primes)
            for (std::size_t i = 0; i < pw.size(); ++i) inv[i] *= pw[i];
        std::reverse(inv.begin(), inv.end());
        return inv;
    }

  private:
    static constexpr int table_cap = 1024;

    static std::vector<int>& powers_for(std::vector<std::pair<int, std::vector<int>>>& primes,
                                        int p) {
        for (auto& [q, pw] : primes)
            if (q == p) return pw;
        primes.emplace_back(p, std::vector<int>{});
        return primes.back().second;
    }

    Elem add_slow(Elem a, Elem b) const {
        Elem out = 0;
        for (std::size_t t = factors_.size(); t-- > 0;) {
            int f = factors_[t];
            int ra = a % f, rb = b % f;
            a /= f;
            b /= f;
            out += ((ra + rb) % f) * stride(t);
        }
        return out;
    }

    Elem negate(Elem a) const {
        Elem out = 0;
        for (std::size_t t = factors_.size(); t-- > 0;) {
            int f = factors_[t];
            int ra = a % f;
            a /= f;
            out += ((f - ra) % f) * stride(t);
        }
        return out;
    }

    int stride(std::size_t t) const {
        int s = 1;
        for (std::size_t u = t + 1; u < factors_.size(); ++u) s *= factors_[u];
        return s;
    }

    std::vector<int> factors_;
    int order_ = 0;
    std::vector<Elem> add_;
    std::vector<Elem> neg_;
};

namespace detail {
inline void partitions(int n, int max_part, std::vector<int>& cur,
                       std::vector<std::vector<int>>& out) {
    if (n == 0) {
        out.push_back(cur);
        return;
    }
    for (int p = std::min(n, max_part); p >= 1; --p) {
        cur.push_back(p);
        partitions(n - p, p, cur, out);
        cur.pop_back();
    }
}
}  // namespace detail

// Every isomorphism class of nontrivial abelian group of order <= max_order,
// presented with prime-power cyclic factors in ascending order.
inline std::vector<FiniteAbelianGroup> all_abelian_groups(int max_order) {
    require(max_order >= 2, "need max_order >= 2");
    std::vector<FiniteAbelianGroup> out;
    for (int n = 2; n <= max_order; ++n) {
        // One choice list per prime: the exponent partitions, as prime powers.
        std::vector<std::vector<std::vector<int>>> choices;
        int rem = n;
        for (int p = 2; rem > 1; ++p) {
            if (p * p > rem) p = rem;
            if (rem % p) continue;
            int e = 0;
            while (rem % p == 0) {
                rem /= p;
                ++e;
            }
            std::vector<std::vector<int>> parts;
            std::vector<int> cur;
            detail::partitions(e, e, cur, parts);
            for (auto& pr : parts)
                for (int& x : pr) {
                    int q = 1;
                    for (int t = 0; t < x; ++t) q *= p;
                    x = q;
                }
            choices.push_back(std::move(parts));
        }
        std::vector<std::size_t> pick(choices.size(), 0);
        while (true) {
            std::vector<int> factors;
            for (std::size_t t = 0; t < choices.size(); ++t)
                for (int q : choices[t][pick[t]]) factors.push_back(q);
            std::sort(factors.begin(), factors.end());
            out.emplace_back(std::move(factors));
            std::size_t t = 0;
            for (; t < pick.size(); ++t) {
                if (++pick[t] < choices[t].size()) break;
                pick[t] = 0;
            }
            if (t == pick.size()) break;
        }
    }
    return out;
}

// Partial sums p_1..p_m pairwise distinct and nonzero except possibly the
// last. Order matters; elements must be nonzero and distinct.
inline bool is_valid_sequencing(const FiniteAbelianGroup& G, const std::vector<Elem>& seq) {
    std::vector<char> seen(static_cast<std::size_t>(G.order()), 0);
    Elem p = 0;
    for (std::size_t i = 0; i < seq.size(); ++i) {
        p = G.add(p, seq[i]);
        if (p == 0 && i + 1 < seq.size()) return false;
        if (seen[static_cast<std::size_t>(p)]) return false;
        seen[static_cast<std::size_t>(p)] = 1;
    }
    return true;
}

// Exhaustive backtracking, candidates in ascending element order, pruning a
// prefix as soon as a partial sum repeats or vanishes early. A prefix
// violation dooms every completion, so the first sequencing found is also
// the first in lexicographic order.
inline std::optional<std::vector<Elem>> find_sequencing(const FiniteAbelianGroup& G,
                                                        std::vector<Elem> A) {
    require(!A.empty(), "sequencing search needs a nonempty set");
    require(A.size() <= 30, "set too large for brute-force sequencing");
    std::sort(A.begin(), A.end());
    require(A.front() != 0, "set contains the identity");
    require(std::adjacent_find(A.begin(), A.end()) == A.end(), "set has repeated elements");
    const int k = static_cast<int>(A.size());
    std::vector<Elem> seq;
    seq.reserve(static_cast<std::size_t>(k));
    std::vector<char> seen(static_cast<std::size_t>(G.order()), 0);
    std::uint32_t used = 0;
    auto dfs = [&](auto&& self, Elem sum, int filled) -> bool {
        if (filled == k) return true;
        for (int i = 0; i < k; ++i) {
            if (used >> i & 1u) continue;
            Elem p = G.add(sum, A[static_cast<std::size_t>(i)]);
            if (p == 0 && filled + 1 < k) continue;
            if (seen[static_cast<std::size_t>(p)]) continue;
            used |= 1u << i;
            seen[static_cast<std::size_t>(p)] = 1;
            seq.push_back(A[static_cast<std::size_t>(i)]);
            if (self(self, p, filled + 1)) return true;
            used &= ~(1u << i);
            seen[static_cast<std::size_t>(p)] = 0;
            seq.pop_back();
        }
        return false;
    };
    if (dfs(dfs, 0, 0)) return seq;
    return std::nullopt;
}

// Reference answer by plain permutation enumeration. Only for cross-checking
// the pruned search on tiny sets.
inline std::optional<std::vector<Elem>> find_sequencing_by_enumeration(
    const FiniteAbelianGroup& G, std::vector<Elem> A) {
    require(!A.empty() && A.size() <= 8, "enumeration oracle is for tiny sets");
    std::sort(A.begin(), A.end());
    do {
        if (is_valid_sequencing(G, A)) return A;
    } while (std::next_permutation(A.begin(), A.end()));
    return std::nullopt;
}

inline std::vector<Elem> nonzero_elements(const FiniteAbelianGroup& G) {
    std::vector<Elem> out;
    out.reserve(static_cast<std::size_t>(G.order() - 1));
    for (Elem a = 1; a < G.order(); ++a) out.push_back(a);
    return out;
}

// member must be an order-sized 0/1 table. A finite subset containing the
// identity and closed under addition is a subgroup.
inline bool is_subgroup(const FiniteAbelianGroup& G, const std::vector<char>& member) {
    if (!member[0]) return false;
    for (Elem a = 0; a < G.order(); ++a) {
        if (!member[static_cast<std::size_t>(a)]) continue;
        for (Elem b = a; b < G.order(); ++b) {
            if (!member[static_cast<std::size_t>(b)]) continue;
            if (!member[static_cast<std::size_t>(G.add(a, b))]) return false;
        }
    }
    return true;
}

inline bool closed_under_distinct_sums(const FiniteAbelianGroup& G, const std::vector<Elem>& A) {
    require(A.size() >= 2, "closure check needs at least two elements");
    std::vector<char> member(static_cast<std::size_t>(G.order()), 0);
    member[0] = 1;
    for (Elem a : A) member[static_cast<std::size_t>(a)] = 1;
    for (std::size_t i = 0; i < A.size(); ++i)
        for (std::size_t j = i + 1; j < A.size(); ++j)
            if (!member[static_cast<std::size_t>(G.add(A[i], A[j]))]) return false;
    return true;
}

// First pair (in ascending order) whose sum escapes A and the identity; the
// merge recursion compresses exactly such a pair.
inline std::optional<std::pair<Elem, Elem>> find_merge_pair(const FiniteAbelianGroup& G,
                                                            const std::vector<Elem>& A) {
    require(A.size() >= 2, "merge pair needs at least two elements");
    std::vector<Elem> s = A;
    std::sort(s.begin(), s.end());
    std::vector<char> member(static_cast<std::size_t>(G.order()), 0);
    member[0] = 1;
    for (Elem a : s) member[static_cast<std::size_t>(a)] = 1;
    for (std::size_t i = 0; i < s.size(); ++i)
        for (std::size_t j = i + 1; j < s.size(); ++j)
            if (!member[static_cast<std::size_t>(G.add(s[i], s[j]))])
                return std::make_pair(s[i], s[j]);
    return std::nullopt;
}

inline constexpr std::uint64_t default_enumeration_budget = 1ull << 22;

namespace detail {

// Walks subsets of pool with 1 <= size <= size_cap in (size, lexicographic)
// order. f receives a reusable element vector.
template <typename F>
inline void for_each_subset(const std::vector<Elem>& pool, int size_cap, F&& f) {
    const int n = static_cast<int>(pool.size());
    std::vector<Elem> subset;
    for (int s = 1; s <= std::min(size_cap, n); ++s) {
        std::vector<int> idx(static_cast<std::size_t>(s));
        for (int i = 0; i < s; ++i) idx[static_cast<std::size_t>(i)] = i;
        while (true) {
            subset.clear();
            for (int i : idx) subset.push_back(pool[static_cast<std::size_t>(i)]);
            f(subset);
            int t = s - 1;
            while (t >= 0 && idx[static_cast<std::size_t>(t)] == n - s + t) --t;
            if (t < 0) break;
            ++idx[static_cast<std::size_t>(t)];
            for (int u = t + 1; u < s; ++u)
                idx[static_cast<std::size_t>(u)] = idx[static_cast<std::size_t>(u - 1)] + 1;
        }
    }
}

// Sum of binomials C(n,1..cap), refusing to run when it exceeds the budget.
inline std::uint64_t subset_census_or_throw(int n, int size_cap, std::uint64_t budget,
                                            const char* what) {
    std::uint64_t total = 0, c = 1;
    for (int s = 1; s <= std::min(size_cap, n); ++s) {
        c = c * static_cast<std::uint64_t>(n - s + 1) / static_cast<std::uint64_t>(s);
        total += c;
        if (total > budget)
            throw BudgetExceeded(std::string(what) + " needs more than " +
                                 std::to_string(budget) + " subset checks; raise the budget");
    }
    return total;
}

}  // namespace detail

struct GrahamReport {
    std::uint64_t subsets_checked = 0;
    std::vector<std::vector<Elem>> failures;  // non-sequenceable sets, expected none
    bool all_sequenceable() const { return failures.empty(); }
};

// Tries to sequence every subset of the nonzero elements up to size_cap.
inline GrahamReport check_graham_exhaustive(const FiniteAbelianGroup& G, int size_cap,
                                            std::uint64_t budget = default_enumeration_budget) {
    require(size_cap >= 1, "size cap must be positive");
    auto pool = nonzero_elements(G);
    detail::subset_census_or_throw(static_cast<int>(pool.size()), size_cap, budget,
                                   "exhaustive sequencing check");
    GrahamReport rep;
    detail::for_each_subset(pool, size_cap, [&](const std::vector<Elem>& A) {
        ++rep.subsets_checked;
        if (!find_sequencing(G, A)) rep.failures.push_back(A);
    });
    return rep;
}

struct CharacterizationReport {
    std::uint64_t sets_checked = 0;  // subsets with at least two elements
    std::uint64_t closed_sets = 0;
    std::uint64_t subgroups_confirmed = 0;
    std::uint64_t pair_exceptions = 0;  // {x, -x} with x of order >= 4
    std::vector<std::vector<Elem>> violations;
    bool ok() const { return violations.empty(); }
};

// Closure under distinct-pair sums should force A plus the identity to be a
// subgroup. The lone escape hatch is A = {x, -x}: its only distinct sum is 0,
// so it is always closed, but {0, x, -x} is a subgroup only when x has order
// 3. Such pairs are tallied separately and must at least be sequenceable,
// which keeps the merge recursion honest on them.
inline CharacterizationReport verify_characterization(
    const FiniteAbelianGroup& G, std::uint64_t budget = default_enumeration_budget) {
    auto pool = nonzero_elements(G);
    const int n = static_cast<int>(pool.size());
    detail::subset_census_or_throw(n, n, budget, "exhaustive closure check");
    CharacterizationReport rep;
    std::vector<char> member(static_cast<std::size_t>(G.order()), 0);
    detail::for_each_subset(pool, n, [&](const std::vector<Elem>& A) {
        if (A.size() < 2) return;
        ++rep.sets_checked;
        if (!closed_under_distinct_sums(G, A)) return;
        ++rep.closed_sets;
        std::fill(member.begin(), member.end(), 0);
        member[0] = 1;
        for (Elem a : A) member[static_cast<std::size_t>(a)] = 1;
        if (is_subgroup(G, member)) {
            ++rep.subgroups_confirmed;
        } else if (A.size() == 2 && A[1] == G.neg(A[0]) && find_sequencing(G, A)) {
            ++rep.pair_exceptions;
        } else {
            rep.violations.push_back(A);
        }
    });
    return rep;
}

struct DichotomyReport {
    std::uint64_t sets_checked = 0;
    std::uint64_t merges_found = 0;
    std::uint64_t subgroup_cases = 0;
    std::uint64_t pair_exceptions = 0;
    std::vector<std::vector<Elem>> violations;
    bool ok() const { return violations.empty(); }
};

// No merge pair should mean A plus the identity is a subgroup, and vice
// versa, up to the same {x, -x} exception as the closure check (which is
// again required sequenceable, so either way A poses no obstacle).
inline DichotomyReport verify_merge_dichotomy(const FiniteAbelianGroup& G,
                                              std::uint64_t budget = default_enumeration_budget) {
    auto pool = nonzero_elements(G);
    const int n = static_cast<int>(pool.size());
    detail::subset_census_or_throw(n, n, budget, "exhaustive dichotomy check");
    DichotomyReport rep;
    std::vector<char> member(static_cast<std::size_t>(G.order()), 0);
    detail::for_each_subset(pool, n, [&](const std::vector<Elem>& A) {
        if (A.size() < 2) return;
        ++rep.sets_checked;
        bool merged = find_merge_pair(G, A).has_value();
        std::fill(member.begin(), member.end(), 0);
        member[0] = 1;
        for (Elem a : A) member[static_cast<std::size_t>(a)] = 1;
        bool subgroup = is_subgroup(G, member);
        bool exception = !subgroup && A.size() == 2 && A[1] == G.neg(A[0]);
        if (merged == (subgroup || exception)) {
            rep.violations.push_back(A);
            return;
        }
        if (subgroup)
            ++rep.subgroup_cases;
        else if (exception) {
            if (!find_sequencing(G, A)) {
                rep.violations.push_back(A);
                return;
            }
            ++rep.pair_exceptions;
        } else {
            ++rep.merges_found;
        }
    });
    return rep;
}

struct TranslationReport {
    bool escape_found = false;  // some j gives a_i + a_j outside A and 0
    int chain_length = -1;      // s in the arc {a_i, 0, -a_i, ..., -s a_i}
    std::uint64_t cosets = 0;   // full cosets of <a_i> making up the remainder
    bool ok = false;
};

// Translation structure in a cyclic group: adding a_i to A and the identity
// either escapes (the merge recursion applies) or maps the set into itself
// except at a_i, which forces an arc of multiples of a_i ending at a_i plus
// a remainder that is a union of full <a_i>-cosets.
inline TranslationReport verify_translation_dichotomy(const FiniteAbelianGroup& G,
                                                      const std::vector<Elem>& A, Elem ai) {
    require(G.factors().size() == 1, "translation dichotomy expects a cyclic group");
    require(std::find(A.begin(), A.end(), ai) != A.end(), "pivot element not in the set");
    TranslationReport rep;
    std::vector<char> member(static_cast<std::size_t>(G.order()), 0);
    member[0] = 1;
    for (Elem a : A) member[static_cast<std::size_t>(a)] = 1;
    for (Elem a : A) {
        if (a == ai) continue;
        if (!member[static_cast<std::size_t>(G.add(ai, a))]) {
            rep.escape_found = true;
            rep.ok = true;
            return rep;
        }
    }
    // No escape: walk the arc downward from a_i while inside the set.
    std::vector<char> arc(static_cast<std::size_t>(G.order()), 0);
    Elem w = ai;
    int len = 0;
    while (member[static_cast<std::size_t>(w)] && !arc[static_cast<std::size_t>(w)]) {
        arc[static_cast<std::size_t>(w)] = 1;
        ++len;
        w = G.sub(w, ai);
    }
    rep.chain_length = len - 2;  // arc holds a_i, 0, and then s negative multiples
    if (rep.chain_length > static_cast<int>(A.size()) - 1) return rep;
    // Remainder must be closed under adding a_i, hence a union of cosets.
    std::uint64_t rest = 0;
    for (Elem t = 0; t < G.order(); ++t) {
        if (!member[static_cast<std::size_t>(t)] || arc[static_cast<std::size_t>(t)]) continue;
        ++rest;
        if (arc[static_cast<std::size_t>(G.add(t, ai))] ||
            !member[static_cast<std::size_t>(G.add(t, ai))])
            return rep;
    }
    // Coset size is the order of a_i.
    int ord = 0;
    for (Elem p = ai;; p = G.add(p, ai)) {
        ++ord;
        if (p == 0) break;
    }
    rep.cosets = rest / static_cast<std::uint64_t>(ord);
    rep.ok = rest % static_cast<std::uint64_t>(ord) == 0;
    return rep;
}

struct TranslationSweepReport {
    std::uint64_t cases_checked = 0;
    std::uint64_t escapes = 0;
    std::uint64_t structural = 0;
    std::vector<std::pair<std::vector<Elem>, Elem>> violations;
    bool ok() const { return violations.empty(); }
};

// Every subset, every pivot.
inline TranslationSweepReport verify_translation_exhaustive(
    const FiniteAbelianGroup& G, std::uint64_t budget = default_enumeration_budget) {
    require(G.factors().size() == 1, "translation dichotomy expects a cyclic group");
    auto pool = nonzero_elements(G);
    const int n = static_cast<int>(pool.size());
    detail::subset_census_or_throw(n, n, budget, "exhaustive translation check");
    TranslationSweepReport rep;
    detail::for_each_subset(pool, n, [&](const std::vector<Elem>& A) {
        for (Elem ai : A) {
            ++rep.cases_checked;
            auto r = verify_translation_dichotomy(G, A, ai);
            if (!r.ok)
                rep.violations.emplace_back(A, ai);
            else if (r.escape_found)
                ++rep.escapes;
            else
                ++rep.structural;
        }
    });
    return rep;
}

struct CrossValidationReport {
    std::uint64_t requested = 0;
    std::uint64_t performed = 0;            // instantiations meeting every premise
    std::uint64_t constraint_failures = 0;  // a lifted row summed to zero after all
    std::uint64_t unsequenceable = 0;       // the merged set had no sequencing
    std::uint64_t skipped = 0;              // premises never materialized for a sample
    std::uint64_t seed = 0;
    bool ok() const {
        return performed == requested && constraint_failures == 0 && unsequenceable == 0;
    }
};

// Random concrete instantiations of a merge scenario: draw a sequenceable
// compressed set, split its merge-position element into a pair, and confirm
// that (a) every lifted constraint row is genuinely nonzero in the group and
// (b) the reassembled set is sequenceable. Failures of (a) would mean the
// engine assumes constraints that concrete instances can violate; failures
// of (b) would contradict the sequenceability statements themselves.
inline CrossValidationReport cross_validate_scenario(const MergeScenario& sc,
                                                     const FiniteAbelianGroup& G,
                                                     std::uint64_t samples, std::uint64_t seed,
                                                     int attempts_per_sample = 500) {
    sc.validate();
    const int k = sc.k;
    const int m = k - 1;  // compressed set size
    CrossValidationReport rep;
    rep.requested = samples;
    rep.seed = seed;
    std::mt19937_64 rng(seed);
    auto cons = initial_constraints(sc);
    auto pool = nonzero_elements(G);
    const int n = static_cast<int>(pool.size());
    std::uniform_int_distribution<int> any_nonzero(1, G.order() - 1);
    std::vector<Elem> comp, survivors, A, values(static_cast<std::size_t>(k) + 1);
    std::vector<char> in_comp(static_cast<std::size_t>(G.order()), 0);

    for (std::uint64_t s = 0; s < samples; ++s) {
        bool done = false;
        for (int attempt = 0; attempt < attempts_per_sample && !done; ++attempt) {
            if (n < m) break;  // group too small for the compressed set
            // Draw the compressed set; zero-sum modes force the last element.
            comp.assign(pool.begin(), pool.end());
            for (int i = 0; i < m; ++i) {
                std::uniform_int_distribution<int> pickd(i, n - 1);
                std::swap(comp[static_cast<std::size_t>(i)],
                          comp[static_cast<std::size_t>(pickd(rng))]);
            }
            comp.resize(static_cast<std::size_t>(m));
            if (sc.mode != Mode::general) {
                Elem sum = 0;
                for (int i = 0; i + 1 < m; ++i) sum = G.add(sum, comp[static_cast<std::size_t>(i)]);
                Elem last = G.neg(sum);
                comp.back() = last;
                if (last == 0) continue;
                bool repeat = false;
                for (int i = 0; i + 1 < m; ++i)
                    repeat = repeat || comp[static_cast<std::size_t>(i)] == last;
                if (repeat) continue;
            }
            auto seq = find_sequencing(G, comp);
            if (!seq) continue;
            Elem x = (*seq)[static_cast<std::size_t>(sc.merge_index - 1)];
            // Split x into a pair a_1 + a_2 = x, both nonzero and fresh.
            Elem a1 = static_cast<Elem>(any_nonzero(rng));
            Elem a2 = G.sub(x, a1);
            if (a2 == 0 || a1 == a2) continue;
            std::fill(in_comp.begin(), in_comp.end(), 0);
            survivors.clear();
            for (std::size_t p = 0; p < seq->size(); ++p) {
                if (static_cast<int>(p) == sc.merge_index - 1) continue;
                survivors.push_back((*seq)[p]);
                in_comp[static_cast<std::size_t>((*seq)[p])] = 1;
            }
            if (in_comp[static_cast<std::size_t>(a1)] || in_comp[static_cast<std::size_t>(a2)])
                continue;
            A.clear();
            A.push_back(a1);
            A.push_back(a2);
            A.insert(A.end(), survivors.begin(), survivors.end());
            if (sc.mode == Mode::zero_sum_no_inverse) {
                bool bad = false;
                for (std::size_t i = 0; i < A.size() && !bad; ++i)
                    for (std::size_t j = i; j < A.size() && !bad; ++j)
                        bad = G.add(A[i], A[j]) == 0;
                if (bad) continue;
            }
            // Premise (a): labels 1,2 are the split pair, labels 3..k the
            // survivors in sequencing order; every lifted row must be nonzero.
            values[1] = a1;
            values[2] = a2;
            for (std::size_t t = 0; t < survivors.size(); ++t) values[t + 3] = survivors[t];
            for (RowMask w : cons) {
                Elem acc = 0;
                for (int b = 0; b < k; ++b)
                    if (w >> b & 1u) acc = G.add(acc, values[static_cast<std::size_t>(b) + 1]);
                if (acc == 0) ++rep.constraint_failures;
            }
            // Premise-to-conclusion (b): the merged set really is sequenceable.
            if (!find_sequencing(G, A)) ++rep.unsequenceable;
            ++rep.performed;
            done = true;
        }
        if (!done) ++rep.skipped;
    }
    return rep;
}

inline CrossValidationReport cross_validate_scenario(const MergeScenario& sc, int modulus,
                                                     std::uint64_t samples, std::uint64_t seed,
                                                     int attempts_per_sample = 500) {
    require(modulus >= 3, "cross-validation needs a modulus of at least 3");
    return cross_validate_scenario(sc, FiniteAbelianGroup({modulus}), samples, seed,
                                   attempts_per_sample);
}

}  // namespace seqprove
