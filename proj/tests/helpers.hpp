#pragma once

// Shared test scaffolding: an in-memory sink and tiny literal helpers.

#include <seqprove/search.hpp>

#include <optional>
#include <vector>

namespace seqprove::testing {

struct CollectSink : RunSink {
    std::optional<RunHeader> header;
    std::vector<NodeRecord> records;
    std::optional<ProofResult> summary;

    void on_header(const RunHeader& h) override { header = h; }
    void on_node(const NodeRecord& r) override { records.push_back(r); }
    void on_summary(const ProofResult& r) override { summary = r; }
};

inline Ordering ord(std::initializer_list<int> xs) {
    Ordering o;
    for (int x : xs) o.push_back(static_cast<std::uint8_t>(x));
    return o;
}

}  // namespace seqprove::testing
