#pragma once

// Proof transcripts: a line-oriented JSON trace of a run that an independent
// checker can replay without trusting the engine.
//
// A transcript is one or more segments back to back, one per run. A segment
// is a header line, one line per node in id order, and a summary line. All
// integers that can outgrow 64 bits (multipliers, denominators) travel as
// decimal strings. The writer emits plain text only and never reorders, so
// identical configurations produce byte-identical files. The reader accepts
// gzip-compressed input transparently.
//
// The verifier re-derives everything structural (admissible intervals,
// incidence rows, child orderings, coverage of expansions, suppression of
// follow cycles) and checks every certificate by recombining the claimed
// multipliers against the branch rows. It deliberately shares no elimination
// code with the engine: a certificate is accepted on the strength of the
// multipliers alone.

#include <seqprove/search.hpp>

#include <json.hpp>
#include <zlib.h>

#include <charconv>
#include <cstring>
#include <fstream>
#include <functional>
#include <istream>
#include <memory>
#include <ostream>
#include <sstream>
#include <string_view>

namespace seqprove {

namespace detail {

inline nlohmann::ordered_json rows_to_json(const std::vector<RowMask>& rows, int k) {
    nlohmann::ordered_json a = nlohmann::ordered_json::array();
    for (RowMask r : rows) {
        nlohmann::ordered_json row = nlohmann::ordered_json::array();
        for (int i = 0; i < k; ++i) row.push_back(r >> i & 1u ? 1 : 0);
        a.push_back(std::move(row));
    }
    return a;
}

inline nlohmann::ordered_json vec_to_json(const IntVec& v) {
    nlohmann::ordered_json a = nlohmann::ordered_json::array();
    for (const Int& x : v) {
        if (x.fits_slong_p())
            a.push_back(static_cast<long>(x.get_si()));
        else
            a.push_back(x.get_str());
    }
    return a;
}

inline constexpr std::uint64_t fnv1a64_seed = 1469598103934665603ull;

inline std::uint64_t fnv1a64_step(std::uint64_t h, const char* data, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        h ^= static_cast<unsigned char>(data[i]);
        h *= 1099511628211ull;
    }
    return h;
}

inline std::uint64_t fnv1a64(const std::string& s) {
    return fnv1a64_step(fnv1a64_seed, s.data(), s.size());
}

// Hand-rolled node line serializer. Node lines dominate a transcript by
// orders of magnitude, and going through a DOM per line costs more than the
// search itself on big runs. Byte-for-byte equal to node_to_json(r, k).dump();
// a unit test holds the two together.
inline void append_u64(std::string& s, std::uint64_t v) {
    char tmp[20];
    auto [p, ec] = std::to_chars(tmp, tmp + sizeof tmp, v);
    s.append(tmp, p);
}

inline void append_int(std::string& s, long long v) {
    char tmp[21];
    auto [p, ec] = std::to_chars(tmp, tmp + sizeof tmp, v);
    s.append(tmp, p);
}

inline void append_mask(std::string& s, RowMask m, int k) {
    s.push_back('[');
    for (int i = 0; i < k; ++i) {
        if (i) s.push_back(',');
        s.push_back(m >> i & 1u ? '1' : '0');
    }
    s.push_back(']');
}

inline void append_intvec(std::string& s, const IntVec& v) {
    s.push_back('[');
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s.push_back(',');
        if (v[i].fits_slong_p()) {
            append_int(s, v[i].get_si());
        } else {
            s.push_back('"');
            s += v[i].get_str();
            s.push_back('"');
        }
    }
    s.push_back(']');
}

inline std::string hex64(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i, v >>= 4) s[static_cast<std::size_t>(i)] = digits[v & 15];
    return s;
}

}  // namespace detail

inline nlohmann::ordered_json header_to_json(const RunHeader& h) {
    const ModeConfig& c = h.config;
    nlohmann::ordered_json j;
    j["type"] = "header";
    j["format"] = 1;
    j["engine"] = engine_version;
    j["k"] = c.k;
    j["mode"] = to_string(c.mode);
    j["arith"] = to_string(c.arith);
    j["dup_policy"] = to_string(c.dup_policy);
    j["interval_policy"] = to_string(c.interval_policy);
    j["leaf_policy"] = to_string(c.leaf_policy);
    j["max_depth"] = c.max_depth ? nlohmann::ordered_json(*c.max_depth)
                                 : nlohmann::ordered_json(nullptr);
    j["max_nodes"] = c.max_nodes ? nlohmann::ordered_json(*c.max_nodes)
                                 : nlohmann::ordered_json(nullptr);
    j["seed"] = c.seed;
    if (h.scenario) {
        nlohmann::ordered_json s;
        s["merge_index"] = h.scenario->merge_index;
        s["position_labels"] = position_labels(*h.scenario);
        j["scenario"] = std::move(s);
    } else {
        j["scenario"] = nullptr;
    }
    j["seeded_rows"] = detail::rows_to_json(h.seeded_rows, c.k);
    j["initial_cons"] = detail::rows_to_json(h.initial_cons, c.k);
    j["config_hash"] = detail::hex64(detail::fnv1a64(j.dump()));
    return j;
}

inline nlohmann::ordered_json cert_to_json(const Certificate& c, int k) {
    nlohmann::ordered_json j;
    j["kind"] = to_string(c.kind);
    if (c.kind == CertKind::zero_element) {
        j["i"] = c.i;
    } else if (c.kind == CertKind::equality || c.kind == CertKind::inverse_pair) {
        j["i"] = c.i;
        j["j"] = c.j;
    } else {
        j["w"] = detail::rows_to_json({c.w}, k)[0];
    }
    j["target"] = detail::vec_to_json(c.target);
    nlohmann::ordered_json mult = nlohmann::ordered_json::array();
    for (const Rat& q : c.witness.coeffs) mult.push_back(q.get_str());
    j["multipliers"] = std::move(mult);
    j["denominator"] = c.witness.denominator.get_str();
    return j;
}

inline nlohmann::ordered_json node_to_json(const NodeRecord& r, int k) {
    nlohmann::ordered_json j;
    j["type"] = "node";
    j["id"] = r.id;
    if (r.parent) j["parent"] = *r.parent;
    j["depth"] = r.depth;
    nlohmann::ordered_json ord = nlohmann::ordered_json::array();
    for (auto v : r.ordering) ord.push_back(static_cast<int>(v));
    j["ordering"] = std::move(ord);
    if (r.interval) j["interval"] = nlohmann::ordered_json::array({r.interval->lo, r.interval->hi});
    if (r.row) j["row"] = detail::rows_to_json({*r.row}, k)[0];
    j["status"] = to_string(r.status);
    if (r.status == NodeStatus::expanded) j["children"] = r.children;
    if (r.cert) j["cert"] = cert_to_json(*r.cert, k);
    return j;
}

// Fast path for node lines; see detail::append_u64 above for why.
inline void append_node_line(std::string& s, const NodeRecord& r, int k) {
    s += "{\"type\":\"node\",\"id\":";
    detail::append_u64(s, r.id);
    if (r.parent) {
        s += ",\"parent\":";
        detail::append_u64(s, *r.parent);
    }
    s += ",\"depth\":";
    detail::append_int(s, r.depth);
    s += ",\"ordering\":[";
    for (std::size_t i = 0; i < r.ordering.size(); ++i) {
        if (i) s.push_back(',');
        detail::append_int(s, r.ordering[i]);
    }
    s.push_back(']');
    if (r.interval) {
        s += ",\"interval\":[";
        detail::append_int(s, r.interval->lo);
        s.push_back(',');
        detail::append_int(s, r.interval->hi);
        s.push_back(']');
    }
    if (r.row) {
        s += ",\"row\":";
        detail::append_mask(s, *r.row, k);
    }
    s += ",\"status\":\"";
    s += to_string(r.status);
    s.push_back('"');
    if (r.status == NodeStatus::expanded) {
        s += ",\"children\":";
        detail::append_u64(s, r.children);
    }
    if (r.cert) {
        const Certificate& c = *r.cert;
        s += ",\"cert\":{\"kind\":\"";
        s += to_string(c.kind);
        s.push_back('"');
        if (c.kind == CertKind::zero_element) {
            s += ",\"i\":";
            detail::append_int(s, c.i);
        } else if (c.kind == CertKind::equality || c.kind == CertKind::inverse_pair) {
            s += ",\"i\":";
            detail::append_int(s, c.i);
            s += ",\"j\":";
            detail::append_int(s, c.j);
        } else {
            s += ",\"w\":";
            detail::append_mask(s, c.w, k);
        }
        s += ",\"target\":";
        detail::append_intvec(s, c.target);
        s += ",\"multipliers\":[";
        for (std::size_t i = 0; i < c.witness.coeffs.size(); ++i) {
            if (i) s.push_back(',');
            s.push_back('"');
            s += c.witness.coeffs[i].get_str();
            s.push_back('"');
        }
        s += "],\"denominator\":\"";
        s += c.witness.denominator.get_str();
        s += "\"}";
    }
    s.push_back('}');
}

inline nlohmann::ordered_json summary_to_json(const ProofResult& r) {
    nlohmann::ordered_json j;
    j["type"] = "summary";
    j["verdict"] = to_string(r.verdict);
    j["aborted"] = r.aborted;
    j["node_count"] = r.node_count;
    j["max_depth_reached"] = r.max_depth_reached;
    nlohmann::ordered_json by;
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

// Streams one run as a transcript segment. Attach as the engine sink.
class TranscriptWriter : public RunSink {
  public:
    explicit TranscriptWriter(std::ostream& out) : out_(out) {}

    void on_header(const RunHeader& h) override {
        k_ = h.config.k;
        out_ << header_to_json(h).dump() << '\n';
    }
    void on_node(const NodeRecord& r) override {
        buf_.clear();
        append_node_line(buf_, r, k_);
        buf_.push_back('\n');
        out_.write(buf_.data(), static_cast<std::streamsize>(buf_.size()));
    }
    void on_summary(const ProofResult& r) override {
        out_ << summary_to_json(r).dump() << '\n';
        out_.flush();
    }

  private:
    std::ostream& out_;
    std::string buf_;
    int k_ = 0;
};

namespace detail {

// Sink-side streambuf that hashes and counts bytes instead of storing them.
class HashingBuf : public std::streambuf {
  public:
    std::uint64_t hash() const { return hash_; }
    std::uint64_t bytes() const { return bytes_; }

  protected:
    int overflow(int ch) override {
        if (ch == traits_type::eof()) return 0;
        char c = static_cast<char>(ch);
        xsputn(&c, 1);
        return ch;
    }
    std::streamsize xsputn(const char* s, std::streamsize n) override {
        hash_ = fnv1a64_step(hash_, s, static_cast<std::size_t>(n));
        bytes_ += static_cast<std::uint64_t>(n);
        return n;
    }

  private:
    std::uint64_t hash_ = fnv1a64_seed;
    std::uint64_t bytes_ = 0;
};

// Sink-side streambuf that hands each completed line (newline stripped) to a
// callback. Whole-line writes pass through without copying.
class LineSplitBuf : public std::streambuf {
  public:
    explicit LineSplitBuf(std::function<void(std::string_view)> on_line)
        : on_line_(std::move(on_line)) {}

    const std::string& pending() const { return pending_; }

  protected:
    int overflow(int ch) override {
        if (ch == traits_type::eof()) return 0;
        char c = static_cast<char>(ch);
        xsputn(&c, 1);
        return ch;
    }
    std::streamsize xsputn(const char* s, std::streamsize n) override {
        const char* p = s;
        const char* end = s + n;
        while (p != end) {
            const char* nl =
                static_cast<const char*>(std::memchr(p, '\n', static_cast<std::size_t>(end - p)));
            if (!nl) {
                pending_.append(p, end);
                break;
            }
            if (pending_.empty()) {
                on_line_(std::string_view(p, static_cast<std::size_t>(nl - p)));
            } else {
                pending_.append(p, nl);
                on_line_(pending_);
                pending_.clear();
            }
            p = nl + 1;
        }
        return n;
    }

  private:
    std::function<void(std::string_view)> on_line_;
    std::string pending_;
};

}  // namespace detail

// Serializes a run exactly as TranscriptWriter would and keeps only the
// byte count and an FNV-1a hash of the stream. Reruns that only need to
// compare output byte for byte (determinism checks) attach this instead of
// writing gigabytes to disk.
class HashingSink : public RunSink {
  public:
    HashingSink() : out_(&buf_), writer_(out_) {}

    void on_header(const RunHeader& h) override { writer_.on_header(h); }
    void on_node(const NodeRecord& r) override { writer_.on_node(r); }
    void on_summary(const ProofResult& r) override { writer_.on_summary(r); }

    std::uint64_t hash() const { return buf_.hash(); }
    std::uint64_t bytes() const { return buf_.bytes(); }

  private:
    detail::HashingBuf buf_;
    std::ostream out_;
    TranscriptWriter writer_;
};

// std::streambuf that inflates gzip data from an underlying stream; used
// only when the magic bytes say so.
class GunzipStreambuf : public std::streambuf {
  public:
    explicit GunzipStreambuf(std::istream& src) : src_(src) {
        zs_.zalloc = Z_NULL;
        zs_.zfree = Z_NULL;
        zs_.opaque = Z_NULL;
        zs_.next_in = Z_NULL;
        zs_.avail_in = 0;
        // 15 window bits plus gzip wrapping.
        if (inflateInit2(&zs_, 15 + 16) != Z_OK)
            throw std::runtime_error("zlib init failed");
        in_.resize(1 << 16);
        out_.resize(1 << 16);
    }
    ~GunzipStreambuf() override { inflateEnd(&zs_); }

  protected:
    int_type underflow() override {
        if (gptr() < egptr()) return traits_type::to_int_type(*gptr());
        if (finished_) return traits_type::eof();
        zs_.next_out = reinterpret_cast<Bytef*>(out_.data());
        zs_.avail_out = static_cast<uInt>(out_.size());
        while (zs_.avail_out == static_cast<uInt>(out_.size())) {
            if (zs_.avail_in == 0 && !src_eof_) {
                src_.read(in_.data(), static_cast<std::streamsize>(in_.size()));
                zs_.avail_in = static_cast<uInt>(src_.gcount());
                zs_.next_in = reinterpret_cast<Bytef*>(in_.data());
                src_eof_ = src_.gcount() == 0;
            }
            int rc = inflate(&zs_, src_eof_ ? Z_FINISH : Z_NO_FLUSH);
            if (rc == Z_STREAM_END) {
                // Support concatenated gzip members.
                if (zs_.avail_in > 0 || !src_eof_) {
                    if (inflateReset(&zs_) != Z_OK) throw std::runtime_error("zlib reset failed");
                    if (zs_.avail_in == 0 && src_eof_) {
                        finished_ = true;
                        break;
                    }
                    continue;
                }
                finished_ = true;
                break;
            }
            if (rc != Z_OK && rc != Z_BUF_ERROR)
                throw std::runtime_error("corrupt gzip stream");
            if (rc == Z_BUF_ERROR && src_eof_ && zs_.avail_in == 0) {
                finished_ = true;
                break;
            }
        }
        std::size_t produced = out_.size() - zs_.avail_out;
        if (produced == 0) return traits_type::eof();
        setg(out_.data(), out_.data(), out_.data() + produced);
        return traits_type::to_int_type(*gptr());
    }

  private:
    std::istream& src_;
    z_stream zs_{};
    std::vector<char> in_, out_;
    bool src_eof_ = false;
    bool finished_ = false;
};

// Opens a transcript for reading, inflating transparently when the file is
// gzip-compressed.
class TranscriptFile {
  public:
    explicit TranscriptFile(const std::string& path) : raw_(path, std::ios::binary) {
        if (!raw_) throw InvalidInput("cannot open transcript: " + path);
        int c0 = raw_.peek();
        if (c0 == 0x1f) {
            buf_ = std::make_unique<GunzipStreambuf>(raw_);
            in_ = std::make_unique<std::istream>(buf_.get());
        } else {
            in_ = std::make_unique<std::istream>(raw_.rdbuf());
        }
    }

    std::istream& stream() { return *in_; }

  private:
    std::ifstream raw_;
    std::unique_ptr<GunzipStreambuf> buf_;
    std::unique_ptr<std::istream> in_;
};

namespace detail {

// std::streambuf that deflates through zlib's gzFile layer.
class GzipFileStreambuf : public std::streambuf {
  public:
    explicit GzipFileStreambuf(const std::string& path) : g_(gzopen(path.c_str(), "wb")) {
        if (!g_) throw InvalidInput("cannot open transcript for writing: " + path);
    }
    ~GzipFileStreambuf() override {
        if (g_) gzclose(g_);
    }
    GzipFileStreambuf(const GzipFileStreambuf&) = delete;
    GzipFileStreambuf& operator=(const GzipFileStreambuf&) = delete;

  protected:
    int overflow(int ch) override {
        if (ch == traits_type::eof()) return 0;
        char c = static_cast<char>(ch);
        return xsputn(&c, 1) == 1 ? ch : traits_type::eof();
    }
    std::streamsize xsputn(const char* s, std::streamsize n) override {
        return gzwrite(g_, s, static_cast<unsigned>(n)) == static_cast<int>(n) ? n : 0;
    }
    int sync() override { return gzflush(g_, Z_SYNC_FLUSH) == Z_OK ? 0 : -1; }

  private:
    gzFile g_;
};

}  // namespace detail

// Writable counterpart of TranscriptFile: compresses when the path ends in
// ".gz", writes plain text otherwise.
class TranscriptOutFile {
  public:
    explicit TranscriptOutFile(const std::string& path) {
        if (path.size() > 3 && path.compare(path.size() - 3, 3, ".gz") == 0) {
            gz_ = std::make_unique<detail::GzipFileStreambuf>(path);
            out_ = std::make_unique<std::ostream>(gz_.get());
        } else {
            auto f = std::make_unique<std::ofstream>(path, std::ios::binary);
            if (!*f) throw InvalidInput("cannot open transcript for writing: " + path);
            out_ = std::move(f);
        }
    }

    std::ostream& stream() { return *out_; }

  private:
    std::unique_ptr<detail::GzipFileStreambuf> gz_;
    std::unique_ptr<std::ostream> out_;
};

struct VerifyReport {
    bool accepted = false;
    std::string defect;     // empty when accepted
    std::size_t line = 0;   // 1-based line of the first defect
    std::uint64_t segments = 0;
    std::uint64_t nodes = 0;
    std::vector<Verdict> verdicts;  // one per segment, as recorded
};

namespace detail {

// The verifier keeps long-lived state only for expanded nodes, as the same
// byte-packed edges the engine pools, and replays ordering and rows from
// verified edge data whenever a later line needs them. Certified and open
// nodes are fully audited at their own line and then forgotten, so verifying
// a hundred-million-node transcript stays within ordinary memory.
class SegmentVerifier {
  public:
    // Returns the defect, or empty string on success.
    std::string consume_header(const nlohmann::ordered_json& j) {
        try {
            if (j.at("format").get<int>() != 1) return "unknown transcript format";
            cfg_.k = j.at("k").get<int>();
            cfg_.mode = mode_from_string(j.at("mode").get<std::string>());
            cfg_.arith = arith_from_string(j.at("arith").get<std::string>());
            cfg_.dup_policy = dup_policy_from_string(j.at("dup_policy").get<std::string>());
            cfg_.interval_policy =
                interval_policy_from_string(j.at("interval_policy").get<std::string>());
            cfg_.leaf_policy = leaf_policy_from_string(j.at("leaf_policy").get<std::string>());
            if (!j.at("max_depth").is_null()) cfg_.max_depth = j.at("max_depth").get<int>();
            if (!j.at("max_nodes").is_null())
                cfg_.max_nodes = j.at("max_nodes").get<std::uint64_t>();
            cfg_.seed = j.at("seed").get<std::uint64_t>();
            cfg_.validate();
            seeded_ = rows_from_json(j.at("seeded_rows"));
            cons_ = rows_from_json(j.at("initial_cons"));
            if (!j.at("scenario").is_null()) {
                MergeScenario sc{cfg_.k, cfg_.mode, j.at("scenario").at("merge_index").get<int>()};
                sc.validate();
                if (initial_constraints(sc) != cons_)
                    return "scenario does not reproduce initial constraints";
                if (seed_rows(cfg_.k, cfg_.mode) != seeded_)
                    return "scenario does not reproduce seed rows";
            }
            // The self-hash covers the header exactly as written, minus the
            // hash field itself.
            nlohmann::ordered_json body = j;
            std::string stated = body.at("config_hash").get<std::string>();
            body.erase("config_hash");
            if (hex64(fnv1a64(body.dump())) != stated) return "header hash mismatch";
            ivs_ = admissible_intervals(cfg_);
        } catch (const std::exception& e) {
            return std::string("malformed header: ") + e.what();
        }
        return {};
    }

    std::string consume_node(const nlohmann::ordered_json& j) {
        try {
            std::uint64_t id = j.at("id").get<std::uint64_t>();
            if (id != node_total_) return "node ids not dense and increasing";
            if (id >= npos32) return "transcript too large for this verifier";
            const int depth = j.at("depth").get<int>();
            Ordering ord;
            for (int v : j.at("ordering").get<std::vector<int>>()) {
                if (v < 1 || v > cfg_.k) return "ordering entry out of range";
                ord.push_back(static_cast<std::uint8_t>(v));
            }
            if (static_cast<int>(ord.size()) != cfg_.k) return "ordering length mismatch";
            {
                RowMask seen = 0;
                for (auto v : ord) seen |= RowMask(1) << (v - 1);
                if (seen != (RowMask(1) << cfg_.k) - 1) return "ordering is not a permutation";
            }
            std::string status = j.at("status").get<std::string>();
            NodeStatus st;
            if (status == "open")
                st = NodeStatus::open;
            else if (status == "expanded")
                st = NodeStatus::expanded;
            else if (status == "certified")
                st = NodeStatus::certified;
            else
                return "unknown node status";
            if (j.contains("children") != (st == NodeStatus::expanded))
                return "children count present iff expanded";
            std::uint64_t declared = 0;
            if (st == NodeStatus::expanded) {
                declared = j.at("children").get<std::uint64_t>();
                if (declared == 0) return "expanded node with zero children";
            }

            bool is_root = id == 0;
            bool via_follow = false;
            Interval via{};
            std::uint32_t ppool = npos32;
            RowMask added_row = 0;
            bool has_added = false;

            if (is_root) {
                if (j.contains("parent") || j.contains("interval") || j.contains("row"))
                    return "root carries parent data";
                if (depth != 0) return "root depth nonzero";
                if (ord != identity_ordering(cfg_.k)) return "root ordering not identity";
            } else {
                if (!j.contains("parent")) return "non-root node without parent";
                std::uint64_t parent = j.at("parent").get<std::uint64_t>();
                if (parent >= id) return "parent id not smaller than child id";
                ppool = id2pool_[parent];
                if (ppool == npos32) return "parent was not expanded";
                if (depth != static_cast<int>(meta_[ppool].depth) + 1)
                    return "child depth is not parent depth + 1";
                if (!j.contains("interval")) return "non-root node without interval";
                auto iv = j.at("interval").get<std::vector<int>>();
                if (iv.size() != 2) return "interval is not a pair";
                via = Interval{iv[0], iv[1]};
                bool admissible = false;
                for (const auto& a : ivs_) admissible = admissible || a == via;
                if (!admissible) return "interval not admissible";
                replay_parent(ppool);
                if (ord != child_ordering(rp_.ordering, via))
                    return "child ordering is not the boundary swap of the interval";
                RowMask incidence = incidence_mask(rp_.ordering, via);
                bool dup = std::find(rp_.rows.begin(), rp_.rows.end(), incidence) !=
                           rp_.rows.end();
                if (j.contains("row")) {
                    RowMask claimed = mask_from_json(j.at("row"));
                    if (claimed != incidence)
                        return "row is not the interval's incidence vector under the parent";
                    if (dup) return "row already present on the branch";
                    added_row = incidence;
                    has_added = true;
                } else {
                    via_follow = true;
                    if (cfg_.dup_policy != DupPolicy::follow)
                        return "follow edge under skip policy";
                    if (!dup) return "follow edge whose row is not a duplicate";
                    // Cycle rule: the child ordering may repeat neither the
                    // parent's nor any on the parent's follow chain.
                    bool cycle = ord == rp_.ordering;
                    for (const auto& o : rp_.streak) cycle = cycle || o == ord;
                    if (cycle) return "follow edge repeats an ancestor state";
                }
                // Each arriving child must be the next edge of the parent's
                // canonical expansion.
                PoolMeta& pm = meta_[ppool];
                if (pm.seen >= pm.declared) return "more children than declared";
                ensure_expected(ppool);
                if (pm.seen >= pm.expected ||
                    exp_edges_[pm.seen] != std::pair<Interval, bool>{via, via_follow})
                    return "children do not cover the expansion";
                ++pm.seen;
            }

            if (j.contains("cert") != (st == NodeStatus::certified))
                return "certificate present iff status certified";
            if (st == NodeStatus::certified) {
                std::string defect;
                if (is_root) {
                    defect = check_cert(j.at("cert"), seeded_);
                } else if (has_added) {
                    rp_.rows.push_back(added_row);
                    defect = check_cert(j.at("cert"), rp_.rows);
                    rp_.rows.pop_back();
                } else {
                    defect = check_cert(j.at("cert"), rp_.rows);
                }
                if (!defect.empty()) return defect;
                auto kind = j.at("cert").at("kind").get<std::string>();
                if (kind == "zero_element")
                    ++by_kind_[0];
                else if (kind == "equality")
                    ++by_kind_[1];
                else if (kind == "inverse_pair")
                    ++by_kind_[2];
                else
                    ++by_kind_[3];
            }

            if (st == NodeStatus::expanded) {
                detail::EdgeRef e;
                if (is_root) {
                    e = {0, 0, 0, detail::edge_root};
                } else {
                    e = {ppool, static_cast<std::uint8_t>(via.lo),
                         static_cast<std::uint8_t>(via.hi),
                         via_follow ? detail::edge_follow : std::uint8_t{0}};
                }
                id2pool_.push_back(static_cast<std::uint32_t>(pool_.size()));
                pool_.push_back(e);
                PoolMeta pm;
                pm.declared = declared;
                pm.depth = static_cast<std::uint32_t>(depth);
                meta_.push_back(pm);
            } else {
                id2pool_.push_back(npos32);
                if (st == NodeStatus::open) {
                    // Attribution happens here, while the node's state is at
                    // hand: a genuinely exhausted expansion is a childless
                    // leaf; otherwise a limit has to be to blame, and the
                    // node budget can only be judged against the final count.
                    std::uint64_t supp = 0;
                    bool empty;
                    if (is_root) {
                        static const std::vector<Ordering> no_streak;
                        empty = expansion_empty(ord, seeded_, no_streak, &supp);
                    } else if (has_added) {
                        rp_.rows.push_back(added_row);
                        static const std::vector<Ordering> no_streak;
                        empty = expansion_empty(ord, rp_.rows, no_streak, &supp);
                        rp_.rows.pop_back();
                    } else {
                        follow_streak_.assign(rp_.streak.begin(), rp_.streak.end());
                        follow_streak_.push_back(rp_.ordering);
                        empty = expansion_empty(ord, rp_.rows, follow_streak_, &supp);
                    }
                    if (empty) {
                        suppressed_ += supp;
                        ++open_childless_;
                    } else if (cfg_.max_depth && depth >= *cfg_.max_depth) {
                        ++open_depth_cut_;
                    } else {
                        ++budget_pending_;
                    }
                }
            }
            if (depth > max_depth_seen_) max_depth_seen_ = depth;
            ++node_total_;
        } catch (const std::exception& e) {
            return std::string("malformed node: ") + e.what();
        }
        return {};
    }

    std::string consume_summary(const nlohmann::ordered_json& j, Verdict* verdict_out) {
        try {
            // Structural closure. Children were matched against the parent's
            // canonical expansion as they arrived; what remains is that every
            // expanded node received all of its expected children, and that
            // unprocessed-open nodes are explained by the node budget.
            for (std::size_t pi = 0; pi < pool_.size(); ++pi) {
                PoolMeta& pm = meta_[pi];
                if (!pm.expected_known) ensure_expected(static_cast<std::uint32_t>(pi));
                if (pm.expected == 0) return "expanded node has no admissible children";
                if (pm.seen != pm.expected) return "children do not cover the expansion";
                if (pm.declared != pm.expected) return "declared child count mismatch";
            }
            std::uint64_t open_unprocessed = open_depth_cut_;
            bool budget_cut = false;
            if (budget_pending_) {
                if (cfg_.max_nodes && node_total_ > *cfg_.max_nodes) {
                    open_unprocessed += budget_pending_;
                    budget_cut = true;
                } else {
                    return "open node with unexplored children and no limit to blame";
                }
            }
            if (j.at("node_count").get<std::uint64_t>() != node_total_)
                return "summary node count mismatch";
            if (j.at("max_depth_reached").get<int>() != max_depth_seen_)
                return "summary max depth mismatch";
            const char* names[4] = {"zero_element", "equality", "inverse_pair", "compression"};
            for (int k = 0; k < 4; ++k)
                if (j.at("certificates").at(names[k]).get<std::uint64_t>() != by_kind_[k])
                    return "summary certificate histogram mismatch";
            if (j.at("open_childless").get<std::uint64_t>() != open_childless_)
                return "summary childless-open count mismatch";
            if (j.at("open_unprocessed").get<std::uint64_t>() != open_unprocessed)
                return "summary unprocessed-open count mismatch";
            if (j.at("suppressed").get<std::uint64_t>() != suppressed_)
                return "summary suppression count mismatch";
            if (j.at("max_witness_denominator").get<std::string>() != max_denom_.get_str())
                return "summary witness denominator mismatch";
            bool aborted = j.at("aborted").get<bool>();
            if (aborted != budget_cut) return "summary abort flag mismatch";
            bool complete = !aborted && open_unprocessed == 0 && suppressed_ == 0;
            bool leaves_ok = cfg_.leaf_policy == LeafPolicy::paper || open_childless_ == 0;
            Verdict v = complete && leaves_ok ? Verdict::proved : Verdict::inconclusive;
            std::string claimed = j.at("verdict").get<std::string>();
            if (claimed != to_string(v)) return "verdict does not follow from the records";
            *verdict_out = v;
        } catch (const std::exception& e) {
            return std::string("malformed summary: ") + e.what();
        }
        return {};
    }

    std::uint64_t node_count() const { return node_total_; }

  private:
    static constexpr std::uint32_t npos32 = 0xFFFFFFFFu;

    struct PoolMeta {
        std::uint64_t declared = 0;
        std::uint64_t seen = 0;
        std::uint64_t expected = 0;
        std::uint32_t depth = 0;
        bool expected_known = false;
    };

    ModeConfig cfg_;
    std::vector<RowMask> seeded_, cons_;
    std::vector<Interval> ivs_;

    std::vector<std::uint32_t> id2pool_;  // per node id; npos32 unless expanded
    std::vector<detail::EdgeRef> pool_;   // incoming edge per expanded node
    std::vector<PoolMeta> meta_;

    std::uint64_t node_total_ = 0;
    int max_depth_seen_ = 0;
    std::uint64_t by_kind_[4] = {};
    Int max_denom_ = 1;
    std::uint64_t open_childless_ = 0, open_depth_cut_ = 0, budget_pending_ = 0;
    std::uint64_t suppressed_ = 0;

    // Replay and expansion caches; children of one parent arrive together,
    // so each expanded node is replayed a bounded number of times.
    ReplayBuf rp_;
    std::uint32_t rp_cached_ = npos32;
    std::uint32_t exp_cached_ = npos32;
    std::vector<std::pair<Interval, bool>> exp_edges_;
    std::vector<Ordering> follow_streak_;

    void replay_parent(std::uint32_t pidx) {
        if (rp_cached_ == pidx) return;
        detail::replay_state(pool_, pidx, cfg_.k, seeded_, rp_, true);
        rp_cached_ = pidx;
    }

    // Derive the canonical expansion of pooled node pidx, caching it and
    // folding its suppression count into the running total exactly once.
    void ensure_expected(std::uint32_t pidx) {
        PoolMeta& pm = meta_[pidx];
        if (pm.expected_known && exp_cached_ == pidx) return;
        replay_parent(pidx);
        std::uint64_t supp = 0;
        exp_edges_.clear();
        for (Interval iv : ivs_) {
            RowMask m = incidence_mask(rp_.ordering, iv);
            bool dup = std::find(rp_.rows.begin(), rp_.rows.end(), m) != rp_.rows.end();
            if (!dup) {
                exp_edges_.emplace_back(iv, false);
                continue;
            }
            if (cfg_.dup_policy == DupPolicy::skip) continue;
            Ordering child = child_ordering(rp_.ordering, iv);
            bool cycle = child == rp_.ordering;
            for (const auto& o : rp_.streak) cycle = cycle || o == child;
            if (cycle)
                ++supp;
            else
                exp_edges_.emplace_back(iv, true);
        }
        exp_cached_ = pidx;
        if (!pm.expected_known) {
            pm.expected = exp_edges_.size();
            pm.expected_known = true;
            suppressed_ += supp;
        }
    }

    // Would this node expand to nothing? Same walk as ensure_expected but for
    // a node that was never pooled.
    bool expansion_empty(const Ordering& ord, const std::vector<RowMask>& rows,
                         const std::vector<Ordering>& streak, std::uint64_t* suppressed) {
        bool empty = true;
        for (Interval iv : ivs_) {
            RowMask m = incidence_mask(ord, iv);
            bool dup = std::find(rows.begin(), rows.end(), m) != rows.end();
            if (!dup) {
                empty = false;
                continue;
            }
            if (cfg_.dup_policy == DupPolicy::skip) continue;
            Ordering child = child_ordering(ord, iv);
            bool cycle = child == ord;
            for (const auto& o : streak) cycle = cycle || o == child;
            if (cycle)
                ++*suppressed;
            else
                empty = false;
        }
        return empty;
    }

    static RowMask mask_from_json(const nlohmann::ordered_json& row) {
        RowMask m = 0;
        auto bits = row.get<std::vector<int>>();
        for (std::size_t i = 0; i < bits.size(); ++i) {
            if (bits[i] != 0 && bits[i] != 1) throw InvalidInput("row entry not 0/1");
            if (bits[i]) m |= RowMask(1) << i;
        }
        return m;
    }

    std::vector<RowMask> rows_from_json(const nlohmann::ordered_json& rows) {
        std::vector<RowMask> out;
        for (const auto& r : rows) {
            if (static_cast<int>(r.size()) != cfg_.k) throw InvalidInput("row width mismatch");
            out.push_back(mask_from_json(r));
        }
        return out;
    }

    // Certificate audit: claimed multipliers must recombine the branch rows
    // into the kind's target, with denominators obeying the arithmetic mode.
    std::string check_cert(const nlohmann::ordered_json& cj, const std::vector<RowMask>& rows) {
        IntVec target;
        std::string kind = cj.at("kind").get<std::string>();
        auto unit = [&](int i) {
            IntVec t(static_cast<std::size_t>(cfg_.k), 0);
            t[static_cast<std::size_t>(i - 1)] = 1;
            return t;
        };
        if (kind == "zero_element") {
            int i = cj.at("i").get<int>();
            if (i < 1 || i > cfg_.k) return "certificate symbol out of range";
            target = unit(i);
        } else if (kind == "equality") {
            int i = cj.at("i").get<int>(), jx = cj.at("j").get<int>();
            if (i < 1 || jx <= i || jx > cfg_.k) return "certificate symbols out of range";
            target = unit(i);
            target[static_cast<std::size_t>(jx - 1)] = -1;
        } else if (kind == "inverse_pair") {
            if (cfg_.mode != Mode::zero_sum_no_inverse)
                return "inverse-pair certificate outside the distinct mode";
            int i = cj.at("i").get<int>(), jx = cj.at("j").get<int>();
            if (i < 1 || jx < i || jx > cfg_.k) return "certificate symbols out of range";
            target = unit(i);
            target[static_cast<std::size_t>(jx - 1)] += 1;
        } else if (kind == "compression") {
            RowMask w = mask_from_json(cj.at("w"));
            if (std::find(cons_.begin(), cons_.end(), w) == cons_.end())
                return "compression certificate row is not an initial constraint";
            target = mask_to_vec(w, cfg_.k);
        } else {
            return "unknown certificate kind";
        }

        auto tj = cj.at("target").get<std::vector<nlohmann::ordered_json>>();
        if (tj.size() != target.size()) return "certificate target width mismatch";
        for (std::size_t i = 0; i < tj.size(); ++i) {
            Int claimed = tj[i].is_string() ? Int(tj[i].get<std::string>())
                                            : Int(tj[i].get<long>());
            if (claimed != target[i]) return "certificate target does not match its kind";
        }

        auto mj = cj.at("multipliers").get<std::vector<std::string>>();
        if (mj.size() != rows.size()) return "multiplier count differs from row count";
        std::vector<Rat> mult;
        Int lcm_den = 1;
        for (const auto& s : mj) {
            Rat q;
            if (mpq_set_str(q.get_mpq_t(), s.c_str(), 10) != 0)
                return "unparsable multiplier";
            if (mpz_sgn(mpq_denref(q.get_mpq_t())) == 0) return "multiplier with zero denominator";
            q.canonicalize();
            mult.push_back(q);
            lcm_den = lcm(lcm_den, Int(q.get_den()));
        }
        if (Int(cj.at("denominator").get<std::string>()) != lcm_den)
            return "stated denominator is not the multiplier lcm";
        if (cfg_.arith == Arith::integer && lcm_den != 1)
            return "non-integral witness in integer arithmetic";
        std::vector<Rat> acc(static_cast<std::size_t>(cfg_.k), Rat(0));
        for (std::size_t r = 0; r < rows.size(); ++r)
            for (int b = 0; b < cfg_.k; ++b)
                if (rows[r] >> b & 1u) acc[static_cast<std::size_t>(b)] += mult[r];
        for (int b = 0; b < cfg_.k; ++b)
            if (acc[static_cast<std::size_t>(b)] != Rat(target[static_cast<std::size_t>(b)]))
                return "multipliers do not recombine to the target";
        if (lcm_den > max_denom_) max_denom_ = lcm_den;
        return {};
    }
};

}  // namespace detail

// Incremental front end of the checker: feed transcript lines one at a time,
// then call finish(). Works the same whether the lines come from a file or
// straight out of a running engine.
class StreamVerifier {
  public:
    // Returns false once a defect is recorded; further lines are ignored.
    bool feed_line(std::string_view line) {
        if (failed_) return false;
        ++lineno_;
        if (line.empty()) return fail("blank line");
        nlohmann::ordered_json j;
        try {
            j = nlohmann::ordered_json::parse(line);
        } catch (const std::exception& e) {
            return fail(std::string("unparsable line: ") + e.what());
        }
        std::string type;
        try {
            type = j.at("type").get<std::string>();
        } catch (const std::exception&) {
            return fail("record without type");
        }
        if (!seg_) {
            if (type != "header") return fail("segment does not start with a header");
            seg_ = std::make_unique<detail::SegmentVerifier>();
            std::string defect = seg_->consume_header(j);
            if (!defect.empty()) return fail(defect);
            ++rep_.segments;
        } else if (type == "node") {
            std::string defect = seg_->consume_node(j);
            if (!defect.empty()) return fail(defect);
        } else if (type == "summary") {
            Verdict v = Verdict::inconclusive;
            std::string defect = seg_->consume_summary(j, &v);
            if (!defect.empty()) return fail(defect);
            rep_.verdicts.push_back(v);
            rep_.nodes += seg_->node_count();
            seg_.reset();
        } else {
            return fail("unexpected record type inside segment");
        }
        return true;
    }

    VerifyReport finish() {
        if (!failed_) {
            if (seg_) {
                fail("truncated segment");
            } else if (rep_.segments == 0) {
                fail("empty transcript");
            } else {
                rep_.accepted = true;
                rep_.defect.clear();
                rep_.line = 0;
            }
        }
        return rep_;
    }

  private:
    bool fail(const std::string& why) {
        failed_ = true;
        rep_.accepted = false;
        rep_.defect = why;
        rep_.line = lineno_;
        seg_.reset();
        return false;
    }

    VerifyReport rep_;
    std::size_t lineno_ = 0;
    bool failed_ = false;
    std::unique_ptr<detail::SegmentVerifier> seg_;
};

// Checks a stream of transcript segments end to end. Stops at the first
// defect; reports how much was verified.
inline VerifyReport verify_transcript(std::istream& in) {
    StreamVerifier v;
    std::string line;
    while (std::getline(in, line))
        if (!v.feed_line(line)) break;
    return v.finish();
}

inline VerifyReport verify_transcript_file(const std::string& path) {
    TranscriptFile f(path);
    return verify_transcript(f.stream());
}

// Serializes a run exactly as TranscriptWriter would and pipes every line
// through the checker as it is produced, keeping the byte count and stream
// hash but never the bytes. One pass over the run replaces the write-to-disk
// then read-back cycle for runs whose transcript would not fit anywhere.
// One sink may span several runs back to back; call report() once at the end.
class VerifyingSink : public RunSink {
  public:
    VerifyingSink()
        : buf_([this](std::string_view line) { consume(line); }), out_(&buf_), writer_(out_) {}

    void on_header(const RunHeader& h) override { writer_.on_header(h); }
    void on_node(const NodeRecord& r) override { writer_.on_node(r); }
    void on_summary(const ProofResult& r) override { writer_.on_summary(r); }

    std::uint64_t hash() const { return hash_; }
    std::uint64_t bytes() const { return bytes_; }

    VerifyReport report() {
        if (!buf_.pending().empty()) {
            verifier_.feed_line(buf_.pending());
        }
        return verifier_.finish();
    }

  private:
    void consume(std::string_view line) {
        hash_ = detail::fnv1a64_step(hash_, line.data(), line.size());
        hash_ = detail::fnv1a64_step(hash_, "\n", 1);
        bytes_ += line.size() + 1;
        verifier_.feed_line(line);
    }

    StreamVerifier verifier_;
    std::uint64_t hash_ = detail::fnv1a64_seed;
    std::uint64_t bytes_ = 0;
    detail::LineSplitBuf buf_;
    std::ostream out_;
    TranscriptWriter writer_;
};

}  // namespace seqprove
