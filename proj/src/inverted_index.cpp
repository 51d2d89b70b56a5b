#include "caspr/inverted_index.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <map>

#include "caspr/error.hpp"
#include "caspr/tokenizer.hpp"

namespace caspr {

void BM25Params::validate() const {
    if (!(k1 >= 0.0)) throw Error("BM25 k1 must be non-negative");
    if (!(b >= 0.0 && b <= 1.0)) throw Error("BM25 b must lie in [0,1]");
}

std::optional<std::uint32_t> InvertedIndex::find_doc(std::string_view id) const {
    auto it = ord_by_id_.find(std::string(id));
    if (it == ord_by_id_.end()) return std::nullopt;
    return it->second;
}

const PostingList* InvertedIndex::postings(std::string_view term) const {
    auto it = postings_.find(std::string(term));
    return it == postings_.end() ? nullptr : &it->second;
}

std::size_t InvertedIndex::doc_freq(std::string_view term) const {
    const PostingList* pl = postings(term);
    return pl ? pl->doc_ords.size() : 0;
}

double InvertedIndex::idf_for_df(std::size_t df) const {
    const double n = static_cast<double>(total_docs());
    const double d = static_cast<double>(df);
    return std::log((n - d + 0.5) / (d + 0.5) + 1.0);
}

void IndexBuilder::add(const Passage& passage) {
    if (passage.id.empty()) throw Error("passage id must be non-empty");
    for (unsigned char c : passage.id) {
        if (std::isspace(c)) throw Error("passage id contains whitespace: '" + passage.id + "'");
    }
    if (index_.ord_by_id_.count(passage.id) != 0) {
        throw Error("duplicate passage id: '" + passage.id + "'");
    }
    if (index_.doc_ids_.size() >= std::numeric_limits<std::uint32_t>::max()) {
        throw Error("corpus too large");
    }

    const auto ord = static_cast<std::uint32_t>(index_.doc_ids_.size());
    index_.ord_by_id_.emplace(passage.id, ord);
    index_.doc_ids_.push_back(passage.id);

    const std::vector<std::string> terms = tokenize(passage.text);
    index_.doc_lengths_.push_back(static_cast<std::uint32_t>(terms.size()));
    total_length_ += terms.size();

    // Count within the passage, then append one posting per distinct term.
    std::unordered_map<std::string, std::uint32_t> counts;
    for (const auto& t : terms) ++counts[t];
    for (auto& [term, tf] : counts) {
        PostingList& pl = index_.postings_[term];
        pl.doc_ords.push_back(ord);
        pl.tfs.push_back(tf);
    }
}

InvertedIndex IndexBuilder::finish() {
    const std::size_t n = index_.doc_ids_.size();
    index_.avg_doc_length_ = n == 0 ? 0.0 : static_cast<double>(total_length_) / static_cast<double>(n);
    return std::move(index_);
}

InvertedIndex build_index(const std::vector<Passage>& passages) {
    IndexBuilder builder;
    for (const auto& p : passages) builder.add(p);
    return builder.finish();
}

// ---------------------------------------------------------------------------
// Snapshot format (little-endian):
//   magic "CASPRIX1", u64 doc count, u64 term count, f64 avg length,
//   docs in ordinal order (u32 id length, id bytes, u32 token count),
//   terms sorted lexicographically (u32 term length, term bytes,
//   u64 posting count, postings as u32 ord, u32 tf pairs).
// ---------------------------------------------------------------------------

namespace {

constexpr char kMagic[8] = {'C', 'A', 'S', 'P', 'R', 'I', 'X', '1'};

template <typename T>
void write_pod(std::ostream& out, T value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in, const char* what) {
    T value{};
    in.read(reinterpret_cast<char*>(&value), sizeof(T));
    if (!in) throw Error(std::string("index snapshot truncated while reading ") + what);
    return value;
}

void write_string(std::ostream& out, const std::string& s) {
    write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string read_string(std::istream& in, const char* what) {
    const auto len = read_pod<std::uint32_t>(in, what);
    std::string s(len, '\0');
    in.read(s.data(), static_cast<std::streamsize>(len));
    if (!in) throw Error(std::string("index snapshot truncated while reading ") + what);
    return s;
}

}  // namespace

void InvertedIndex::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open index snapshot for writing: " + path);

    out.write(kMagic, sizeof(kMagic));
    write_pod<std::uint64_t>(out, doc_ids_.size());
    write_pod<std::uint64_t>(out, postings_.size());
    write_pod<double>(out, avg_doc_length_);

    for (std::size_t i = 0; i < doc_ids_.size(); ++i) {
        write_string(out, doc_ids_[i]);
        write_pod<std::uint32_t>(out, doc_lengths_[i]);
    }

    // Sorted term order keeps snapshots byte-stable across runs.
    std::map<std::string_view, const PostingList*> sorted;
    for (const auto& [term, pl] : postings_) sorted.emplace(term, &pl);
    for (const auto& [term, pl] : sorted) {
        write_string(out, std::string(term));
        write_pod<std::uint64_t>(out, pl->doc_ords.size());
        for (std::size_t i = 0; i < pl->doc_ords.size(); ++i) {
            write_pod<std::uint32_t>(out, pl->doc_ords[i]);
            write_pod<std::uint32_t>(out, pl->tfs[i]);
        }
    }
    if (!out) throw Error("failed writing index snapshot: " + path);
}

InvertedIndex InvertedIndex::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open index snapshot: " + path);

    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
        throw Error("not an index snapshot (bad magic): " + path);
    }

    InvertedIndex idx;
    const auto doc_count = read_pod<std::uint64_t>(in, "doc count");
    const auto term_count = read_pod<std::uint64_t>(in, "term count");
    idx.avg_doc_length_ = read_pod<double>(in, "avg length");

    idx.doc_ids_.reserve(doc_count);
    idx.doc_lengths_.reserve(doc_count);
    for (std::uint64_t i = 0; i < doc_count; ++i) {
        std::string id = read_string(in, "doc id");
        const auto len = read_pod<std::uint32_t>(in, "doc length");
        idx.ord_by_id_.emplace(id, static_cast<std::uint32_t>(i));
        idx.doc_ids_.push_back(std::move(id));
        idx.doc_lengths_.push_back(len);
    }

    for (std::uint64_t t = 0; t < term_count; ++t) {
        std::string term = read_string(in, "term");
        const auto n = read_pod<std::uint64_t>(in, "posting count");
        PostingList pl;
        pl.doc_ords.reserve(n);
        pl.tfs.reserve(n);
        for (std::uint64_t i = 0; i < n; ++i) {
            const auto ord = read_pod<std::uint32_t>(in, "posting ord");
            const auto tf = read_pod<std::uint32_t>(in, "posting tf");
            if (ord >= doc_count) throw Error("index snapshot corrupt: ordinal out of range");
            if (tf == 0) throw Error("index snapshot corrupt: zero term frequency");
            pl.doc_ords.push_back(ord);
            pl.tfs.push_back(tf);
        }
        idx.postings_.emplace(std::move(term), std::move(pl));
    }
    return idx;
}

// ---------------------------------------------------------------------------
// Scoring
// ---------------------------------------------------------------------------

Bm25Searcher::Bm25Searcher(const InvertedIndex& index, BM25Params params)
    : index_(index), params_(params) {
    params_.validate();
    const std::size_t n = index_.total_docs();
    const double avg = index_.avg_doc_length();
    norms_.resize(n);
    if (avg > 0.0) {
        for (std::size_t i = 0; i < n; ++i) {
            const double len = static_cast<double>(index_.doc_length(static_cast<std::uint32_t>(i)));
            norms_[i] = params_.k1 * (1.0 - params_.b + params_.b * (len / avg));
        }
    } else {
        // All documents tokenized to nothing; no posting can exist.
        std::fill(norms_.begin(), norms_.end(), params_.k1 * (1.0 - params_.b));
    }
}

std::vector<SearchHit> Bm25Searcher::search(const std::vector<std::string>& query_terms,
                                            std::size_t depth) const {
    if (depth < 1) throw Error("search depth must be >= 1");
    const std::size_t n = index_.total_docs();
    if (n == 0) return {};

    std::vector<double> acc(n, 0.0);
    const kernels::Bm25AccumulateFn accumulate = kernels::bm25_accumulate();

    for (const auto& term : distinct_terms(query_terms)) {
        const PostingList* pl = index_.postings(term);
        if (pl == nullptr) continue;
        const double weight = index_.idf_for_df(pl->doc_ords.size()) * (params_.k1 + 1.0);
        accumulate(pl->doc_ords.data(), pl->tfs.data(), pl->doc_ords.size(), norms_.data(),
                   weight, acc.data());
    }

    std::vector<SearchHit> hits;
    for (std::uint32_t ord = 0; ord < n; ++ord) {
        if (acc[ord] > 0.0) hits.push_back({index_.doc_id(ord), acc[ord]});
    }
    std::sort(hits.begin(), hits.end(), [](const SearchHit& a, const SearchHit& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.id < b.id;
    });
    if (hits.size() > depth) hits.resize(depth);
    return hits;
}

double Bm25Searcher::score(const std::vector<std::string>& query_terms,
                           std::string_view pid) const {
    const auto ord = index_.find_doc(pid);
    if (!ord) throw Error("unknown passage id: '" + std::string(pid) + "'");

    double total = 0.0;
    for (const auto& term : distinct_terms(query_terms)) {
        const PostingList* pl = index_.postings(term);
        if (pl == nullptr) continue;
        const auto it = std::lower_bound(pl->doc_ords.begin(), pl->doc_ords.end(), *ord);
        if (it == pl->doc_ords.end() || *it != *ord) continue;
        const auto pos = static_cast<std::size_t>(it - pl->doc_ords.begin());
        const double tf = static_cast<double>(pl->tfs[pos]);
        const double weight = index_.idf_for_df(pl->doc_ords.size()) * (params_.k1 + 1.0);
        total += (weight * tf) / (tf + norms_[*ord]);
    }
    return total;
}

std::vector<SearchHit> search(const InvertedIndex& index,
                              const std::vector<std::string>& query_terms,
                              const BM25Params& params, std::size_t depth) {
    return Bm25Searcher(index, params).search(query_terms, depth);
}

double bm25_score(const InvertedIndex& index, const std::vector<std::string>& query_terms,
                  std::string_view pid, const BM25Params& params) {
    return Bm25Searcher(index, params).score(query_terms, pid);
}

}  // namespace caspr
