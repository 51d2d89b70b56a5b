#pragma once
// In-memory inverted index with BM25 scoring. Documents get dense ordinals
// in insertion order; postings are stored as parallel ordinal/frequency
// arrays so the scoring kernels can run over contiguous blocks.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "caspr/kernels.hpp"

namespace caspr {

struct Passage {
    std::string id;    // non-empty, unique, no whitespace
    std::string text;
};

struct BM25Params {
    double k1 = 0.82;
    double b = 0.68;

    void validate() const;  // k1 >= 0, 0 <= b <= 1
};

struct PostingList {
    std::vector<std::uint32_t> doc_ords;  // ascending
    std::vector<std::uint32_t> tfs;       // parallel to doc_ords, each >= 1
};

struct SearchHit {
    std::string id;
    double score;
};

class InvertedIndex {
public:
    std::size_t total_docs() const { return doc_ids_.size(); }
    double avg_doc_length() const { return avg_doc_length_; }

    const std::string& doc_id(std::uint32_t ord) const { return doc_ids_[ord]; }
    std::uint32_t doc_length(std::uint32_t ord) const { return doc_lengths_[ord]; }
    std::optional<std::uint32_t> find_doc(std::string_view id) const;

    std::size_t term_count() const { return postings_.size(); }
    const PostingList* postings(std::string_view term) const;
    std::size_t doc_freq(std::string_view term) const;

    // ln((N - df + 0.5) / (df + 0.5) + 1): non-negative for every df <= N.
    double idf_for_df(std::size_t df) const;
    double idf(std::string_view term) const { return idf_for_df(doc_freq(term)); }

    void save(const std::string& path) const;
    static InvertedIndex load(const std::string& path);

private:
    friend class IndexBuilder;

    std::vector<std::string> doc_ids_;         // ordinal -> id, insertion order
    std::vector<std::uint32_t> doc_lengths_;   // ordinal -> token count
    std::unordered_map<std::string, std::uint32_t> ord_by_id_;
    std::unordered_map<std::string, PostingList> postings_;
    double avg_doc_length_ = 0.0;
};

// Streaming construction; rejects duplicate or malformed passage ids.
class IndexBuilder {
public:
    void add(const Passage& passage);
    InvertedIndex finish();

private:
    InvertedIndex index_;
    std::uint64_t total_length_ = 0;
};

InvertedIndex build_index(const std::vector<Passage>& passages);

// Scores queries against one index with fixed parameters. Precomputes the
// per-document length normalizers once; const methods are safe to call from
// multiple threads.
class Bm25Searcher {
public:
    Bm25Searcher(const InvertedIndex& index, BM25Params params);

    // Ranked (id, score) hits: score > 0 only, sorted by score descending
    // then id ascending, truncated to depth. depth must be >= 1.
    std::vector<SearchHit> search(const std::vector<std::string>& query_terms,
                                  std::size_t depth) const;

    // BM25 score of a single passage; throws if the id is unknown.
    double score(const std::vector<std::string>& query_terms, std::string_view pid) const;

private:
    const InvertedIndex& index_;
    BM25Params params_;
    std::vector<double> norms_;  // k1 * (1 - b + b * len / avg_len) per ordinal
};

std::vector<SearchHit> search(const InvertedIndex& index,
                              const std::vector<std::string>& query_terms,
                              const BM25Params& params, std::size_t depth);

double bm25_score(const InvertedIndex& index, const std::vector<std::string>& query_terms,
                  std::string_view pid, const BM25Params& params);

}  // namespace caspr
