#pragma once
// Query resolution: classify history terms as relevant or not and append the
// relevant ones to the current turn's query (Q -> Q').

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "caspr/conversation.hpp"

namespace caspr {

class InvertedIndex;

/// One verdict per history term occurrence, order-preserving.
class TermClassifier {
public:
    virtual ~TermClassifier() = default;
    virtual std::vector<bool> classify(const HistoryContext& history,
                                       const std::vector<std::string>& query_terms) const = 0;
};

/// Never relevant. Resolution with it is the identity on the query text.
class NullTermClassifier final : public TermClassifier {
public:
    std::vector<bool> classify(const HistoryContext& history,
                               const std::vector<std::string>& query_terms) const override;
};

/// Distant-supervision construction: a history term is relevant iff it occurs
/// in the gold rewrite but not among the original query's terms.
class OracleTermClassifier final : public TermClassifier {
public:
    explicit OracleTermClassifier(const std::string& rewrite_text);

    std::vector<bool> classify(const HistoryContext& history,
                               const std::vector<std::string>& query_terms) const override;

private:
    std::vector<std::string> rewrite_terms_;
};

/// Relevant iff not a stopword, not already in the current query, and corpus
/// idf at or above the threshold. Terms absent from the index have maximal
/// idf (df = 0) and so pass the idf test.
class HeuristicTermClassifier final : public TermClassifier {
public:
    /// idf_threshold < 0 selects the default: the idf of a term occurring in
    /// 10% of the indexed passages, so anything at least that rare passes.
    HeuristicTermClassifier(const InvertedIndex& index, double idf_threshold = -1.0);

    std::vector<bool> classify(const HistoryContext& history,
                               const std::vector<std::string>& query_terms) const override;

    double idf_threshold() const { return idf_threshold_; }
    static bool is_stopword(const std::string& term);
    static const std::vector<std::string>& stopwords();

private:
    const InvertedIndex& index_;
    double idf_threshold_;
};

/// Default heuristic cutoff for `index`: idf at df = floor(0.1 * N).
double default_idf_threshold(const InvertedIndex& index);

struct ResolvedQuery {
    std::string original_text;
    std::vector<std::string> original_terms;
    std::vector<std::string> appended_terms;

    /// Original text, then appended terms joined by single spaces.
    std::string render() const;
    /// original_terms followed by appended_terms.
    std::vector<std::string> all_terms() const;
};

std::vector<std::pair<std::string, bool>> classify_terms(const HistoryContext& history,
                                                         const std::vector<std::string>& query_terms,
                                                         const TermClassifier& classifier);

/// Appends relevant history terms in first-occurrence order, deduplicated by
/// case-folded surface among themselves only: an appended term may repeat a
/// query term, never another appended term.
ResolvedQuery resolve_query(const Turn& turn, const HistoryContext& history, const TermClassifier& classifier);

}  // namespace caspr
