#include "caspr/resolver.hpp"

#include <cmath>
#include <unordered_set>

#include "caspr/inverted_index.hpp"
#include "caspr/tokenizer.hpp"

namespace caspr {

namespace {

std::unordered_set<std::string> to_set(const std::vector<std::string>& terms) {
    return {terms.begin(), terms.end()};
}

}  // namespace

std::vector<bool> NullTermClassifier::classify(const HistoryContext& history,
                                               const std::vector<std::string>&) const {
    return std::vector<bool>(history.flat_terms().size(), false);
}

OracleTermClassifier::OracleTermClassifier(const std::string& rewrite_text)
    : rewrite_terms_(tokenize(rewrite_text)) {}

std::vector<bool> OracleTermClassifier::classify(const HistoryContext& history,
                                                 const std::vector<std::string>& query_terms) const {
    auto rewrite = to_set(rewrite_terms_);
    auto query = to_set(query_terms);
    std::vector<bool> verdicts;
    for (const std::string& term : history.flat_terms())
        verdicts.push_back(rewrite.count(term) > 0 && query.count(term) == 0);
    return verdicts;
}

// Chosen for precision over recall: only words that carry next to no topical
// signal in any query.
static const std::vector<std::string> kStopwords = {
    "a",    "an",  "and",  "are", "as",   "at",   "be",   "but", "by",   "do",
    "for",  "how", "i",    "in",  "is",   "it",   "of",   "on",  "or",   "that",
    "the",  "to",  "was",  "what", "when", "where", "which", "who", "why",  "with",
};

bool HeuristicTermClassifier::is_stopword(const std::string& term) {
    for (const std::string& w : kStopwords)
        if (term == w)
            return true;
    return false;
}

const std::vector<std::string>& HeuristicTermClassifier::stopwords() {
    return kStopwords;
}

double default_idf_threshold(const InvertedIndex& index) {
    auto df = static_cast<uint32_t>(std::floor(0.1 * static_cast<double>(index.total_docs())));
    return index.idf_for_df(df);
}

HeuristicTermClassifier::HeuristicTermClassifier(const InvertedIndex& index, double idf_threshold)
    : index_(index),
      idf_threshold_(idf_threshold < 0.0 ? default_idf_threshold(index) : idf_threshold) {}

std::vector<bool> HeuristicTermClassifier::classify(const HistoryContext& history,
                                                    const std::vector<std::string>& query_terms) const {
    auto query = to_set(query_terms);
    std::vector<bool> verdicts;
    for (const std::string& term : history.flat_terms()) {
        bool relevant = !is_stopword(term) && query.count(term) == 0 && index_.idf(term) >= idf_threshold_;
        verdicts.push_back(relevant);
    }
    return verdicts;
}

std::string ResolvedQuery::render() const {
    std::string out = original_text;
    for (const std::string& term : appended_terms) {
        out += ' ';
        out += term;
    }
    return out;
}

std::vector<std::string> ResolvedQuery::all_terms() const {
    std::vector<std::string> out = original_terms;
    out.insert(out.end(), appended_terms.begin(), appended_terms.end());
    return out;
}

std::vector<std::pair<std::string, bool>> classify_terms(const HistoryContext& history,
                                                         const std::vector<std::string>& query_terms,
                                                         const TermClassifier& classifier) {
    std::vector<std::string> terms = history.flat_terms();
    std::vector<bool> verdicts = classifier.classify(history, query_terms);
    std::vector<std::pair<std::string, bool>> out;
    out.reserve(terms.size());
    for (size_t i = 0; i < terms.size(); ++i)
        out.emplace_back(terms[i], i < verdicts.size() && verdicts[i]);
    return out;
}

ResolvedQuery resolve_query(const Turn& turn, const HistoryContext& history, const TermClassifier& classifier) {
    ResolvedQuery rq;
    rq.original_text = turn.raw_query;
    rq.original_terms = tokenize(turn.raw_query);

    std::unordered_set<std::string> seen;  // dedup among appended terms only
    for (const auto& [term, relevant] : classify_terms(history, rq.original_terms, classifier)) {
        if (!relevant)
            continue;
        if (seen.insert(term).second)
            rq.appended_terms.push_back(term);
    }
    return rq;
}

}  // namespace caspr
