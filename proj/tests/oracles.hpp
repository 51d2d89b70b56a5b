#pragma once
// Independent reference implementations used to cross-check the library.
// Everything here is written directly from the defining formulas, without
// touching the index, kernel, or metric code paths under test.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

// ------------------------------------------------------------ deterministic rng
// mt19937 output is pinned by the standard; the helpers below avoid
// std::uniform_* distributions, whose sequences are not.

inline std::uint32_t rand_below(std::mt19937& rng, std::uint32_t n) {
    return static_cast<std::uint32_t>(rng() % n);
}

inline double rand_unit(std::mt19937& rng) {
    return static_cast<double>(rng()) / 4294967296.0;  // [0, 1)
}

// ----------------------------------------------------------------------- bm25
// A corpus is a list of (id, tokens). Scores come straight from the formula:
//   idf = ln((N - df + 0.5) / (df + 0.5) + 1)
//   score = sum over distinct query terms of
//           idf * tf * (k1 + 1) / (tf + k1 * (1 - b + b * len / avg_len))

struct BmDoc {
    std::string id;
    std::vector<std::string> tokens;
};

inline double bm25_idf(const std::vector<BmDoc>& corpus, const std::string& term) {
    std::size_t df = 0;
    for (const BmDoc& doc : corpus)
        if (std::find(doc.tokens.begin(), doc.tokens.end(), term) != doc.tokens.end())
            ++df;
    double n = static_cast<double>(corpus.size());
    double d = static_cast<double>(df);
    return std::log((n - d + 0.5) / (d + 0.5) + 1.0);
}

inline double bm25_score(const std::vector<BmDoc>& corpus, const std::vector<std::string>& query,
                         const std::string& doc_id, double k1, double b) {
    double total_len = 0.0;
    for (const BmDoc& doc : corpus)
        total_len += static_cast<double>(doc.tokens.size());
    double avg_len = corpus.empty() ? 0.0 : total_len / static_cast<double>(corpus.size());

    const BmDoc* target = nullptr;
    for (const BmDoc& doc : corpus)
        if (doc.id == doc_id)
            target = &doc;
    if (!target)
        return 0.0;

    std::vector<std::string> distinct;
    for (const std::string& term : query)
        if (std::find(distinct.begin(), distinct.end(), term) == distinct.end())
            distinct.push_back(term);

    double score = 0.0;
    double len = static_cast<double>(target->tokens.size());
    for (const std::string& term : distinct) {
        double tf = static_cast<double>(std::count(target->tokens.begin(), target->tokens.end(), term));
        if (tf == 0.0)
            continue;
        double norm = k1 * (1.0 - b + b * len / avg_len);
        score += bm25_idf(corpus, term) * tf * (k1 + 1.0) / (tf + norm);
    }
    return score;
}

// Exhaustive search: score every document, keep positives, sort by score
// descending then id ascending, truncate.
inline std::vector<std::pair<std::string, double>> bm25_search(const std::vector<BmDoc>& corpus,
                                                               const std::vector<std::string>& query,
                                                               double k1, double b, std::size_t depth) {
    std::vector<std::pair<std::string, double>> hits;
    for (const BmDoc& doc : corpus) {
        double s = bm25_score(corpus, query, doc.id, k1, b);
        if (s > 0.0)
            hits.emplace_back(doc.id, s);
    }
    std::sort(hits.begin(), hits.end(), [](const auto& a, const auto& b2) {
        if (a.second != b2.second)
            return a.second > b2.second;
        return a.first < b2.first;
    });
    if (hits.size() > depth)
        hits.resize(depth);
    return hits;
}

// -------------------------------------------------------------------- metrics
// Definitional metric oracles over a ranking (pid list) and a grade map.

using Grades = std::map<std::string, int>;

inline double metric_ndcg(const std::vector<std::string>& ranking, const Grades& grades, std::size_t k) {
    auto gain = [&](const std::string& pid) {
        auto it = grades.find(pid);
        return it == grades.end() ? 0.0 : static_cast<double>(it->second);
    };
    double dcg = 0.0;
    for (std::size_t i = 0; i < ranking.size() && i < k; ++i)
        dcg += gain(ranking[i]) / std::log2(static_cast<double>(i) + 2.0);

    std::vector<int> ideal;
    for (const auto& [pid, g] : grades)
        if (g > 0)
            ideal.push_back(g);
    std::sort(ideal.begin(), ideal.end(), std::greater<int>());
    double idcg = 0.0;
    for (std::size_t i = 0; i < ideal.size() && i < k; ++i)
        idcg += static_cast<double>(ideal[i]) / std::log2(static_cast<double>(i) + 2.0);
    return idcg == 0.0 ? -1.0 : dcg / idcg;  // -1 marks "undefined"
}

inline double metric_ap(const std::vector<std::string>& ranking, const Grades& grades, int binarize_at) {
    std::set<std::string> relevant;
    for (const auto& [pid, g] : grades)
        if (g >= binarize_at)
            relevant.insert(pid);
    if (relevant.empty())
        return -1.0;
    double sum = 0.0;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < ranking.size(); ++i) {
        if (relevant.count(ranking[i])) {
            ++hits;
            sum += static_cast<double>(hits) / static_cast<double>(i + 1);
        }
    }
    return sum / static_cast<double>(relevant.size());
}

inline double metric_rr(const std::vector<std::string>& ranking, const Grades& grades, int binarize_at) {
    bool any = false;
    for (const auto& [pid, g] : grades)
        if (g >= binarize_at)
            any = true;
    if (!any)
        return -1.0;
    for (std::size_t i = 0; i < ranking.size(); ++i)
        if (grades.count(ranking[i]) && grades.at(ranking[i]) >= binarize_at)
            return 1.0 / static_cast<double>(i + 1);
    return 0.0;
}

inline double metric_recall(const std::vector<std::string>& ranking, const Grades& grades, std::size_t k,
                            int binarize_at) {
    std::set<std::string> relevant;
    for (const auto& [pid, g] : grades)
        if (g >= binarize_at)
            relevant.insert(pid);
    if (relevant.empty())
        return -1.0;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < ranking.size() && i < k; ++i)
        if (relevant.count(ranking[i]))
            ++hits;
    return static_cast<double>(hits) / static_cast<double>(relevant.size());
}

// ------------------------------------------------------- error classification
// Brute-force re-statement of the pass predicate and class rules.

inline bool pass(double v, double t) {
    return t == 0.0 ? v > 0.0 : v >= t;
}

inline int error_class_of(double original, double resolved, double human, double t) {
    (void)original;
    if (!pass(human, t))
        return 0;  // ranking error
    if (!pass(resolved, t))
        return 1;  // query resolution error
    return 2;      // no error
}

}  // namespace oracle
