#pragma once
// Rank metrics over a run and qrels: NDCG@k, MAP, MRR, Recall@k. A metric is
// undefined (nullopt) for a query with no relevant passage; undefined values
// are excluded from means but counted in MetricReport.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "caspr/trec_run.hpp"

namespace caspr {

enum class MetricKind { NdcgAtK, Map, Mrr, RecallAtK };

struct MetricSpec {
    MetricKind kind = MetricKind::Map;
    uint32_t k = 0;  // cutoff for ndcg@K / recall@K, unused otherwise

    std::string name() const;  // "ndcg@3", "map", "mrr", "recall@100"
    /// Accepts "ndcg@K", "map", "mrr", "recall@K" (case-insensitive).
    static MetricSpec parse(const std::string& text);
};

struct MetricParams {
    int binarize_at = 1;           // grade >= binarize_at counts as relevant
    bool exponential_gain = false;  // NDCG gain (2^grade - 1) instead of grade

    void validate() const;
};

// Each takes the ranking as a pid sequence ordered by rank. nullopt when the
// qid has no relevant passage under the metric's notion of relevance.
std::optional<double> ndcg_at_k(const std::vector<std::string>& ranking, const Qrels& qrels,
                                const std::string& qid, uint32_t k, const MetricParams& params = {});
std::optional<double> average_precision(const std::vector<std::string>& ranking, const Qrels& qrels,
                                        const std::string& qid, const MetricParams& params = {});
std::optional<double> reciprocal_rank(const std::vector<std::string>& ranking, const Qrels& qrels,
                                      const std::string& qid, const MetricParams& params = {});
std::optional<double> recall_at_k(const std::vector<std::string>& ranking, const Qrels& qrels,
                                  const std::string& qid, uint32_t k, const MetricParams& params = {});

std::optional<double> compute_metric(const MetricSpec& spec, const std::vector<std::string>& ranking,
                                     const Qrels& qrels, const std::string& qid,
                                     const MetricParams& params = {});

struct MetricReport {
    std::vector<std::string> metric_names;          // in request order
    std::vector<std::string> qid_order;             // run order, then qrels-only qids sorted
    std::map<std::string, std::map<std::string, double>> per_query;  // qid -> metric -> value
    std::map<std::string, double> means;            // metric -> mean over defined queries
    std::map<std::string, size_t> defined_counts;   // metric -> queries entering the mean
    size_t evaluated_query_count = 0;
};

/// Queries in the run but absent from qrels are skipped; queries in qrels but
/// absent from the run score 0 on every defined metric and enter the means.
/// Throws when the run and qrels share no qid.
MetricReport evaluate_run(const RunList& run, const Qrels& qrels, const std::vector<MetricSpec>& metrics,
                          const MetricParams& params = {});

/// TSV `metric<TAB>qid<TAB>value` rows per metric, then an `all` mean row.
void emit_report(std::ostream& out, const MetricReport& report);

/// Per-query values of one metric for every qid in qrels, with absent-from-run
/// qids collected instead of silently scored. Undefined queries are omitted.
std::map<std::string, double> per_query_metric(const RunList& run, const Qrels& qrels, const MetricSpec& spec,
                                               const MetricParams& params, std::vector<std::string>* missing_qids);

}  // namespace caspr
