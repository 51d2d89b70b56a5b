#pragma once
// Interpolate a re-ranker score with a reading-comprehension score over the
// initial candidate list, and tune the interpolation weight on a dev set.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "caspr/metrics.hpp"
#include "caspr/trec_run.hpp"

namespace caspr {

struct RCLogits {
    double start_logit = 0.0;
    double end_logit = 0.0;
};

inline double rc_score(const RCLogits& logits) {
    return logits.start_logit + logits.end_logit;
}

/// (qid, pid) -> score; an absent pair is distinguishable from a zero score.
class ScoreTable {
public:
    void set(const std::string& qid, const std::string& pid, double score);
    std::optional<double> get(const std::string& qid, const std::string& pid) const;
    bool has_qid(const std::string& qid) const { return scores_.count(qid) > 0; }
    size_t size() const;

private:
    std::map<std::string, std::map<std::string, double>> scores_;
};

/// TSV `qid<TAB>pid<TAB>score`. Duplicate (qid,pid) is an error.
ScoreTable parse_score_file(std::istream& in);
ScoreTable load_score_file(const std::string& path);

/// TSV `qid<TAB>pid<TAB>start_logit<TAB>end_logit`, stored as the scalar
/// start+end. Duplicate (qid,pid) is an error.
ScoreTable parse_rc_logits_file(std::istream& in);
ScoreTable load_rc_logits_file(const std::string& path);

struct FusionConfig {
    double weight = 0.5;      // w on the rerank stream; 1-w on the rc stream
    bool normalize = false;   // per-query min-max normalization of each stream

    void validate() const;
};

inline double fuse(double rerank, double rc, const FusionConfig& config) {
    return config.weight * rerank + (1.0 - config.weight) * rc;
}

enum class MissingScorePolicy { Strict, UseMin };

/// Re-rank one candidate list. Candidates are exactly the initial pids; each
/// is scored by fuse over the two tables, sorted by fused score descending
/// (ties by pid ascending) and truncated to cutoff. A candidate absent from a
/// table is an error under Strict; under UseMin it takes the per-query
/// minimum of that table's present candidate scores.
std::vector<RunEntry> rerank_candidates(const std::string& qid, const std::vector<RunEntry>& initial,
                                        const ScoreTable& rerank_scores, const ScoreTable& rc_scores,
                                        const FusionConfig& config, uint32_t cutoff,
                                        MissingScorePolicy policy = MissingScorePolicy::Strict);

/// rerank_candidates over every qid of the initial run, preserving qid order.
RunList rerank_run(const RunList& initial, const ScoreTable& rerank_scores, const ScoreTable& rc_scores,
                   const FusionConfig& config, uint32_t cutoff = 100,
                   MissingScorePolicy policy = MissingScorePolicy::Strict);

struct TuneResult {
    double best_weight = 0.0;
    double best_mean = 0.0;
    std::vector<std::pair<double, double>> grid_means;  // (w, mean metric)
};

/// Evaluates the fused run at every grid point and returns the w maximizing
/// the mean metric, ties toward the smallest w.
TuneResult tune_weight(const RunList& initial, const ScoreTable& rerank_scores, const ScoreTable& rc_scores,
                       const Qrels& qrels, const MetricSpec& metric, const std::vector<double>& grid,
                       bool normalize = false, uint32_t cutoff = 100,
                       MissingScorePolicy policy = MissingScorePolicy::Strict,
                       const MetricParams& params = {});

/// 0.0, 0.05, ..., 1.0
std::vector<double> default_weight_grid();

}  // namespace caspr
