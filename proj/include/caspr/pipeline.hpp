#pragma once
// End-to-end pipeline: conversations in, TREC run out. Per turn: build the
// history context, resolve the query, search the index, optionally
// rerank-and-fuse, truncate, emit.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "caspr/conversation.hpp"
#include "caspr/corpus_io.hpp"
#include "caspr/fusion.hpp"
#include "caspr/inverted_index.hpp"
#include "caspr/trec_run.hpp"

namespace caspr {

// Null/Oracle/Heuristic append classifier-chosen history terms; the rewrite
// kinds substitute the query text outright (manual and auto from the
// conversation file, RewriteFile from an external TSV keyed by qid).
enum class ResolverKind { Null, Oracle, Heuristic, ManualRewrite, AutoRewrite, RewriteFile };

ResolverKind parse_resolver_kind(const std::string& text);
const char* resolver_kind_name(ResolverKind kind);

/// True for the kinds that classify history terms (and so never need a
/// rewrite file): Null, Oracle, Heuristic.
bool resolver_appends_terms(ResolverKind kind);

struct PipelineConfig {
    std::string corpus_path;           // exactly one of corpus_path/index_path
    CorpusFormat corpus_format = CorpusFormat::Auto;
    std::string index_path;            // prebuilt snapshot
    std::string conversations_path;

    ResolverKind resolver = ResolverKind::Null;
    std::string rewrite_file;          // required iff resolver = RewriteFile
    double heuristic_idf_threshold = -1.0;  // negative selects the corpus default

    BM25Params bm25;
    uint32_t depth = 100;

    bool rerank = false;
    FusionConfig fusion;
    std::string rerank_scores_path;    // empty: built-in overlap scorer
    std::string rc_scores_path;        // empty: built-in overlap scorer
    MissingScorePolicy missing = MissingScorePolicy::Strict;

    uint32_t cutoff = 100;             // must not exceed depth
    std::string tag = "caspr";

    void validate() const;
};

/// TSV `qid<TAB>text`, the same shape `resolve` emits.
std::vector<std::pair<std::string, std::string>> load_rewrite_file(const std::string& path);

/// Resolved (or substituted) query text per turn, as (qid, text) pairs in
/// conversation-then-turn order. `index` may be null unless the resolver is
/// Heuristic.
std::vector<std::pair<std::string, std::string>> resolve_conversations(
    const std::vector<Conversation>& conversations, const InvertedIndex* index, const PipelineConfig& config);

/// Distinct query terms found in the passage; the zero-dependency stand-in
/// for an external scorer.
double overlap_score(const InvertedIndex& index, const std::vector<std::string>& query_terms,
                     const std::string& pid);

using PipelineLog = std::function<void(const std::string&)>;

/// Runs the full pipeline. Stage failures rethrow with the stage name and qid
/// attached; `log`, when set, receives one per-qid line of stage timings and
/// candidate counts plus a final summary.
RunList run_pipeline(const PipelineConfig& config, const PipelineLog& log = nullptr);

}  // namespace caspr
