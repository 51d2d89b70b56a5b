#include "caspr/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <unordered_map>
#include <unordered_set>

#include "caspr/conversation.hpp"
#include "caspr/error.hpp"
#include "caspr/resolver.hpp"
#include "caspr/tokenizer.hpp"

namespace caspr {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

[[noreturn]] void stage_error(const char* stage, const std::string& qid, const std::exception& e) {
    throw Error(std::string(stage) + " stage failed for qid '" + qid + "': " + e.what());
}

}  // namespace

ResolverKind parse_resolver_kind(const std::string& text) {
    if (text == "null")
        return ResolverKind::Null;
    if (text == "oracle")
        return ResolverKind::Oracle;
    if (text == "heuristic")
        return ResolverKind::Heuristic;
    if (text == "manual")
        return ResolverKind::ManualRewrite;
    if (text == "auto")
        return ResolverKind::AutoRewrite;
    if (text == "rewrite-file")
        return ResolverKind::RewriteFile;
    throw Error("unknown resolver '" + text + "' (expected null, oracle, heuristic, manual, auto, rewrite-file)");
}

const char* resolver_kind_name(ResolverKind kind) {
    switch (kind) {
        case ResolverKind::Null:
            return "null";
        case ResolverKind::Oracle:
            return "oracle";
        case ResolverKind::Heuristic:
            return "heuristic";
        case ResolverKind::ManualRewrite:
            return "manual";
        case ResolverKind::AutoRewrite:
            return "auto";
        case ResolverKind::RewriteFile:
            return "rewrite-file";
    }
    throw Error("unreachable resolver kind");
}

bool resolver_appends_terms(ResolverKind kind) {
    return kind == ResolverKind::Null || kind == ResolverKind::Oracle || kind == ResolverKind::Heuristic;
}

void PipelineConfig::validate() const {
    if (corpus_path.empty() == index_path.empty())
        throw Error("exactly one of corpus path and index path must be set");
    if (conversations_path.empty())
        throw Error("conversations path must be set");
    if (resolver == ResolverKind::RewriteFile && rewrite_file.empty())
        throw Error("resolver 'rewrite-file' requires a rewrite file path");
    if (resolver != ResolverKind::RewriteFile && !rewrite_file.empty())
        throw Error("rewrite file is only used by resolver 'rewrite-file'");
    bm25.validate();
    fusion.validate();
    if (depth < 1)
        throw Error("retrieval depth must be >= 1");
    if (cutoff < 1)
        throw Error("cutoff must be >= 1");
    if (cutoff > depth)
        throw Error("cutoff " + std::to_string(cutoff) + " exceeds retrieval depth " + std::to_string(depth));
    if (tag.empty())
        throw Error("run tag must be non-empty");
}

std::vector<std::pair<std::string, std::string>> load_rewrite_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot open rewrite file '" + path + "'");
    std::vector<std::pair<std::string, std::string>> out;
    std::unordered_set<std::string> seen;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        size_t tab = line.find('\t');
        if (tab == std::string::npos || tab == 0 || tab + 1 >= line.size())
            throw Error(path + ": line " + std::to_string(lineno) + ": expected `qid<TAB>text`");
        std::string qid = line.substr(0, tab);
        if (!seen.insert(qid).second)
            throw Error(path + ": line " + std::to_string(lineno) + ": duplicate qid '" + qid + "'");
        out.emplace_back(std::move(qid), line.substr(tab + 1));
    }
    return out;
}

namespace {

struct RewriteLookup {
    std::unordered_map<std::string, std::string> by_qid;

    const std::string& get(const std::string& qid) const {
        auto it = by_qid.find(qid);
        if (it == by_qid.end())
            throw Error("rewrite file has no entry for qid '" + qid + "'");
        return it->second;
    }
};

// Resolved or substituted query text and terms for one turn.
struct TurnQuery {
    std::string text;
    std::vector<std::string> terms;
};

TurnQuery resolve_turn(const Conversation& conversation, const Turn& turn, const InvertedIndex* index,
                       const PipelineConfig& config, const RewriteLookup* rewrites) {
    const std::string qid = make_qid(conversation, turn);
    switch (config.resolver) {
        case ResolverKind::Null:
        case ResolverKind::Oracle:
        case ResolverKind::Heuristic: {
            HistoryContext history = build_history(conversation, turn.turn_number);
            ResolvedQuery rq;
            if (config.resolver == ResolverKind::Null) {
                rq = resolve_query(turn, history, NullTermClassifier());
            } else if (config.resolver == ResolverKind::Oracle) {
                const std::string& gold =
                    turn.manual_rewrite ? *turn.manual_rewrite : turn.auto_rewrite.value_or("");
                rq = resolve_query(turn, history, OracleTermClassifier(gold));
            } else {
                if (!index)
                    throw Error("heuristic resolver requires a corpus or index");
                rq = resolve_query(turn, history,
                                   HeuristicTermClassifier(*index, config.heuristic_idf_threshold));
            }
            return {rq.render(), rq.all_terms()};
        }
        case ResolverKind::ManualRewrite: {
            if (!turn.manual_rewrite)
                throw Error("turn has no manual rewrite");
            return {*turn.manual_rewrite, tokenize(*turn.manual_rewrite)};
        }
        case ResolverKind::AutoRewrite: {
            if (!turn.auto_rewrite)
                throw Error("turn has no automatic rewrite");
            return {*turn.auto_rewrite, tokenize(*turn.auto_rewrite)};
        }
        case ResolverKind::RewriteFile: {
            const std::string& text = rewrites->get(qid);
            return {text, tokenize(text)};
        }
    }
    throw Error("unreachable resolver kind");
}

}  // namespace

std::vector<std::pair<std::string, std::string>> resolve_conversations(
    const std::vector<Conversation>& conversations, const InvertedIndex* index, const PipelineConfig& config) {
    std::optional<RewriteLookup> rewrites;
    if (config.resolver == ResolverKind::RewriteFile) {
        rewrites.emplace();
        for (auto& [qid, text] : load_rewrite_file(config.rewrite_file))
            rewrites->by_qid.emplace(qid, text);
    }

    std::vector<std::pair<std::string, std::string>> out;
    for (const Conversation& conversation : conversations) {
        for (const Turn& turn : conversation.turns) {
            const std::string qid = make_qid(conversation, turn);
            try {
                TurnQuery q = resolve_turn(conversation, turn, index, config,
                                           rewrites ? &*rewrites : nullptr);
                out.emplace_back(qid, std::move(q.text));
            } catch (const Error& e) {
                stage_error("resolve", qid, e);
            }
        }
    }
    return out;
}

double overlap_score(const InvertedIndex& index, const std::vector<std::string>& query_terms,
                     const std::string& pid) {
    auto ord = index.find_doc(pid);
    if (!ord)
        throw Error("unknown passage id: '" + pid + "'");
    double overlap = 0.0;
    for (const std::string& term : distinct_terms(query_terms)) {
        const PostingList* plist = index.postings(term);
        if (!plist)
            continue;
        auto it = std::lower_bound(plist->doc_ords.begin(), plist->doc_ords.end(), *ord);
        if (it != plist->doc_ords.end() && *it == *ord)
            overlap += 1.0;
    }
    return overlap;
}

RunList run_pipeline(const PipelineConfig& config, const PipelineLog& log) {
    config.validate();

    auto t_setup = Clock::now();
    InvertedIndex index = config.index_path.empty()
                              ? index_corpus_file(config.corpus_path, config.corpus_format)
                              : InvertedIndex::load(config.index_path);
    std::vector<Conversation> conversations = load_conversations(config.conversations_path);

    std::optional<RewriteLookup> rewrites;
    if (config.resolver == ResolverKind::RewriteFile) {
        rewrites.emplace();
        for (auto& [qid, text] : load_rewrite_file(config.rewrite_file))
            rewrites->by_qid.emplace(qid, text);
    }
    std::optional<ScoreTable> rerank_scores;
    if (config.rerank && !config.rerank_scores_path.empty())
        rerank_scores = load_score_file(config.rerank_scores_path);
    std::optional<ScoreTable> rc_scores;
    if (config.rerank && !config.rc_scores_path.empty())
        rc_scores = load_rc_logits_file(config.rc_scores_path);

    if (log) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "setup: %zu passages, %zu conversations, %.1f ms", index.total_docs(),
                      conversations.size(), ms_since(t_setup));
        log(buf);
    }

    Bm25Searcher searcher(index, config.bm25);
    RunList run;
    size_t turn_count = 0;
    auto t_all = Clock::now();

    for (const Conversation& conversation : conversations) {
        for (const Turn& turn : conversation.turns) {
            const std::string qid = make_qid(conversation, turn);
            ++turn_count;

            auto t_resolve = Clock::now();
            TurnQuery query;
            try {
                query = resolve_turn(conversation, turn, &index, config, rewrites ? &*rewrites : nullptr);
            } catch (const Error& e) {
                stage_error("resolve", qid, e);
            }
            double resolve_ms = ms_since(t_resolve);

            auto t_search = Clock::now();
            std::vector<SearchHit> hits;
            try {
                hits = searcher.search(query.terms, config.depth);
            } catch (const Error& e) {
                stage_error("search", qid, e);
            }
            double search_ms = ms_since(t_search);

            std::vector<RunEntry> entries;
            entries.reserve(hits.size());
            for (const SearchHit& hit : hits) {
                RunEntry e;
                e.qid = qid;
                e.pid = hit.id;
                e.score = hit.score;
                e.tag = config.tag;
                entries.push_back(std::move(e));
            }
            for (size_t i = 0; i < entries.size(); ++i)
                entries[i].rank = static_cast<uint32_t>(i) + 1;

            double rerank_ms = 0.0;
            if (config.rerank && !entries.empty()) {
                auto t_rerank = Clock::now();
                try {
                    // Streams without a score file take the built-in overlap
                    // scorer over the candidate set.
                    ScoreTable fallback;
                    if (!rerank_scores || !rc_scores) {
                        for (const RunEntry& e : entries)
                            fallback.set(qid, e.pid, overlap_score(index, query.terms, e.pid));
                    }
                    entries = rerank_candidates(qid, entries, rerank_scores ? *rerank_scores : fallback,
                                                rc_scores ? *rc_scores : fallback, config.fusion, config.cutoff,
                                                config.missing);
                    for (RunEntry& e : entries)
                        e.tag = config.tag;
                } catch (const Error& e) {
                    stage_error("rerank", qid, e);
                }
                rerank_ms = ms_since(t_rerank);
            } else if (entries.size() > config.cutoff) {
                entries.resize(config.cutoff);
            }

            if (log) {
                char buf[200];
                if (config.rerank)
                    std::snprintf(buf, sizeof buf,
                                  "%s: resolve %.1f ms, search %.1f ms (%zu candidates), rerank %.1f ms (%zu kept)",
                                  qid.c_str(), resolve_ms, search_ms, hits.size(), rerank_ms, entries.size());
                else
                    std::snprintf(buf, sizeof buf, "%s: resolve %.1f ms, search %.1f ms (%zu candidates, %zu kept)",
                                  qid.c_str(), resolve_ms, search_ms, hits.size(), entries.size());
                log(buf);
            }

            run.qid_order.push_back(qid);
            run.by_qid.emplace(qid, std::move(entries));
        }
    }

    if (log) {
        char buf[120];
        std::snprintf(buf, sizeof buf, "pipeline: %zu queries in %.1f ms", turn_count, ms_since(t_all));
        log(buf);
    }
    validate_run(run);
    return run;
}

}  // namespace caspr
