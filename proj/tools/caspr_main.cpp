// Command-line front end. Exit codes: 0 success, 1 runtime error, 2 usage.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "caspr/error.hpp"
#include "caspr/error_analysis.hpp"
#include "caspr/fusion.hpp"
#include "caspr/kernels.hpp"
#include "caspr/metrics.hpp"
#include "caspr/pipeline.hpp"
#include "caspr/tokenizer.hpp"
#include "caspr/trec_run.hpp"

namespace {

using namespace caspr;

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("cannot open '" + path + "' for writing");
    return out;
}

// stdout unless --out was given.
struct OutputTarget {
    std::string path;

    template <typename Fn>
    void write(Fn&& fn) const {
        if (path.empty()) {
            fn(std::cout);
            return;
        }
        std::ofstream out = open_output(path);
        fn(out);
        if (!out)
            throw Error("failed writing '" + path + "'");
    }
};

void warn_to_stderr(const std::string& message) {
    std::cerr << "warning: " << message << '\n';
}

// key=value lines. Blank lines and # comments are skipped, the first '='
// splits, surrounding whitespace is trimmed, duplicate keys are an error.
std::map<std::string, std::string> load_key_value_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot open config file '" + path + "'");
    auto trim = [](const std::string& s) {
        size_t b = s.find_first_not_of(" \t\r");
        size_t e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    std::map<std::string, std::string> values;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#')
            continue;
        size_t eq = stripped.find('=');
        if (eq == std::string::npos)
            throw Error(path + ":" + std::to_string(line_no) + ": expected key=value");
        std::string key = trim(stripped.substr(0, eq));
        if (key.empty())
            throw Error(path + ":" + std::to_string(line_no) + ": empty key");
        if (!values.emplace(key, trim(stripped.substr(eq + 1))).second)
            throw Error(path + ":" + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
    return values;
}

double config_number(const std::string& key, const std::string& value) {
    try {
        size_t used = 0;
        double parsed = std::stod(value, &used);
        if (used != value.size())
            throw std::invalid_argument(value);
        return parsed;
    } catch (const std::exception&) {
        throw Error("config key '" + key + "' expects a number, got '" + value + "'");
    }
}

uint32_t config_count(const std::string& key, const std::string& value) {
    double parsed = config_number(key, value);
    auto truncated = static_cast<uint32_t>(parsed);
    if (parsed < 0.0 || static_cast<double>(truncated) != parsed)
        throw Error("config key '" + key + "' expects a non-negative integer, got '" + value + "'");
    return truncated;
}

bool config_flag(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes")
        return true;
    if (value == "false" || value == "0" || value == "no")
        return false;
    throw Error("config key '" + key + "' expects true or false, got '" + value + "'");
}

struct AnalyzeInputs {
    std::string original_path;
    std::string resolved_path;
    std::string human_path;
    std::string qrels_path;
    std::string metric = "ndcg@3";
    bool missing_as_zero = false;
};

// Per-query metric values for the three runs, with the shared-missing-qid
// policy applied.
struct AnalyzeValues {
    PerQueryValues original;
    PerQueryValues resolved;
    PerQueryValues human;
};

AnalyzeValues load_analyze_values(const AnalyzeInputs& in) {
    Qrels qrels = load_qrels(in.qrels_path, warn_to_stderr);
    MetricSpec spec = MetricSpec::parse(in.metric);

    auto values_for = [&](const std::string& path) {
        RunList run = load_run(path);
        std::vector<std::string> missing;
        PerQueryValues values = per_query_metric(run, qrels, spec, {}, &missing);
        if (!missing.empty() && !in.missing_as_zero) {
            std::string joined;
            for (const std::string& qid : missing)
                joined += (joined.empty() ? "" : ", ") + qid;
            throw Error(path + ": run is missing judged qids: " + joined +
                        " (pass --missing-as-zero to score them 0)");
        }
        for (const std::string& qid : missing)
            values[qid] = 0.0;
        return values;
    };

    AnalyzeValues out;
    out.original = values_for(in.original_path);
    out.resolved = values_for(in.resolved_path);
    out.human = values_for(in.human_path);

    // A query undefined under the metric (no relevant passage) is undefined
    // for all three runs alike; drop it from the shared qid set.
    auto defined_everywhere = [&](const std::string& qid) {
        return out.original.count(qid) && out.resolved.count(qid) && out.human.count(qid);
    };
    for (auto* m : {&out.original, &out.resolved, &out.human}) {
        for (auto it = m->begin(); it != m->end();) {
            if (defined_everywhere(it->first))
                ++it;
            else
                it = m->erase(it);
        }
    }
    return out;
}

void add_analyze_options(CLI::App* cmd, AnalyzeInputs& in) {
    cmd->add_option("original", in.original_path, "run file for the original queries")->required();
    cmd->add_option("resolved", in.resolved_path, "run file for the resolved queries")->required();
    cmd->add_option("human", in.human_path, "run file for the human-rewritten queries")->required();
    cmd->add_option("-q,--qrels", in.qrels_path, "qrels file")->required();
    cmd->add_option("-m,--metric", in.metric, "per-query metric (ndcg@K, map, mrr, recall@K)")
        ->capture_default_str();
    cmd->add_flag("--missing-as-zero", in.missing_as_zero, "score judged qids absent from a run as 0");
}

int run_app(int argc, char** argv) {
    CLI::App app{"Conversational passage retrieval toolkit"};
    app.require_subcommand(1);

    // ---------------------------------------------------------------- index
    struct {
        std::string corpus;
        std::string format = "auto";
        std::string out;
    } index_args;
    CLI::App* cmd_index = app.add_subcommand("index", "build an index snapshot from a corpus");
    cmd_index->add_option("corpus", index_args.corpus, "corpus file (TSV `pid<TAB>text` or JSON lines)")
        ->required();
    cmd_index->add_option("-f,--format", index_args.format, "corpus format: auto, tsv, jsonl")
        ->capture_default_str();
    cmd_index->add_option("-o,--out", index_args.out, "snapshot output path")->required();
    cmd_index->callback([&] {
        InvertedIndex index = index_corpus_file(index_args.corpus, parse_corpus_format(index_args.format));
        index.save(index_args.out);
        std::cerr << "indexed " << index.total_docs() << " passages, " << index.term_count() << " terms\n";
    });

    // --------------------------------------------------------------- search
    struct {
        std::string corpus;
        std::string format = "auto";
        std::string index;
        std::string query;
        std::string qid = "0";
        std::string tag = "caspr";
        uint32_t depth = 100;
        double k1 = BM25Params{}.k1;
        double b = BM25Params{}.b;
        std::string out;
    } search_args;
    CLI::App* cmd_search = app.add_subcommand("search", "query an index, emit a TREC run");
    cmd_search->add_option("query", search_args.query, "query text")->required();
    CLI::Option* search_corpus = cmd_search->add_option("-c,--corpus", search_args.corpus, "corpus file");
    cmd_search->add_option("-f,--format", search_args.format, "corpus format: auto, tsv, jsonl")
        ->capture_default_str();
    cmd_search->add_option("-i,--index", search_args.index, "index snapshot")->excludes(search_corpus);
    cmd_search->add_option("--qid", search_args.qid, "query id for the run output")->capture_default_str();
    cmd_search->add_option("-t,--tag", search_args.tag, "run tag")->capture_default_str();
    cmd_search->add_option("-d,--depth", search_args.depth, "ranked list depth")->capture_default_str();
    cmd_search->add_option("--k1", search_args.k1, "BM25 k1")->capture_default_str();
    cmd_search->add_option("--b", search_args.b, "BM25 b")->capture_default_str();
    cmd_search->add_option("-o,--out", search_args.out, "output path (default stdout)");
    cmd_search->callback([&] {
        if (search_args.corpus.empty() == search_args.index.empty())
            throw Error("exactly one of --corpus and --index must be given");
        InvertedIndex index = search_args.index.empty()
                                  ? index_corpus_file(search_args.corpus, parse_corpus_format(search_args.format))
                                  : InvertedIndex::load(search_args.index);
        Bm25Searcher searcher(index, {search_args.k1, search_args.b});
        std::vector<SearchHit> hits = searcher.search(tokenize(search_args.query), search_args.depth);

        RunList run;
        run.qid_order.push_back(search_args.qid);
        auto& entries = run.by_qid[search_args.qid];
        for (size_t i = 0; i < hits.size(); ++i)
            entries.push_back({search_args.qid, hits[i].id, static_cast<uint32_t>(i) + 1, hits[i].score, "",
                               search_args.tag});
        OutputTarget{search_args.out}.write([&](std::ostream& out) { emit_run(out, run, search_args.tag); });
    });

    // -------------------------------------------------------------- resolve
    struct {
        std::string conversations;
        std::string resolver = "oracle";
        std::string corpus;
        std::string format = "auto";
        std::string index;
        std::string rewrite_file;
        double idf_threshold = -1.0;
        std::string out;
    } resolve_args;
    CLI::App* cmd_resolve = app.add_subcommand("resolve", "resolve conversation queries, emit `qid<TAB>text`");
    cmd_resolve->add_option("conversations", resolve_args.conversations, "conversation JSON file")->required();
    cmd_resolve
        ->add_option("-r,--resolver", resolve_args.resolver,
                     "null, oracle, heuristic, manual, auto, rewrite-file")
        ->capture_default_str();
    CLI::Option* resolve_corpus =
        cmd_resolve->add_option("-c,--corpus", resolve_args.corpus, "corpus file (heuristic resolver)");
    cmd_resolve->add_option("-f,--format", resolve_args.format, "corpus format: auto, tsv, jsonl")
        ->capture_default_str();
    cmd_resolve->add_option("-i,--index", resolve_args.index, "index snapshot (heuristic resolver)")
        ->excludes(resolve_corpus);
    cmd_resolve->add_option("--rewrite-file", resolve_args.rewrite_file, "rewrite TSV for resolver=rewrite-file");
    cmd_resolve->add_option("--idf-threshold", resolve_args.idf_threshold,
                            "heuristic idf cutoff (default: idf at 10% document frequency)");
    cmd_resolve->add_option("-o,--out", resolve_args.out, "output path (default stdout)");
    cmd_resolve->callback([&] {
        PipelineConfig config;
        config.resolver = parse_resolver_kind(resolve_args.resolver);
        config.rewrite_file = resolve_args.rewrite_file;
        config.heuristic_idf_threshold = resolve_args.idf_threshold;

        std::optional<InvertedIndex> index;
        if (!resolve_args.index.empty())
            index = InvertedIndex::load(resolve_args.index);
        else if (!resolve_args.corpus.empty())
            index = index_corpus_file(resolve_args.corpus, parse_corpus_format(resolve_args.format));
        if (config.resolver == ResolverKind::Heuristic && !index)
            throw Error("heuristic resolver requires --corpus or --index");
        if (config.resolver == ResolverKind::RewriteFile && config.rewrite_file.empty())
            throw Error("resolver 'rewrite-file' requires --rewrite-file");

        std::vector<Conversation> conversations = load_conversations(resolve_args.conversations);
        auto resolved = resolve_conversations(conversations, index ? &*index : nullptr, config);
        OutputTarget{resolve_args.out}.write([&](std::ostream& out) {
            for (const auto& [qid, text] : resolved)
                out << qid << '\t' << text << '\n';
        });
    });

    // --------------------------------------------------------------- rerank
    struct {
        std::string run;
        std::string rerank_scores;
        std::string rc_scores;
        double weight = 0.5;
        bool normalize = false;
        uint32_t cutoff = 100;
        std::string missing = "strict";
        std::string tag;
        std::string out;
    } rerank_args;
    CLI::App* cmd_rerank = app.add_subcommand("rerank", "fuse rerank and RC scores over an initial run");
    cmd_rerank->add_option("run", rerank_args.run, "initial TREC run file")->required();
    cmd_rerank->add_option("--rerank-scores", rerank_args.rerank_scores, "TSV `qid pid score`")->required();
    cmd_rerank->add_option("--rc-scores", rerank_args.rc_scores, "TSV `qid pid start_logit end_logit`")
        ->required();
    cmd_rerank->add_option("-w,--weight", rerank_args.weight, "interpolation weight on the rerank stream")
        ->capture_default_str();
    cmd_rerank->add_flag("--normalize", rerank_args.normalize, "per-query min-max normalization of each stream");
    cmd_rerank->add_option("--cutoff", rerank_args.cutoff, "entries kept per query")->capture_default_str();
    cmd_rerank->add_option("--missing-score", rerank_args.missing, "missing-score policy: strict or min")
        ->capture_default_str();
    cmd_rerank->add_option("-t,--tag", rerank_args.tag, "run tag (default: keep input tags)");
    cmd_rerank->add_option("-o,--out", rerank_args.out, "output path (default stdout)");
    cmd_rerank->callback([&] {
        MissingScorePolicy policy;
        if (rerank_args.missing == "strict")
            policy = MissingScorePolicy::Strict;
        else if (rerank_args.missing == "min")
            policy = MissingScorePolicy::UseMin;
        else
            throw Error("unknown missing-score policy '" + rerank_args.missing + "' (expected strict or min)");

        RunList initial = load_run(rerank_args.run);
        ScoreTable rerank_scores = load_score_file(rerank_args.rerank_scores);
        ScoreTable rc_scores = load_rc_logits_file(rerank_args.rc_scores);
        FusionConfig config{rerank_args.weight, rerank_args.normalize};
        RunList fused = rerank_run(initial, rerank_scores, rc_scores, config, rerank_args.cutoff, policy);
        if (!rerank_args.tag.empty())
            for (auto& [qid, entries] : fused.by_qid)
                for (RunEntry& e : entries)
                    e.tag = rerank_args.tag;
        OutputTarget{rerank_args.out}.write([&](std::ostream& out) { emit_run(out, fused, rerank_args.tag); });
    });

    // ----------------------------------------------------------------- tune
    struct {
        std::string run;
        std::string rerank_scores;
        std::string rc_scores;
        std::string qrels;
        std::string metric = "ndcg@3";
        double step = 0.05;
        bool normalize = false;
        uint32_t cutoff = 100;
        std::string missing = "strict";
    } tune_args;
    CLI::App* cmd_tune = app.add_subcommand("tune", "grid-search the fusion weight on a dev set");
    cmd_tune->add_option("run", tune_args.run, "initial TREC run file")->required();
    cmd_tune->add_option("--rerank-scores", tune_args.rerank_scores, "TSV `qid pid score`")->required();
    cmd_tune->add_option("--rc-scores", tune_args.rc_scores, "TSV `qid pid start_logit end_logit`")->required();
    cmd_tune->add_option("-q,--qrels", tune_args.qrels, "qrels file")->required();
    cmd_tune->add_option("-m,--metric", tune_args.metric, "metric to maximize")->capture_default_str();
    cmd_tune->add_option("--step", tune_args.step, "grid step over [0,1]")->capture_default_str();
    cmd_tune->add_flag("--normalize", tune_args.normalize, "per-query min-max normalization of each stream");
    cmd_tune->add_option("--cutoff", tune_args.cutoff, "entries kept per query")->capture_default_str();
    cmd_tune->add_option("--missing-score", tune_args.missing, "missing-score policy: strict or min")
        ->capture_default_str();
    cmd_tune->callback([&] {
        if (!(tune_args.step > 0.0 && tune_args.step <= 1.0))
            throw Error("grid step must lie in (0,1]");
        MissingScorePolicy policy =
            tune_args.missing == "min" ? MissingScorePolicy::UseMin : MissingScorePolicy::Strict;
        if (tune_args.missing != "strict" && tune_args.missing != "min")
            throw Error("unknown missing-score policy '" + tune_args.missing + "' (expected strict or min)");

        std::vector<double> grid;
        for (int i = 0;; ++i) {
            double w = static_cast<double>(i) * tune_args.step;
            if (w > 1.0 + 1e-12)
                break;
            grid.push_back(std::min(w, 1.0));
        }

        RunList initial = load_run(tune_args.run);
        ScoreTable rerank_scores = load_score_file(tune_args.rerank_scores);
        ScoreTable rc_scores = load_rc_logits_file(tune_args.rc_scores);
        Qrels qrels = load_qrels(tune_args.qrels, warn_to_stderr);
        MetricSpec spec = MetricSpec::parse(tune_args.metric);

        TuneResult result = tune_weight(initial, rerank_scores, rc_scores, qrels, spec, grid,
                                        tune_args.normalize, tune_args.cutoff, policy);
        char buf[64];
        for (const auto& [w, mean] : result.grid_means) {
            std::snprintf(buf, sizeof buf, "%.2f\t%.6f\n", w, mean);
            std::cout << buf;
        }
        std::snprintf(buf, sizeof buf, "best\t%.2f\t%.6f\n", result.best_weight, result.best_mean);
        std::cout << buf;
    });

    // ----------------------------------------------------------------- eval
    struct {
        std::string run;
        std::string qrels;
        std::vector<std::string> metrics = {"ndcg@3", "map", "mrr", "recall@100"};
        int binarize_at = 1;
        std::string out;
    } eval_args;
    CLI::App* cmd_eval = app.add_subcommand("eval", "evaluate a run against qrels");
    cmd_eval->add_option("run", eval_args.run, "TREC run file")->required();
    cmd_eval->add_option("-q,--qrels", eval_args.qrels, "qrels file")->required();
    cmd_eval->add_option("-m,--metric", eval_args.metrics, "metrics to report")->capture_default_str();
    cmd_eval->add_option("--binarize-at", eval_args.binarize_at, "relevance grade counted as relevant")
        ->capture_default_str();
    cmd_eval->add_option("-o,--out", eval_args.out, "output path (default stdout)");
    cmd_eval->callback([&] {
        RunList run = load_run(eval_args.run);
        Qrels qrels = load_qrels(eval_args.qrels, warn_to_stderr);
        std::vector<MetricSpec> specs;
        for (const std::string& m : eval_args.metrics)
            specs.push_back(MetricSpec::parse(m));
        MetricParams params;
        params.binarize_at = eval_args.binarize_at;
        MetricReport report = evaluate_run(run, qrels, specs, params);
        OutputTarget{eval_args.out}.write([&](std::ostream& out) { emit_report(out, report); });
    });

    // -------------------------------------------------------------- analyze
    AnalyzeInputs analyze_in;
    struct {
        double threshold = 0.0;
        std::string format = "table";
        std::string out;
    } analyze_args;
    CLI::App* cmd_analyze =
        app.add_subcommand("analyze", "classify queries into ranking / query resolution / no error");
    add_analyze_options(cmd_analyze, analyze_in);
    cmd_analyze->add_option("-t,--threshold", analyze_args.threshold, "pass threshold in [0,1]")
        ->capture_default_str();
    cmd_analyze->add_option("--format", analyze_args.format, "output format: table or csv")
        ->capture_default_str();
    cmd_analyze->add_option("-o,--out", analyze_args.out, "output path (default stdout)");
    cmd_analyze->callback([&] {
        AnalysisFormat format;
        if (analyze_args.format == "table")
            format = AnalysisFormat::Table;
        else if (analyze_args.format == "csv")
            format = AnalysisFormat::Csv;
        else
            throw Error("unknown format '" + analyze_args.format + "' (expected table or csv)");
        AnalyzeValues values = load_analyze_values(analyze_in);
        AnalysisTable table = analyze(values.original, values.resolved, values.human, analyze_args.threshold);
        OutputTarget{analyze_args.out}.write([&](std::ostream& out) { emit_analysis(out, {table}, format); });
    });

    // ---------------------------------------------------------------- sweep
    AnalyzeInputs sweep_in;
    struct {
        double step = 0.02;
        std::string out;
    } sweep_args;
    CLI::App* cmd_sweep = app.add_subcommand("sweep", "error analysis across a threshold grid, CSV output");
    add_analyze_options(cmd_sweep, sweep_in);
    cmd_sweep->add_option("--step", sweep_args.step, "threshold grid step over (0,1]")->capture_default_str();
    cmd_sweep->add_option("-o,--out", sweep_args.out, "output path (default stdout)");
    cmd_sweep->callback([&] {
        if (!(sweep_args.step > 0.0 && sweep_args.step <= 1.0))
            throw Error("sweep step must lie in (0,1]");
        std::vector<double> grid{0.0};
        for (int i = 1;; ++i) {
            double t = static_cast<double>(i) * sweep_args.step;
            if (t > 1.0 + 1e-12)
                break;
            grid.push_back(std::min(t, 1.0));
        }
        AnalyzeValues values = load_analyze_values(sweep_in);
        std::vector<AnalysisTable> tables = sweep(values.original, values.resolved, values.human, grid);
        OutputTarget{sweep_args.out}.write(
            [&](std::ostream& out) { emit_analysis(out, tables, AnalysisFormat::Csv); });
    });

    // ------------------------------------------------------------- pipeline
    PipelineConfig pipeline_config;
    struct {
        std::string config;
        std::string format = "auto";
        std::string resolver = "null";
        std::string missing = "strict";
        std::string out;
        bool quiet = false;
    } pipeline_args;
    CLI::App* cmd_pipeline = app.add_subcommand("pipeline", "run the full retrieval pipeline");
    cmd_pipeline->add_option("--config", pipeline_args.config,
                             "declarative config file (key=value lines, keys are the long option names)");
    CLI::Option* pipeline_corpus =
        cmd_pipeline->add_option("-c,--corpus", pipeline_config.corpus_path, "corpus file");
    cmd_pipeline->add_option("-f,--format", pipeline_args.format, "corpus format: auto, tsv, jsonl")
        ->capture_default_str();
    cmd_pipeline->add_option("-i,--index", pipeline_config.index_path, "index snapshot")
        ->excludes(pipeline_corpus);
    cmd_pipeline->add_option("-C,--conversations", pipeline_config.conversations_path,
                             "conversation JSON file");
    cmd_pipeline
        ->add_option("-r,--resolver", pipeline_args.resolver, "null, oracle, heuristic, manual, auto, rewrite-file")
        ->capture_default_str();
    cmd_pipeline->add_option("--rewrite-file", pipeline_config.rewrite_file,
                             "rewrite TSV for resolver=rewrite-file");
    cmd_pipeline->add_option("--idf-threshold", pipeline_config.heuristic_idf_threshold,
                             "heuristic idf cutoff (default: idf at 10% document frequency)");
    cmd_pipeline->add_option("--k1", pipeline_config.bm25.k1, "BM25 k1")->capture_default_str();
    cmd_pipeline->add_option("--b", pipeline_config.bm25.b, "BM25 b")->capture_default_str();
    cmd_pipeline->add_option("-d,--depth", pipeline_config.depth, "retrieval depth")->capture_default_str();
    cmd_pipeline->add_flag("--rerank", pipeline_config.rerank, "enable the rerank + fuse stage");
    cmd_pipeline->add_option("-w,--weight", pipeline_config.fusion.weight, "fusion weight")
        ->capture_default_str();
    cmd_pipeline->add_flag("--normalize", pipeline_config.fusion.normalize,
                           "per-query min-max normalization of each stream");
    cmd_pipeline->add_option("--rerank-scores", pipeline_config.rerank_scores_path,
                             "TSV `qid pid score` (default: built-in overlap scorer)");
    cmd_pipeline->add_option("--rc-scores", pipeline_config.rc_scores_path,
                             "TSV `qid pid start_logit end_logit` (default: built-in overlap scorer)");
    cmd_pipeline->add_option("--missing-score", pipeline_args.missing, "missing-score policy: strict or min")
        ->capture_default_str();
    cmd_pipeline->add_option("--cutoff", pipeline_config.cutoff, "entries kept per query")
        ->capture_default_str();
    cmd_pipeline->add_option("-t,--tag", pipeline_config.tag, "run tag")->capture_default_str();
    cmd_pipeline->add_flag("--quiet", pipeline_args.quiet, "suppress stage logging");
    cmd_pipeline->add_option("-o,--out", pipeline_args.out, "run output path (default stdout)");
    cmd_pipeline->callback([&] {
        // Command-line flags override config keys; unknown keys are errors.
        if (!pipeline_args.config.empty()) {
            std::map<std::string, std::string> kv = load_key_value_config(pipeline_args.config);
            auto take = [&](const char* key, const char* flag,
                            const std::function<void(const std::string&)>& apply) {
                auto it = kv.find(key);
                if (it == kv.end())
                    return;
                if (cmd_pipeline->count(flag) == 0)
                    apply(it->second);
                kv.erase(it);
            };
            take("corpus", "--corpus", [&](const std::string& v) { pipeline_config.corpus_path = v; });
            take("format", "--format", [&](const std::string& v) { pipeline_args.format = v; });
            take("index", "--index", [&](const std::string& v) { pipeline_config.index_path = v; });
            take("conversations", "--conversations",
                 [&](const std::string& v) { pipeline_config.conversations_path = v; });
            take("resolver", "--resolver", [&](const std::string& v) { pipeline_args.resolver = v; });
            take("rewrite-file", "--rewrite-file",
                 [&](const std::string& v) { pipeline_config.rewrite_file = v; });
            take("idf-threshold", "--idf-threshold", [&](const std::string& v) {
                pipeline_config.heuristic_idf_threshold = config_number("idf-threshold", v);
            });
            take("k1", "--k1", [&](const std::string& v) { pipeline_config.bm25.k1 = config_number("k1", v); });
            take("b", "--b", [&](const std::string& v) { pipeline_config.bm25.b = config_number("b", v); });
            take("depth", "--depth",
                 [&](const std::string& v) { pipeline_config.depth = config_count("depth", v); });
            take("rerank", "--rerank",
                 [&](const std::string& v) { pipeline_config.rerank = config_flag("rerank", v); });
            take("weight", "--weight",
                 [&](const std::string& v) { pipeline_config.fusion.weight = config_number("weight", v); });
            take("normalize", "--normalize",
                 [&](const std::string& v) { pipeline_config.fusion.normalize = config_flag("normalize", v); });
            take("rerank-scores", "--rerank-scores",
                 [&](const std::string& v) { pipeline_config.rerank_scores_path = v; });
            take("rc-scores", "--rc-scores",
                 [&](const std::string& v) { pipeline_config.rc_scores_path = v; });
            take("missing-score", "--missing-score",
                 [&](const std::string& v) { pipeline_args.missing = v; });
            take("cutoff", "--cutoff",
                 [&](const std::string& v) { pipeline_config.cutoff = config_count("cutoff", v); });
            take("tag", "--tag", [&](const std::string& v) { pipeline_config.tag = v; });
            take("quiet", "--quiet",
                 [&](const std::string& v) { pipeline_args.quiet = config_flag("quiet", v); });
            take("out", "--out", [&](const std::string& v) { pipeline_args.out = v; });
            if (!kv.empty())
                throw Error(pipeline_args.config + ": unknown config key '" + kv.begin()->first + "'");
        }
        if (pipeline_config.conversations_path.empty())
            throw Error("a conversations file is required (-C or the conversations config key)");
        pipeline_config.corpus_format = parse_corpus_format(pipeline_args.format);
        pipeline_config.resolver = parse_resolver_kind(pipeline_args.resolver);
        if (pipeline_args.missing == "strict")
            pipeline_config.missing = MissingScorePolicy::Strict;
        else if (pipeline_args.missing == "min")
            pipeline_config.missing = MissingScorePolicy::UseMin;
        else
            throw Error("unknown missing-score policy '" + pipeline_args.missing + "' (expected strict or min)");

        PipelineLog log;
        if (!pipeline_args.quiet)
            log = [](const std::string& line) { std::cerr << line << '\n'; };
        RunList run = run_pipeline(pipeline_config, log);
        OutputTarget{pipeline_args.out}.write(
            [&](std::ostream& out) { emit_run(out, run, pipeline_config.tag); });
    });

    // -------------------------------------------------------------- kernels
    CLI::App* cmd_kernels = app.add_subcommand("kernels", "list BM25 kernel variants");
    cmd_kernels->callback([&] {
        for (kernels::Kind kind : kernels::available_kinds())
            std::cout << kernels::kind_name(kind) << (kind == kernels::active_kind() ? " (active)" : "") << '\n';
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;  // usage error
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run_app(argc, argv);
    } catch (const caspr::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
