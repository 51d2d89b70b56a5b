#include "caspr/fusion.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <sstream>

#include "caspr/error.hpp"

namespace caspr {

namespace {

[[noreturn]] void line_error(size_t lineno, const std::string& what) {
    throw Error("line " + std::to_string(lineno) + ": " + what);
}

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> fields;
    size_t start = 0;
    while (true) {
        size_t tab = line.find('\t', start);
        if (tab == std::string::npos) {
            fields.emplace_back(line, start);
            break;
        }
        fields.emplace_back(line, start, tab - start);
        start = tab + 1;
    }
    return fields;
}

double parse_real(const std::string& text, size_t lineno) {
    try {
        size_t pos = 0;
        double v = std::stod(text, &pos);
        if (pos != text.size())
            line_error(lineno, "malformed score '" + text + "'");
        return v;
    } catch (const std::invalid_argument&) {
        line_error(lineno, "malformed score '" + text + "'");
    } catch (const std::out_of_range&) {
        line_error(lineno, "score out of range '" + text + "'");
    }
}

ScoreTable parse_table(std::istream& in, size_t field_count,
                       double (*to_score)(const std::vector<std::string>&, size_t)) {
    ScoreTable table;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        std::vector<std::string> f = split_tabs(line);
        if (f.size() != field_count)
            line_error(lineno, "expected " + std::to_string(field_count) + " tab-separated fields, got " +
                                   std::to_string(f.size()));
        if (f[0].empty() || f[1].empty())
            line_error(lineno, "empty qid or pid");
        if (table.get(f[0], f[1]))
            line_error(lineno, "duplicate score for (" + f[0] + ", " + f[1] + ")");
        table.set(f[0], f[1], to_score(f, lineno));
    }
    return table;
}

ScoreTable load_table(const std::string& path, ScoreTable (*parse)(std::istream&)) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot open score file '" + path + "'");
    try {
        return parse(in);
    } catch (const Error& e) {
        throw Error(path + ": " + e.what());
    }
}

}  // namespace

void ScoreTable::set(const std::string& qid, const std::string& pid, double score) {
    scores_[qid][pid] = score;
}

std::optional<double> ScoreTable::get(const std::string& qid, const std::string& pid) const {
    auto q = scores_.find(qid);
    if (q == scores_.end())
        return std::nullopt;
    auto p = q->second.find(pid);
    if (p == q->second.end())
        return std::nullopt;
    return p->second;
}

size_t ScoreTable::size() const {
    size_t n = 0;
    for (const auto& [qid, pids] : scores_)
        n += pids.size();
    return n;
}

ScoreTable parse_score_file(std::istream& in) {
    return parse_table(in, 3, [](const std::vector<std::string>& f, size_t lineno) {
        return parse_real(f[2], lineno);
    });
}

ScoreTable load_score_file(const std::string& path) {
    return load_table(path, parse_score_file);
}

ScoreTable parse_rc_logits_file(std::istream& in) {
    return parse_table(in, 4, [](const std::vector<std::string>& f, size_t lineno) {
        return rc_score({parse_real(f[2], lineno), parse_real(f[3], lineno)});
    });
}

ScoreTable load_rc_logits_file(const std::string& path) {
    return load_table(path, parse_rc_logits_file);
}

void FusionConfig::validate() const {
    if (!(weight >= 0.0 && weight <= 1.0))
        throw Error("fusion weight must lie in [0,1], got " + std::to_string(weight));
}

namespace {

// Raw per-candidate scores from one table, applying the missing-score policy.
std::vector<double> stream_scores(const std::string& qid, const std::vector<RunEntry>& initial,
                                  const ScoreTable& table, MissingScorePolicy policy, const char* stream) {
    std::vector<std::optional<double>> raw;
    raw.reserve(initial.size());
    double min_present = std::numeric_limits<double>::infinity();
    bool any_present = false;
    for (const RunEntry& e : initial) {
        std::optional<double> v = table.get(qid, e.pid);
        if (v) {
            any_present = true;
            min_present = std::min(min_present, *v);
        } else if (policy == MissingScorePolicy::Strict) {
            throw Error(std::string("missing ") + stream + " score for (" + qid + ", " + e.pid + ")");
        }
        raw.push_back(v);
    }
    if (!any_present)
        throw Error(std::string("no ") + stream + " scores present for qid '" + qid + "'");

    std::vector<double> out;
    out.reserve(initial.size());
    for (const auto& v : raw)
        out.push_back(v ? *v : min_present);
    return out;
}

// Per-query min-max normalization; a constant stream maps to all zeros.
void normalize_stream(std::vector<double>& scores) {
    auto [lo, hi] = std::minmax_element(scores.begin(), scores.end());
    double low = *lo;  // copy before the loop: *lo aliases scores
    double span = *hi - low;
    if (span <= 0.0) {
        std::fill(scores.begin(), scores.end(), 0.0);
        return;
    }
    for (double& s : scores)
        s = (s - low) / span;
}

}  // namespace

std::vector<RunEntry> rerank_candidates(const std::string& qid, const std::vector<RunEntry>& initial,
                                        const ScoreTable& rerank_scores, const ScoreTable& rc_scores,
                                        const FusionConfig& config, uint32_t cutoff, MissingScorePolicy policy) {
    config.validate();
    if (cutoff < 1)
        throw Error("cutoff must be >= 1");
    if (initial.empty())
        return {};

    std::vector<double> rerank = stream_scores(qid, initial, rerank_scores, policy, "rerank");
    std::vector<double> rc = stream_scores(qid, initial, rc_scores, policy, "rc");
    if (config.normalize) {
        normalize_stream(rerank);
        normalize_stream(rc);
    }

    std::vector<RunEntry> out;
    out.reserve(initial.size());
    for (size_t i = 0; i < initial.size(); ++i) {
        RunEntry e;
        e.qid = qid;
        e.pid = initial[i].pid;
        e.score = fuse(rerank[i], rc[i], config);
        e.tag = initial[i].tag;
        out.push_back(std::move(e));
    }
    std::sort(out.begin(), out.end(), [](const RunEntry& a, const RunEntry& b) {
        if (a.score != b.score)
            return a.score > b.score;
        return a.pid < b.pid;
    });
    if (out.size() > cutoff)
        out.resize(cutoff);
    for (size_t i = 0; i < out.size(); ++i)
        out[i].rank = static_cast<uint32_t>(i) + 1;
    return out;
}

RunList rerank_run(const RunList& initial, const ScoreTable& rerank_scores, const ScoreTable& rc_scores,
                   const FusionConfig& config, uint32_t cutoff, MissingScorePolicy policy) {
    RunList out;
    for (const std::string& qid : initial.qid_order) {
        std::vector<RunEntry> reranked =
            rerank_candidates(qid, initial.entries(qid), rerank_scores, rc_scores, config, cutoff, policy);
        out.qid_order.push_back(qid);
        out.by_qid.emplace(qid, std::move(reranked));
    }
    return out;
}

TuneResult tune_weight(const RunList& initial, const ScoreTable& rerank_scores, const ScoreTable& rc_scores,
                       const Qrels& qrels, const MetricSpec& metric, const std::vector<double>& grid,
                       bool normalize, uint32_t cutoff, MissingScorePolicy policy, const MetricParams& params) {
    if (grid.empty())
        throw Error("weight grid must be non-empty");
    if (qrels.size() == 0)
        throw Error("qrels must be non-empty for tuning");
    for (double w : grid)
        if (!(w >= 0.0 && w <= 1.0))
            throw Error("grid weight must lie in [0,1], got " + std::to_string(w));

    TuneResult result;
    bool have_best = false;
    for (double w : grid) {
        FusionConfig config{w, normalize};
        RunList fused = rerank_run(initial, rerank_scores, rc_scores, config, cutoff, policy);
        MetricReport report = evaluate_run(fused, qrels, {metric}, params);
        double mean = report.means.at(metric.name());
        result.grid_means.emplace_back(w, mean);
        bool better = mean > result.best_mean || (mean == result.best_mean && w < result.best_weight);
        if (!have_best || better) {
            have_best = true;
            result.best_mean = mean;
            result.best_weight = w;
        }
    }
    return result;
}

std::vector<double> default_weight_grid() {
    std::vector<double> grid;
    for (int i = 0; i <= 20; ++i)
        grid.push_back(static_cast<double>(i) * 0.05);
    return grid;
}

}  // namespace caspr
