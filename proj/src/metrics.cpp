#include "caspr/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "caspr/error.hpp"

namespace caspr {

namespace {

std::string lower(std::string s) {
    for (char& c : s)
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

uint32_t parse_cutoff(const std::string& text, const std::string& whole) {
    try {
        size_t pos = 0;
        long k = std::stol(text, &pos);
        if (pos != text.size() || k < 1)
            throw Error("metric cutoff must be a positive integer in '" + whole + "'");
        return static_cast<uint32_t>(k);
    } catch (const std::invalid_argument&) {
        throw Error("metric cutoff must be a positive integer in '" + whole + "'");
    } catch (const std::out_of_range&) {
        throw Error("metric cutoff out of range in '" + whole + "'");
    }
}

double gain(int grade, const MetricParams& params) {
    if (params.exponential_gain)
        return std::pow(2.0, grade) - 1.0;
    return static_cast<double>(grade);
}

size_t count_relevant(const Qrels& qrels, const std::string& qid, int binarize_at) {
    size_t n = 0;
    for (const auto& [pid, grade] : qrels.for_qid(qid))
        if (grade >= binarize_at)
            ++n;
    return n;
}

bool any_positive_grade(const Qrels& qrels, const std::string& qid) {
    for (const auto& [pid, grade] : qrels.for_qid(qid))
        if (grade > 0)
            return true;
    return false;
}

}  // namespace

std::string MetricSpec::name() const {
    switch (kind) {
        case MetricKind::NdcgAtK:
            return "ndcg@" + std::to_string(k);
        case MetricKind::Map:
            return "map";
        case MetricKind::Mrr:
            return "mrr";
        case MetricKind::RecallAtK:
            return "recall@" + std::to_string(k);
    }
    throw Error("unreachable metric kind");
}

MetricSpec MetricSpec::parse(const std::string& text) {
    std::string t = lower(text);
    if (t == "map")
        return {MetricKind::Map, 0};
    if (t == "mrr")
        return {MetricKind::Mrr, 0};
    if (t.rfind("ndcg@", 0) == 0)
        return {MetricKind::NdcgAtK, parse_cutoff(t.substr(5), text)};
    if (t.rfind("recall@", 0) == 0)
        return {MetricKind::RecallAtK, parse_cutoff(t.substr(7), text)};
    throw Error("unknown metric '" + text + "' (expected ndcg@K, map, mrr, or recall@K)");
}

void MetricParams::validate() const {
    if (binarize_at < 1)
        throw Error("binarize_at must be >= 1, got " + std::to_string(binarize_at));
}

std::optional<double> ndcg_at_k(const std::vector<std::string>& ranking, const Qrels& qrels,
                                const std::string& qid, uint32_t k, const MetricParams& params) {
    if (k < 1)
        throw Error("ndcg cutoff must be >= 1");
    if (!any_positive_grade(qrels, qid))
        return std::nullopt;

    double dcg = 0.0;
    size_t depth = std::min<size_t>(k, ranking.size());
    for (size_t i = 0; i < depth; ++i)
        dcg += gain(qrels.grade(qid, ranking[i]), params) / std::log2(static_cast<double>(i) + 2.0);

    std::vector<int> grades;
    for (const auto& [pid, grade] : qrels.for_qid(qid))
        if (grade > 0)
            grades.push_back(grade);
    std::sort(grades.begin(), grades.end(), std::greater<int>());

    double idcg = 0.0;
    size_t ideal_depth = std::min<size_t>(k, grades.size());
    for (size_t i = 0; i < ideal_depth; ++i)
        idcg += gain(grades[i], params) / std::log2(static_cast<double>(i) + 2.0);
    return dcg / idcg;
}

std::optional<double> average_precision(const std::vector<std::string>& ranking, const Qrels& qrels,
                                        const std::string& qid, const MetricParams& params) {
    size_t total_relevant = count_relevant(qrels, qid, params.binarize_at);
    if (total_relevant == 0)
        return std::nullopt;

    double sum = 0.0;
    size_t hits = 0;
    for (size_t i = 0; i < ranking.size(); ++i) {
        if (qrels.grade(qid, ranking[i]) >= params.binarize_at) {
            ++hits;
            sum += static_cast<double>(hits) / static_cast<double>(i + 1);
        }
    }
    return sum / static_cast<double>(total_relevant);
}

std::optional<double> reciprocal_rank(const std::vector<std::string>& ranking, const Qrels& qrels,
                                      const std::string& qid, const MetricParams& params) {
    if (count_relevant(qrels, qid, params.binarize_at) == 0)
        return std::nullopt;
    for (size_t i = 0; i < ranking.size(); ++i)
        if (qrels.grade(qid, ranking[i]) >= params.binarize_at)
            return 1.0 / static_cast<double>(i + 1);
    return 0.0;
}

std::optional<double> recall_at_k(const std::vector<std::string>& ranking, const Qrels& qrels,
                                  const std::string& qid, uint32_t k, const MetricParams& params) {
    if (k < 1)
        throw Error("recall cutoff must be >= 1");
    size_t total_relevant = count_relevant(qrels, qid, params.binarize_at);
    if (total_relevant == 0)
        return std::nullopt;

    size_t hits = 0;
    size_t depth = std::min<size_t>(k, ranking.size());
    for (size_t i = 0; i < depth; ++i)
        if (qrels.grade(qid, ranking[i]) >= params.binarize_at)
            ++hits;
    return static_cast<double>(hits) / static_cast<double>(total_relevant);
}

std::optional<double> compute_metric(const MetricSpec& spec, const std::vector<std::string>& ranking,
                                     const Qrels& qrels, const std::string& qid, const MetricParams& params) {
    params.validate();
    switch (spec.kind) {
        case MetricKind::NdcgAtK:
            return ndcg_at_k(ranking, qrels, qid, spec.k, params);
        case MetricKind::Map:
            return average_precision(ranking, qrels, qid, params);
        case MetricKind::Mrr:
            return reciprocal_rank(ranking, qrels, qid, params);
        case MetricKind::RecallAtK:
            return recall_at_k(ranking, qrels, qid, spec.k, params);
    }
    throw Error("unreachable metric kind");
}

MetricReport evaluate_run(const RunList& run, const Qrels& qrels, const std::vector<MetricSpec>& metrics,
                          const MetricParams& params) {
    params.validate();
    if (metrics.empty())
        throw Error("no metrics requested");

    // Evaluated qids: run order for qids judged in qrels, then qrels-only
    // qids (sorted) which score 0 on every defined metric.
    std::vector<std::string> qid_order;
    bool any_shared = false;
    for (const std::string& qid : run.qid_order) {
        if (qrels.has_qid(qid)) {
            qid_order.push_back(qid);
            any_shared = true;
        }
    }
    if (!any_shared)
        throw Error("run and qrels share no qid");
    for (const std::string& qid : qrels.qids())
        if (!run.has_qid(qid))
            qid_order.push_back(qid);

    MetricReport report;
    for (const MetricSpec& spec : metrics)
        report.metric_names.push_back(spec.name());
    report.qid_order = qid_order;
    report.evaluated_query_count = qid_order.size();

    static const std::vector<std::string> kEmptyRanking;
    for (const MetricSpec& spec : metrics) {
        const std::string name = spec.name();
        double sum = 0.0;
        size_t defined = 0;
        for (const std::string& qid : qid_order) {
            const std::vector<std::string> ranking = run.has_qid(qid) ? run.ranking(qid) : kEmptyRanking;
            std::optional<double> v = compute_metric(spec, ranking, qrels, qid, params);
            if (!v)
                continue;
            report.per_query[qid][name] = *v;
            sum += *v;
            ++defined;
        }
        report.defined_counts[name] = defined;
        report.means[name] = defined == 0 ? 0.0 : sum / static_cast<double>(defined);
    }
    return report;
}

void emit_report(std::ostream& out, const MetricReport& report) {
    char buf[64];
    out << "metric\tqid\tvalue\n";
    for (const std::string& name : report.metric_names) {
        for (const std::string& qid : report.qid_order) {
            auto q = report.per_query.find(qid);
            if (q == report.per_query.end())
                continue;
            auto m = q->second.find(name);
            if (m == q->second.end())
                continue;
            std::snprintf(buf, sizeof buf, "%.6f", m->second);
            out << name << '\t' << qid << '\t' << buf << '\n';
        }
        std::snprintf(buf, sizeof buf, "%.6f", report.means.at(name));
        out << name << "\tall\t" << buf << '\n';
    }
}

std::map<std::string, double> per_query_metric(const RunList& run, const Qrels& qrels, const MetricSpec& spec,
                                               const MetricParams& params, std::vector<std::string>* missing_qids) {
    params.validate();
    std::map<std::string, double> out;
    for (const std::string& qid : qrels.qids()) {
        if (!run.has_qid(qid)) {
            if (missing_qids)
                missing_qids->push_back(qid);
            continue;
        }
        std::optional<double> v = compute_metric(spec, run.ranking(qid), qrels, qid, params);
        if (v)
            out[qid] = *v;
    }
    return out;
}

}  // namespace caspr
