#include "caspr/error_analysis.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <set>

#include "caspr/error.hpp"

namespace caspr {

namespace {

constexpr double kValueEps = 1e-9;

void check_threshold(double t) {
    if (!(t >= 0.0 && t <= 1.0))
        throw Error("threshold must lie in [0,1], got " + std::to_string(t));
}

double checked_value(const std::string& qid, double v, const char* which) {
    if (!(v >= -kValueEps && v <= 1.0 + kValueEps))
        throw Error(std::string(which) + " metric value for qid '" + qid + "' must lie in [0,1], got " +
                    std::to_string(v));
    return std::clamp(v, 0.0, 1.0);
}

std::string format_threshold(double t) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, t);
    (void)ec;
    return std::string(buf, end);
}

}  // namespace

bool pass_predicate(double value, double threshold) {
    check_threshold(threshold);
    if (threshold == 0.0)
        return value > 0.0;
    return value >= threshold;
}

const char* error_class_name(ErrorClass c) {
    switch (c) {
        case ErrorClass::RankingError:
            return "ranking_error";
        case ErrorClass::QueryResolutionError:
            return "query_resolution_error";
        case ErrorClass::NoError:
            return "no_error";
    }
    throw Error("unreachable error class");
}

QueryClassification classify_query(const std::string& qid, double m_original, double m_resolved, double m_human,
                                   double threshold) {
    QueryClassification qc;
    qc.qid = qid;
    qc.pass_original = pass_predicate(checked_value(qid, m_original, "original"), threshold);
    qc.pass_resolved = pass_predicate(checked_value(qid, m_resolved, "resolved"), threshold);
    qc.pass_human = pass_predicate(checked_value(qid, m_human, "human"), threshold);
    if (!qc.pass_human)
        qc.error_class = ErrorClass::RankingError;
    else if (!qc.pass_resolved)
        qc.error_class = ErrorClass::QueryResolutionError;
    else
        qc.error_class = ErrorClass::NoError;
    return qc;
}

const std::array<const char*, kPatternCount> kPatternNames = {
    "ooo", "voo", "ovo", "vvo", "oov", "vov", "ovv", "vvv",
};

size_t pattern_index(bool pass_original, bool pass_resolved, bool pass_human) {
    return static_cast<size_t>(pass_original) + 2 * static_cast<size_t>(pass_resolved) +
           4 * static_cast<size_t>(pass_human);
}

ErrorClass pattern_class(size_t pattern_idx) {
    if (pattern_idx >= kPatternCount)
        throw Error("pattern index out of range");
    bool pass_resolved = (pattern_idx & 2) != 0;
    bool pass_human = (pattern_idx & 4) != 0;
    if (!pass_human)
        return ErrorClass::RankingError;
    if (!pass_resolved)
        return ErrorClass::QueryResolutionError;
    return ErrorClass::NoError;
}

double round_half_up_1dp(double value) {
    return std::floor(value * 10.0 + 0.5) / 10.0;
}

namespace {

void check_same_qids(const PerQueryValues& original, const PerQueryValues& resolved, const PerQueryValues& human) {
    std::set<std::string> all;
    for (const auto& [qid, v] : original)
        all.insert(qid);
    for (const auto& [qid, v] : resolved)
        all.insert(qid);
    for (const auto& [qid, v] : human)
        all.insert(qid);

    std::string missing;
    auto report = [&](const PerQueryValues& m, const char* name) {
        for (const std::string& qid : all) {
            if (m.count(qid) == 0) {
                if (!missing.empty())
                    missing += ", ";
                missing += qid;
                missing += " (absent from ";
                missing += name;
                missing += ")";
            }
        }
    };
    report(original, "original");
    report(resolved, "resolved");
    report(human, "human");
    if (!missing.empty())
        throw Error("per-query value sets disagree: " + missing);
}

}  // namespace

std::vector<QueryClassification> classify_all(const PerQueryValues& original, const PerQueryValues& resolved,
                                              const PerQueryValues& human, double threshold) {
    check_threshold(threshold);
    check_same_qids(original, resolved, human);
    std::vector<QueryClassification> out;
    out.reserve(original.size());
    for (const auto& [qid, m_original] : original)
        out.push_back(classify_query(qid, m_original, resolved.at(qid), human.at(qid), threshold));
    return out;
}

AnalysisTable analyze(const PerQueryValues& original, const PerQueryValues& resolved, const PerQueryValues& human,
                      double threshold) {
    AnalysisTable table;
    table.threshold = threshold;
    for (const QueryClassification& qc : classify_all(original, resolved, human, threshold)) {
        ++table.pattern_counts[pattern_index(qc.pass_original, qc.pass_resolved, qc.pass_human)];
        ++table.total;
        switch (qc.error_class) {
            case ErrorClass::RankingError:
                ++table.ranking_count;
                break;
            case ErrorClass::QueryResolutionError:
                ++table.resolution_count;
                break;
            case ErrorClass::NoError:
                ++table.no_error_count;
                break;
        }
    }

    auto pct = [&](size_t count) {
        if (table.total == 0)
            return 0.0;
        return round_half_up_1dp(100.0 * static_cast<double>(count) / static_cast<double>(table.total));
    };
    for (size_t i = 0; i < kPatternCount; ++i)
        table.row_percent[i] = pct(table.pattern_counts[i]);
    table.pct_ranking = pct(table.ranking_count);
    table.pct_resolution = pct(table.resolution_count);
    table.pct_no_error = pct(table.no_error_count);
    return table;
}

std::vector<AnalysisTable> sweep(const PerQueryValues& original, const PerQueryValues& resolved,
                                 const PerQueryValues& human, const std::vector<double>& thresholds) {
    if (thresholds.empty())
        throw Error("threshold list must be non-empty");
    for (size_t i = 0; i < thresholds.size(); ++i) {
        check_threshold(thresholds[i]);
        if (i > 0 && thresholds[i] <= thresholds[i - 1])
            throw Error("thresholds must be strictly ascending");
    }
    std::vector<AnalysisTable> tables;
    tables.reserve(thresholds.size());
    for (double t : thresholds)
        tables.push_back(analyze(original, resolved, human, t));
    return tables;
}

std::vector<double> default_threshold_grid() {
    std::vector<double> grid;
    grid.reserve(51);
    for (int i = 0; i <= 50; ++i)
        grid.push_back(static_cast<double>(i) / 50.0);
    return grid;
}

void emit_analysis(std::ostream& out, const std::vector<AnalysisTable>& tables, AnalysisFormat format) {
    char buf[96];
    auto pct1 = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.1f", v);
        return std::string(buf);
    };

    if (format == AnalysisFormat::Csv) {
        out << "threshold";
        for (const char* name : kPatternNames)
            out << ",pattern_" << name;
        out << ",pct_ranking,pct_qr,pct_no_error\n";
        for (const AnalysisTable& t : tables) {
            out << format_threshold(t.threshold);
            for (size_t count : t.pattern_counts)
                out << ',' << count;
            out << ',' << pct1(t.pct_ranking) << ',' << pct1(t.pct_resolution) << ',' << pct1(t.pct_no_error)
                << '\n';
        }
        return;
    }

    for (const AnalysisTable& t : tables) {
        out << "threshold " << format_threshold(t.threshold) << " (" << t.total << " queries)\n";
        out << "  pattern  count  pct\n";
        for (size_t i = 0; i < kPatternCount; ++i) {
            std::snprintf(buf, sizeof buf, "  %-7s  %5zu  %5.1f\n", kPatternNames[i], t.pattern_counts[i],
                          t.row_percent[i]);
            out << buf;
        }
        out << "  class                   count  pct\n";
        std::snprintf(buf, sizeof buf, "  %-22s  %5zu  %5.1f\n", "ranking_error", t.ranking_count, t.pct_ranking);
        out << buf;
        std::snprintf(buf, sizeof buf, "  %-22s  %5zu  %5.1f\n", "query_resolution_error", t.resolution_count,
                      t.pct_resolution);
        out << buf;
        std::snprintf(buf, sizeof buf, "  %-22s  %5zu  %5.1f\n", "no_error", t.no_error_count, t.pct_no_error);
        out << buf;
        out << '\n';
    }
}

}  // namespace caspr
