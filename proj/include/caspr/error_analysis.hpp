#pragma once
// Threshold-based error attribution: compare per-query metric values of the
// original, resolved, and human-rewrite runs against a threshold t, classify
// each query as a ranking error, a query resolution error, or no error, and
// aggregate pattern counts per threshold.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace caspr {

/// Strict at the zero threshold (value > 0), inclusive above it (value >= t).
bool pass_predicate(double value, double threshold);

enum class ErrorClass { RankingError, QueryResolutionError, NoError };

const char* error_class_name(ErrorClass c);

struct QueryClassification {
    std::string qid;
    bool pass_original = false;
    bool pass_resolved = false;
    bool pass_human = false;
    ErrorClass error_class = ErrorClass::NoError;
};

/// The class depends only on (pass_resolved, pass_human): a failing human run
/// is a ranking error; a passing human run with a failing resolved run is a
/// query resolution error; both passing is no error.
QueryClassification classify_query(const std::string& qid, double m_original, double m_resolved, double m_human,
                                   double threshold);

// Pattern rows in fixed order: index = original + 2*resolved + 4*human, i.e.
// ooo, voo, ovo, vvo, oov, vov, ovv, vvv (o = fail, v = pass).
inline constexpr size_t kPatternCount = 8;
extern const std::array<const char*, kPatternCount> kPatternNames;

size_t pattern_index(bool pass_original, bool pass_resolved, bool pass_human);
ErrorClass pattern_class(size_t pattern_idx);

struct AnalysisTable {
    double threshold = 0.0;
    std::array<size_t, kPatternCount> pattern_counts{};
    size_t total = 0;
    std::array<double, kPatternCount> row_percent{};  // half-up, 1 decimal
    size_t ranking_count = 0;
    size_t resolution_count = 0;
    size_t no_error_count = 0;
    double pct_ranking = 0.0;
    double pct_resolution = 0.0;
    double pct_no_error = 0.0;
};

/// Round half-up to one decimal place: 42.25 -> 42.3.
double round_half_up_1dp(double value);

using PerQueryValues = std::map<std::string, double>;

/// The three mappings must share an identical qid set; a mismatch throws with
/// the symmetric difference listed. Values must lie in [0,1].
AnalysisTable analyze(const PerQueryValues& original, const PerQueryValues& resolved, const PerQueryValues& human,
                      double threshold);

std::vector<QueryClassification> classify_all(const PerQueryValues& original, const PerQueryValues& resolved,
                                              const PerQueryValues& human, double threshold);

/// One table per threshold, in input order. Thresholds must be ascending and
/// in [0,1].
std::vector<AnalysisTable> sweep(const PerQueryValues& original, const PerQueryValues& resolved,
                                 const PerQueryValues& human, const std::vector<double>& thresholds);

/// t = 0 plus 0.02, 0.04, ..., 1.00 (51 points).
std::vector<double> default_threshold_grid();

enum class AnalysisFormat { Table, Csv };

/// Csv columns: threshold, the 8 pattern counts (pattern_ooo..pattern_vvv),
/// pct_ranking, pct_qr, pct_no_error. Table mode renders one block per
/// threshold with per-row and per-class counts and percentages.
void emit_analysis(std::ostream& out, const std::vector<AnalysisTable>& tables, AnalysisFormat format);

}  // namespace caspr
