#pragma once
// TREC run and qrels files: parsing is separator-tolerant, emission is
// canonical (single spaces, 6-decimal scores, LF endings) and byte-stable on
// round-trip because original score text is kept verbatim.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace caspr {

struct RunEntry {
    std::string qid;
    std::string pid;
    uint32_t rank = 0;
    double score = 0.0;
    std::string score_text;  // verbatim input text; empty for generated entries
    std::string tag;
};

struct RunList {
    std::vector<std::string> qid_order;  // first-appearance order
    std::unordered_map<std::string, std::vector<RunEntry>> by_qid;

    bool has_qid(const std::string& qid) const { return by_qid.count(qid) > 0; }
    const std::vector<RunEntry>& entries(const std::string& qid) const;
    std::vector<std::string> ranking(const std::string& qid) const;  // pids by rank
    size_t total_entries() const;
};

/// Lines are `qid Q0 pid rank score tag` split on runs of spaces/tabs.
/// Entries of different qids may interleave; within a qid, ranks must be
/// contiguous from 1, scores non-increasing, and pids unique.
RunList parse_run(std::istream& in);
RunList load_run(const std::string& path);

/// Throws unless every per-qid list satisfies the RunEntry invariants.
void validate_run(const RunList& run);

/// One line per entry, qids in qid_order. `default_tag` fills entries whose
/// own tag is empty; generated scores render with 6 decimals, parsed scores
/// keep their input spelling.
void emit_run(std::ostream& out, const RunList& run, const std::string& default_tag = "");
void save_run(const std::string& path, const RunList& run, const std::string& default_tag = "");

class Qrels {
public:
    void set(const std::string& qid, const std::string& pid, int grade);
    /// Absent pair reads as grade 0.
    int grade(const std::string& qid, const std::string& pid) const;
    bool has_qid(const std::string& qid) const { return grades_.count(qid) > 0; }
    /// pid -> grade for one qid; empty map when the qid is unknown.
    const std::map<std::string, int>& for_qid(const std::string& qid) const;
    std::vector<std::string> qids() const;  // sorted
    size_t size() const;

private:
    std::unordered_map<std::string, std::map<std::string, int>> grades_;
};

/// Lines are `qid <ignored> pid grade`. A repeated (qid,pid) overrides the
/// earlier grade and reports through `warn` when given.
Qrels parse_qrels(std::istream& in, const std::function<void(const std::string&)>& warn = nullptr);
Qrels load_qrels(const std::string& path, const std::function<void(const std::string&)>& warn = nullptr);

}  // namespace caspr
