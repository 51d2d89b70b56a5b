#include "caspr/trec_run.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include "caspr/error.hpp"

namespace caspr {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t'))
            ++i;
        size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t')
            ++i;
        if (i > start)
            fields.emplace_back(line, start, i - start);
    }
    return fields;
}

void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r')
        line.pop_back();
}

[[noreturn]] void line_error(size_t lineno, const std::string& what) {
    throw Error("line " + std::to_string(lineno) + ": " + what);
}

double parse_score(const std::string& text, size_t lineno) {
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

uint32_t parse_rank(const std::string& text, size_t lineno) {
    try {
        size_t pos = 0;
        long v = std::stol(text, &pos);
        if (pos != text.size() || v < 1)
            line_error(lineno, "rank must be a positive integer, got '" + text + "'");
        return static_cast<uint32_t>(v);
    } catch (const std::invalid_argument&) {
        line_error(lineno, "rank must be a positive integer, got '" + text + "'");
    } catch (const std::out_of_range&) {
        line_error(lineno, "rank out of range '" + text + "'");
    }
}

void check_qid_list(const std::string& qid, const std::vector<RunEntry>& entries) {
    std::set<std::string> pids;
    for (size_t i = 0; i < entries.size(); ++i) {
        const RunEntry& e = entries[i];
        if (e.rank != i + 1)
            throw Error("qid '" + qid + "': ranks must be contiguous from 1, got " + std::to_string(e.rank) +
                        " at position " + std::to_string(i + 1));
        if (!pids.insert(e.pid).second)
            throw Error("qid '" + qid + "': duplicate passage id '" + e.pid + "'");
        if (i > 0 && e.score > entries[i - 1].score)
            throw Error("qid '" + qid + "': score increases at rank " + std::to_string(e.rank));
    }
}

std::string render_score(const RunEntry& e) {
    if (!e.score_text.empty())
        return e.score_text;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", e.score);
    return buf;
}

}  // namespace

const std::vector<RunEntry>& RunList::entries(const std::string& qid) const {
    auto it = by_qid.find(qid);
    if (it == by_qid.end())
        throw Error("run has no qid '" + qid + "'");
    return it->second;
}

std::vector<std::string> RunList::ranking(const std::string& qid) const {
    std::vector<std::string> pids;
    for (const RunEntry& e : entries(qid))
        pids.push_back(e.pid);
    return pids;
}

size_t RunList::total_entries() const {
    size_t n = 0;
    for (const auto& [qid, entries] : by_qid)
        n += entries.size();
    return n;
}

RunList parse_run(std::istream& in) {
    RunList run;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        strip_cr(line);
        if (line.find_first_not_of(" \t") == std::string::npos)
            continue;
        std::vector<std::string> f = split_fields(line);
        if (f.size() != 6)
            line_error(lineno, "expected 6 fields `qid Q0 pid rank score tag`, got " + std::to_string(f.size()));

        RunEntry e;
        e.qid = f[0];
        e.pid = f[2];
        e.rank = parse_rank(f[3], lineno);
        e.score = parse_score(f[4], lineno);
        e.score_text = f[4];
        e.tag = f[5];

        auto [it, inserted] = run.by_qid.try_emplace(e.qid);
        if (inserted)
            run.qid_order.push_back(e.qid);
        it->second.push_back(std::move(e));
    }
    try {
        validate_run(run);
    } catch (const Error& e) {
        throw Error(std::string("invalid run: ") + e.what());
    }
    return run;
}

RunList load_run(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot open run file '" + path + "'");
    try {
        return parse_run(in);
    } catch (const Error& e) {
        throw Error(path + ": " + e.what());
    }
}

void validate_run(const RunList& run) {
    if (run.qid_order.size() != run.by_qid.size())
        throw Error("qid_order and by_qid disagree");
    for (const std::string& qid : run.qid_order)
        check_qid_list(qid, run.entries(qid));
}

void emit_run(std::ostream& out, const RunList& run, const std::string& default_tag) {
    for (const std::string& qid : run.qid_order) {
        for (const RunEntry& e : run.entries(qid)) {
            const std::string& tag = e.tag.empty() ? default_tag : e.tag;
            out << e.qid << " Q0 " << e.pid << ' ' << e.rank << ' ' << render_score(e) << ' ' << tag << '\n';
        }
    }
}

void save_run(const std::string& path, const RunList& run, const std::string& default_tag) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("cannot open '" + path + "' for writing");
    emit_run(out, run, default_tag);
    if (!out)
        throw Error("failed writing run file '" + path + "'");
}

void Qrels::set(const std::string& qid, const std::string& pid, int grade) {
    if (grade < 0)
        throw Error("relevance grade must be non-negative, got " + std::to_string(grade));
    grades_[qid][pid] = grade;
}

int Qrels::grade(const std::string& qid, const std::string& pid) const {
    auto q = grades_.find(qid);
    if (q == grades_.end())
        return 0;
    auto p = q->second.find(pid);
    return p == q->second.end() ? 0 : p->second;
}

const std::map<std::string, int>& Qrels::for_qid(const std::string& qid) const {
    static const std::map<std::string, int> empty;
    auto it = grades_.find(qid);
    return it == grades_.end() ? empty : it->second;
}

std::vector<std::string> Qrels::qids() const {
    std::vector<std::string> out;
    out.reserve(grades_.size());
    for (const auto& [qid, pids] : grades_)
        out.push_back(qid);
    std::sort(out.begin(), out.end());
    return out;
}

size_t Qrels::size() const {
    size_t n = 0;
    for (const auto& [qid, pids] : grades_)
        n += pids.size();
    return n;
}

Qrels parse_qrels(std::istream& in, const std::function<void(const std::string&)>& warn) {
    Qrels qrels;
    std::string line;
    size_t lineno = 0;
    std::set<std::pair<std::string, std::string>> seen;
    while (std::getline(in, line)) {
        ++lineno;
        strip_cr(line);
        if (line.find_first_not_of(" \t") == std::string::npos)
            continue;
        std::vector<std::string> f = split_fields(line);
        if (f.size() != 4)
            line_error(lineno, "expected 4 fields `qid iter pid grade`, got " + std::to_string(f.size()));

        int grade = 0;
        try {
            size_t pos = 0;
            grade = std::stoi(f[3], &pos);
            if (pos != f[3].size())
                line_error(lineno, "malformed grade '" + f[3] + "'");
        } catch (const std::invalid_argument&) {
            line_error(lineno, "malformed grade '" + f[3] + "'");
        } catch (const std::out_of_range&) {
            line_error(lineno, "grade out of range '" + f[3] + "'");
        }
        if (grade < 0)
            line_error(lineno, "negative grade " + std::to_string(grade));

        if (!seen.insert({f[0], f[2]}).second && warn)
            warn("line " + std::to_string(lineno) + ": duplicate qrels pair (" + f[0] + ", " + f[2] +
                 "), later grade wins");
        qrels.set(f[0], f[2], grade);
    }
    return qrels;
}

Qrels load_qrels(const std::string& path, const std::function<void(const std::string&)>& warn) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot open qrels file '" + path + "'");
    try {
        return parse_qrels(in, warn);
    } catch (const Error& e) {
        throw Error(path + ": " + e.what());
    }
}

}  // namespace caspr
