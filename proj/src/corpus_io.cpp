#include "caspr/corpus_io.hpp"

#include <fstream>
#include <istream>

#include <json.hpp>

#include "caspr/error.hpp"

namespace caspr {

CorpusFormat parse_corpus_format(std::string_view name) {
    if (name == "auto") return CorpusFormat::Auto;
    if (name == "tsv") return CorpusFormat::Tsv;
    if (name == "jsonl") return CorpusFormat::JsonLines;
    throw Error("unknown corpus format: " + std::string(name) + " (expected auto|tsv|jsonl)");
}

namespace {

void read_tsv(std::istream& in, const std::function<void(Passage&&)>& sink) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::size_t tab = line.find('\t');
        if (tab == std::string::npos) {
            throw Error("corpus line " + std::to_string(line_no) + ": expected id<TAB>text");
        }
        sink(Passage{line.substr(0, tab), line.substr(tab + 1)});
    }
}

void read_jsonl(std::istream& in, const std::function<void(Passage&&)>& sink) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw Error("corpus line " + std::to_string(line_no) + ": " + e.what());
        }
        if (!doc.is_object() || !doc.contains("id") || !doc.contains("text") ||
            !doc["id"].is_string() || !doc["text"].is_string()) {
            throw Error("corpus line " + std::to_string(line_no) +
                        ": expected object with string fields 'id' and 'text'");
        }
        sink(Passage{doc["id"].get<std::string>(), doc["text"].get<std::string>()});
    }
}

}  // namespace

void read_corpus(std::istream& in, CorpusFormat format,
                 const std::function<void(Passage&&)>& sink) {
    switch (format) {
        case CorpusFormat::Tsv:
            read_tsv(in, sink);
            return;
        case CorpusFormat::JsonLines:
            read_jsonl(in, sink);
            return;
        case CorpusFormat::Auto:
            throw Error("corpus format 'auto' needs a file path to resolve against");
    }
}

InvertedIndex index_corpus_file(const std::string& path, CorpusFormat format) {
    if (format == CorpusFormat::Auto) {
        const auto dot = path.find_last_of('.');
        const std::string ext = dot == std::string::npos ? "" : path.substr(dot);
        format = (ext == ".jsonl" || ext == ".ndjson" || ext == ".json") ? CorpusFormat::JsonLines
                                                                         : CorpusFormat::Tsv;
    }
    std::ifstream in(path);
    if (!in) throw Error("cannot open corpus file: " + path);
    IndexBuilder builder;
    read_corpus(in, format, [&](Passage&& p) { builder.add(p); });
    return builder.finish();
}

}  // namespace caspr
