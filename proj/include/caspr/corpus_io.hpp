#pragma once
// Corpus readers: TSV (id<TAB>text, no header) and JSON-lines
// ({"id": "...", "text": "..."} per line).

#include <functional>
#include <iosfwd>
#include <string>

#include "caspr/inverted_index.hpp"

namespace caspr {

enum class CorpusFormat { Auto, Tsv, JsonLines };

CorpusFormat parse_corpus_format(std::string_view name);  // auto|tsv|jsonl

// Streams passages to the sink; throws with line numbers on malformed input.
void read_corpus(std::istream& in, CorpusFormat format,
                 const std::function<void(Passage&&)>& sink);

// Auto format resolves from the file extension (.jsonl/.ndjson/.json ->
// JSON-lines, anything else TSV).
InvertedIndex index_corpus_file(const std::string& path, CorpusFormat format = CorpusFormat::Auto);

}  // namespace caspr
