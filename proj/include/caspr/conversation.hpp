#pragma once
// Multi-turn conversations and the history context that feeds query
// resolution: all previous turn queries plus the canonical response to the
// immediately previous turn (and nothing else).

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace caspr {

struct Turn {
    int turn_number = 0;  // 1-based, contiguous within a conversation
    std::string raw_query;
    std::optional<std::string> auto_rewrite;
    std::optional<std::string> manual_rewrite;
    std::optional<std::string> canonical_response;
};

struct Conversation {
    std::string conversation_id;
    std::vector<Turn> turns;

    void validate() const;  // turn numbers 1..n contiguous, raw queries non-empty
};

enum class HistorySource { PreviousQuery, PreviousResponse };

struct HistoryEntry {
    HistorySource source;
    std::vector<std::string> terms;
};

struct HistoryContext {
    std::vector<HistoryEntry> entries;

    // All history terms in occurrence order.
    std::vector<std::string> flat_terms() const;
};

// Context for resolving the query of `turn_number`: tokenized raw queries of
// turns 1..turn_number-1 in order, then the tokenized canonical response of
// turn turn_number-1 when present. Turn 1 gets an empty context.
HistoryContext build_history(const Conversation& conversation, int turn_number);

std::string make_qid(const Conversation& conversation, const Turn& turn);

// Accepts either a single JSON document whose top level is an array of
// conversations, or JSON-lines with one conversation object per line:
//   { "number": "<id>", "turns": [ { "number": 1, "raw_utterance": "...",
//     "automatic_rewritten_utterance": "...", "manual_rewritten_utterance":
//     "...", "canonical_response_text": "..." } ] }
// Optional fields may be absent or null.
std::vector<Conversation> parse_conversations(std::istream& in);
std::vector<Conversation> load_conversations(const std::string& path);

}  // namespace caspr
