#include "caspr/conversation.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <unordered_set>

#include "caspr/error.hpp"
#include "caspr/tokenizer.hpp"

namespace caspr {

void Conversation::validate() const {
    if (conversation_id.empty())
        throw Error("conversation id must be non-empty");
    if (turns.empty())
        throw Error("conversation '" + conversation_id + "' has no turns");
    for (size_t i = 0; i < turns.size(); ++i) {
        const Turn& t = turns[i];
        if (t.turn_number != static_cast<int>(i) + 1)
            throw Error("conversation '" + conversation_id + "': turn numbers must be contiguous from 1, got " +
                        std::to_string(t.turn_number) + " at position " + std::to_string(i + 1));
        if (t.raw_query.empty())
            throw Error("conversation '" + conversation_id + "' turn " + std::to_string(t.turn_number) +
                        ": raw query must be non-empty");
    }
}

std::vector<std::string> HistoryContext::flat_terms() const {
    std::vector<std::string> out;
    for (const HistoryEntry& e : entries)
        out.insert(out.end(), e.terms.begin(), e.terms.end());
    return out;
}

HistoryContext build_history(const Conversation& conversation, int turn_number) {
    conversation.validate();
    if (turn_number < 1 || turn_number > static_cast<int>(conversation.turns.size()))
        throw Error("conversation '" + conversation.conversation_id + "': no turn " + std::to_string(turn_number));

    HistoryContext ctx;
    for (int i = 1; i < turn_number; ++i) {
        const Turn& prev = conversation.turns[static_cast<size_t>(i) - 1];
        ctx.entries.push_back({HistorySource::PreviousQuery, tokenize(prev.raw_query)});
    }
    if (turn_number > 1) {
        const Turn& prev = conversation.turns[static_cast<size_t>(turn_number) - 2];
        if (prev.canonical_response && !prev.canonical_response->empty())
            ctx.entries.push_back({HistorySource::PreviousResponse, tokenize(*prev.canonical_response)});
    }
    return ctx;
}

std::string make_qid(const Conversation& conversation, const Turn& turn) {
    return conversation.conversation_id + "_" + std::to_string(turn.turn_number);
}

namespace {

using nlohmann::json;

std::string json_id_to_string(const json& v, const char* what) {
    if (v.is_string())
        return v.get<std::string>();
    if (v.is_number_integer())
        return std::to_string(v.get<long long>());
    throw Error(std::string(what) + " must be a string or integer");
}

std::optional<std::string> optional_string_field(const json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null())
        return std::nullopt;
    if (!it->is_string())
        throw Error(std::string("field '") + key + "' must be a string");
    return it->get<std::string>();
}

Turn parse_turn(const json& obj, const std::string& conversation_id) {
    if (!obj.is_object())
        throw Error("conversation '" + conversation_id + "': each turn must be an object");
    Turn t;
    auto num = obj.find("number");
    if (num == obj.end() || !num->is_number_integer())
        throw Error("conversation '" + conversation_id + "': turn is missing integer field 'number'");
    t.turn_number = num->get<int>();

    auto raw = obj.find("raw_utterance");
    if (raw == obj.end() || !raw->is_string())
        throw Error("conversation '" + conversation_id + "' turn " + std::to_string(t.turn_number) +
                    ": missing string field 'raw_utterance'");
    t.raw_query = raw->get<std::string>();
    t.auto_rewrite = optional_string_field(obj, "automatic_rewritten_utterance");
    t.manual_rewrite = optional_string_field(obj, "manual_rewritten_utterance");
    t.canonical_response = optional_string_field(obj, "canonical_response_text");
    return t;
}

Conversation parse_conversation(const json& obj) {
    if (!obj.is_object())
        throw Error("each conversation must be a JSON object");
    Conversation c;
    auto num = obj.find("number");
    if (num == obj.end())
        throw Error("conversation is missing field 'number'");
    c.conversation_id = json_id_to_string(*num, "conversation 'number'");

    auto turns = obj.find("turns");
    if (turns == obj.end() || !turns->is_array())
        throw Error("conversation '" + c.conversation_id + "' is missing array field 'turns'");
    for (const json& t : *turns)
        c.turns.push_back(parse_turn(t, c.conversation_id));
    c.validate();
    return c;
}

}  // namespace

std::vector<Conversation> parse_conversations(std::istream& in) {
    std::stringstream buf;
    buf << in.rdbuf();
    std::string text = buf.str();

    size_t first = text.find_first_not_of(" \t\r\n");
    if (first == std::string::npos)
        throw Error("conversation input is empty");

    std::vector<Conversation> out;
    std::unordered_set<std::string> seen;
    auto add = [&](const json& obj) {
        Conversation c = parse_conversation(obj);
        if (!seen.insert(c.conversation_id).second)
            throw Error("duplicate conversation id '" + c.conversation_id + "'");
        out.push_back(std::move(c));
    };

    if (text[first] == '[') {
        json doc;
        try {
            doc = json::parse(text);
        } catch (const json::parse_error& e) {
            throw Error(std::string("conversation JSON parse error: ") + e.what());
        }
        for (const json& obj : doc)
            add(obj);
    } else {
        // JSON-lines: one conversation object per non-blank line.
        std::istringstream lines(text);
        std::string line;
        size_t lineno = 0;
        while (std::getline(lines, line)) {
            ++lineno;
            if (line.find_first_not_of(" \t\r") == std::string::npos)
                continue;
            json doc;
            try {
                doc = json::parse(line);
            } catch (const json::parse_error& e) {
                throw Error("conversation JSON parse error on line " + std::to_string(lineno) + ": " + e.what());
            }
            add(doc);
        }
    }
    if (out.empty())
        throw Error("conversation input contains no conversations");
    return out;
}

std::vector<Conversation> load_conversations(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot open conversation file '" + path + "'");
    return parse_conversations(in);
}

}  // namespace caspr
