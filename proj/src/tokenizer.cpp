#include "caspr/tokenizer.hpp"

#include <unordered_set>

namespace caspr {

namespace {

inline bool is_token_byte(unsigned char c) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

inline char fold(unsigned char c) {
    return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : static_cast<char>(c);
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> out;
    std::string cur;
    for (unsigned char c : text) {
        if (is_token_byte(c)) {
            cur.push_back(fold(c));
        } else if (!cur.empty()) {
            out.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

std::vector<std::string> distinct_terms(const std::vector<std::string>& terms) {
    std::vector<std::string> out;
    std::unordered_set<std::string_view> seen;
    out.reserve(terms.size());
    for (const auto& t : terms) {
        if (seen.insert(t).second) out.push_back(t);
    }
    return out;
}

}  // namespace caspr
