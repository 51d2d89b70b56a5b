#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace caspr {

// Shared tokenizer for every stage: ASCII case-fold, split on any
// non-alphanumeric byte, drop empty tokens. No stemming, no stopword removal.
std::vector<std::string> tokenize(std::string_view text);

// Distinct tokens in first-occurrence order.
std::vector<std::string> distinct_terms(const std::vector<std::string>& terms);

}  // namespace caspr
