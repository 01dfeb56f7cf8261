#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dgrc {

std::string_view trim(std::string_view text);
std::string to_lower(std::string_view text);

// Whitespace tokenizer used by the mock and oracle backends. Detokenization
// joins tokens with a single space.
std::vector<std::string> whitespace_tokens(std::string_view text);
std::string join_tokens(std::span<const std::string> tokens);

// Lowercased word with leading/trailing punctuation stripped. Returns an
// empty string for pure punctuation.
std::string normalize_word(std::string_view token);

bool is_stop_word(std::string_view lowercase_word);

// Distinct lowercase content words in first-occurrence order.
std::vector<std::string> content_words(std::string_view text);

// |content(text) ∩ content(reference)| / |content(reference)|; 0 when the
// reference has no content words.
double content_overlap(std::string_view text, std::string_view reference);

// Fixed 50-word filler vocabulary of the mock generator.
std::span<const std::string_view> filler_words();

}  // namespace dgrc
