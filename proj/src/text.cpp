#include "dgrc/text.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <unordered_set>

namespace dgrc {
namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

bool is_word_char(unsigned char c) { return std::isalnum(c) || c >= 0x80; }

constexpr auto kStopWords = std::to_array<std::string_view>({
    "a",       "about",   "above",  "after",  "again",   "against", "all",
    "am",      "an",      "and",    "any",    "are",     "as",      "at",
    "be",      "because", "been",   "before", "being",   "below",   "between",
    "both",    "but",     "by",     "can",    "could",   "did",     "do",
    "does",    "doing",   "down",   "during", "each",    "few",     "for",
    "from",    "further", "had",    "has",    "have",    "having",  "he",
    "her",     "here",    "hers",   "herself", "him",    "himself", "his",
    "how",     "i",       "if",     "in",     "into",    "is",      "it",
    "its",     "itself",  "just",   "me",     "might",   "more",    "most",
    "must",    "my",      "myself", "no",     "nor",     "not",     "now",
    "of",      "off",     "on",     "once",   "only",    "or",      "other",
    "our",     "ours",    "out",    "over",   "own",     "same",    "she",
    "should",  "so",      "some",   "such",   "than",    "that",    "the",
    "their",   "them",    "then",   "there",  "these",   "they",    "this",
    "those",   "through", "to",     "too",    "under",   "until",   "up",
    "very",    "was",     "we",     "were",   "what",    "when",    "where",
    "which",   "while",   "who",    "whom",   "why",     "will",    "with",
    "would",   "you",     "your",   "yours",  "yourself", "shall",  "may",
});

constexpr auto kFillers = std::to_array<std::string_view>({
    "oh",       "wow",      "really",    "yeah",     "well",     "honestly",
    "sure",     "okay",     "right",     "indeed",   "maybe",    "perhaps",
    "actually", "truly",    "totally",   "quite",    "pretty",   "kind",
    "nice",     "great",    "cool",      "funny",    "strange",  "interesting",
    "surprising", "hear",   "know",      "think",    "guess",    "believe",
    "imagine",  "thought",  "seems",     "sounds",   "glad",     "sorry",
    "thanks",   "hmm",      "definitely", "probably", "certainly", "anyway",
    "though",   "still",    "always",    "never",    "lately",   "today",
    "everyone", "someone",
});
static_assert(kFillers.size() == 50);

}  // namespace

std::string_view trim(std::string_view text) {
  while (!text.empty() && is_space(text.front())) text.remove_prefix(1);
  while (!text.empty() && is_space(text.back())) text.remove_suffix(1);
  return text;
}

std::string to_lower(std::string_view text) {
  std::string out(text);
  for (char& c : out) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

std::vector<std::string> whitespace_tokens(std::string_view text) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    const std::size_t start = i;
    while (i < text.size() && !is_space(text[i])) ++i;
    if (i > start) tokens.emplace_back(text.substr(start, i - start));
  }
  return tokens;
}

std::string join_tokens(std::span<const std::string> tokens) {
  std::string out;
  for (const auto& token : tokens) {
    if (!out.empty()) out += ' ';
    out += token;
  }
  return out;
}

std::string normalize_word(std::string_view token) {
  std::size_t begin = 0;
  std::size_t end = token.size();
  while (begin < end && !is_word_char(static_cast<unsigned char>(token[begin]))) {
    ++begin;
  }
  while (end > begin &&
         !is_word_char(static_cast<unsigned char>(token[end - 1]))) {
    --end;
  }
  return to_lower(token.substr(begin, end - begin));
}

bool is_stop_word(std::string_view lowercase_word) {
  static const std::unordered_set<std::string_view> kSet(kStopWords.begin(),
                                                         kStopWords.end());
  return kSet.contains(lowercase_word);
}

std::vector<std::string> content_words(std::string_view text) {
  std::vector<std::string> words;
  for (const auto& token : whitespace_tokens(text)) {
    std::string word = normalize_word(token);
    if (word.empty() || is_stop_word(word)) continue;
    if (std::find(words.begin(), words.end(), word) == words.end()) {
      words.push_back(std::move(word));
    }
  }
  return words;
}

double content_overlap(std::string_view text, std::string_view reference) {
  const auto ref = content_words(reference);
  if (ref.empty()) return 0.0;
  const auto words = content_words(text);
  std::size_t shared = 0;
  for (const auto& w : ref) {
    if (std::find(words.begin(), words.end(), w) != words.end()) ++shared;
  }
  return static_cast<double>(shared) / static_cast<double>(ref.size());
}

std::span<const std::string_view> filler_words() { return kFillers; }

}  // namespace dgrc
