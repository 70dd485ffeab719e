#include "ballot/text.hpp"

#include <algorithm>
#include <cctype>
#include <iterator>

namespace ballot {

namespace {

bool is_space(unsigned char c) { return c < 0x80 && std::isspace(c); }
bool is_punct(unsigned char c) { return c < 0x80 && std::ispunct(c); }

// A small English function-word list; phrase boundaries may not fall on these.
constexpr std::string_view kStopwords[] = {
    "a",     "about", "after", "again", "all",    "am",    "an",   "and",    "any",   "are",
    "as",    "at",    "be",    "been",  "before", "being", "but",  "by",     "can",   "could",
    "did",   "do",    "does",  "doing", "for",    "from",  "had",  "has",    "have",  "having",
    "he",    "her",   "here",  "hers",  "him",    "his",   "how",  "i",      "if",    "in",
    "into",  "is",    "it",    "its",   "just",   "me",    "more", "most",   "my",    "no",
    "nor",   "not",   "now",   "of",    "off",    "on",    "once", "only",   "or",    "other",
    "our",   "out",   "over",  "own",   "rt",     "same",  "she",  "should", "so",    "some",
    "such",  "than",  "that",  "the",   "their",  "them",  "then", "there",  "these", "they",
    "this",  "to",    "too",   "up",    "very",   "was",   "we",   "were",   "what",  "when",
    "which", "who",   "will",  "with",  "you",    "your"};

}  // namespace

std::string to_lower(std::string_view text) {
  std::string out(text);
  for (auto& ch : out) {
    const auto c = static_cast<unsigned char>(ch);
    if (c < 0x80) ch = static_cast<char>(std::tolower(c));
  }
  return out;
}

std::vector<std::string> split_whitespace(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(static_cast<unsigned char>(text[i]))) ++i;
    const std::size_t start = i;
    while (i < text.size() && !is_space(static_cast<unsigned char>(text[i]))) ++i;
    if (i > start) out.push_back(to_lower(text.substr(start, i - start)));
  }
  return out;
}

std::string strip_punctuation(std::string_view token) {
  std::size_t begin = 0;
  std::size_t end = token.size();
  while (begin < end) {
    const auto c = static_cast<unsigned char>(token[begin]);
    if (!is_punct(c) || c == '#' || c == '@') break;
    ++begin;
  }
  while (end > begin && is_punct(static_cast<unsigned char>(token[end - 1]))) --end;
  std::string_view core = token.substr(begin, end - begin);
  // A bare "#" or "@" prefix with nothing after it is not a token.
  if (std::all_of(core.begin(), core.end(), [](char c) { return c == '#' || c == '@'; })) return {};
  return std::string(core);
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  for (const auto& raw : split_whitespace(text)) {
    auto token = strip_punctuation(raw);
    if (!token.empty()) out.push_back(std::move(token));
  }
  return out;
}

std::vector<std::string> tokenize_words(std::string_view text) {
  auto tokens = tokenize(text);
  if (tokens.size() > kMaxWords) tokens.resize(kMaxWords);
  return tokens;
}

bool is_url(std::string_view token) {
  return token.starts_with("http://") || token.starts_with("https://") || token.starts_with("www.");
}

bool is_punctuation(std::string_view token) {
  return !token.empty() && std::all_of(token.begin(), token.end(), [](char c) {
    return is_punct(static_cast<unsigned char>(c));
  });
}

bool is_stopword(std::string_view token) {
  return std::find(std::begin(kStopwords), std::end(kStopwords), token) != std::end(kStopwords);
}

std::string join(const std::vector<std::string>& tokens, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += sep;
    out += tokens[i];
  }
  return out;
}

}  // namespace ballot
