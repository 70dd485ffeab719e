#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace ballot {

inline constexpr std::size_t kMaxWords = 50;

// Lowercases, splits on whitespace and strips leading/trailing ASCII
// punctuation, keeping a leading '#' or '@' so hashtags and handles survive.
// Tokens that end up empty are dropped.
std::vector<std::string> tokenize(std::string_view text);

// tokenize() truncated to the first kMaxWords tokens.
std::vector<std::string> tokenize_words(std::string_view text);

std::string to_lower(std::string_view text);

// Whitespace split with lowercasing only; punctuation is preserved.
std::vector<std::string> split_whitespace(std::string_view text);

std::string strip_punctuation(std::string_view token);

bool is_url(std::string_view token);

// True when every byte is ASCII punctuation.
bool is_punctuation(std::string_view token);

bool is_stopword(std::string_view token);

std::string join(const std::vector<std::string>& tokens, std::string_view sep = " ");

}  // namespace ballot
