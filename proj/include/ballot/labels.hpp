#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ballot {

// The 22 topic labels in their fixed index order; "Other" is last.
const std::vector<std::string>& topic_labels();

// positive, negative, neutral.
const std::vector<std::string>& sentiment_labels();

inline constexpr int kTopicOther = 21;
inline constexpr int kSentimentNeutral = 2;

// Index of `name` in `labels`, matched case-insensitively.
std::optional<int> label_index(const std::vector<std::string>& labels, std::string_view name);

}  // namespace ballot
