#include "ballot/labels.hpp"

#include "ballot/text.hpp"

namespace ballot {

const std::vector<std::string>& topic_labels() {
  static const std::vector<std::string> labels = {"Income Inequality",
                                                  "Environment/Energy",
                                                  "Jobs/Employment",
                                                  "Guns",
                                                  "Racial Issues",
                                                  "Foreign Policy/National Security",
                                                  "LGBT Issues",
                                                  "Ethics",
                                                  "Education",
                                                  "Financial Regulation",
                                                  "Budget/Taxation",
                                                  "Veterans",
                                                  "Campaign Finance",
                                                  "Surveillance/Privacy",
                                                  "Drugs",
                                                  "Justice",
                                                  "Abortion",
                                                  "Immigration",
                                                  "Trade",
                                                  "Health Care",
                                                  "Economy",
                                                  "Other"};
  return labels;
}

const std::vector<std::string>& sentiment_labels() {
  static const std::vector<std::string> labels = {"positive", "negative", "neutral"};
  return labels;
}

std::optional<int> label_index(const std::vector<std::string>& labels, std::string_view name) {
  const std::string wanted = to_lower(name);
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (to_lower(labels[i]) == wanted) return static_cast<int>(i);
  return std::nullopt;
}

}  // namespace ballot
