#pragma once

#include <cstdint>
#include <filesystem>
#include <json.hpp>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ballot/dataset.hpp"
#include "ballot/election_model.hpp"
#include "ballot/embeddings.hpp"
#include "ballot/nn/train.hpp"
#include "ballot/topic_sentiment_model.hpp"

namespace ballot {

struct TrainParams {
  int epochs = 10;
  int batch = 32;
  double lr = 0.001;

  nn::TrainOptions options(std::uint64_t seed) const;
};

// Run configuration. Relative paths in the JSON file resolve against the
// file's directory; empty strings mean "not configured".
struct PipelineConfig {
  std::string seeds;
  std::vector<std::string> corpus;
  std::string embeddings;
  std::string expansion;
  std::string election_model;
  std::string topic_model;
  std::string sentiment_model;
  std::string topic_terms;
  std::string positive_lexicon;
  std::string negative_lexicon;
  std::string out;

  double rho_min = 0.3;
  double threshold = 0.5;
  std::uint64_t seed = 1;

  TrainParams election_training;
  TrainParams topic_training;
  TrainParams sentiment_training;
  SkipGramOptions skipgram;

  ElectionNetConfig election_net = ElectionNetConfig::standard();
  TSNetConfig topic_net = TSNetConfig::topic();
  TSNetConfig sentiment_net = TSNetConfig::sentiment();
  int vocab_min_count = 1;

  static PipelineConfig from_json(const nlohmann::json& j,
                                  const std::filesystem::path& base_dir = {});
  static PipelineConfig load(const std::string& path);

  // Throws Errc::config on out-of-range values.
  void validate() const;
};

// Topic term lists: a JSON object mapping topic name to an array of terms.
// Returned in label order; topics missing from the file get empty lists.
std::vector<std::vector<std::string>> read_topic_terms(const std::string& path,
                                                       const std::vector<std::string>& labels);

Corpus load_corpora(const std::vector<std::string>& paths);

struct PipelineSummary {
  std::size_t input_tweets = 0;
  std::size_t seed_matches = 0;
  std::size_t stage1_kept = 0;
  std::size_t stage2_kept = 0;
  std::size_t stage3_labeled = 0;
  std::size_t expanded_terms = 0;
  std::optional<double> stage2_reduction;
  std::optional<double> expansion_volume_increase;
  std::map<std::string, std::size_t> topic_counts;
  std::map<std::string, std::size_t> sentiment_counts;

  nlohmann::json to_json() const;
};

// Stage 1 keeps tweets matching the seed or expanded terms, stage 2 keeps
// those the election classifier scores at or above the threshold, stage 3
// attaches topic and sentiment labels. Writes labeled.jsonl, summary.json and
// expansion.json into config.out.
PipelineSummary run_pipeline(const PipelineConfig& config);

}  // namespace ballot
