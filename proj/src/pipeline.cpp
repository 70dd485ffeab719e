#include "ballot/pipeline.hpp"

#include <fstream>
#include <set>

#include "ballot/char_text.hpp"
#include "ballot/error.hpp"
#include "ballot/labels.hpp"
#include "ballot/model_io.hpp"
#include "ballot/query_expansion.hpp"
#include "ballot/text.hpp"

namespace ballot {

namespace fs = std::filesystem;
using nlohmann::json;

nn::TrainOptions TrainParams::options(std::uint64_t seed) const {
  nn::TrainOptions o;
  o.epochs = epochs;
  o.batch_size = batch;
  o.adam.learning_rate = lr;
  o.seed = seed;
  return o;
}

namespace {

const std::set<std::string> kConfigKeys{"seeds",
                                        "corpus",
                                        "embeddings",
                                        "expansion",
                                        "election_model",
                                        "topic_model",
                                        "sentiment_model",
                                        "topic_terms",
                                        "positive_lexicon",
                                        "negative_lexicon",
                                        "out",
                                        "rho_min",
                                        "threshold",
                                        "seed",
                                        "training",
                                        "election_net",
                                        "topic_net",
                                        "sentiment_net",
                                        "vocab_min_count"};

std::string resolve(const json& j, const char* key, const fs::path& base) {
  const auto raw = j.at(key).get<std::string>();
  if (raw.empty()) return raw;
  const fs::path p(raw);
  return (p.is_absolute() || base.empty() ? p : base / p).lexically_normal().string();
}

void read_train_params(const json& j, TrainParams& p) {
  p.epochs = j.value("epochs", p.epochs);
  p.batch = j.value("batch", p.batch);
  p.lr = j.value("lr", p.lr);
}

TSNetConfig patch_ts(const TSNetConfig& base, const json& patch) {
  if (!patch.is_object()) throw Error(Errc::config, "network overrides must be JSON objects");
  json merged = config_to_json(base);
  merged.merge_patch(patch);
  return ts_config_from_json(merged);
}

std::ifstream open_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io, "cannot read " + path);
  return in;
}

std::ofstream create_text(const fs::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(Errc::io, "cannot write " + path.string());
  return out;
}

void require(const std::string& value, const char* what) {
  if (value.empty()) throw Error(Errc::config, std::string("pipeline: no ") + what + " configured");
}

void require_file(const std::string& path, const char* what) {
  if (!fs::is_regular_file(path)) throw Error(Errc::io, std::string(what) + " not found: " + path);
}

std::optional<double> ratio(std::size_t num, std::size_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

PipelineConfig PipelineConfig::from_json(const json& j, const fs::path& base_dir) {
  if (!j.is_object()) throw Error(Errc::config, "config must be a JSON object");
  for (const auto& [key, value] : j.items())
    if (!kConfigKeys.contains(key)) throw Error(Errc::config, "unknown config key '" + key + "'");

  PipelineConfig c;
  try {
    const std::pair<const char*, std::string*> paths[] = {{"seeds", &c.seeds},
                                                          {"embeddings", &c.embeddings},
                                                          {"expansion", &c.expansion},
                                                          {"election_model", &c.election_model},
                                                          {"topic_model", &c.topic_model},
                                                          {"sentiment_model", &c.sentiment_model},
                                                          {"topic_terms", &c.topic_terms},
                                                          {"positive_lexicon", &c.positive_lexicon},
                                                          {"negative_lexicon", &c.negative_lexicon},
                                                          {"out", &c.out}};
    for (const auto& [key, field] : paths) {
      if (j.contains(key)) *field = resolve(j, key, base_dir);
    }
    if (j.contains("corpus")) {
      const json& corpus = j["corpus"];
      const json list = corpus.is_array() ? corpus : json::array({corpus});
      for (std::size_t i = 0; i < list.size(); ++i)
        c.corpus.push_back(resolve(json{{"p", list[i]}}, "p", base_dir));
    }
    c.rho_min = j.value("rho_min", c.rho_min);
    c.threshold = j.value("threshold", c.threshold);
    c.seed = j.value("seed", c.seed);
    c.vocab_min_count = j.value("vocab_min_count", c.vocab_min_count);
    if (j.contains("training")) {
      const json& t = j["training"];
      if (t.contains("election")) read_train_params(t["election"], c.election_training);
      if (t.contains("topic")) read_train_params(t["topic"], c.topic_training);
      if (t.contains("sentiment")) read_train_params(t["sentiment"], c.sentiment_training);
      if (t.contains("embeddings")) {
        const json& e = t["embeddings"];
        c.skipgram.dim = e.value("dim", c.skipgram.dim);
        c.skipgram.window = e.value("window", c.skipgram.window);
        c.skipgram.epochs = e.value("epochs", c.skipgram.epochs);
        c.skipgram.learning_rate = e.value("lr", c.skipgram.learning_rate);
        c.skipgram.min_count = e.value("min_count", c.skipgram.min_count);
      }
    }
    if (j.contains("election_net")) {
      const json& e = j["election_net"];
      if (!(e.is_string() && e.get<std::string>() == "standard"))
        c.election_net = election_config_from_json(e);
    }
    if (j.contains("topic_net")) c.topic_net = patch_ts(c.topic_net, j["topic_net"]);
    if (j.contains("sentiment_net"))
      c.sentiment_net = patch_ts(c.sentiment_net, j["sentiment_net"]);
  } catch (const json::exception& e) {
    throw Error(Errc::config, std::string("config: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == Errc::format) throw Error(Errc::config, e.what());
    throw;
  }
  c.validate();
  return c;
}

PipelineConfig PipelineConfig::load(const std::string& path) {
  auto in = open_text(path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(Errc::config, path + ": " + e.what());
  }
  return from_json(j, fs::path(path).parent_path());
}

void PipelineConfig::validate() const {
  if (!(rho_min >= 0.0 && rho_min <= 1.0)) throw Error(Errc::config, "rho_min must lie in [0,1]");
  if (!(threshold > 0.0 && threshold < 1.0))
    throw Error(Errc::config, "threshold must lie in (0,1)");
  if (vocab_min_count < 1) throw Error(Errc::config, "vocab_min_count must be >= 1");
  for (const auto* t : {&election_training, &topic_training, &sentiment_training}) {
    if (t->epochs < 0 || t->batch < 1 || !(t->lr > 0.0))
      throw Error(Errc::config, "training parameters out of range");
  }
  try {
    skipgram.validate();
  } catch (const Error& e) {
    throw Error(Errc::config, e.what());
  }
  election_net.validate();
  topic_net.validate();
  sentiment_net.validate();
}

std::vector<std::vector<std::string>> read_topic_terms(const std::string& path,
                                                       const std::vector<std::string>& labels) {
  auto in = open_text(path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(Errc::format, path + ": " + e.what());
  }
  if (!j.is_object()) throw Error(Errc::format, path + ": expected an object of term arrays");
  std::vector<std::vector<std::string>> lists(labels.size());
  for (const auto& [name, terms] : j.items()) {
    const auto label = label_index(labels, name);
    if (!label) throw Error(Errc::format, path + ": unknown topic '" + name + "'");
    if (!terms.is_array())
      throw Error(Errc::format, path + ": terms of '" + name + "' not an array");
    for (const auto& t : terms) {
      if (!t.is_string())
        throw Error(Errc::format, path + ": non-string term under '" + name + "'");
      lists[static_cast<std::size_t>(*label)].push_back(to_lower(t.get<std::string>()));
    }
  }
  return lists;
}

Corpus load_corpora(const std::vector<std::string>& paths) {
  if (paths.empty()) throw Error(Errc::config, "no corpus configured");
  if (paths.size() == 1) return load_corpus(paths.front());
  Corpus merged;
  for (const auto& p : paths)
    for (const auto& t : load_corpus(p)) merged.add(t);
  return merged;
}

json PipelineSummary::to_json() const {
  auto pct = [](const std::optional<double>& v) { return v ? json(100.0 * *v) : json(nullptr); };
  return {{"input_tweets", input_tweets},
          {"seed_matches", seed_matches},
          {"expanded_terms", expanded_terms},
          {"stage1_kept", stage1_kept},
          {"stage2_kept", stage2_kept},
          {"stage3_labeled", stage3_labeled},
          {"expansion_volume_increase_pct", pct(expansion_volume_increase)},
          {"stage2_reduction_pct", pct(stage2_reduction)},
          {"topic_counts", topic_counts},
          {"sentiment_counts", sentiment_counts}};
}

PipelineSummary run_pipeline(const PipelineConfig& config) {
  config.validate();
  require(config.out, "output directory");
  require(config.seeds, "seed file");
  require(config.election_model, "election model");
  require(config.topic_model, "topic model");
  require(config.sentiment_model, "sentiment model");
  require_file(config.seeds, "seed file");
  for (const auto& p : config.corpus) require_file(p, "corpus");
  require_file(config.election_model, "election model");
  require_file(config.topic_model, "topic model");
  require_file(config.sentiment_model, "sentiment model");
  if (!config.expansion.empty())
    require_file(config.expansion, "expansion report");
  else if (!config.embeddings.empty())
    require_file(config.embeddings, "embeddings");

  const auto seeds = SeedTermList::load(config.seeds);
  const Corpus corpus = load_corpora(config.corpus);
  const fs::path out_dir(config.out);
  fs::create_directories(out_dir);

  std::vector<ExpandedTerm> expanded;
  if (!config.expansion.empty()) {
    auto in = open_text(config.expansion);
    try {
      expanded = expansion_from_json(json::parse(in));
    } catch (const json::parse_error& e) {
      throw Error(Errc::format, config.expansion + ": " + e.what());
    }
  } else if (!config.embeddings.empty() && !corpus.empty()) {
    auto in = open_text(config.embeddings);
    const auto vectors = WordVectors::read_text(in);
    ExpansionOptions options;
    options.rho_min = config.rho_min;
    expanded = expand_query(seeds, corpus, vectors, options);
  } else if (config.embeddings.empty()) {
    warn("no embeddings or expansion report configured; matching seed terms only");
  }
  create_text(out_dir / "expansion.json") << expansion_to_json(expanded).dump(2) << '\n';

  PipelineSummary summary;
  summary.input_tweets = corpus.size();
  summary.expanded_terms = expanded.size();
  auto labeled_out = create_text(out_dir / "labeled.jsonl");
  if (corpus.empty()) warn("corpus is empty; writing empty outputs");

  std::vector<std::string> all_terms = seeds.terms;
  for (const auto& t : expanded) all_terms.push_back(t.term);
  const TermMatcher seed_matcher(seeds.terms);
  const TermMatcher all_matcher(all_terms);

  std::vector<const Tweet*> stage1;
  for (const auto& tweet : corpus) {
    const auto tokens = tokenize(tweet.text);
    if (seed_matcher.any(tokens)) ++summary.seed_matches;
    if (all_matcher.any(tokens)) stage1.push_back(&tweet);
  }
  summary.stage1_kept = stage1.size();

  if (!stage1.empty()) {
    const ElectionNet election = load_election_model(config.election_model);
    const TSNet topic = load_ts_model(config.topic_model);
    const TSNet sentiment = load_ts_model(config.sentiment_model);

    constexpr std::size_t kChunk = 256;
    for (std::size_t start = 0; start < stage1.size(); start += kChunk) {
      const std::size_t end = std::min(stage1.size(), start + kChunk);
      std::vector<CharMatrix> inputs;
      for (std::size_t i = start; i < end; ++i)
        inputs.push_back(election.config().encode(stage1[i]->text));
      const auto scores = election.forward(std::span<const CharMatrix>(inputs));
      for (std::size_t i = start; i < end; ++i) {
        const double score = scores[i - start];
        if (!decide_election(score, config.threshold).election) continue;
        ++summary.stage2_kept;
        const Tweet& tweet = *stage1[i];
        const auto t = predict(topic, tweet.text);
        const auto s = predict(sentiment, tweet.text);
        const auto& topic_name = topic.label_names()[static_cast<std::size_t>(t.label)];
        const auto& sentiment_name = sentiment.label_names()[static_cast<std::size_t>(s.label)];
        ++summary.topic_counts[topic_name];
        ++summary.sentiment_counts[sentiment_name];
        json j = tweet_to_json(tweet);
        j["election_score"] = score;
        j["topic"] = topic_name;
        j["sentiment"] = sentiment_name;
        labeled_out << j.dump() << '\n';
        ++summary.stage3_labeled;
      }
    }
  }

  if (summary.stage1_kept > 0)
    summary.stage2_reduction = 1.0 - *ratio(summary.stage2_kept, summary.stage1_kept);
  if (summary.seed_matches > 0)
    summary.expansion_volume_increase = *ratio(summary.stage1_kept, summary.seed_matches) - 1.0;

  create_text(out_dir / "summary.json") << summary.to_json().dump(2) << '\n';
  if (!labeled_out) throw Error(Errc::io, "failed writing labeled output");
  return summary;
}

}  // namespace ballot
