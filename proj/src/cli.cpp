#include "ballot/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <json.hpp>
#include <map>
#include <set>
#include <sstream>

#include "ballot/char_text.hpp"
#include "ballot/dataset.hpp"
#include "ballot/embeddings.hpp"
#include "ballot/error.hpp"
#include "ballot/labels.hpp"
#include "ballot/model_io.hpp"
#include "ballot/pipeline.hpp"
#include "ballot/query_expansion.hpp"
#include "ballot/text.hpp"

namespace ballot {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

template <typename T>
struct Flag {
  T value{};
  std::vector<CLI::Option*> options;

  CLI::Option* bind(CLI::Option* option) {
    options.push_back(option);
    return option;
  }
  bool set() const {
    return std::any_of(options.begin(), options.end(), [](auto* o) { return o->count() > 0; });
  }
};

struct Args {
  std::string config;
  Flag<std::uint64_t> seed;
  Flag<std::string> out;
  Flag<double> rho_min;
  Flag<double> threshold;
  Flag<int> epochs;
  Flag<int> batch;
  Flag<double> lr;
  Flag<std::vector<std::string>> corpus;
  Flag<std::string> seeds;
  Flag<std::string> embeddings;
  Flag<std::string> expansion;
  Flag<std::string> topic_terms;
  Flag<std::string> positive;
  Flag<std::string> negative;
  Flag<std::string> election_model;
  Flag<std::string> topic_model;
  Flag<std::string> sentiment_model;
  Flag<int> min_count;
  Flag<int> dim;
  Flag<int> window;
  Flag<int> k;
  std::string model;
  std::string input;
  std::string train;
  std::string pred;
  std::string gold;
  std::string pred_key = "label";
  std::string gold_key = "label";
  std::string task;
  double test_fraction = 0.1;
};

[[noreturn]] void missing(const std::string& what) { throw Error(Errc::usage, "missing " + what); }

void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::trunc);
  if (!file) throw Error(Errc::io, "cannot write " + path);
  file << text;
  if (!file) throw Error(Errc::io, "failed writing " + path);
}

std::ifstream open_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io, "cannot read " + path);
  return in;
}

PipelineConfig make_config(const Args& a) {
  PipelineConfig c = a.config.empty() ? PipelineConfig{} : PipelineConfig::load(a.config);
  if (a.seed.set()) {
    c.seed = a.seed.value;
    c.skipgram.seed = a.seed.value;
  } else {
    c.skipgram.seed = c.seed;
  }
  if (a.out.set()) c.out = a.out.value;
  if (a.rho_min.set()) c.rho_min = a.rho_min.value;
  if (a.threshold.set()) c.threshold = a.threshold.value;
  if (a.corpus.set()) c.corpus = a.corpus.value;
  if (a.seeds.set()) c.seeds = a.seeds.value;
  if (a.embeddings.set()) c.embeddings = a.embeddings.value;
  if (a.expansion.set()) c.expansion = a.expansion.value;
  if (a.topic_terms.set()) c.topic_terms = a.topic_terms.value;
  if (a.positive.set()) c.positive_lexicon = a.positive.value;
  if (a.negative.set()) c.negative_lexicon = a.negative.value;
  if (a.election_model.set()) c.election_model = a.election_model.value;
  if (a.topic_model.set()) c.topic_model = a.topic_model.value;
  if (a.sentiment_model.set()) c.sentiment_model = a.sentiment_model.value;
  if (a.min_count.set()) {
    c.vocab_min_count = a.min_count.value;
    c.skipgram.min_count = a.min_count.value;
  }
  if (a.dim.set()) c.skipgram.dim = a.dim.value;
  if (a.window.set()) c.skipgram.window = a.window.value;
  if (a.epochs.set()) c.skipgram.epochs = a.epochs.value;
  if (a.lr.set()) c.skipgram.learning_rate = a.lr.value;
  for (auto* t : {&c.election_training, &c.topic_training, &c.sentiment_training}) {
    if (a.epochs.set()) t->epochs = a.epochs.value;
    if (a.batch.set()) t->batch = a.batch.value;
    if (a.lr.set()) t->lr = a.lr.value;
  }
  c.validate();
  return c;
}

Corpus need_corpus(const PipelineConfig& c) {
  if (c.corpus.empty()) missing("--corpus");
  return load_corpora(c.corpus);
}

std::string need(const std::string& value, const std::string& flag) {
  if (value.empty()) missing(flag);
  return value;
}

json dataset_counts(const LabeledDataset& ds) {
  json counts = json::object();
  const auto n = ds.class_counts();
  for (std::size_t i = 0; i < n.size(); ++i) counts[ds.label_names[i]] = n[i];
  return counts;
}

const std::vector<std::string>& task_labels(const std::string& task) {
  if (task == "election") return election_labels();
  if (task == "topic") return topic_labels();
  if (task == "sentiment") return sentiment_labels();
  throw Error(Errc::usage, "unknown task '" + task + "'");
}

std::string epoch_logger_line(int epoch, int total, double loss) {
  return "epoch " + std::to_string(epoch + 1) + "/" + std::to_string(total) + " loss " +
         std::to_string(loss) + "\n";
}

int cmd_build_vocab(const Args& a, std::ostream& out) {
  const auto c = make_config(a);
  const auto corpus = need_corpus(c);
  const auto vocab = Vocab::build(tokenize_corpus(corpus), c.skipgram.min_count);
  std::string text;
  for (const auto& e : vocab.entries()) text += e.term + '\t' + std::to_string(e.count) + '\n';
  emit(a.out.value, text, out);
  return 0;
}

int cmd_train_embeddings(const Args& a, std::ostream& out, std::ostream& err) {
  const auto c = make_config(a);
  const auto tokens = tokenize_corpus(need_corpus(c));
  const auto model = train_skipgram(tokens, c.skipgram, [&](int epoch, const SkipGramModel&) {
    err << "epoch " << epoch + 1 << "/" << c.skipgram.epochs << " done\n";
  });
  std::ostringstream text;
  model.word_vectors().write_text(text);
  emit(need(a.out.value, "--out"), text.str(), out);
  out << json{{"terms", model.vocab.size()},
              {"dim", model.dim()},
              {"log_likelihood", corpus_log_likelihood(model, tokens)}}
             .dump()
      << '\n';
  return 0;
}

int cmd_expand_query(const Args& a, std::ostream& out) {
  const auto c = make_config(a);
  const auto seeds = SeedTermList::load(need(c.seeds, "--seeds"));
  const auto corpus = need_corpus(c);
  auto in = open_text(need(c.embeddings, "--embeddings"));
  const auto vectors = WordVectors::read_text(in);
  ExpansionOptions options;
  options.rho_min = c.rho_min;
  if (a.k.set()) options.k = static_cast<std::size_t>(a.k.value);
  const auto terms = expand_query(seeds, corpus, vectors, options);
  emit(a.out.value, expansion_to_json(terms).dump(2) + "\n", out);
  return 0;
}

int cmd_build_dataset(const Args& a, std::ostream& out) {
  const auto c = make_config(a);
  const auto corpus = need_corpus(c);
  LabeledDataset ds;
  if (a.task == "election") {
    auto terms = SeedTermList::load(need(c.seeds, "--seeds")).terms;
    if (!c.expansion.empty()) {
      auto in = open_text(c.expansion);
      for (const auto& t : expansion_from_json(json::parse(in))) terms.push_back(t.term);
    }
    ds = distant_label_election(corpus, terms);
  } else if (a.task == "topic") {
    ds = distant_label_topic(
        corpus, read_topic_terms(need(c.topic_terms, "--topic-terms"), topic_labels()));
  } else if (a.task == "sentiment") {
    ds = distant_label_sentiment(corpus, read_term_list(need(c.positive_lexicon, "--positive")),
                                 read_term_list(need(c.negative_lexicon, "--negative")));
  } else {
    throw Error(Errc::usage, "unknown task '" + a.task + "'");
  }

  const fs::path dir(need(c.out, "--out"));
  fs::create_directories(dir);
  auto write = [&](const LabeledDataset& part, const char* name) {
    std::ostringstream text;
    write_labeled_jsonl(part, text);
    emit((dir / name).string(), text.str(), out);
  };
  json report{
      {"task", a.task}, {"examples", ds.examples.size()}, {"class_counts", dataset_counts(ds)}};
  if (a.test_fraction > 0.0) {
    const auto [train, test] = split_dataset(ds, a.test_fraction, c.seed);
    write(train, "train.jsonl");
    write(test, "test.jsonl");
    report["train"] = train.examples.size();
    report["test"] = test.examples.size();
  } else {
    write(ds, "train.jsonl");
    report["train"] = ds.examples.size();
    report["test"] = 0;
  }
  out << report.dump() << '\n';
  return 0;
}

LabeledDataset read_dataset(const std::string& path, const std::vector<std::string>& labels) {
  auto in = open_text(need(path, "--train"));
  auto ds = read_labeled_jsonl(in, labels);
  if (ds.examples.empty()) throw Error(Errc::empty_input, path + ": no training examples");
  return ds;
}

json train_metadata(const std::string& task, const TrainParams& p, std::uint64_t seed,
                    std::size_t examples, const nn::TrainReport& report) {
  return {
      {"task", task},
      {"epochs", p.epochs},
      {"batch", p.batch},
      {"lr", p.lr},
      {"seed", seed},
      {"train_examples", examples},
      {"final_loss", report.epoch_loss.empty() ? json(nullptr) : json(report.epoch_loss.back())}};
}

int cmd_train_election(const Args& a, std::ostream& out, std::ostream& err) {
  const auto c = make_config(a);
  const auto ds = read_dataset(a.train, election_labels());
  std::vector<CharMatrix> inputs;
  std::vector<int> labels;
  for (const auto& ex : ds.examples) {
    inputs.push_back(c.election_net.encode(ex.text));
    labels.push_back(ex.label);
  }
  auto net = ElectionNet::build(c.election_net, c.seed);
  auto options = c.election_training.options(c.seed);
  options.on_epoch = [&](int epoch, double loss) {
    err << epoch_logger_line(epoch, options.epochs, loss);
    return true;
  };
  const auto report = train_election(net, std::span<const CharMatrix>(inputs),
                                     std::span<const int>(labels), options);
  save_model(net, need(c.out, "--out"),
             train_metadata("election", c.election_training, c.seed, inputs.size(), report));
  out << json{{"epoch_loss", report.epoch_loss}}.dump() << '\n';
  return 0;
}

int cmd_train_ts(const Args& a, const std::string& task, std::ostream& out, std::ostream& err) {
  const auto c = make_config(a);
  const bool topic = task == "topic";
  const auto& label_names = topic ? topic_labels() : sentiment_labels();
  const auto ds = read_dataset(a.train, label_names);

  std::vector<LabeledTokens> examples;
  std::vector<std::vector<std::string>> docs;
  for (const auto& ex : ds.examples) {
    examples.push_back({tokenize_words(ex.text), ex.label});
    docs.push_back(examples.back().tokens);
  }
  const TrainParams& params = topic ? c.topic_training : c.sentiment_training;
  auto net =
      TSNet::build(topic ? c.topic_net : c.sentiment_net, WordVocab::build(docs, c.vocab_min_count),
                   label_names, topic ? kTopicOther : kSentimentNeutral, c.seed);
  auto options = params.options(c.seed);
  options.on_epoch = [&](int epoch, double loss) {
    err << epoch_logger_line(epoch, options.epochs, loss);
    return true;
  };
  const auto report = train_ts(net, std::span<const LabeledTokens>(examples), options);
  save_model(net, need(c.out, "--out"),
             train_metadata(task, params, c.seed, examples.size(), report));
  out << json{{"epoch_loss", report.epoch_loss}, {"vocab_size", net.vocab().size()}}.dump() << '\n';
  return 0;
}

std::string ts_task_key(const TSNet& net) {
  if (net.label_names() == topic_labels()) return "topic";
  if (net.label_names() == sentiment_labels()) return "sentiment";
  return "label";
}

int cmd_classify(const Args& a, std::ostream& out) {
  const auto c = make_config(a);
  const auto model_path = need(a.model, "--model");
  const auto corpus = load_corpus(need(a.input, "--input"));
  std::string text;
  if (model_kind(model_path) == kElectionKind) {
    const auto net = load_election_model(model_path);
    for (const auto& tweet : corpus) {
      const auto decision =
          decide_election(net.forward(net.config().encode(tweet.text)), c.threshold);
      json j = tweet_to_json(tweet);
      j["election_score"] = decision.score;
      j["election"] = decision.election;
      text += j.dump() + '\n';
    }
  } else {
    const auto net = load_ts_model(model_path);
    const auto key = ts_task_key(net);
    for (const auto& tweet : corpus) {
      const auto p = predict(net, tweet.text);
      json j = tweet_to_json(tweet);
      j[key] = net.label_names()[static_cast<std::size_t>(p.label)];
      j[key + "_probability"] = p.probabilities(p.label);
      text += j.dump() + '\n';
    }
  }
  emit(a.out.value, text, out);
  return 0;
}

std::vector<std::pair<std::string, std::string>> read_id_labels(const std::string& path,
                                                                const std::string& key) {
  auto in = open_text(path);
  std::vector<std::pair<std::string, std::string>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path + ":" + std::to_string(line_no);
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw Error(Errc::format, where + ": " + e.what());
    }
    if (!j.is_object() || !j.contains("id") || !j["id"].is_string() || !j.contains(key))
      throw Error(Errc::format, where + ": expected string id and key '" + key + "'");
    const json& v = j[key];
    std::string label;
    if (v.is_boolean())
      label = election_labels()[v.get<bool>() ? 1 : 0];
    else if (v.is_string())
      label = v.get<std::string>();
    else
      throw Error(Errc::format, where + ": label must be a string or boolean");
    rows.emplace_back(j["id"].get<std::string>(), std::move(label));
  }
  return rows;
}

int cmd_evaluate(const Args& a, std::ostream& out) {
  const auto gold = read_id_labels(need(a.gold, "--gold"), a.gold_key);
  const auto pred = read_id_labels(need(a.pred, "--pred"), a.pred_key);
  if (gold.empty()) throw Error(Errc::empty_input, "gold file has no rows");

  std::vector<std::string> labels;
  if (!a.task.empty()) {
    labels = task_labels(a.task);
  } else {
    std::set<std::string> names;
    for (const auto& [id, l] : gold) names.insert(l);
    for (const auto& [id, l] : pred) names.insert(l);
    labels.assign(names.begin(), names.end());
  }

  std::map<std::string, std::string> by_id;
  for (const auto& [id, l] : pred) by_id[id] = l;
  std::vector<int> g;
  std::vector<int> p;
  for (const auto& [id, l] : gold) {
    const auto it = by_id.find(id);
    if (it == by_id.end()) throw Error(Errc::format, "no prediction for id " + id);
    const auto gi = label_index(labels, l);
    const auto pi = label_index(labels, it->second);
    if (!gi || !pi) throw Error(Errc::format, "label outside the label set for id " + id);
    g.push_back(*gi);
    p.push_back(*pi);
  }
  const auto report = evaluate(p, g, labels);
  emit(a.out.value, report.to_json().dump(2) + "\n", out);
  if (!a.out.value.empty()) out << "weighted_f1 " << report.weighted_f1 << '\n';
  return 0;
}

int cmd_pipeline(const Args& a, std::ostream& out) {
  const auto c = make_config(a);
  out << run_pipeline(c).to_json().dump(2) << '\n';
  return 0;
}

int exit_code(Errc code) { return code == Errc::usage || code == Errc::config ? 2 : 1; }

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Election tweet detection and categorization", "ballot"};
  app.require_subcommand(1);
  Args a;

  auto common = [&](CLI::App* cmd) {
    cmd->add_option("--config", a.config, "JSON run configuration")->check(CLI::ExistingFile);
    a.seed.bind(cmd->add_option("--seed", a.seed.value, "RNG seed"));
    a.out.bind(cmd->add_option("--out", a.out.value, "Output path"));
  };
  auto training = [&](CLI::App* cmd) {
    a.epochs.bind(cmd->add_option("--epochs", a.epochs.value, "Training epochs")
                      ->check(CLI::NonNegativeNumber));
    a.batch.bind(
        cmd->add_option("--batch", a.batch.value, "Mini-batch size")->check(CLI::PositiveNumber));
    a.lr.bind(cmd->add_option("--lr", a.lr.value, "Learning rate")->check(CLI::PositiveNumber));
  };
  auto corpus = [&](CLI::App* cmd) {
    a.corpus.bind(cmd->add_option("--corpus", a.corpus.value, "Tweet JSONL file(s)"));
  };
  auto rho = [&](CLI::App* cmd) {
    a.rho_min.bind(cmd->add_option("--rho-min", a.rho_min.value, "Minimum election significance")
                       ->check(CLI::Range(0.0, 1.0)));
  };
  auto threshold = [&](CLI::App* cmd) {
    a.threshold.bind(cmd->add_option("--threshold", a.threshold.value, "Election score threshold")
                         ->check(CLI::Range(0.0, 1.0)));
  };

  std::map<std::string, std::function<int()>> handlers;

  auto* build_vocab = app.add_subcommand("build-vocab", "Count corpus tokens");
  common(build_vocab);
  corpus(build_vocab);
  a.min_count.bind(
      build_vocab->add_option("--min-count", a.min_count.value)->check(CLI::PositiveNumber));
  handlers["build-vocab"] = [&] { return cmd_build_vocab(a, out); };

  auto* train_emb = app.add_subcommand("train-embeddings", "Train skip-gram word vectors");
  common(train_emb);
  corpus(train_emb);
  a.epochs.bind(train_emb->add_option("--epochs", a.epochs.value)->check(CLI::NonNegativeNumber));
  a.lr.bind(train_emb->add_option("--lr", a.lr.value)->check(CLI::PositiveNumber));
  a.dim.bind(train_emb->add_option("--dim", a.dim.value)->check(CLI::PositiveNumber));
  a.window.bind(train_emb->add_option("--window", a.window.value)->check(CLI::PositiveNumber));
  a.min_count.bind(
      train_emb->add_option("--min-count", a.min_count.value)->check(CLI::PositiveNumber));
  handlers["train-embeddings"] = [&] { return cmd_train_embeddings(a, out, err); };

  auto* expand = app.add_subcommand("expand-query", "Expand seed terms");
  common(expand);
  corpus(expand);
  rho(expand);
  a.seeds.bind(expand->add_option("--seeds", a.seeds.value, "Seed term file"));
  a.embeddings.bind(expand->add_option("--embeddings", a.embeddings.value, "Word vector file"));
  a.k.bind(expand->add_option("--k", a.k.value, "Neighbours per term")->check(CLI::PositiveNumber));
  handlers["expand-query"] = [&] { return cmd_expand_query(a, out); };

  auto* build_ds = app.add_subcommand("build-dataset", "Distant-label a corpus");
  common(build_ds);
  corpus(build_ds);
  build_ds->add_option("--task", a.task)
      ->required()
      ->check(CLI::IsMember({"election", "topic", "sentiment"}));
  a.seeds.bind(build_ds->add_option("--seeds", a.seeds.value));
  a.expansion.bind(build_ds->add_option("--expansion", a.expansion.value, "Expansion report"));
  a.topic_terms.bind(build_ds->add_option("--topic-terms", a.topic_terms.value));
  a.positive.bind(build_ds->add_option("--positive", a.positive.value));
  a.negative.bind(build_ds->add_option("--negative", a.negative.value));
  build_ds->add_option("--test-fraction", a.test_fraction)->check(CLI::Range(0.0, 0.99));
  handlers["build-dataset"] = [&] { return cmd_build_dataset(a, out); };

  auto* train_el = app.add_subcommand("train-election", "Train the election classifier");
  common(train_el);
  training(train_el);
  train_el->add_option("--train", a.train, "Labeled JSONL")->required();
  handlers["train-election"] = [&] { return cmd_train_election(a, out, err); };

  for (const std::string task : {"topic", "sentiment"}) {
    auto* cmd = app.add_subcommand("train-" + task, "Train the " + task + " classifier");
    common(cmd);
    training(cmd);
    cmd->add_option("--train", a.train, "Labeled JSONL")->required();
    a.min_count.bind(cmd->add_option("--min-count", a.min_count.value)->check(CLI::PositiveNumber));
    handlers["train-" + task] = [&, task] { return cmd_train_ts(a, task, out, err); };
  }

  auto* classify = app.add_subcommand("classify", "Apply a saved model to tweets");
  common(classify);
  threshold(classify);
  classify->add_option("--model", a.model)->required();
  classify->add_option("--input", a.input, "Tweet JSONL")->required();
  handlers["classify"] = [&] { return cmd_classify(a, out); };

  auto* eval = app.add_subcommand("evaluate", "Score predictions against gold labels");
  common(eval);
  eval->add_option("--pred", a.pred)->required();
  eval->add_option("--gold", a.gold)->required();
  eval->add_option("--pred-key", a.pred_key, "Label key in the prediction file");
  eval->add_option("--gold-key", a.gold_key, "Label key in the gold file");
  eval->add_option("--task", a.task)->check(CLI::IsMember({"election", "topic", "sentiment"}));
  handlers["evaluate"] = [&] { return cmd_evaluate(a, out); };

  auto* pipe = app.add_subcommand("pipeline", "Filter and label a corpus end to end");
  common(pipe);
  corpus(pipe);
  rho(pipe);
  threshold(pipe);
  a.seeds.bind(pipe->add_option("--seeds", a.seeds.value));
  a.embeddings.bind(pipe->add_option("--embeddings", a.embeddings.value));
  a.expansion.bind(pipe->add_option("--expansion", a.expansion.value));
  a.election_model.bind(pipe->add_option("--election-model", a.election_model.value));
  a.topic_model.bind(pipe->add_option("--topic-model", a.topic_model.value));
  a.sentiment_model.bind(pipe->add_option("--sentiment-model", a.sentiment_model.value));
  handlers["pipeline"] = [&] { return cmd_pipeline(a, out); };

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    const auto subs = app.get_subcommands();
    out << (subs.empty() ? app.help() : subs.front()->help());
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: usage: " << e.what() << '\n';
    return 2;
  }

  try {
    const auto* cmd = app.get_subcommands().front();
    return handlers.at(cmd->get_name())();
  } catch (const Error& e) {
    err << "error: " << errc_name(e.code()) << ": " << e.what() << '\n';
    return exit_code(e.code());
  } catch (const std::exception& e) {
    err << "error: runtime: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace ballot
