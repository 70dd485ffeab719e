#include "ballot/cli.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

#include "ballot/dataset.hpp"
#include "ballot/labels.hpp"
#include "ballot/model_io.hpp"
#include "ballot/pipeline.hpp"
#include "ballot/query_expansion.hpp"
#include "support/workspace.hpp"

namespace ballot {
namespace {

using nlohmann::json;
using testing::read_file;

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<json> read_jsonl(const std::string& path) {
  std::vector<json> rows;
  std::istringstream in(read_file(path));
  for (std::string line; std::getline(in, line);)
    if (!line.empty()) rows.push_back(json::parse(line));
  return rows;
}

class CliTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new testing::TempDir("cli_test");
    testing::write_workspace(dir_->path());
    const auto& d = *dir_;
    for (const char* task : {"election", "topic", "sentiment"}) {
      const auto r = run({"build-dataset", "--config", d / "config.json", "--task", task, "--out",
                          d / (std::string("data_") + task)});
      ASSERT_EQ(r.code, 0) << r.err;
      const auto t = run({std::string("train-") + task, "--config", d / "config.json", "--train",
                          d / (std::string("data_") + task + "/train.jsonl"), "--out",
                          d / (std::string(task) + ".model")});
      ASSERT_EQ(t.code, 0) << t.err;
    }
  }
  static void TearDownTestSuite() {
    delete dir_;
    dir_ = nullptr;
  }

  static const testing::TempDir& dir() { return *dir_; }

  std::vector<std::string> pipeline_args(const std::string& out) const {
    const auto& d = dir();
    return {"pipeline",
            "--config",
            d / "config.json",
            "--election-model",
            d / "election.model",
            "--topic-model",
            d / "topic.model",
            "--sentiment-model",
            d / "sentiment.model",
            "--out",
            d / out};
  }

 private:
  static inline testing::TempDir* dir_ = nullptr;
};

TEST(CliUsage, HelpAndParseErrors) {
  EXPECT_EQ(run({"--help"}).code, 0);
  const auto sub_help = run({"classify", "--help"});
  EXPECT_EQ(sub_help.code, 0);
  EXPECT_NE(sub_help.out.find("--model"), std::string::npos);
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);

  const auto rho = run({"expand-query", "--rho-min", "1.01"});
  EXPECT_EQ(rho.code, 2);
  EXPECT_EQ(rho.err.rfind("error: usage:", 0), 0u) << rho.err;
  EXPECT_EQ(run({"classify", "--input", "x.jsonl"}).code, 2);
  EXPECT_EQ(run({"pipeline", "--config", "/nonexistent.json"}).code, 2);
}

TEST(CliUsage, MissingInputsAndBadConfig) {
  const auto r = run({"build-vocab"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("--corpus"), std::string::npos);
  EXPECT_EQ(run({"build-vocab", "--corpus", "/nonexistent.jsonl"}).code, 1);

  testing::TempDir d("cli_bad_config");
  testing::write_file(d.path() / "c.json", R"({"rho_minimum": 0.2})");
  const auto bad = run({"build-vocab", "--config", d / "c.json"});
  EXPECT_EQ(bad.code, 2);
  EXPECT_NE(bad.err.find("rho_minimum"), std::string::npos);
}

TEST_F(CliTest, BuildVocabCountsTokens) {
  const auto r = run({"build-vocab", "--config", dir() / "config.json", "--min-count", "20"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("vote\t"), std::string::npos);
  std::istringstream lines(r.out);
  for (std::string line; std::getline(lines, line);)
    EXPECT_GE(std::stol(line.substr(line.find('\t') + 1)), 20) << line;
}

TEST_F(CliTest, EmbeddingsThenExpansion) {
  const auto& d = dir();
  const auto e =
      run({"train-embeddings", "--config", d / "config.json", "--out", d / "vectors.txt"});
  ASSERT_EQ(e.code, 0) << e.err;
  EXPECT_EQ(json::parse(e.out)["dim"], 8);

  const auto x = run({"expand-query", "--config", d / "config.json", "--embeddings",
                      d / "vectors.txt", "--rho-min", "0.5", "--k", "5", "--out", d / "exp.json"});
  ASSERT_EQ(x.code, 0) << x.err;
  const auto report = json::parse(read_file(d / "exp.json"));
  ASSERT_TRUE(report.is_array());
  for (const auto& t : report) EXPECT_GE(t["rho"].get<double>(), 0.5);
}

TEST_F(CliTest, DatasetsAreWritten) {
  const auto& d = dir();
  const auto rows = read_jsonl(d / "data_election/train.jsonl");
  const auto test = read_jsonl(d / "data_election/test.jsonl");
  EXPECT_EQ(rows.size() + test.size(), 240u);
  EXPECT_FALSE(read_jsonl(d / "data_topic/train.jsonl").empty());
  for (const auto& row : read_jsonl(d / "data_sentiment/train.jsonl"))
    EXPECT_EQ(row["text"].get<std::string>().find(":)"), std::string::npos);
  EXPECT_EQ(model_kind(d / "topic.model"), "topic_sentiment");
}

TEST_F(CliTest, ClassifyAndEvaluate) {
  const auto& d = dir();
  const auto c = run({"classify", "--model", d / "election.model", "--input", d / "corpus.jsonl",
                      "--out", d / "pred.jsonl"});
  ASSERT_EQ(c.code, 0) << c.err;
  const auto pred = read_jsonl(d / "pred.jsonl");
  ASSERT_EQ(pred.size(), 240u);
  EXPECT_TRUE(pred[0]["election"].is_boolean());

  const auto same = run({"evaluate", "--pred", d / "pred.jsonl", "--gold", d / "pred.jsonl",
                         "--pred-key", "election", "--gold-key", "election"});
  ASSERT_EQ(same.code, 0) << same.err;
  EXPECT_DOUBLE_EQ(json::parse(same.out)["weighted_f1"].get<double>(), 1.0);

  const auto topics =
      run({"classify", "--model", d / "topic.model", "--input", d / "corpus.jsonl"});
  ASSERT_EQ(topics.code, 0) << topics.err;
  const auto first = json::parse(topics.out.substr(0, topics.out.find('\n')));
  EXPECT_TRUE(first.contains("topic"));
  EXPECT_TRUE(first.contains("topic_probability"));

  const auto scored =
      run({"evaluate", "--pred", d / "pred.jsonl", "--gold", d / "data_election/test.jsonl",
           "--pred-key", "election", "--task", "election", "--out", d / "report.json"});
  ASSERT_EQ(scored.code, 0) << scored.err;
  EXPECT_EQ(scored.out.rfind("weighted_f1 ", 0), 0u);
}

TEST_F(CliTest, PipelineIsDeterministic) {
  const auto a = run(pipeline_args("run_a"));
  ASSERT_EQ(a.code, 0) << a.err;
  const auto b = run(pipeline_args("run_b"));
  ASSERT_EQ(b.code, 0) << b.err;
  EXPECT_EQ(a.out, b.out);
  for (const char* file : {"labeled.jsonl", "summary.json", "expansion.json"})
    EXPECT_EQ(read_file(dir() / (std::string("run_a/") + file)),
              read_file(dir() / (std::string("run_b/") + file)))
        << file;
  const auto summary = json::parse(read_file(dir() / "run_a/summary.json"));
  EXPECT_EQ(summary["input_tweets"], 240);
  EXPECT_EQ(summary["stage1_kept"], 160);
  EXPECT_LE(summary["stage2_kept"].get<int>(), 160);
}

TEST_F(CliTest, PipelineWithNoMatchesIsEmpty) {
  const auto& d = dir();
  testing::write_file(d.path() / "none.txt", "zzzunmatched\n");
  auto args = pipeline_args("run_none");
  args.insert(args.end(), {"--seeds", d / "none.txt"});
  const auto r = run(args);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(read_file(d / "run_none/labeled.jsonl"), "");
  EXPECT_EQ(json::parse(r.out)["stage1_kept"], 0);
}

TEST_F(CliTest, PipelineRejectsOutOfRangeThreshold) {
  auto args = pipeline_args("run_bad");
  args.insert(args.end(), {"--threshold", "1.0"});
  EXPECT_EQ(run(args).code, 2);
}

TEST(StarterData, ParsesCleanly) {
  const std::string dir = BALLOT_DATA_DIR;
  const auto config = PipelineConfig::load(dir + "/config.example.json");
  EXPECT_EQ(config.rho_min, 0.3);
  EXPECT_EQ(config.seeds, dir + "/seeds.txt");
  EXPECT_FALSE(SeedTermList::load(config.seeds).terms.empty());
  const auto topics = read_topic_terms(config.topic_terms, topic_labels());
  EXPECT_EQ(topics.size(), 22u);
  EXPECT_TRUE(topics[kTopicOther].empty());
  const auto positive = read_term_list(config.positive_lexicon);
  const auto negative = read_term_list(config.negative_lexicon);
  for (const auto& term : positive)
    EXPECT_EQ(std::find(negative.begin(), negative.end(), term), negative.end()) << term;
}

}  // namespace
}  // namespace ballot
