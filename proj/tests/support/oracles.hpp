#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "ballot/dataset.hpp"
#include "ballot/embeddings.hpp"
#include "ballot/text.hpp"

namespace ballot::testing {

// Straight recount from (gold, predicted) pair tallies, using the
// tp / fp / fn form of F1.
struct MetricsOracle {
  std::vector<double> precision, recall, f1;
  double macro_precision = 0, macro_recall = 0, macro_f1 = 0, weighted_f1 = 0, accuracy = 0;
};

inline MetricsOracle recount_metrics(const std::vector<int>& pred, const std::vector<int>& gold,
                                     int classes) {
  std::map<std::pair<int, int>, long> pairs;
  for (std::size_t i = 0; i < gold.size(); ++i) ++pairs[{gold[i], pred[i]}];
  MetricsOracle o;
  o.precision.assign(static_cast<std::size_t>(classes), 0.0);
  o.recall = o.f1 = o.precision;
  long correct = 0;
  long total_support = 0;
  int active = 0;
  for (int c = 0; c < classes; ++c) {
    long tp = 0, fp = 0, fn = 0;
    for (const auto& [key, n] : pairs) {
      if (key.first == c && key.second == c)
        tp += n;
      else if (key.second == c)
        fp += n;
      else if (key.first == c)
        fn += n;
    }
    correct += tp;
    const auto u = static_cast<std::size_t>(c);
    o.precision[u] = tp + fp ? double(tp) / double(tp + fp) : 0.0;
    o.recall[u] = tp + fn ? double(tp) / double(tp + fn) : 0.0;
    o.f1[u] = tp ? 2.0 * double(tp) / double(2 * tp + fp + fn) : 0.0;
    if (tp + fp + fn == 0) continue;
    ++active;
    o.macro_precision += o.precision[u];
    o.macro_recall += o.recall[u];
    o.macro_f1 += o.f1[u];
    o.weighted_f1 += double(tp + fn) * o.f1[u];
    total_support += tp + fn;
  }
  if (active) {
    o.macro_precision /= active;
    o.macro_recall /= active;
    o.macro_f1 /= active;
  }
  if (total_support) o.weighted_f1 /= double(total_support);
  if (!gold.empty()) o.accuracy = double(correct) / double(gold.size());
  return o;
}

// Minimum of sum(count * depth) over every full binary tree on the leaves,
// by exhaustive enumeration of root splits. Exponential; keep |counts| small.
inline long brute_force_code_cost(const std::vector<long>& counts) {
  const unsigned n = static_cast<unsigned>(counts.size());
  std::map<unsigned, long> memo;
  std::function<long(unsigned)> cost = [&](unsigned set) -> long {
    if ((set & (set - 1)) == 0) return 0;
    if (auto it = memo.find(set); it != memo.end()) return it->second;
    long weight = 0;
    for (unsigned i = 0; i < n; ++i)
      if (set & (1u << i)) weight += counts[i];
    long best = -1;
    for (unsigned a = (set - 1) & set; a > 0; a = (a - 1) & set) {
      const long c = cost(a) + cost(set & ~a);
      if (best < 0 || c < best) best = c;
    }
    return memo[set] = best + weight;
  };
  return n < 2 ? 0 : cost((1u << n) - 1);
}

inline bool is_prefix_free(const std::vector<std::vector<std::uint8_t>>& codes) {
  for (std::size_t i = 0; i < codes.size(); ++i) {
    for (std::size_t j = 0; j < codes.size(); ++j) {
      if (i == j || codes[i].size() > codes[j].size()) continue;
      if (std::equal(codes[i].begin(), codes[i].end(), codes[j].begin())) return false;
    }
  }
  return true;
}

inline double kraft_sum(const std::vector<std::vector<std::uint8_t>>& codes) {
  double s = 0.0;
  for (const auto& c : codes) s += std::ldexp(1.0, -static_cast<int>(c.size()));
  return s;
}

// Product of the per-node branch probabilities along the target's path,
// computed straight from the model tensors.
inline double brute_force_hs_probability(const SkipGramModel& m, nn::Index center,
                                         nn::Index target) {
  double p = 1.0;
  const auto& path = m.tree.paths[static_cast<std::size_t>(target)];
  const auto& code = m.tree.codes[static_cast<std::size_t>(target)];
  for (std::size_t k = 0; k < path.size(); ++k) {
    double dot = 0.0;
    for (nn::Index d = 0; d < m.input_vectors.cols(); ++d)
      dot += m.node_vectors(path[k], d) * m.input_vectors(center, d);
    const double left = 1.0 / (1.0 + std::exp(-dot));
    p *= code[k] == 0 ? left : 1.0 - left;
  }
  return p;
}

// Share of tweets containing every token of `term` in sequence that also
// contain some seed, by direct scanning.
inline double brute_force_rho(const std::vector<std::string>& texts, const std::string& term,
                              const std::vector<std::string>& seeds) {
  auto contains = [](const std::vector<std::string>& tokens, const std::string& phrase) {
    const auto needle = tokenize(phrase);
    for (std::size_t i = 0; i + needle.size() <= tokens.size(); ++i) {
      bool ok = true;
      for (std::size_t j = 0; j < needle.size() && ok; ++j) ok = tokens[i + j] == needle[j];
      if (ok) return true;
    }
    return false;
  };
  long with_term = 0, with_both = 0;
  for (const auto& text : texts) {
    const auto tokens = tokenize(text);
    if (!contains(tokens, term)) continue;
    ++with_term;
    for (const auto& s : seeds) {
      if (contains(tokens, s)) {
        ++with_both;
        break;
      }
    }
  }
  return with_term ? double(with_both) / double(with_term) : std::nan("");
}

}  // namespace ballot::testing
