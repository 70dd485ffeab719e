#include "ballot/query_expansion.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <unordered_set>

#include "ballot/text.hpp"

namespace ballot {

using nlohmann::json;

SeedTermList SeedTermList::from_terms(const std::vector<std::string>& terms, std::string source) {
  SeedTermList out;
  out.source = std::move(source);
  std::unordered_set<std::string> seen;
  for (const auto& raw : terms) {
    std::string term = join(split_whitespace(raw));
    if (term.empty()) continue;
    if (seen.insert(term).second) out.terms.push_back(std::move(term));
  }
  if (out.terms.empty()) throw Error(Errc::config, "seed term list is empty");
  return out;
}

SeedTermList SeedTermList::load(const std::string& path) {
  return from_terms(read_term_list(path), path);
}

std::vector<MutualCandidate> mutual_top_k(const WordVectors& vectors, const SeedTermList& seeds,
                                          std::size_t k) {
  const std::set<std::string> seed_set(seeds.terms.begin(), seeds.terms.end());
  std::map<std::string, MutualCandidate> best;
  std::size_t usable = 0;
  for (const auto& seed : seeds.terms) {
    if (!vectors.find(seed)) {
      warn("seed '" + seed + "' has no embedding; skipped");
      continue;
    }
    ++usable;
    for (const auto& [candidate, similarity] : top_k_similar(vectors, seed, k)) {
      if (seed_set.contains(candidate)) continue;
      const auto back = top_k_similar(vectors, candidate, k);
      const bool mutual = std::any_of(back.begin(), back.end(),
                                      [&](const auto& entry) { return entry.first == seed; });
      if (!mutual) continue;
      auto it = best.find(candidate);
      if (it == best.end() || similarity > it->second.similarity)
        best[candidate] = {candidate, seed, similarity};
    }
  }
  if (usable == 0) throw Error(Errc::lookup, "no seed term has an embedding");

  std::vector<MutualCandidate> out;
  for (auto& [term, c] : best) out.push_back(std::move(c));
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& a, const auto& b) { return a.similarity > b.similarity; });
  return out;
}

TokenCorpus tokenize_corpus(const Corpus& corpus) {
  TokenCorpus out;
  out.reserve(corpus.size());
  for (const auto& t : corpus) out.push_back(tokenize(t.text));
  return out;
}

std::vector<std::string> harvest_noun_phrases(const TokenCorpus& corpus, std::string_view term,
                                              std::size_t limit) {
  const auto needle = tokenize(term);
  if (needle.empty()) throw Error(Errc::parameter, "harvest_noun_phrases: empty term");
  const std::size_t m = needle.size();

  std::map<std::string, long> counts;
  for (const auto& tokens : corpus) {
    for (std::size_t at = 0; at + m <= tokens.size(); ++at) {
      if (!std::equal(needle.begin(), needle.end(),
                      tokens.begin() + static_cast<std::ptrdiff_t>(at)))
        continue;
      for (std::size_t len = std::max<std::size_t>(2, m + 1); len <= 3; ++len) {
        // Every window of `len` tokens that covers the occurrence.
        const std::size_t lo = at + m >= len ? at + m - len : 0;
        for (std::size_t start = lo; start <= at && start + len <= tokens.size(); ++start) {
          const auto first = tokens.begin() + static_cast<std::ptrdiff_t>(start);
          const std::vector<std::string> phrase(first, first + static_cast<std::ptrdiff_t>(len));
          if (is_stopword(phrase.front()) || is_stopword(phrase.back())) continue;
          if (std::any_of(phrase.begin(), phrase.end(),
                          [](const auto& t) { return is_url(t) || is_punctuation(t); }))
            continue;
          ++counts[join(phrase)];
        }
      }
    }
  }
  std::vector<std::pair<std::string, long>> ranked(counts.begin(), counts.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < ranked.size() && i < limit; ++i) out.push_back(ranked[i].first);
  return out;
}

std::vector<std::string> harvest_noun_phrases(const Corpus& corpus, std::string_view term,
                                              std::size_t limit) {
  return harvest_noun_phrases(tokenize_corpus(corpus), term, limit);
}

namespace {

double significance(const TokenCorpus& corpus, std::string_view term, const TermMatcher& seeds) {
  const TermMatcher target({std::string(term)});
  long matched = 0;
  long with_seed = 0;
  for (const auto& tokens : corpus) {
    if (!target.any(tokens)) continue;
    ++matched;
    if (seeds.any(tokens)) ++with_seed;
  }
  if (matched == 0)
    throw Error(Errc::undefined_rho, "term '" + std::string(term) + "' matches no tweets");
  return static_cast<double>(with_seed) / static_cast<double>(matched);
}

}  // namespace

double election_significance(const TokenCorpus& corpus, std::string_view term,
                             const SeedTermList& seeds) {
  if (corpus.empty()) throw Error(Errc::empty_input, "election_significance: empty corpus");
  return significance(corpus, term, TermMatcher(seeds.terms));
}

double election_significance(const Corpus& corpus, std::string_view term,
                             const SeedTermList& seeds) {
  return election_significance(tokenize_corpus(corpus), term, seeds);
}

void ExpansionOptions::validate() const {
  if (!(rho_min >= 0.0 && rho_min <= 1.0))
    throw Error(Errc::parameter, "rho_min " + std::to_string(rho_min) + " outside [0,1]");
  if (k < 1) throw Error(Errc::parameter, "k must be >= 1");
}

std::vector<ExpandedTerm> expand_query(const SeedTermList& seeds, const Corpus& corpus,
                                       const WordVectors& vectors,
                                       const ExpansionOptions& options) {
  options.validate();
  if (corpus.empty()) throw Error(Errc::empty_input, "expand_query: empty corpus");
  const TokenCorpus tokens = tokenize_corpus(corpus);
  const TermMatcher seed_matcher(seeds.terms);

  std::vector<ExpandedTerm> candidates;
  std::set<std::string> seen(seeds.terms.begin(), seeds.terms.end());
  for (const auto& c : mutual_top_k(vectors, seeds, options.k)) {
    if (seen.insert(c.candidate).second)
      candidates.push_back({c.candidate, c.seed, c.similarity, 0.0, ExpansionKind::similar_term});
    for (auto& phrase : harvest_noun_phrases(tokens, c.candidate, options.max_phrases))
      if (seen.insert(phrase).second)
        candidates.push_back({phrase, c.seed, c.similarity, 0.0, ExpansionKind::noun_phrase});
  }

  std::vector<ExpandedTerm> kept;
  for (auto& c : candidates) {
    try {
      c.rho = significance(tokens, c.term, seed_matcher);
    } catch (const Error& e) {
      if (e.code() != Errc::undefined_rho) throw;
      warn("dropping '" + c.term + "': " + e.what());
      continue;
    }
    if (c.rho >= options.rho_min) kept.push_back(std::move(c));
  }
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    return a.rho != b.rho ? a.rho > b.rho : a.term < b.term;
  });
  return kept;
}

json expansion_to_json(const std::vector<ExpandedTerm>& terms) {
  json out = json::array();
  for (const auto& t : terms) {
    out.push_back(
        {{"term", t.term},
         {"source_seed", t.source_seed},
         {"similarity", t.similarity},
         {"rho", t.rho},
         {"kind", t.kind == ExpansionKind::similar_term ? "similar_term" : "noun_phrase"}});
  }
  return out;
}

std::vector<ExpandedTerm> expansion_from_json(const json& report) {
  if (!report.is_array()) throw Error(Errc::format, "expansion report must be a JSON array");
  std::vector<ExpandedTerm> out;
  for (const auto& j : report) {
    try {
      ExpandedTerm t;
      t.term = j.at("term").get<std::string>();
      t.source_seed = j.at("source_seed").get<std::string>();
      t.similarity = j.at("similarity").get<double>();
      t.rho = j.at("rho").get<double>();
      const auto kind = j.at("kind").get<std::string>();
      if (kind != "similar_term" && kind != "noun_phrase")
        throw Error(Errc::format, "unknown expansion kind '" + kind + "'");
      t.kind = kind == "similar_term" ? ExpansionKind::similar_term : ExpansionKind::noun_phrase;
      out.push_back(std::move(t));
    } catch (const json::exception& e) {
      throw Error(Errc::format, std::string("expansion report: ") + e.what());
    }
  }
  return out;
}

}  // namespace ballot
