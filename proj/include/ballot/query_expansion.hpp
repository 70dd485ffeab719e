#pragma once

#include <json.hpp>
#include <string>
#include <string_view>
#include <vector>

#include "ballot/dataset.hpp"
#include "ballot/embeddings.hpp"

namespace ballot {

struct SeedTermList {
  std::vector<std::string> terms;  // lowercased, deduplicated, non-empty
  std::string source;

  // Throws Errc::config when no terms remain.
  static SeedTermList from_terms(const std::vector<std::string>& terms, std::string source = {});
  // Seed file: one term per line, ';' comment lines. Lines starting with '#'
  // are hashtag terms, not comments.
  static SeedTermList load(const std::string& path);
};

enum class ExpansionKind { similar_term, noun_phrase };

struct ExpandedTerm {
  std::string term;
  std::string source_seed;
  double similarity = 0.0;
  double rho = 0.0;
  ExpansionKind kind = ExpansionKind::similar_term;
};

struct MutualCandidate {
  std::string candidate;
  std::string seed;
  double similarity = 0.0;
};

// Candidate c pairs with seed s iff c is in the top-k of s and s is in the
// top-k of c. Seeds are never candidates. A candidate reached from several
// seeds keeps its most similar seed. Seeds without vectors are skipped with a
// warning; Errc::lookup when none have vectors.
std::vector<MutualCandidate> mutual_top_k(const WordVectors& vectors, const SeedTermList& seeds,
                                          std::size_t k = 10);

TokenCorpus tokenize_corpus(const Corpus& corpus);

// Up to `limit` 2-3 token phrases containing `term`, most frequent first.
// Phrases may not start or end on a stopword and may not contain URLs.
std::vector<std::string> harvest_noun_phrases(const TokenCorpus& corpus, std::string_view term,
                                              std::size_t limit = 5);
std::vector<std::string> harvest_noun_phrases(const Corpus& corpus, std::string_view term,
                                              std::size_t limit = 5);

// Share of the tweets containing `term` that also contain a seed term, using
// TermMatcher rules. Throws Errc::undefined_rho when no tweet contains `term`.
double election_significance(const TokenCorpus& corpus, std::string_view term,
                             const SeedTermList& seeds);
double election_significance(const Corpus& corpus, std::string_view term,
                             const SeedTermList& seeds);

struct ExpansionOptions {
  double rho_min = 0.3;
  std::size_t k = 10;
  std::size_t max_phrases = 5;

  void validate() const;
};

// Mutual top-k candidates plus their phrases, each scored by
// election_significance and kept when rho >= rho_min. Sorted by rho
// descending, then term.
std::vector<ExpandedTerm> expand_query(const SeedTermList& seeds, const Corpus& corpus,
                                       const WordVectors& vectors,
                                       const ExpansionOptions& options = {});

nlohmann::json expansion_to_json(const std::vector<ExpandedTerm>& terms);
std::vector<ExpandedTerm> expansion_from_json(const nlohmann::json& report);

}  // namespace ballot
