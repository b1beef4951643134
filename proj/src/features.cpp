#include "predelete/features.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_set>

#include "predelete/error.hpp"

namespace predelete {

double DocumentVector::value(std::uint32_t index) const {
  auto it = std::lower_bound(entries.begin(), entries.end(), index,
                             [](const FeatureEntry& e, std::uint32_t i) { return e.index < i; });
  return (it != entries.end() && it->index == index) ? it->weight : 0.0;
}

double DocumentVector::norm() const {
  double sum = 0.0;
  for (const auto& e : entries) sum += e.weight * e.weight;
  return std::sqrt(sum);
}

Vocabulary::Vocabulary(std::vector<std::string> terms, std::vector<std::uint64_t> document_frequency,
                       std::uint64_t n_documents, VocabularyOptions options)
    : terms_(std::move(terms)), df_(std::move(document_frequency)), n_documents_(n_documents), options_(options) {
  if (terms_.size() != df_.size()) throw ModelError("vocabulary term and document-frequency counts differ");
  if (options_.min_df < 1) throw UsageError("min_df must be at least 1");
  index_.reserve(terms_.size());
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (i > 0 && !(terms_[i - 1] < terms_[i])) throw ModelError("vocabulary terms are not strictly sorted");
    index_.emplace(terms_[i], static_cast<std::uint32_t>(i));
  }
}

std::optional<std::uint32_t> Vocabulary::find(std::string_view term) const {
  auto it = index_.find(std::string(term));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

double Vocabulary::idf(std::uint32_t index) const {
  return std::log((1.0 + static_cast<double>(n_documents_)) / (1.0 + static_cast<double>(df_[index]))) + 1.0;
}

std::vector<std::string> ngram_terms(const TokenSequence& tokens) {
  std::vector<std::string> terms(tokens.begin(), tokens.end());
  for (std::size_t i = 1; i < tokens.size(); ++i) terms.push_back(tokens[i - 1] + "_" + tokens[i]);
  return terms;
}

Vocabulary fit_vocabulary(std::span<const TokenSequence> documents, VocabularyOptions options) {
  if (documents.empty()) throw DataError("cannot fit a vocabulary on an empty corpus");
  if (options.min_df < 1) throw UsageError("min_df must be at least 1");

  std::map<std::string, std::uint64_t> df;
  for (const auto& doc : documents) {
    std::unordered_set<std::string> seen;
    for (auto& term : ngram_terms(doc))
      if (seen.insert(term).second) ++df[term];
  }

  std::vector<std::pair<std::string, std::uint64_t>> kept;
  for (auto& [term, count] : df)
    if (count >= options.min_df) kept.emplace_back(term, count);

  if (options.max_features && kept.size() > *options.max_features) {
    // Highest df first; equal df falls back to lexicographic order (kept is already sorted).
    std::stable_sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    kept.resize(*options.max_features);
    std::sort(kept.begin(), kept.end());
  }

  std::vector<std::string> terms;
  std::vector<std::uint64_t> freqs;
  terms.reserve(kept.size());
  freqs.reserve(kept.size());
  for (auto& [term, count] : kept) {
    terms.push_back(std::move(term));
    freqs.push_back(count);
  }
  return Vocabulary(std::move(terms), std::move(freqs), documents.size(), options);
}

Vocabulary fit_vocabulary(const Corpus& corpus, const NormalizationConfig& config, VocabularyOptions options) {
  std::vector<TokenSequence> docs;
  docs.reserve(corpus.size());
  for (const auto& r : corpus) docs.push_back(preprocess(r.text, config));
  return fit_vocabulary(docs, options);
}

DocumentVector vectorize(const TokenSequence& tokens, const Vocabulary& vocab) {
  std::map<std::uint32_t, double> counts;
  for (const auto& term : ngram_terms(tokens))
    if (auto idx = vocab.find(term)) counts[*idx] += 1.0;

  DocumentVector v;
  v.dimension = vocab.size();
  v.entries.reserve(counts.size());
  double sq = 0.0;
  for (auto [idx, tf] : counts) {
    const double w = tf * vocab.idf(idx);
    v.entries.push_back({idx, w});
    sq += w * w;
  }
  if (sq > 0.0) {
    const double inv = 1.0 / std::sqrt(sq);
    for (auto& e : v.entries) e.weight *= inv;
  }
  return v;
}

}  // namespace predelete
