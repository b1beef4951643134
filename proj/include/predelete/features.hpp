#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "predelete/corpus.hpp"
#include "predelete/textprep.hpp"

namespace predelete {

struct FeatureEntry {
  std::uint32_t index = 0;
  double weight = 0.0;
  bool operator==(const FeatureEntry&) const = default;
};

// Sparse vector with strictly increasing indices. Non-empty vectors produced by
// vectorize() have unit L2 norm.
struct DocumentVector {
  std::size_t dimension = 0;
  std::vector<FeatureEntry> entries;

  bool empty() const noexcept { return entries.empty(); }
  // 0 for indices not present.
  double value(std::uint32_t index) const;
  double norm() const;
  bool operator==(const DocumentVector&) const = default;
};

struct VocabularyOptions {
  std::uint32_t min_df = 2;
  std::optional<std::uint32_t> max_features = 50000;
};

// Terms are sorted byte-lexicographically; a term's index is its rank.
class Vocabulary {
 public:
  Vocabulary() = default;
  // Rebuilds a fitted vocabulary (used when loading bundles).
  Vocabulary(std::vector<std::string> terms, std::vector<std::uint64_t> document_frequency,
             std::uint64_t n_documents, VocabularyOptions options);

  std::size_t size() const noexcept { return terms_.size(); }
  const std::vector<std::string>& terms() const noexcept { return terms_; }
  const std::vector<std::uint64_t>& document_frequency() const noexcept { return df_; }
  std::uint64_t n_documents() const noexcept { return n_documents_; }
  const VocabularyOptions& options() const noexcept { return options_; }

  std::optional<std::uint32_t> find(std::string_view term) const;
  // Smoothed: ln((1 + n) / (1 + df)) + 1.
  double idf(std::uint32_t index) const;

 private:
  std::vector<std::string> terms_;
  std::vector<std::uint64_t> df_;
  std::uint64_t n_documents_ = 0;
  VocabularyOptions options_;
  std::unordered_map<std::string, std::uint32_t> index_;
};

// Unigrams followed by bigrams joined with '_', in document order.
std::vector<std::string> ngram_terms(const TokenSequence& tokens);

Vocabulary fit_vocabulary(std::span<const TokenSequence> documents, VocabularyOptions options = {});
Vocabulary fit_vocabulary(const Corpus& corpus, const NormalizationConfig& config, VocabularyOptions options = {});

// tf * idf with raw term counts, then L2-normalized. Out-of-vocabulary terms are
// ignored; an all-OOV document yields an empty (zero) vector.
DocumentVector vectorize(const TokenSequence& tokens, const Vocabulary& vocab);

}  // namespace predelete
