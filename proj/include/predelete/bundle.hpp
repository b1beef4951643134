#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "predelete/features.hpp"
#include "predelete/labels.hpp"
#include "predelete/models.hpp"
#include "predelete/textprep.hpp"

namespace predelete {

inline constexpr int kBundleFormatVersion = 1;

struct TrainingMetadata {
  std::string corpus_fingerprint;
  std::uint64_t seed = 0;
  std::int64_t timestamp = 0;  // seconds since epoch
  std::map<std::string, std::string> extra;

  bool operator==(const TrainingMetadata&) const = default;
};

// Self-contained trained classifier: serving runs exactly the training-time
// preprocessing and featurization.
struct ModelBundle {
  NormalizationConfig normalization;
  Vocabulary vocabulary;
  Model model;
  LabelMap labels;
  std::optional<Setting> setting;
  TrainingMetadata metadata;
  // FNV-1a of the serialized bytes; set by load_bundle/parse_bundle.
  std::string fingerprint;

  // Throws ModelError on dimension or label-count mismatch.
  void validate() const;
  DocumentVector featurize(std::string_view text) const;
  Prediction predict_text(std::string_view text) const;
};

std::string serialize_bundle(const ModelBundle& bundle);
ModelBundle parse_bundle(std::string_view bytes);

// Returns the written file's fingerprint.
std::string save_bundle(const ModelBundle& bundle, const std::filesystem::path& path);
ModelBundle load_bundle(const std::filesystem::path& path);

std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t v);

}  // namespace predelete
