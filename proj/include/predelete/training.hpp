#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "predelete/bundle.hpp"
#include "predelete/eval.hpp"

namespace predelete {

enum class ModelKind { Majority, Svm, Forest };

std::optional<ModelKind> parse_model_kind(std::string_view s);  // majority | svm | rf

struct TrainOptions {
  Setting setting = Setting::Deletion;
  ModelKind kind = ModelKind::Svm;
  NormalizationConfig normalization;
  VocabularyOptions vocabulary;
  SvmHyperparameters svm;
  ForestHyperparameters forest;
  // Rerun r trains with model seed + r; the run with the best dev weighted F1
  // is kept (earliest on ties). More than one rerun requires a dev corpus.
  std::uint32_t reruns = 1;
  std::int64_t timestamp = 0;
};

struct RerunRecord {
  std::uint32_t rerun = 0;
  std::uint64_t seed = 0;
  std::optional<double> dev_weighted_f1;
};

struct TrainOutcome {
  ModelBundle bundle;
  std::vector<RerunRecord> reruns;
  std::size_t selected = 0;
};

// Records of the corpus that take part in the setting, featurized with a
// bundle's preprocessing and vocabulary.
struct LabeledSet {
  std::vector<std::string> ids;
  std::vector<std::size_t> gold;
  std::vector<DocumentVector> xs;
};

LabeledSet featurize_for_setting(const Corpus& corpus, Setting setting, const NormalizationConfig& normalization,
                                 const Vocabulary& vocabulary);

// The vocabulary is fitted on the setting's training records only.
TrainOutcome train_bundle(const Corpus& train, const Corpus* dev, const TrainOptions& options);

struct BundleEvaluation {
  LabeledSet data;
  std::vector<Prediction> predictions;
  EvalReport report;
};

// Adds baseline discrepancy notes when the bundle holds a majority model.
BundleEvaluation evaluate_bundle(const ModelBundle& bundle, const Corpus& test, Setting setting);

std::string format_rerun_log(const std::vector<RerunRecord>& reruns, std::size_t selected);

}  // namespace predelete
