#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "predelete/labels.hpp"
#include "predelete/models.hpp"

namespace predelete {

// Rows are gold classes, columns predicted classes.
class ConfusionMatrix {
 public:
  ConfusionMatrix() = default;
  explicit ConfusionMatrix(std::size_t n_classes) : k_(n_classes), cells_(n_classes * n_classes, 0) {}

  void add(std::size_t gold, std::size_t predicted) {
    ++cells_.at(gold * k_ + predicted);
    ++total_;
  }
  std::uint64_t at(std::size_t gold, std::size_t predicted) const { return cells_.at(gold * k_ + predicted); }
  std::size_t size() const noexcept { return k_; }
  std::uint64_t total() const noexcept { return total_; }
  std::uint64_t trace() const;
  std::uint64_t row_sum(std::size_t gold) const;
  std::uint64_t column_sum(std::size_t predicted) const;

 private:
  std::size_t k_ = 0;
  std::vector<std::uint64_t> cells_;
  std::uint64_t total_ = 0;
};

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::uint64_t support = 0;
};

struct EvalReport {
  LabelMap labels;
  double accuracy = 0.0;
  double weighted_precision = 0.0;
  double weighted_recall = 0.0;
  double weighted_f1 = 0.0;
  std::vector<ClassMetrics> per_class;
  ConfusionMatrix confusion;
  std::vector<std::string> notes;
};

// Precision of a never-predicted class and recall of a zero-support class are
// 0; F1 is 0 when both precision and recall are 0. Weighted metrics are
// support-weighted means over gold classes.
EvalReport evaluate(std::span<const std::size_t> gold, std::span<const std::size_t> predicted,
                    const LabelMap& labels);
EvalReport evaluate(std::span<const std::size_t> gold, std::span<const Prediction> predictions,
                    const LabelMap& labels);

EvalReport evaluate_confusion(const ConfusionMatrix& confusion, const LabelMap& labels);

struct ErrorSlice {
  std::size_t count = 0;
  std::vector<std::string> ids;
};

// Items whose gold label is in `from` and whose prediction is `to`.
ErrorSlice error_slice(std::span<const std::size_t> gold, std::span<const std::size_t> predicted,
                       std::span<const std::string> ids, const LabelMap& labels,
                       std::span<const std::string> from, const std::string& to);

// Three decimals, ties to even.
double round3(double v);

// Published majority-baseline rows (accuracy, P, R, F1) for each setting.
struct BaselineRow {
  double accuracy, precision, recall, f1;
};
BaselineRow published_majority_baseline(Setting setting);

// Compares a majority-baseline report against the published row and returns
// a note for every metric differing by more than 0.0005.
std::vector<std::string> baseline_discrepancy_notes(Setting setting, const EvalReport& report);

std::string format_report(const EvalReport& report);
nlohmann::ordered_json to_json(const EvalReport& report);

}  // namespace predelete
