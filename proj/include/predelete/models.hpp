#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "predelete/features.hpp"
#include "predelete/labels.hpp"

namespace predelete {

// Scores are margins (SVM) or vote shares (forest), not calibrated probabilities.
struct Prediction {
  std::size_t label = 0;
  std::vector<double> scores;
  bool operator==(const Prediction&) const = default;
};

// Argmax with lowest-index tie-break; throws DataError on empty or non-finite scores.
Prediction prediction_from_scores(std::vector<double> scores);

// ---- majority baseline ----

struct MajorityModel {
  std::size_t majority_class = 0;
  std::vector<std::uint64_t> class_counts;
  std::size_t dimension = 0;
};

MajorityModel train_majority(std::span<const std::size_t> labels, const LabelMap& label_map,
                             std::size_t dimension = 0);

// ---- linear SVM ----

struct SvmHyperparameters {
  double lambda = 1e-4;
  std::uint32_t epochs = 10;
  std::uint64_t seed = 1;
  // Inverse-frequency class weights, n / (k * n_c).
  bool balanced_class_weights = false;
};

// One separator for two classes (positive = class 0), otherwise one-vs-rest.
struct LinearSvmModel {
  SvmHyperparameters hp;
  std::size_t dimension = 0;
  std::size_t n_classes = 0;
  std::vector<std::vector<double>> weights;
  std::vector<double> bias;
  // Regularized hinge objective of each epoch's averaged iterate, per separator.
  std::vector<std::vector<double>> epoch_objective;

  std::vector<double> scores(const DocumentVector& x) const;
};

// Trains with stochastic subgradient steps eta_t = 1 / (lambda * t) on the
// L2-regularized hinge loss, visiting examples in a seeded per-epoch shuffle.
// The bias is an extra constant feature and is regularized with the weights.
// The returned separator is the average of the iterates of the final epoch.
LinearSvmModel train_svm(std::span<const DocumentVector> xs, std::span<const std::size_t> ys,
                         const LabelMap& label_map, const SvmHyperparameters& hp = {});

// (lambda/2)(|w|^2 + b^2) + (1/n) sum_i c_i max(0, 1 - y_i (w.x_i + b)), y_i in {-1, +1}.
double svm_objective(std::span<const double> weights, double bias, double lambda,
                     std::span<const DocumentVector> xs, std::span<const int> targets,
                     std::span<const double> sample_weights);

// ---- random forest ----

struct ForestHyperparameters {
  std::uint32_t n_trees = 100;
  std::uint32_t max_depth = 0;     // 0 = unlimited
  std::uint32_t max_features = 0;  // 0 = ceil(sqrt(dimension))
  bool bootstrap = true;
  std::uint64_t seed = 1;
  unsigned threads = 1;  // does not affect the result
};

struct TreeNode {
  std::int32_t feature = -1;  // -1 marks a leaf
  double threshold = 0.0;     // x[feature] <= threshold goes left
  std::uint32_t left = 0;
  std::uint32_t right = 0;
  std::uint32_t leaf = 0;  // leaf ordinal into leaf_counts
};

struct DecisionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root
  std::vector<double> leaf_counts;  // n_leaves x n_classes training class histogram

  std::span<const double> leaf_histogram(const DocumentVector& x, std::size_t n_classes) const;
};

struct ForestModel {
  ForestHyperparameters hp;
  std::size_t dimension = 0;
  std::size_t n_classes = 0;
  std::uint32_t features_per_split = 0;
  std::vector<DecisionTree> trees;

  // Mean normalized leaf histogram over trees; sums to 1.
  std::vector<double> scores(const DocumentVector& x) const;
};

// CART trees with Gini splits on bootstrap samples. Tree t draws from an RNG
// seeded with seed + t. If no sampled feature separates a node, more features
// are drawn until one does or all are exhausted.
ForestModel train_forest(std::span<const DocumentVector> xs, std::span<const std::size_t> ys,
                         const LabelMap& label_map, const ForestHyperparameters& hp = {});

// ---- uniform interface ----

using Model = std::variant<MajorityModel, LinearSvmModel, ForestModel>;

std::string_view model_kind(const Model& m);  // "majority" | "svm" | "rf"
std::size_t model_dimension(const Model& m);
std::size_t model_classes(const Model& m);

// Throws DataError if x.dimension differs from the model's.
Prediction predict(const Model& m, const DocumentVector& x);

}  // namespace predelete
