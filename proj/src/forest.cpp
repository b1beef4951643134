#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

#include "predelete/error.hpp"
#include "predelete/models.hpp"
#include "predelete/rng.hpp"

namespace predelete {

namespace {

double gini(std::span<const double> counts, double total) {
  if (total <= 0.0) return 0.0;
  double sum_sq = 0.0;
  for (double c : counts) sum_sq += c * c;
  return 1.0 - sum_sq / (total * total);
}

struct SplitCandidate {
  std::int32_t feature = -1;
  double threshold = 0.0;
  double impurity = std::numeric_limits<double>::infinity();
};

class TreeBuilder {
 public:
  TreeBuilder(std::span<const DocumentVector> xs, std::span<const std::size_t> ys, std::size_t n_classes,
              std::size_t dimension, std::uint32_t features_per_split, std::uint32_t max_depth, Rng rng)
      : xs_(xs),
        ys_(ys),
        n_classes_(n_classes),
        dimension_(dimension),
        mtry_(features_per_split),
        max_depth_(max_depth),
        rng_(std::move(rng)),
        feature_pool_(dimension),
        slot_(dimension, -1) {
    std::iota(feature_pool_.begin(), feature_pool_.end(), std::uint32_t{0});
  }

  DecisionTree build(std::vector<std::uint32_t> samples) {
    samples_ = std::move(samples);
    DecisionTree tree;
    struct Task {
      std::uint32_t node;
      std::size_t begin, end;
      std::uint32_t depth;
    };
    tree.nodes.emplace_back();
    std::vector<Task> stack{{0, 0, samples_.size(), 0}};
    std::vector<double> counts(n_classes_);
    while (!stack.empty()) {
      const Task task = stack.back();
      stack.pop_back();
      class_counts(task.begin, task.end, counts);
      const auto n = static_cast<double>(task.end - task.begin);
      const bool pure = std::count_if(counts.begin(), counts.end(), [](double c) { return c > 0.0; }) <= 1;
      const bool depth_capped = max_depth_ != 0 && task.depth >= max_depth_;

      SplitCandidate split;
      if (!pure && !depth_capped && n >= 2.0) split = find_split(task.begin, task.end, counts);

      if (split.feature < 0) {
        auto& node = tree.nodes[task.node];
        node.feature = -1;
        node.leaf = static_cast<std::uint32_t>(tree.leaf_counts.size() / n_classes_);
        tree.leaf_counts.insert(tree.leaf_counts.end(), counts.begin(), counts.end());
        continue;
      }

      const auto mid = partition(task.begin, task.end, split);
      const auto left = static_cast<std::uint32_t>(tree.nodes.size());
      tree.nodes.emplace_back();
      tree.nodes.emplace_back();
      auto& node = tree.nodes[task.node];
      node.feature = split.feature;
      node.threshold = split.threshold;
      node.left = left;
      node.right = left + 1;
      // Right pushed first so the left subtree is expanded first.
      stack.push_back({left + 1, mid, task.end, task.depth + 1});
      stack.push_back({left, task.begin, mid, task.depth + 1});
    }
    return tree;
  }

 private:
  void class_counts(std::size_t begin, std::size_t end, std::vector<double>& counts) const {
    std::fill(counts.begin(), counts.end(), 0.0);
    for (std::size_t i = begin; i < end; ++i) counts[ys_[samples_[i]]] += 1.0;
  }

  SplitCandidate find_split(std::size_t begin, std::size_t end, std::span<const double> node_counts) {
    SplitCandidate best;
    std::size_t drawn = 0;
    while (drawn < dimension_ && best.feature < 0) {
      const std::size_t batch_end = std::min<std::size_t>(dimension_, drawn + mtry_);
      // Partial Fisher-Yates: positions [drawn, batch_end) receive fresh draws.
      for (std::size_t k = drawn; k < batch_end; ++k) {
        const auto j = k + static_cast<std::size_t>(uniform_below(rng_, dimension_ - k));
        std::swap(feature_pool_[k], feature_pool_[j]);
      }
      evaluate_batch(begin, end, node_counts, drawn, batch_end, best);
      drawn = batch_end;
    }
    return best;
  }

  void evaluate_batch(std::size_t begin, std::size_t end, std::span<const double> node_counts, std::size_t from,
                      std::size_t to, SplitCandidate& best) {
    const std::size_t width = to - from;
    if (buckets_.size() < width) buckets_.resize(width);
    for (std::size_t k = 0; k < width; ++k) {
      buckets_[k].clear();
      slot_[feature_pool_[from + k]] = static_cast<std::int32_t>(k);
    }
    for (std::size_t i = begin; i < end; ++i) {
      const auto s = samples_[i];
      for (const auto& e : xs_[s].entries)
        if (const auto k = slot_[e.index]; k >= 0 && e.weight != 0.0)
          buckets_[static_cast<std::size_t>(k)].push_back({e.weight, static_cast<std::uint32_t>(ys_[s])});
    }
    for (std::size_t k = 0; k < width; ++k) slot_[feature_pool_[from + k]] = -1;

    const double n = static_cast<double>(end - begin);
    std::vector<double> left(n_classes_), right(n_classes_), zero_counts(n_classes_);
    for (std::size_t k = 0; k < width; ++k) {
      auto& bucket = buckets_[k];
      if (bucket.empty()) continue;  // all zero: constant feature
      std::sort(bucket.begin(), bucket.end(),
                [](const Value& a, const Value& b) { return a.v < b.v || (a.v == b.v && a.y < b.y); });
      const std::size_t zeros = static_cast<std::size_t>(n) - bucket.size();
      if (zeros == 0 && bucket.front().v == bucket.back().v) continue;

      // Class counts of implicit zeros = node counts minus non-zero entries.
      std::copy(node_counts.begin(), node_counts.end(), zero_counts.begin());
      for (const auto& b : bucket) zero_counts[b.y] -= 1.0;

      // Walk values in ascending order with the zero block inserted in place.
      std::fill(left.begin(), left.end(), 0.0);
      double n_left = 0.0;
      bool zero_done = zeros == 0;
      double prev = 0.0;
      bool has_prev = false;
      auto consider = [&](double next_value) {
        if (!has_prev || next_value == prev) return;
        for (std::size_t c = 0; c < n_classes_; ++c) right[c] = node_counts[c] - left[c];
        const double n_right = n - n_left;
        const double impurity = (n_left * gini(left, n_left) + n_right * gini(right, n_right)) / n;
        if (impurity < best.impurity) {
          double threshold = prev + (next_value - prev) / 2.0;
          if (!(threshold < next_value)) threshold = prev;
          best = {static_cast<std::int32_t>(feature_pool_[from + k]), threshold, impurity};
        }
      };
      auto add_zero_block = [&]() {
        consider(0.0);
        for (std::size_t c = 0; c < n_classes_; ++c) left[c] += zero_counts[c];
        n_left += static_cast<double>(zeros);
        prev = 0.0;
        has_prev = true;
        zero_done = true;
      };
      for (const auto& b : bucket) {
        if (!zero_done && b.v > 0.0) add_zero_block();
        consider(b.v);
        left[b.y] += 1.0;
        n_left += 1.0;
        prev = b.v;
        has_prev = true;
      }
      if (!zero_done) add_zero_block();
    }
  }

  std::size_t partition(std::size_t begin, std::size_t end, const SplitCandidate& split) {
    auto first = samples_.begin() + static_cast<std::ptrdiff_t>(begin);
    auto last = samples_.begin() + static_cast<std::ptrdiff_t>(end);
    auto mid = std::stable_partition(first, last, [&](std::uint32_t s) {
      return xs_[s].value(static_cast<std::uint32_t>(split.feature)) <= split.threshold;
    });
    return static_cast<std::size_t>(mid - samples_.begin());
  }

  struct Value {
    double v;
    std::uint32_t y;
  };

  std::span<const DocumentVector> xs_;
  std::span<const std::size_t> ys_;
  std::size_t n_classes_;
  std::size_t dimension_;
  std::uint32_t mtry_;
  std::uint32_t max_depth_;
  Rng rng_;
  std::vector<std::uint32_t> samples_;
  std::vector<std::uint32_t> feature_pool_;
  std::vector<std::int32_t> slot_;
  std::vector<std::vector<Value>> buckets_;
};

}  // namespace

std::span<const double> DecisionTree::leaf_histogram(const DocumentVector& x, std::size_t n_classes) const {
  std::size_t i = 0;
  while (nodes[i].feature >= 0) {
    const auto& node = nodes[i];
    i = x.value(static_cast<std::uint32_t>(node.feature)) <= node.threshold ? node.left : node.right;
  }
  return std::span<const double>(leaf_counts).subspan(nodes[i].leaf * n_classes, n_classes);
}

std::vector<double> ForestModel::scores(const DocumentVector& x) const {
  std::vector<double> out(n_classes, 0.0);
  for (const auto& tree : trees) {
    auto hist = tree.leaf_histogram(x, n_classes);
    const double total = std::accumulate(hist.begin(), hist.end(), 0.0);
    for (std::size_t c = 0; c < n_classes; ++c) out[c] += hist[c] / total;
  }
  for (auto& s : out) s /= static_cast<double>(trees.size());
  return out;
}

ForestModel train_forest(std::span<const DocumentVector> xs, std::span<const std::size_t> ys,
                         const LabelMap& label_map, const ForestHyperparameters& hp) {
  if (xs.empty()) throw DataError("training set is empty");
  if (xs.size() != ys.size()) throw DataError("training vectors and labels differ in length");
  std::vector<bool> present(label_map.size(), false);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i].dimension != xs.front().dimension) throw DataError("training vectors do not share one dimension");
    if (ys[i] >= label_map.size()) throw DataError("training label index out of range");
    present[ys[i]] = true;
  }
  if (std::count(present.begin(), present.end(), true) < 2)
    throw DataError("training data contains a single class; at least two are required");
  if (hp.n_trees == 0) throw UsageError("forest needs at least one tree");

  ForestModel model;
  model.hp = hp;
  model.dimension = xs.front().dimension;
  model.n_classes = label_map.size();
  model.features_per_split =
      hp.max_features != 0
          ? std::min<std::uint32_t>(hp.max_features, static_cast<std::uint32_t>(std::max<std::size_t>(1, model.dimension)))
          : static_cast<std::uint32_t>(std::ceil(std::sqrt(static_cast<double>(model.dimension))));
  model.features_per_split = std::max<std::uint32_t>(1, model.features_per_split);
  model.trees.resize(hp.n_trees);

  auto grow = [&](std::uint32_t t) {
    Rng rng(hp.seed + t);
    std::vector<std::uint32_t> samples(xs.size());
    if (hp.bootstrap) {
      for (auto& s : samples) s = static_cast<std::uint32_t>(uniform_below(rng, xs.size()));
    } else {
      std::iota(samples.begin(), samples.end(), std::uint32_t{0});
    }
    TreeBuilder builder(xs, ys, model.n_classes, model.dimension, model.features_per_split, hp.max_depth,
                        std::move(rng));
    model.trees[t] = builder.build(std::move(samples));
  };

  const unsigned workers = std::max(1u, std::min(hp.threads, hp.n_trees));
  if (workers == 1) {
    for (std::uint32_t t = 0; t < hp.n_trees; ++t) grow(t);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (std::uint32_t t = w; t < hp.n_trees; t += workers) grow(t);
      });
    for (auto& th : pool) th.join();
  }
  return model;
}

}  // namespace predelete
