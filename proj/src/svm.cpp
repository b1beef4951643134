#include <algorithm>
#include <cmath>
#include <numeric>

#include "predelete/error.hpp"
#include "predelete/models.hpp"
#include "predelete/rng.hpp"

namespace predelete {

namespace {

void check_training_set(std::span<const DocumentVector> xs, std::span<const std::size_t> ys,
                        const LabelMap& label_map) {
  if (xs.empty()) throw DataError("training set is empty");
  if (xs.size() != ys.size()) throw DataError("training vectors and labels differ in length");
  const auto dim = xs.front().dimension;
  std::vector<bool> present(label_map.size(), false);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i].dimension != dim) throw DataError("training vectors do not share one dimension");
    if (ys[i] >= label_map.size()) throw DataError("training label index out of range");
    present[ys[i]] = true;
  }
  if (std::count(present.begin(), present.end(), true) < 2)
    throw DataError("training data contains a single class; at least two are required");
}

double sparse_dot(std::span<const double> dense, const DocumentVector& x) {
  double s = 0.0;
  for (const auto& e : x.entries) s += dense[e.index] * e.weight;
  return s;
}

// Averaged stochastic subgradient descent for one binary separator. The
// iterate is kept as scale * v so the (1 - 1/t) shrink is O(1) per step;
// the running sum of iterates uses the same trick:
//   sum_t w_t = base + S * v - B,  S = sum of scales, B += S_prev * delta.
struct BinarySeparator {
  std::vector<double> weights;
  double bias = 0.0;
  std::vector<double> objective;
};

BinarySeparator train_separator(std::span<const DocumentVector> xs, std::span<const int> targets,
                                std::span<const double> sample_weights, std::size_t dim,
                                const SvmHyperparameters& hp, Rng& rng) {
  const std::size_t n = xs.size();
  const std::size_t bias_slot = dim;
  std::vector<double> v(dim + 1, 0.0);
  double scale = 1.0;

  std::vector<double> base(dim + 1, 0.0);
  std::vector<double> correction(dim + 1, 0.0);
  double scale_sum = 0.0;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});

  BinarySeparator out;
  std::vector<double> avg(dim + 1, 0.0);
  std::uint64_t t = 0;
  for (std::uint32_t epoch = 0; epoch < hp.epochs; ++epoch) {
    shuffle(std::span<std::size_t>(order), rng);
    std::fill(base.begin(), base.end(), 0.0);
    std::fill(correction.begin(), correction.end(), 0.0);
    scale_sum = 0.0;

    for (auto i : order) {
      ++t;
      const double eta = 1.0 / (hp.lambda * static_cast<double>(t));
      const double margin = targets[i] * scale * (sparse_dot(v, xs[i]) + v[bias_slot]);
      if (t == 1) {
        std::fill(v.begin(), v.end(), 0.0);
        scale = 1.0;
      } else {
        scale *= 1.0 - 1.0 / static_cast<double>(t);
      }
      if (margin < 1.0) {
        const double step = eta * targets[i] * sample_weights[i] / scale;
        for (const auto& e : xs[i].entries) {
          const double delta = step * e.weight;
          correction[e.index] += scale_sum * delta;
          v[e.index] += delta;
        }
        correction[bias_slot] += scale_sum * step;
        v[bias_slot] += step;
      }
      scale_sum += scale;

      if (scale < 1e-9) {
        for (std::size_t k = 0; k <= dim; ++k) {
          base[k] += scale_sum * v[k] - correction[k];
          v[k] *= scale;
          correction[k] = 0.0;
        }
        scale = 1.0;
        scale_sum = 0.0;
      }
    }

    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t k = 0; k <= dim; ++k) avg[k] = (base[k] + scale_sum * v[k] - correction[k]) * inv_n;
    out.objective.push_back(svm_objective(std::span<const double>(avg.data(), dim), avg[bias_slot], hp.lambda, xs,
                                          targets, sample_weights));
  }
  out.weights.assign(avg.begin(), avg.begin() + static_cast<std::ptrdiff_t>(dim));
  out.bias = avg[bias_slot];
  return out;
}

}  // namespace

double svm_objective(std::span<const double> weights, double bias, double lambda, std::span<const DocumentVector> xs,
                     std::span<const int> targets, std::span<const double> sample_weights) {
  double reg = bias * bias;
  for (double w : weights) reg += w * w;
  double loss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double m = targets[i] * (sparse_dot(weights, xs[i]) + bias);
    loss += sample_weights[i] * std::max(0.0, 1.0 - m);
  }
  return 0.5 * lambda * reg + loss / static_cast<double>(xs.size());
}

std::vector<double> LinearSvmModel::scores(const DocumentVector& x) const {
  if (n_classes == 2) {
    const double m = sparse_dot(weights[0], x) + bias[0];
    return {m, -m};
  }
  std::vector<double> out(n_classes);
  for (std::size_t c = 0; c < n_classes; ++c) out[c] = sparse_dot(weights[c], x) + bias[c];
  return out;
}

LinearSvmModel train_svm(std::span<const DocumentVector> xs, std::span<const std::size_t> ys,
                         const LabelMap& label_map, const SvmHyperparameters& hp) {
  check_training_set(xs, ys, label_map);
  if (!(hp.lambda > 0.0) || !std::isfinite(hp.lambda)) throw UsageError("SVM lambda must be positive");
  if (hp.epochs == 0) throw UsageError("SVM epochs must be at least 1");

  const std::size_t k = label_map.size();
  const std::size_t n = xs.size();
  std::vector<double> sample_weights(n, 1.0);
  if (hp.balanced_class_weights) {
    std::vector<std::size_t> counts(k, 0);
    for (auto y : ys) ++counts[y];
    for (std::size_t i = 0; i < n; ++i)
      sample_weights[i] = static_cast<double>(n) / (static_cast<double>(k) * static_cast<double>(counts[ys[i]]));
  }

  LinearSvmModel model;
  model.hp = hp;
  model.dimension = xs.front().dimension;
  model.n_classes = k;
  const std::size_t separators = k == 2 ? 1 : k;
  std::vector<int> targets(n);
  for (std::size_t c = 0; c < separators; ++c) {
    for (std::size_t i = 0; i < n; ++i) targets[i] = ys[i] == c ? 1 : -1;
    Rng rng(mix_seed(hp.seed, c));
    auto sep = train_separator(xs, targets, sample_weights, model.dimension, hp, rng);
    model.weights.push_back(std::move(sep.weights));
    model.bias.push_back(sep.bias);
    model.epoch_objective.push_back(std::move(sep.objective));
  }
  return model;
}

}  // namespace predelete
