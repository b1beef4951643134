#include <cmath>

#include "predelete/error.hpp"
#include "predelete/models.hpp"

namespace predelete {

Prediction prediction_from_scores(std::vector<double> scores) {
  if (scores.empty()) throw DataError("prediction has no scores");
  std::size_t best = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!std::isfinite(scores[i])) throw DataError("prediction score is not finite");
    if (scores[i] > scores[best]) best = i;
  }
  return Prediction{best, std::move(scores)};
}

MajorityModel train_majority(std::span<const std::size_t> labels, const LabelMap& label_map, std::size_t dimension) {
  if (labels.empty()) throw DataError("cannot train a majority model on an empty training set");
  if (label_map.size() == 0) throw DataError("label map is empty");
  MajorityModel m;
  m.dimension = dimension;
  m.class_counts.assign(label_map.size(), 0);
  for (auto y : labels) {
    if (y >= label_map.size()) throw DataError("training label index out of range");
    ++m.class_counts[y];
  }
  for (std::size_t c = 1; c < m.class_counts.size(); ++c)
    if (m.class_counts[c] > m.class_counts[m.majority_class]) m.majority_class = c;
  return m;
}

std::string_view model_kind(const Model& m) {
  switch (m.index()) {
    case 0: return "majority";
    case 1: return "svm";
    default: return "rf";
  }
}

std::size_t model_dimension(const Model& m) {
  return std::visit([](const auto& v) { return v.dimension; }, m);
}

std::size_t model_classes(const Model& m) {
  if (const auto* maj = std::get_if<MajorityModel>(&m)) return maj->class_counts.size();
  if (const auto* svm = std::get_if<LinearSvmModel>(&m)) return svm->n_classes;
  return std::get<ForestModel>(m).n_classes;
}

Prediction predict(const Model& m, const DocumentVector& x) {
  if (x.dimension != model_dimension(m))
    throw DataError("vector dimension " + std::to_string(x.dimension) + " does not match model dimension " +
                    std::to_string(model_dimension(m)));
  if (const auto* maj = std::get_if<MajorityModel>(&m)) {
    std::vector<double> scores(maj->class_counts.size(), 0.0);
    scores[maj->majority_class] = 1.0;
    return Prediction{maj->majority_class, std::move(scores)};
  }
  if (const auto* svm = std::get_if<LinearSvmModel>(&m)) return prediction_from_scores(svm->scores(x));
  return prediction_from_scores(std::get<ForestModel>(m).scores(x));
}

}  // namespace predelete
