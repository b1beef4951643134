#include "predelete/eval.hpp"

#include <cfenv>
#include <cmath>
#include <cstdio>
#include <unordered_set>

#include "predelete/error.hpp"

namespace predelete {

std::uint64_t ConfusionMatrix::trace() const {
  std::uint64_t t = 0;
  for (std::size_t i = 0; i < k_; ++i) t += at(i, i);
  return t;
}

std::uint64_t ConfusionMatrix::row_sum(std::size_t gold) const {
  std::uint64_t s = 0;
  for (std::size_t j = 0; j < k_; ++j) s += at(gold, j);
  return s;
}

std::uint64_t ConfusionMatrix::column_sum(std::size_t predicted) const {
  std::uint64_t s = 0;
  for (std::size_t i = 0; i < k_; ++i) s += at(i, predicted);
  return s;
}

EvalReport evaluate_confusion(const ConfusionMatrix& confusion, const LabelMap& labels) {
  if (confusion.size() != labels.size()) throw DataError("confusion matrix does not match the label map");
  if (confusion.total() == 0) throw DataError("cannot evaluate zero items");

  EvalReport r;
  r.labels = labels;
  r.confusion = confusion;
  const auto n = static_cast<double>(confusion.total());
  r.accuracy = static_cast<double>(confusion.trace()) / n;

  for (std::size_t c = 0; c < labels.size(); ++c) {
    ClassMetrics m;
    const auto tp = static_cast<double>(confusion.at(c, c));
    const auto predicted = confusion.column_sum(c);
    m.support = confusion.row_sum(c);
    m.precision = predicted == 0 ? 0.0 : tp / static_cast<double>(predicted);
    m.recall = m.support == 0 ? 0.0 : tp / static_cast<double>(m.support);
    m.f1 = (m.precision + m.recall) == 0.0 ? 0.0 : 2.0 * m.precision * m.recall / (m.precision + m.recall);
    const double share = static_cast<double>(m.support) / n;
    r.weighted_precision += share * m.precision;
    r.weighted_f1 += share * m.f1;
    r.per_class.push_back(m);
  }
  // sum_c (support_c / n) * (tp_c / support_c) = trace / n; computed in that
  // form so it equals accuracy exactly.
  r.weighted_recall = r.accuracy;
  return r;
}

EvalReport evaluate(std::span<const std::size_t> gold, std::span<const std::size_t> predicted, const LabelMap& labels) {
  if (gold.size() != predicted.size())
    throw DataError("gold has " + std::to_string(gold.size()) + " labels but there are " +
                    std::to_string(predicted.size()) + " predictions");
  if (gold.empty()) throw DataError("cannot evaluate zero items");
  ConfusionMatrix cm(labels.size());
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (gold[i] >= labels.size() || predicted[i] >= labels.size())
      throw DataError("label index out of range at item " + std::to_string(i));
    cm.add(gold[i], predicted[i]);
  }
  return evaluate_confusion(cm, labels);
}

EvalReport evaluate(std::span<const std::size_t> gold, std::span<const Prediction> predictions,
                    const LabelMap& labels) {
  std::vector<std::size_t> predicted;
  predicted.reserve(predictions.size());
  for (const auto& p : predictions) predicted.push_back(p.label);
  return evaluate(gold, predicted, labels);
}

ErrorSlice error_slice(std::span<const std::size_t> gold, std::span<const std::size_t> predicted,
                       std::span<const std::string> ids, const LabelMap& labels, std::span<const std::string> from,
                       const std::string& to) {
  if (gold.size() != predicted.size() || gold.size() != ids.size())
    throw DataError("gold, predictions and ids differ in length");
  std::unordered_set<std::size_t> from_idx;
  for (const auto& name : from) from_idx.insert(labels.require(name));
  const auto to_idx = labels.require(to);
  ErrorSlice out;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (from_idx.count(gold[i]) && predicted[i] == to_idx) {
      ++out.count;
      out.ids.push_back(ids[i]);
    }
  }
  return out;
}

double round3(double v) {
  const int saved = std::fegetround();
  std::fesetround(FE_TONEAREST);
  const double r = std::nearbyint(v * 1000.0) / 1000.0;
  std::fesetround(saved);
  return r;
}

BaselineRow published_majority_baseline(Setting setting) {
  switch (setting) {
    case Setting::Deletion: return {0.496, 0.246, 0.496, 0.329};
    case Setting::Disinfo: return {0.817, 0.667, 0.817, 0.734};
    case Setting::Reason: return {0.537, 0.288, 0.537, 0.375};
  }
  return {};
}

std::vector<std::string> baseline_discrepancy_notes(Setting setting, const EvalReport& report) {
  const auto ref = published_majority_baseline(setting);
  std::vector<std::string> notes;
  auto check = [&](const char* name, double published, double computed) {
    if (std::fabs(published - computed) <= 0.0005) return;
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "%s: the published majority baseline for the %s setting lists %.3f; this test distribution "
                  "forces %.4f",
                  name, std::string(to_string(setting)).c_str(), published, computed);
    notes.emplace_back(buf);
  };
  check("accuracy", ref.accuracy, report.accuracy);
  check("weighted_precision", ref.precision, report.weighted_precision);
  check("weighted_recall", ref.recall, report.weighted_recall);
  check("weighted_f1", ref.f1, report.weighted_f1);
  return notes;
}

std::string format_report(const EvalReport& report) {
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-12s %6s %6s %6s %6s\n", "", "Acc", "P", "R", "F1");
  out += buf;
  std::snprintf(buf, sizeof buf, "%-12s %6.3f %6.3f %6.3f %6.3f\n", "weighted", round3(report.accuracy),
                round3(report.weighted_precision), round3(report.weighted_recall), round3(report.weighted_f1));
  out += buf;
  out += "\n";
  std::snprintf(buf, sizeof buf, "%-12s %9s %6s %6s %8s\n", "class", "precision", "recall", "f1", "support");
  out += buf;
  for (std::size_t c = 0; c < report.per_class.size(); ++c) {
    const auto& m = report.per_class[c];
    std::snprintf(buf, sizeof buf, "%-12s %9.3f %6.3f %6.3f %8llu\n", report.labels.name(c).c_str(),
                  round3(m.precision), round3(m.recall), round3(m.f1), static_cast<unsigned long long>(m.support));
    out += buf;
  }
  out += "\nconfusion (rows = gold, columns = predicted)\n";
  std::snprintf(buf, sizeof buf, "%-12s", "");
  out += buf;
  for (const auto& name : report.labels.names()) {
    std::snprintf(buf, sizeof buf, " %12s", name.c_str());
    out += buf;
  }
  out += "\n";
  for (std::size_t g = 0; g < report.confusion.size(); ++g) {
    std::snprintf(buf, sizeof buf, "%-12s", report.labels.name(g).c_str());
    out += buf;
    for (std::size_t p = 0; p < report.confusion.size(); ++p) {
      std::snprintf(buf, sizeof buf, " %12llu", static_cast<unsigned long long>(report.confusion.at(g, p)));
      out += buf;
    }
    out += "\n";
  }
  for (const auto& note : report.notes) out += "note: " + note + "\n";
  return out;
}

nlohmann::ordered_json to_json(const EvalReport& report) {
  nlohmann::ordered_json j;
  j["accuracy"] = report.accuracy;
  j["weighted_precision"] = report.weighted_precision;
  j["weighted_recall"] = report.weighted_recall;
  j["weighted_f1"] = report.weighted_f1;
  auto& per_class = j["per_class"] = nlohmann::ordered_json::object();
  for (std::size_t c = 0; c < report.per_class.size(); ++c) {
    const auto& m = report.per_class[c];
    per_class[report.labels.name(c)] = {
        {"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}, {"support", m.support}};
  }
  nlohmann::ordered_json cm;
  cm["labels"] = report.labels.names();
  cm["n"] = report.confusion.total();
  auto rows = nlohmann::ordered_json::array();
  for (std::size_t g = 0; g < report.confusion.size(); ++g) {
    auto row = nlohmann::ordered_json::array();
    for (std::size_t p = 0; p < report.confusion.size(); ++p) row.push_back(report.confusion.at(g, p));
    rows.push_back(row);
  }
  cm["matrix"] = rows;
  j["confusion"] = cm;
  if (!report.notes.empty()) j["notes"] = report.notes;
  return j;
}

}  // namespace predelete
