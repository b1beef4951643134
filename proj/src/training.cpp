#include "predelete/training.hpp"

#include <cstdio>

#include "predelete/error.hpp"

namespace predelete {

std::optional<ModelKind> parse_model_kind(std::string_view s) {
  if (s == "majority") return ModelKind::Majority;
  if (s == "svm") return ModelKind::Svm;
  if (s == "rf") return ModelKind::Forest;
  return std::nullopt;
}

LabeledSet featurize_for_setting(const Corpus& corpus, Setting setting, const NormalizationConfig& normalization,
                                 const Vocabulary& vocabulary) {
  LabeledSet out;
  for (const auto& r : corpus) {
    const auto gold = gold_label(r, setting);
    if (!gold) continue;
    out.ids.push_back(r.id);
    out.gold.push_back(*gold);
    out.xs.push_back(vectorize(preprocess(r.text, normalization), vocabulary));
  }
  return out;
}

TrainOutcome train_bundle(const Corpus& train, const Corpus* dev, const TrainOptions& options) {
  options.normalization.validate();
  if (options.reruns == 0) throw UsageError("reruns must be at least 1");
  if (options.reruns > 1 && !dev) throw UsageError("selecting among reruns needs a dev corpus");

  const auto labels = labels_for(options.setting);
  const auto selected = select_for_setting(train, options.setting);
  if (selected.empty())
    throw DataError("no training records take part in the " + std::string(to_string(options.setting)) + " setting");

  auto vocab = fit_vocabulary(selected, options.normalization, options.vocabulary);
  const auto train_set = featurize_for_setting(selected, options.setting, options.normalization, vocab);
  std::optional<LabeledSet> dev_set;
  if (dev) {
    dev_set = featurize_for_setting(*dev, options.setting, options.normalization, vocab);
    if (dev_set->gold.empty()) throw DataError("no dev records take part in the setting");
  }

  const std::uint64_t base_seed = options.kind == ModelKind::Forest ? options.forest.seed : options.svm.seed;
  TrainOutcome outcome;
  std::optional<Model> best;
  double best_f1 = -1.0;
  for (std::uint32_t r = 0; r < options.reruns; ++r) {
    const std::uint64_t seed = base_seed + r;
    Model model;
    switch (options.kind) {
      case ModelKind::Majority:
        model = train_majority(train_set.gold, labels, vocab.size());
        break;
      case ModelKind::Svm: {
        auto hp = options.svm;
        hp.seed = seed;
        model = train_svm(train_set.xs, train_set.gold, labels, hp);
        break;
      }
      case ModelKind::Forest: {
        auto hp = options.forest;
        hp.seed = seed;
        model = train_forest(train_set.xs, train_set.gold, labels, hp);
        break;
      }
    }
    RerunRecord rec{r, seed, std::nullopt};
    if (dev_set) {
      std::vector<std::size_t> pred;
      pred.reserve(dev_set->xs.size());
      for (const auto& x : dev_set->xs) pred.push_back(predict(model, x).label);
      rec.dev_weighted_f1 = evaluate(dev_set->gold, pred, labels).weighted_f1;
    }
    const double f1 = rec.dev_weighted_f1.value_or(0.0);
    if (!best || f1 > best_f1) {
      best = std::move(model);
      best_f1 = f1;
      outcome.selected = r;
    }
    outcome.reruns.push_back(rec);
  }

  auto& b = outcome.bundle;
  b.normalization = options.normalization;
  b.vocabulary = std::move(vocab);
  b.model = std::move(*best);
  b.labels = labels;
  b.setting = options.setting;
  b.metadata.corpus_fingerprint = hex64(train.fingerprint());
  b.metadata.seed = outcome.reruns[outcome.selected].seed;
  b.metadata.timestamp = options.timestamp;
  b.metadata.extra["n_train"] = std::to_string(train_set.gold.size());
  b.metadata.extra["reruns"] = std::to_string(options.reruns);
  b.metadata.extra["selected_rerun"] = std::to_string(outcome.selected);
  b.validate();
  return outcome;
}

BundleEvaluation evaluate_bundle(const ModelBundle& bundle, const Corpus& test, Setting setting) {
  if (bundle.labels != labels_for(setting))
    throw ModelError("bundle labels do not match the " + std::string(to_string(setting)) + " setting");
  BundleEvaluation ev;
  ev.data = featurize_for_setting(test, setting, bundle.normalization, bundle.vocabulary);
  if (ev.data.gold.empty()) throw DataError("no test records take part in the setting");
  ev.predictions.reserve(ev.data.xs.size());
  for (const auto& x : ev.data.xs) ev.predictions.push_back(predict(bundle.model, x));
  ev.report = evaluate(ev.data.gold, ev.predictions, bundle.labels);
  if (std::holds_alternative<MajorityModel>(bundle.model))
    ev.report.notes = baseline_discrepancy_notes(setting, ev.report);
  return ev;
}

std::string format_rerun_log(const std::vector<RerunRecord>& reruns, std::size_t selected) {
  std::string out = "rerun\tseed\tdev_weighted_f1\tselected\n";
  char buf[128];
  for (const auto& r : reruns) {
    std::snprintf(buf, sizeof buf, "%u\t%llu\t", r.rerun, static_cast<unsigned long long>(r.seed));
    out += buf;
    if (r.dev_weighted_f1) {
      std::snprintf(buf, sizeof buf, "%.6f", *r.dev_weighted_f1);
      out += buf;
    } else {
      out += "-";
    }
    out += r.rerun == selected ? "\tyes\n" : "\tno\n";
  }
  return out;
}

}  // namespace predelete
