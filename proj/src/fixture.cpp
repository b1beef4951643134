#include <fstream>

#include "predelete/cascade.hpp"
#include "predelete/error.hpp"

namespace predelete {

namespace {

// Vocabulary order is byte order: "giveaway" = 0, "vermin" = 1. Both share a
// document frequency, so a text holding both maps to (1/sqrt2, 1/sqrt2).
Vocabulary fixture_vocabulary() {
  return Vocabulary({"giveaway", "vermin"}, {1, 1}, 4, VocabularyOptions{1, std::nullopt});
}

ModelBundle fixture_bundle(Setting setting, std::vector<std::vector<double>> weights, std::vector<double> bias) {
  LinearSvmModel svm;
  svm.dimension = 2;
  svm.n_classes = labels_for(setting).size();
  svm.weights = std::move(weights);
  svm.bias = std::move(bias);
  svm.epoch_objective.assign(svm.weights.size(), {});

  ModelBundle b{};
  b.vocabulary = fixture_vocabulary();
  b.model = std::move(svm);
  b.labels = labels_for(setting);
  b.setting = setting;
  b.metadata.corpus_fingerprint = "fixture";
  b.metadata.extra["origin"] = "fixture";
  // Round-trip once so the fingerprint matches what a saved copy would carry.
  return parse_bundle(serialize_bundle(b));
}

}  // namespace

CascadeBundle fixture_cascade() {
  auto deletion = fixture_bundle(Setting::Deletion, {{0.0, 2.0}}, {-1.0});
  auto disinfo = fixture_bundle(Setting::Disinfo, {{2.0, 2.0}}, {-1.0});
  auto reason = fixture_bundle(Setting::Reason, {{0.0, 2.0}, {0.0, 0.0}, {0.0, 0.0}, {2.0, 0.0}},
                               {-1.0, -1.0, -1.0, -1.0});
  return CascadeBundle(std::move(deletion), std::move(disinfo), std::move(reason));
}

std::filesystem::path write_fixture_cascade(const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const auto cascade = fixture_cascade();
  save_bundle(cascade.deletion(), dir / "deletion.bundle");
  save_bundle(cascade.disinfo(), dir / "disinfo.bundle");
  save_bundle(cascade.reason(), dir / "reason.bundle");
  CascadeManifest m{"deletion.bundle", "disinfo.bundle", "reason.bundle", cascade.thresholds()};
  const auto path = dir / "cascade.manifest";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << serialize_manifest(m);
  if (!out) throw DataError("cannot write " + path.string());
  return path;
}

}  // namespace predelete
