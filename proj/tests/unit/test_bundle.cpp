#include <doctest.h>

#include <fstream>

#include "../support.hpp"
#include "predelete/bundle.hpp"
#include "predelete/error.hpp"
#include "predelete/training.hpp"

using namespace predelete;

namespace {

ModelBundle trained(ModelKind kind, std::uint64_t seed = 1) {
  const auto corpus = testsupport::synthetic_reason_corpus(400, 31);
  TrainOptions opt;
  opt.setting = Setting::Reason;
  opt.kind = kind;
  opt.forest.n_trees = 8;
  opt.svm.seed = seed;
  opt.forest.seed = seed;
  opt.timestamp = 1700000000;
  return train_bundle(corpus, nullptr, opt).bundle;
}

std::vector<std::string> probe_texts(std::size_t n) {
  const auto corpus = testsupport::synthetic_reason_corpus(n, 777);
  std::vector<std::string> out;
  for (const auto& r : corpus) out.push_back(r.text);
  out.push_back("entirely unseen words here");
  return out;
}

}  // namespace

TEST_CASE("fnv-1a reference values") {
  CHECK(hex64(fnv1a64("")) == "cbf29ce484222325");
  CHECK(hex64(fnv1a64("a")) == "af63dc4c8601ec8c");
  CHECK(hex64(fnv1a64("foobar")) == "85944171f73967e8");
}

TEST_CASE("save and load give identical predictions") {
  testsupport::TempDir dir;
  const auto probe = probe_texts(1000);
  for (auto kind : {ModelKind::Majority, ModelKind::Svm, ModelKind::Forest}) {
    const auto bundle = trained(kind);
    const auto path = dir / "m.bundle";
    const auto fp = save_bundle(bundle, path);
    const auto back = load_bundle(path);
    CHECK(back.fingerprint == fp);
    CHECK(back.labels == bundle.labels);
    CHECK(back.setting == bundle.setting);
    CHECK(back.metadata == bundle.metadata);
    CHECK(back.normalization == bundle.normalization);
    CHECK(back.vocabulary.terms() == bundle.vocabulary.terms());
    for (const auto& text : probe) REQUIRE(back.predict_text(text) == bundle.predict_text(text));
    CHECK(serialize_bundle(back) == serialize_bundle(bundle));
  }
}

TEST_CASE("serialization is byte deterministic") {
  CHECK(serialize_bundle(trained(ModelKind::Svm, 3)) == serialize_bundle(trained(ModelKind::Svm, 3)));
  CHECK(serialize_bundle(trained(ModelKind::Forest, 3)) == serialize_bundle(trained(ModelKind::Forest, 3)));
}

TEST_CASE("fingerprint is the hash of the bytes") {
  const auto bytes = serialize_bundle(trained(ModelKind::Svm));
  CHECK(parse_bundle(bytes).fingerprint == hex64(fnv1a64(bytes)));
}

TEST_CASE("truncated or corrupted bundles fail the checksum") {
  const auto bytes = serialize_bundle(trained(ModelKind::Forest));
  for (std::size_t cut = 0; cut < bytes.size(); cut += 97) {
    CAPTURE(cut);
    CHECK_THROWS_AS(parse_bundle(std::string_view(bytes).substr(0, cut)), ChecksumError);
  }
  CHECK_THROWS_AS(parse_bundle(std::string_view(bytes).substr(0, bytes.size() - 1)), ChecksumError);
  auto flipped = bytes;
  flipped[flipped.size() / 2] ^= 0x10;
  CHECK_THROWS_AS(parse_bundle(flipped), ChecksumError);
}

TEST_CASE("future versions are rejected by number") {
  auto bytes = serialize_bundle(trained(ModelKind::Majority));
  const auto nl = bytes.find('\n');
  REQUIRE(bytes.substr(0, nl) == "predelete-bundle 1");
  bytes.replace(0, nl, "predelete-bundle 7");
  try {
    parse_bundle(bytes);
    FAIL("expected a version error");
  } catch (const VersionError& e) {
    CHECK(e.found() == 7);
    CHECK(e.supported() == 1);
    const std::string what = e.what();
    CHECK(what.find('7') != std::string::npos);
    CHECK(what.find('1') != std::string::npos);
  }
}

TEST_CASE("other bundle errors") {
  CHECK_THROWS_AS(parse_bundle("hello world\nmore"), ModelError);
  CHECK_THROWS_AS(load_bundle("/nonexistent/x.bundle"), Error);
  auto bundle = trained(ModelKind::Majority);
  bundle.metadata.extra["seed"] = "1";
  CHECK_THROWS_AS(serialize_bundle(bundle), ModelError);
  bundle = trained(ModelKind::Svm);
  bundle.labels = LabelMap({"a", "b"});
  CHECK_THROWS_AS(bundle.validate(), ModelError);
}

TEST_CASE("metadata and configuration survive") {
  auto bundle = trained(ModelKind::Svm);
  bundle.normalization.lowercase = true;
  bundle.normalization.url_token = "<url>";
  bundle.metadata.extra["note"] = "tab\there=and\nnewline";
  const auto back = parse_bundle(serialize_bundle(bundle));
  CHECK(back.normalization == bundle.normalization);
  CHECK(back.metadata.extra.at("note") == "tab\there=and\nnewline");
  CHECK(back.metadata.timestamp == 1700000000);
  const auto& svm = std::get<LinearSvmModel>(back.model);
  const auto& orig = std::get<LinearSvmModel>(bundle.model);
  CHECK(svm.weights == orig.weights);
  CHECK(svm.epoch_objective == orig.epoch_objective);
}
