#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "../support.hpp"
#include "predelete/bundle.hpp"
#include "predelete/cascade.hpp"

using namespace predelete;
using testsupport::record;

namespace {

struct RunResult {
  int status = -1;
  std::string out;
  std::string err;
};

RunResult run(const std::string& args, const testsupport::TempDir& dir, const std::string& env = {}) {
  const auto err_path = dir / "stderr.txt";
  const std::string cmd = env + (env.empty() ? "" : " ") + PREDELETE_CLI_PATH + std::string(" ") + args + " 2>" +
                          err_path.string();
  RunResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  while (auto n = fread(buf, 1, sizeof buf, pipe)) r.out.append(buf, n);
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  std::ifstream in(err_path);
  std::ostringstream ss;
  ss << in.rdbuf();
  r.err = ss.str();
  return r;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t line_count(const std::filesystem::path& p) {
  const auto s = slurp(p);
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

// 807 disinformative and 3,593 not-disinformative test records.
Corpus disinfo_test_corpus() {
  std::vector<TweetRecord> records;
  for (std::size_t i = 0; i < 4400; ++i)
    records.push_back(record("t" + std::to_string(i), "tweet number " + std::to_string(i % 7),
                             DeletionLabel::NotDeleted,
                             i < 807 ? CategoryLabel::Spam : CategoryLabel::NotDisinfo));
  return Corpus(std::move(records));
}

Corpus small_train_corpus() {
  std::vector<TweetRecord> records;
  for (std::size_t i = 0; i < 40; ++i)
    records.push_back(record("r" + std::to_string(i), i % 4 == 0 ? "buy cheap pills now" : "nice day outside",
                             DeletionLabel::Deleted,
                             i % 4 == 0 ? CategoryLabel::Spam : CategoryLabel::NotDisinfo));
  return Corpus(std::move(records));
}

std::string error_kind(const std::string& err) {
  const auto j = nlohmann::json::parse(err.substr(0, err.find('\n')));
  return j["error"]["kind"];
}

}  // namespace

TEST_CASE("cli split writes three stratified parts") {
  testsupport::TempDir dir;
  std::vector<TweetRecord> records;
  for (std::size_t i = 0; i < 100; ++i)
    records.push_back(record("r" + std::to_string(i), "x", i < 50 ? DeletionLabel::Deleted : DeletionLabel::NotDeleted));
  save_corpus(Corpus(std::move(records)), dir / "all.jsonl", CorpusFormat::Jsonl);
  const auto r = run("split --input " + (dir / "all.jsonl").string() + " --fractions 0.7,0.1,0.2 --seed 42" +
                         " --stratify deletion --out-dir " + dir.path().string() + " --prefix part",
                     dir);
  REQUIRE(r.status == 0);
  CHECK(r.out.find("seed=42") != std::string::npos);
  CHECK(line_count(dir / "part.train.jsonl") == 70);
  CHECK(line_count(dir / "part.dev.jsonl") == 10);
  CHECK(line_count(dir / "part.test.jsonl") == 20);
}

TEST_CASE("cli majority train and evaluate reproduces the disinfo baseline") {
  testsupport::TempDir dir;
  save_corpus(small_train_corpus(), dir / "train.jsonl", CorpusFormat::Jsonl);
  save_corpus(disinfo_test_corpus(), dir / "test.tsv", CorpusFormat::Tsv);
  auto r = run("train --train " + (dir / "train.jsonl").string() + " --setting disinfo --model majority --out " +
                   (dir / "m.bundle").string(),
               dir);
  REQUIRE(r.status == 0);
  r = run("evaluate --bundle " + (dir / "m.bundle").string() + " --test " + (dir / "test.tsv").string() + " --json",
          dir);
  REQUIRE(r.status == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["accuracy"].get<double>() == doctest::Approx(0.817).epsilon(0.0005));
  CHECK(j["weighted_f1"].get<double>() == doctest::Approx(0.734).epsilon(0.0005));
}

TEST_CASE("cli training is byte deterministic with a pinned timestamp") {
  testsupport::TempDir dir;
  save_corpus(small_train_corpus(), dir / "train.jsonl", CorpusFormat::Jsonl);
  const std::string base = "train --train " + (dir / "train.jsonl").string() + " --setting disinfo --model svm --out ";
  REQUIRE(run(base + (dir / "a.bundle").string(), dir, "SOURCE_DATE_EPOCH=1700000000").status == 0);
  REQUIRE(run(base + (dir / "b.bundle").string(), dir, "SOURCE_DATE_EPOCH=1700000000").status == 0);
  CHECK(slurp(dir / "a.bundle") == slurp(dir / "b.bundle"));
  CHECK(load_bundle(dir / "a.bundle").metadata.timestamp == 1700000000);

  const auto r = run("predict --bundle " + (dir / "a.bundle").string() + " --input " + (dir / "train.jsonl").string(),
                     dir);
  REQUIRE(r.status == 0);
  std::istringstream lines(r.out);
  std::string line;
  std::size_t n = 0;
  while (std::getline(lines, line)) {
    const auto j = nlohmann::json::parse(line);
    CHECK(j["scores"].size() == 2);
    CHECK((j["label"] == "disinfo") == (j["id"].get<std::string>() == "r" + std::to_string(n / 4 * 4)));
    ++n;
  }
  CHECK(n == 40);
}

TEST_CASE("cli agree") {
  testsupport::TempDir dir;
  std::ofstream(dir / "ann.tsv") << "a\tb\tc\nHS\tHS\tHS\nSpam\tSpam\tSpam\n";
  const auto r = run("agree --input " + (dir / "ann.tsv").string(), dir);
  REQUIRE(r.status == 0);
  CHECK(r.out.find("kappa=1.000 aoe=1.000 band=perfect") != std::string::npos);
}

TEST_CASE("cli fixture and check") {
  testsupport::TempDir dir;
  auto r = run("make-fixture --out-dir " + dir.path().string(), dir);
  REQUIRE(r.status == 0);
  const auto manifest = dir / "cascade.manifest";
  r = run("check --manifest " + manifest.string() + " --text '" + std::string(kFixtureHateText) + "'", dir);
  REQUIRE(r.status == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["deletion"]["label"] == "deleted");
  CHECK(j["reason"]["label"] == "hate_speech");
  CHECK(j["warnings"].size() == 2);
}

TEST_CASE("cli exit codes and json errors") {
  testsupport::TempDir dir;
  auto r = run("train --setting nope --out x", dir);
  CHECK(r.status == 2);

  r = run("agree --input " + (dir / "missing.tsv").string(), dir);
  CHECK(r.status == 3);
  CHECK(error_kind(r.err) == "data");

  std::ofstream(dir / "junk.bundle") << "not a bundle";
  save_corpus(small_train_corpus(), dir / "train.jsonl", CorpusFormat::Jsonl);
  r = run("evaluate --bundle " + (dir / "junk.bundle").string() + " --test " + (dir / "train.jsonl").string(), dir);
  CHECK(r.status == 4);
  CHECK(error_kind(r.err) == "model");

  r = run("check --manifest " + (dir / "none.manifest").string() + " --text hi", dir);
  CHECK(r.status != 0);
  CHECK_FALSE(r.err.empty());
}
