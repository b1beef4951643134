#include <doctest.h>

#include <fstream>

#include "../support.hpp"
#include "predelete/error.hpp"

using namespace predelete;
using testsupport::record;

namespace {

std::string jsonl_line(const std::string& id, const std::string& deletion = "deleted",
                       const std::string& category = "unlabeled", const std::string& source = "none",
                       const std::string& text = "hello") {
  return R"({"id":")" + id + R"(","text":")" + text + R"(","deletion_label":")" + deletion +
         R"(","category_label":")" + category + R"(","label_source":")" + source +
         R"(","has_hashtag":false,"has_url":true,"has_mention":false,"is_reply":false,"is_retweet":true,)"
         R"("user_status":"suspended"})";
}

}  // namespace

TEST_CASE("jsonl records load in file order") {
  const auto c = parse_corpus(jsonl_line("a") + "\n" + jsonl_line("b") + "\n" + jsonl_line("c") + "\n",
                              CorpusFormat::Jsonl);
  REQUIRE(c.size() == 3);
  CHECK(c[0].id == "a");
  CHECK(c[1].id == "b");
  CHECK(c[2].id == "c");
  CHECK(c[0].attributes.has_url);
  CHECK(c[0].attributes.is_retweet);
  CHECK_FALSE(c[0].attributes.has_hashtag);
  CHECK(c[0].user_status == UserStatus::Suspended);
  CHECK(c.find("b") == &c[1]);
  CHECK(c.find("zz") == nullptr);
}

TEST_CASE("duplicate id reports the id and the second line") {
  std::string content = jsonl_line("t0") + "\n" + jsonl_line("t1") + "\n" + jsonl_line("t2") + "\n" +
                        jsonl_line("t3") + "\n" + jsonl_line("t1") + "\n";
  try {
    parse_corpus(content, CorpusFormat::Jsonl);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 5);
    CHECK(std::string(e.what()).find("t1") != std::string::npos);
  }
}

TEST_CASE("record invariants") {
  CHECK_THROWS_AS(parse_corpus(jsonl_line("a", "deleted", "hate_speech", "weak"), CorpusFormat::Jsonl), ParseError);
  CHECK_THROWS_AS(parse_corpus(jsonl_line("a", "deleted", "spam", "none"), CorpusFormat::Jsonl), ParseError);
  CHECK_THROWS_AS(parse_corpus(jsonl_line("a", "deleted", "unlabeled", "none", "   "), CorpusFormat::Jsonl),
                  ParseError);
  CHECK_NOTHROW(parse_corpus(jsonl_line("a", "not_deleted", "not_disinfo", "weak"), CorpusFormat::Jsonl));
  CHECK_THROWS_AS(Corpus({record("x", "a", DeletionLabel::Deleted), record("x", "b", DeletionLabel::Deleted)}),
                  DataError);
}

TEST_CASE("malformed jsonl lines") {
  auto line_of = [](const std::string& content) -> std::size_t {
    try {
      parse_corpus(content, CorpusFormat::Jsonl);
    } catch (const ParseError& e) {
      return e.line();
    }
    return 0;
  };
  CHECK(line_of(jsonl_line("a") + "\n{not json\n") == 2);
  auto missing = jsonl_line("a");
  missing.replace(missing.find(",\"user_status\":\"suspended\""), 26, "");
  CHECK(line_of(missing) == 1);
  auto extra = jsonl_line("a");
  extra.insert(extra.size() - 1, R"(,"likes":3)");
  CHECK(line_of(extra) == 1);
  auto wrong_type = jsonl_line("a");
  wrong_type.replace(wrong_type.find("\"has_url\":true"), 14, "\"has_url\":\"yes\"");
  CHECK(line_of(wrong_type) == 1);
  CHECK(line_of(jsonl_line("a", "maybe")) == 1);
}

TEST_CASE("optional user_id and target columns") {
  auto line = jsonl_line("a", "deleted", "hate_speech", "manual");
  line.insert(line.size() - 1, R"(,"user_id":"u9","target":"group")");
  const auto c = parse_corpus(line, CorpusFormat::Jsonl);
  CHECK(c[0].user_id == "u9");
  CHECK(c[0].target == "group");
}

TEST_CASE("tsv and jsonl round trips agree") {
  auto r1 = record("a", "tab\there\nnewline \\ back", DeletionLabel::Deleted, CategoryLabel::Rumor);
  r1.attributes.has_mention = true;
  r1.user_id = "u1";
  auto r2 = record("b", "\xd9\x85\xd8\xb1\xd8\xad\xd8\xa8\xd8\xa7", DeletionLabel::NotDeleted);
  r2.user_status = UserStatus::ActivePublic;
  const Corpus c({r1, r2});
  for (auto fmt : {CorpusFormat::Jsonl, CorpusFormat::Tsv}) {
    const auto back = parse_corpus(serialize_corpus(c, fmt), fmt);
    REQUIRE(back.size() == 2);
    CHECK(back[0] == r1);
    CHECK(back[1] == r2);
  }
  CHECK(unescape_tsv(escape_tsv("a\tb\\n\r")) == "a\tb\\n\r");
}

TEST_CASE("tsv requires a header and accepts any column order") {
  const std::string header =
      "text\tid\tdeletion_label\tcategory_label\tlabel_source\thas_hashtag\thas_url\thas_mention\tis_reply\t"
      "is_retweet\tuser_status\n";
  const auto c = parse_corpus(header + "hi there\tx1\tdeleted\tunlabeled\tnone\ttrue\tfalse\tfalse\tfalse\tfalse\t"
                                       "unknown\n",
                              CorpusFormat::Tsv);
  CHECK(c[0].id == "x1");
  CHECK(c[0].text == "hi there");
  CHECK(c[0].attributes.has_hashtag);
  CHECK_THROWS_AS(parse_corpus("x1\thi\n", CorpusFormat::Tsv), ParseError);
  CHECK_THROWS_AS(parse_corpus(header + "too\tfew\n", CorpusFormat::Tsv), ParseError);
}

TEST_CASE("files load by extension") {
  testsupport::TempDir dir;
  const Corpus c({record("a", "one", DeletionLabel::Deleted), record("b", "two", DeletionLabel::NotDeleted)});
  save_corpus(c, dir / "c.tsv", CorpusFormat::Tsv);
  CHECK(format_from_path(dir / "c.tsv") == CorpusFormat::Tsv);
  CHECK(format_from_path(dir / "c.jsonl") == CorpusFormat::Jsonl);
  CHECK_FALSE(format_from_path(dir / "c.csv"));
  const auto back = load_corpus(dir / "c.tsv", CorpusFormat::Tsv);
  CHECK(back.fingerprint() == c.fingerprint());
  CHECK_THROWS_AS(load_corpus(dir / "missing.tsv", CorpusFormat::Tsv), DataError);
}

TEST_CASE("weak labeling") {
  const Corpus c({record("a", "x", DeletionLabel::NotDeleted),
                  record("b", "x", DeletionLabel::NotDeleted, CategoryLabel::HateSpeech),
                  record("c", "x", DeletionLabel::Deleted)});
  const auto w = apply_weak_labels(c);
  CHECK(w[0].category_label == CategoryLabel::NotDisinfo);
  CHECK(w[0].label_source == LabelSource::Weak);
  CHECK(w[1] == c[1]);
  CHECK(w[2] == c[2]);
  const auto ww = apply_weak_labels(w);
  for (std::size_t i = 0; i < w.size(); ++i) CHECK(ww[i] == w[i]);
}

TEST_CASE("duplicate texts are kept unless dropped") {
  const Corpus c({record("a", "same", DeletionLabel::Deleted), record("b", "same", DeletionLabel::Deleted),
                  record("c", "other", DeletionLabel::Deleted)});
  CHECK(c.size() == 3);
  const auto d = drop_duplicate_texts(c);
  REQUIRE(d.size() == 2);
  CHECK(d[0].id == "a");
  CHECK(d[1].id == "c");
}

TEST_CASE("distribution report") {
  CHECK(distribution_report(Corpus{}, DistributionAxis::DeletionLabel).empty());
  const Corpus c({record("a", "x", DeletionLabel::Deleted), record("b", "x", DeletionLabel::Deleted),
                  record("c", "x", DeletionLabel::NotDeleted), record("d", "x", DeletionLabel::NotDeleted)});
  const auto rows = distribution_report(c, DistributionAxis::DeletionLabel);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].value == "deleted");
  CHECK(rows[0].count == 2);
  CHECK(rows[0].percent == doctest::Approx(50.0));
  CHECK(rows[1].percent == doctest::Approx(50.0));
}

TEST_CASE("annotated deleted set distribution") {
  // Phase-one counts of the annotated deleted tweets.
  const std::pair<CategoryLabel, int> counts[] = {{CategoryLabel::NotDisinfo, 16066},
                                                  {CategoryLabel::HateSpeech, 2180},
                                                  {CategoryLabel::Offensive, 735},
                                                  {CategoryLabel::Rumor, 252},
                                                  {CategoryLabel::Spam, 767}};
  std::vector<TweetRecord> records;
  for (auto [cat, n] : counts)
    for (int i = 0; i < n; ++i)
      records.push_back(record(std::string(to_string(cat)) + std::to_string(i), "t", DeletionLabel::Deleted, cat));
  const auto rows = distribution_report(Corpus(std::move(records)), DistributionAxis::CategoryLabel);
  REQUIRE(rows.size() == 5);
  double disinfo = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].count == static_cast<std::size_t>(counts[i].second));
    if (i > 0) disinfo += rows[i].percent;
  }
  CHECK(disinfo == doctest::Approx(19.67).epsilon(0.001));
}
