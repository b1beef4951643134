#include <doctest.h>

#include "golden_textprep.hpp"
#include "../support.hpp"
#include "predelete/error.hpp"
#include "predelete/rng.hpp"
#include "predelete/textprep.hpp"

using namespace predelete;

TEST_CASE("golden normalization cases") {
  static_assert(std::size(kGoldenCases) >= 20);
  for (const auto& g : kGoldenCases) {
    CAPTURE(g.input);
    CHECK(normalize(g.input) == g.expected);
  }
}

TEST_CASE("arabic letter folding is opt-in") {
  NormalizationConfig cfg;
  cfg.normalize_arabic = true;
  // أحمد إلى آخر مدرسة -> احمد الي اخر مدرسه
  CHECK(normalize("\xd8\xa3\xd8\xad\xd9\x85\xd8\xaf \xd8\xa5\xd9\x84\xd9\x89 \xd8\xa2\xd8\xae\xd8\xb1 "
                  "\xd9\x85\xd8\xaf\xd8\xb1\xd8\xb3\xd8\xa9",
                  cfg) ==
        "\xd8\xa7\xd8\xad\xd9\x85\xd8\xaf \xd8\xa7\xd9\x84\xd9\x8a \xd8\xa7\xd8\xae\xd8\xb1 "
        "\xd9\x85\xd8\xaf\xd8\xb1\xd8\xb3\xd9\x87");
}

TEST_CASE("lowercasing leaves replacement tokens alone") {
  NormalizationConfig cfg;
  cfg.lowercase = true;
  CHECK(normalize("Hello WORLD @User http://X.com", cfg) == "hello world USER URL");
}

TEST_CASE("disabled rules") {
  NormalizationConfig cfg;
  cfg.replace_urls = false;
  CHECK(normalize("go http://a.b", cfg) == "go http a b");
  cfg = {};
  cfg.replace_mentions = false;
  CHECK(normalize("@bob hi", cfg) == "bob hi");
  cfg = {};
  cfg.strip_non_alphanumeric = false;
  CHECK(normalize("a, b!", cfg) == "a, b!");
  cfg = {};
  cfg.url_token = "<url>";
  CHECK(normalize("x https://t.co/y", cfg) == "x <url>");
}

TEST_CASE("replacement tokens are validated") {
  NormalizationConfig cfg;
  cfg.url_token = "";
  CHECK_THROWS_AS(cfg.validate(), UsageError);
  cfg.url_token = "two words";
  CHECK_THROWS_AS(cfg.validate(), UsageError);
  cfg.url_token = "URL";
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("tokenize splits on unicode whitespace") {
  CHECK(tokenize("a b\xe2\x80\x83" "c") == TokenSequence{"a", "b", "c"});
  CHECK(tokenize("").empty());
  CHECK(preprocess("Hi, @x!", {}) == TokenSequence{"Hi", "USER"});
}

TEST_CASE("normalization is idempotent and whitespace-clean on random text") {
  Rng rng(20240601);
  for (int i = 0; i < 10000; ++i) {
    const auto s = testsupport::random_unicode(rng);
    const auto once = normalize(s);
    CAPTURE(s);
    REQUIRE(normalize(once) == once);
    REQUIRE(once.find("  ") == std::string::npos);
    if (!once.empty()) {
      REQUIRE(once.front() != ' ');
      REQUIRE(once.back() != ' ');
    }
  }
}
