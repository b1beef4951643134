#include <doctest.h>

#include "../support.hpp"
#include "predelete/analysis.hpp"
#include "predelete/error.hpp"

using namespace predelete;
using testsupport::record;

namespace {

TweetRecord authored(std::string id, CategoryLabel c, std::string user, UserStatus status) {
  auto r = record(std::move(id), "t", DeletionLabel::Deleted, c);
  r.user_id = std::move(user);
  r.user_status = status;
  return r;
}

std::size_t at(const StatusCounts& c, UserStatus s) { return c.users[static_cast<std::size_t>(s)]; }

const StatusCounts& category(const StatusReport& r, CategoryLabel c) {
  for (const auto& [cat, counts] : r.per_category)
    if (cat == c) return counts;
  throw std::logic_error("missing category");
}

}  // namespace

TEST_CASE("attribute percentages") {
  auto a = record("a", "x", DeletionLabel::Deleted);
  a.attributes.has_url = true;
  a.attributes.is_retweet = true;
  auto b = record("b", "x", DeletionLabel::Deleted);
  b.attributes.has_url = true;
  const auto report = attribute_distribution({{"s", Corpus({a, b})}});
  REQUIRE(report.rows.size() == 1);
  CHECK(report.rows[0].n == 2);
  CHECK(report.rows[0].urls == 100.0);
  CHECK(report.rows[0].retweets == 50.0);
  CHECK(report.rows[0].hashtags == 0.0);
}

TEST_CASE("attribute slices are independent and empty ones fail") {
  auto a = record("a", "x", DeletionLabel::Deleted);
  a.attributes.has_hashtag = true;
  const Corpus one({a});
  const Corpus three({record("p", "x", DeletionLabel::NotDeleted), record("q", "x", DeletionLabel::NotDeleted),
                      record("r", "x", DeletionLabel::NotDeleted)});
  const auto alone = attribute_distribution({{"one", one}});
  const auto both = attribute_distribution({{"three", three}, {"one", one}});
  CHECK(both.rows[1].hashtags == alone.rows[0].hashtags);
  CHECK(both.rows[0].hashtags == 0.0);
  try {
    attribute_distribution({{"one", one}, {"nothing", Corpus{}}});
    FAIL("expected an error");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("nothing") != std::string::npos);
  }
}

TEST_CASE("percentages keep three decimals and print whole") {
  std::vector<TweetRecord> recs;
  for (int i = 0; i < 3; ++i) {
    auto r = record("r" + std::to_string(i), "x", DeletionLabel::Deleted);
    r.attributes.has_mention = i == 0;
    recs.push_back(r);
  }
  const auto report = attribute_distribution({{"s", Corpus(recs)}});
  CHECK(report.rows[0].mentions == 33.333);
  CHECK(format_attribute_report(report).find("33%") != std::string::npos);
}

TEST_CASE("standard slices") {
  const Corpus c({record("a", "x", DeletionLabel::Deleted, CategoryLabel::Spam),
                  record("b", "x", DeletionLabel::NotDeleted),
                  record("c", "x", DeletionLabel::Deleted, CategoryLabel::NotDisinfo)});
  const auto s = standard_slices(c);
  REQUIRE(s.size() == 3);
  CHECK(s[0].corpus.size() == 1);
  CHECK(s[1].corpus.size() == 2);
  CHECK(s[2].corpus.size() == 1);
}

TEST_CASE("user status breakdown") {
  const Corpus single({authored("t", CategoryLabel::Spam, "u1", UserStatus::Suspended)});
  const auto r = user_status_breakdown(single);
  CHECK(at(category(r, CategoryLabel::Spam), UserStatus::Suspended) == 1);
  CHECK(category(r, CategoryLabel::Spam).total() == 1);
  CHECK(category(r, CategoryLabel::HateSpeech).total() == 0);
  CHECK(r.overall.total() == 1);

  const Corpus multi({authored("a", CategoryLabel::HateSpeech, "u1", UserStatus::ActivePublic),
                      authored("b", CategoryLabel::Spam, "u1", UserStatus::ActivePublic),
                      authored("c", CategoryLabel::HateSpeech, "u1", UserStatus::ActivePublic),
                      authored("d", CategoryLabel::HateSpeech, "u2", UserStatus::AccountDeleted),
                      authored("e", CategoryLabel::NotDisinfo, "u3", UserStatus::Suspended)});
  const auto m = user_status_breakdown(multi);
  CHECK(category(m, CategoryLabel::HateSpeech).total() == 2);
  CHECK(category(m, CategoryLabel::Spam).total() == 1);
  CHECK(m.overall.total() == 2);
  CHECK(at(m.overall, UserStatus::ActivePublic) == 1);
  CHECK(at(m.overall, UserStatus::AccountDeleted) == 1);
  CHECK(at(m.overall, UserStatus::Suspended) == 0);
  CHECK(to_json(m)["all"]["total"] == 2);
}

TEST_CASE("records without a user id count as separate users") {
  const Corpus c({record("a", "x", DeletionLabel::Deleted, CategoryLabel::Rumor),
                  record("b", "x", DeletionLabel::Deleted, CategoryLabel::Rumor)});
  CHECK(user_status_breakdown(c).overall.total() == 2);
}

TEST_CASE("target frequencies") {
  auto mk = [](std::string id, std::string target) {
    auto r = record(std::move(id), "x", DeletionLabel::Deleted, CategoryLabel::HateSpeech);
    r.target = std::move(target);
    return r;
  };
  auto other = record("z", "x", DeletionLabel::Deleted, CategoryLabel::Spam);
  other.target = "group b";
  const Corpus c({mk("a", "group b"), mk("b", "group a"), mk("c", "group b"), other,
                  record("d", "x", DeletionLabel::Deleted, CategoryLabel::HateSpeech)});
  const auto f = target_frequencies(c, CategoryLabel::HateSpeech);
  REQUIRE(f.size() == 2);
  CHECK(f[0] == std::pair<std::string, std::size_t>{"group b", 2});
  CHECK(f[1] == std::pair<std::string, std::size_t>{"group a", 1});
}
