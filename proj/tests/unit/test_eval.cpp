#include <doctest.h>

#include <map>

#include "predelete/error.hpp"
#include "predelete/eval.hpp"
#include "predelete/rng.hpp"

using namespace predelete;

namespace {

std::vector<std::size_t> repeat(std::initializer_list<std::pair<std::size_t, std::size_t>> runs) {
  std::vector<std::size_t> out;
  for (auto [label, n] : runs) out.insert(out.end(), n, label);
  return out;
}

}  // namespace

TEST_CASE("perfect predictions") {
  const LabelMap labels({"a", "b", "c"});
  const auto gold = repeat({{0, 3}, {1, 2}, {2, 5}});
  const auto r = evaluate(gold, gold, labels);
  CHECK(r.accuracy == 1.0);
  CHECK(r.weighted_precision == 1.0);
  CHECK(r.weighted_recall == 1.0);
  CHECK(r.weighted_f1 == 1.0);
}

TEST_CASE("zero division gives zero") {
  const LabelMap labels({"a", "b"});
  const auto gold = repeat({{0, 3}, {1, 1}});
  const std::vector<std::size_t> pred(4, 0);
  const auto r = evaluate(gold, pred, labels);
  CHECK(r.per_class[1].precision == 0.0);
  CHECK(r.per_class[1].recall == 0.0);
  CHECK(r.per_class[1].f1 == 0.0);
  CHECK(r.per_class[0].precision == doctest::Approx(0.75));
  CHECK(r.weighted_precision == doctest::Approx(0.75 * 0.75));
  // A class with no support still has precision from its false positives.
  const std::vector<std::size_t> g2{0, 0}, p2{1, 0};
  const auto r2 = evaluate(g2, p2, labels);
  CHECK(r2.per_class[1].support == 0);
  CHECK(r2.per_class[1].recall == 0.0);
  CHECK(r2.per_class[1].precision == 0.0);
}

TEST_CASE("majority rows for the binary settings") {
  const LabelMap del({"deleted", "not_deleted"});
  const auto gold = repeat({{0, 3968}, {1, 4032}});
  const auto r = evaluate(gold, std::vector<std::size_t>(gold.size(), 0), del);
  CHECK(round3(r.accuracy) == 0.496);
  CHECK(round3(r.weighted_precision) == 0.246);
  CHECK(round3(r.weighted_recall) == 0.496);
  CHECK(round3(r.weighted_f1) == 0.329);
  CHECK(baseline_discrepancy_notes(Setting::Deletion, r).empty());

  const LabelMap dis({"disinfo", "not_disinfo"});
  const auto g2 = repeat({{0, 807}, {1, 3593}});
  const auto r2 = evaluate(g2, std::vector<std::size_t>(g2.size(), 1), dis);
  CHECK(round3(r2.accuracy) == 0.817);
  CHECK(round3(r2.weighted_precision) == 0.667);
  CHECK(round3(r2.weighted_f1) == 0.734);
  CHECK(baseline_discrepancy_notes(Setting::Disinfo, r2).empty());
}

TEST_CASE("reason majority row differs from the published table") {
  const auto labels = labels_for(Setting::Reason);
  const auto gold = repeat({{0, 448}, {1, 161}, {2, 61}, {3, 146}});
  const auto r = evaluate(gold, std::vector<std::size_t>(gold.size(), 0), labels);
  CHECK(r.accuracy == doctest::Approx(448.0 / 816.0));
  const auto notes = baseline_discrepancy_notes(Setting::Reason, r);
  REQUIRE_FALSE(notes.empty());
  CHECK(notes[0].find("0.537") != std::string::npos);
}

TEST_CASE("weighted recall equals accuracy exactly") {
  Rng rng(12);
  for (int t = 0; t < 200; ++t) {
    const std::size_t k = 2 + uniform_below(rng, 5);
    std::vector<std::string> names;
    for (std::size_t c = 0; c < k; ++c) names.push_back("c" + std::to_string(c));
    const LabelMap labels(names);
    std::vector<std::size_t> gold, pred;
    const auto n = 1 + uniform_below(rng, 100);
    for (std::uint64_t i = 0; i < n; ++i) {
      gold.push_back(uniform_below(rng, k));
      pred.push_back(uniform_below(rng, k));
    }
    const auto r = evaluate(gold, pred, labels);
    CHECK(r.weighted_recall == r.accuracy);
    for (const auto& m : r.per_class) CHECK(m.f1 <= std::max(m.precision, m.recall) + 1e-12);
    for (double v : {r.accuracy, r.weighted_precision, r.weighted_f1}) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
  }
}

TEST_CASE("evaluate errors") {
  const LabelMap labels({"a", "b"});
  const std::vector<std::size_t> g{0, 1}, p{0};
  CHECK_THROWS_AS(evaluate(g, p, labels), DataError);
  CHECK_THROWS_AS(evaluate(std::vector<std::size_t>{}, std::vector<std::size_t>{}, labels), DataError);
  const std::vector<std::size_t> bad{0, 2};
  CHECK_THROWS_AS(evaluate(g, bad, labels), DataError);
}

TEST_CASE("error slices") {
  const auto labels = labels_for(Setting::Reason);
  const std::vector<std::size_t> gold{0, 1, 2, 2, 3, 1};
  const std::vector<std::size_t> pred{0, 0, 0, 2, 0, 1};
  const std::vector<std::string> ids{"a", "b", "c", "d", "e", "f"};
  const std::vector<std::string> from{"rumor", "offensive"};
  const auto s = error_slice(gold, pred, ids, labels, from, "hate_speech");
  CHECK(s.count == 2);
  CHECK(s.ids == std::vector<std::string>{"b", "c"});
  CHECK(error_slice(gold, gold, ids, labels, from, "hate_speech").count == 0);
  const std::vector<std::string> self{"offensive"};
  CHECK(error_slice(gold, gold, ids, labels, self, "offensive").count == 2);
  const std::vector<std::string> unknown{"sarcasm"};
  CHECK_THROWS_AS(error_slice(gold, pred, ids, labels, unknown, "hate_speech"), DataError);
}

TEST_CASE("rounding is half to even") {
  CHECK(round3(0.0625) == 0.062);
  CHECK(round3(0.1875) == 0.188);
  CHECK(round3(0.32899) == 0.329);
}

TEST_CASE("report formats") {
  const LabelMap labels({"a", "b"});
  const std::vector<std::size_t> g{0, 1, 1}, p{0, 1, 0};
  auto r = evaluate(g, p, labels);
  r.notes.push_back("a note");
  const auto text = format_report(r);
  CHECK(text.find("weighted") != std::string::npos);
  CHECK(text.find("note: a note") != std::string::npos);
  const auto j = to_json(r);
  CHECK(j["accuracy"].get<double>() == doctest::Approx(2.0 / 3.0));
  CHECK(j["confusion"]["matrix"][1][0] == 1);
  CHECK(j["per_class"]["b"]["support"] == 2);
}
