#include <doctest.h>

#include <algorithm>

#include "predelete/agreement.hpp"
#include "predelete/error.hpp"
#include "predelete/rng.hpp"

using namespace predelete;

TEST_CASE("unanimous tables") {
  const RatingTable t(std::vector<std::vector<std::uint32_t>>(10, {3, 0}));
  CHECK(fleiss_kappa(t) == 1.0);
  CHECK(average_observed_agreement(t) == 1.0);
  const RatingTable mixed({{3, 0}, {0, 3}, {3, 0}});
  CHECK(fleiss_kappa(mixed) == doctest::Approx(1.0));
  CHECK(band(fleiss_kappa(mixed)) == AgreementBand::Perfect);
}

TEST_CASE("two items, two annotators") {
  // (A,A), (A,B): P = 0.5, p_A = 0.75, p_B = 0.25, Pe = 0.625
  const RatingTable t({{2, 0}, {1, 1}});
  CHECK(fleiss_kappa(t) == doctest::Approx(-1.0 / 3.0).epsilon(1e-12));
  CHECK(average_observed_agreement(t) == 0.5);
}

TEST_CASE("observed agreement counts pairs") {
  // 3 raters: (2,1) agrees on 1 of 3 pairs; (1,1,1) on none.
  const RatingTable t({{2, 1, 0}, {1, 1, 1}});
  CHECK(average_observed_agreement(t) == doctest::Approx((1.0 / 3.0 + 0.0) / 2.0));
}

TEST_CASE("kappa is invariant under row and column permutations") {
  Rng rng(4);
  std::vector<std::vector<std::uint32_t>> rows;
  for (int i = 0; i < 50; ++i) {
    std::vector<std::uint32_t> row(4, 0);
    for (int r = 0; r < 5; ++r) ++row[uniform_below(rng, 4)];
    rows.push_back(row);
  }
  const double k = fleiss_kappa(RatingTable(rows));
  const double a = average_observed_agreement(RatingTable(rows));
  auto permuted = rows;
  std::reverse(permuted.begin(), permuted.end());
  for (auto& row : permuted) std::rotate(row.begin(), row.begin() + 1, row.end());
  CHECK(fleiss_kappa(RatingTable(permuted)) == doctest::Approx(k).epsilon(1e-12));
  CHECK(average_observed_agreement(RatingTable(permuted)) == doctest::Approx(a).epsilon(1e-12));
}

TEST_CASE("random annotators agree only by chance") {
  Rng rng(2024);
  std::vector<std::vector<std::uint32_t>> rows;
  for (int i = 0; i < 10000; ++i) {
    std::vector<std::uint32_t> row(4, 0);
    for (int r = 0; r < 3; ++r) ++row[uniform_below(rng, 4)];
    rows.push_back(row);
  }
  CHECK(std::abs(fleiss_kappa(RatingTable(rows))) < 0.05);
}

TEST_CASE("bands") {
  CHECK(band(0.75) == AgreementBand::Substantial);
  CHECK(band(0.41) == AgreementBand::Moderate);
  CHECK(band(0.60) == AgreementBand::Moderate);
  CHECK(band(0.605) == AgreementBand::Moderate);
  CHECK(band(0.61) == AgreementBand::Substantial);
  CHECK(band(0.81) == AgreementBand::Perfect);
  CHECK(band(1.0) == AgreementBand::Perfect);
  CHECK(band(0.20) == AgreementBand::BelowModerate);
  CHECK(band(-0.3) == AgreementBand::BelowModerate);
  CHECK(to_string(AgreementBand::Substantial) == "substantial");
}

TEST_CASE("table validation") {
  CHECK_THROWS_AS(RatingTable({{2, 0}, {1, 2}}), DataError);
  CHECK_THROWS_AS(RatingTable({{1, 0}}), DataError);
  CHECK_THROWS_AS(RatingTable(std::vector<std::vector<std::uint32_t>>{}), DataError);
  CHECK_THROWS_AS(RatingTable({{2, 0}, {1}}), DataError);
  // A single category gives Pe = 1.
  using Counts = std::vector<std::vector<std::uint32_t>>;
  CHECK(fleiss_kappa(RatingTable(Counts{{2}, {2}})) == 1.0);
}

TEST_CASE("annotation tsv") {
  const auto t = parse_annotation_tsv("ann1\tann2\tann3\nHS\tHS\tHS\nSpam\tHS\tSpam\r\n\nOff\tOff\tOff\n");
  CHECK(t.n_items() == 3);
  CHECK(t.n_raters() == 3);
  CHECK(t.categories() == std::vector<std::string>{"HS", "Off", "Spam"});
  CHECK(t.at(1, 2) == 2);
  try {
    parse_annotation_tsv("a\tb\nx\ty\nx\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
  CHECK_THROWS_AS(parse_annotation_tsv("a\tb\nx\t\n"), ParseError);
  CHECK_THROWS_AS(parse_annotation_tsv("solo\nx\n"), ParseError);
  CHECK_THROWS_AS(parse_annotation_tsv("a\tb\n"), DataError);
}

TEST_CASE("agreement report format") {
  const auto rep = agreement_report(parse_annotation_tsv("a\tb\nx\tx\ny\ty\n"));
  CHECK(format_agreement(rep) == "items=2 annotators=2 kappa=1.000 aoe=1.000 band=perfect\n");
  CHECK(to_json(rep)["band"] == "perfect");
}
