#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace predelete {

// Item x category table of how many annotators chose each category. Every row
// must sum to the same annotator count r >= 2.
class RatingTable {
 public:
  RatingTable(std::vector<std::vector<std::uint32_t>> counts, std::vector<std::string> categories = {});

  // One row per item, one label per annotator; categories are the sorted
  // union of labels.
  static RatingTable from_annotations(std::span<const std::vector<std::string>> rows);

  std::size_t n_items() const noexcept { return counts_.size(); }
  std::size_t n_categories() const noexcept { return n_categories_; }
  std::uint32_t n_raters() const noexcept { return raters_; }
  const std::vector<std::string>& categories() const noexcept { return categories_; }
  std::uint32_t at(std::size_t item, std::size_t category) const { return counts_[item][category]; }

 private:
  std::vector<std::vector<std::uint32_t>> counts_;
  std::vector<std::string> categories_;
  std::size_t n_categories_ = 0;
  std::uint32_t raters_ = 0;
};

// (P - Pe) / (1 - Pe). When Pe = 1 every rating falls in one category and
// kappa is 1.
double fleiss_kappa(const RatingTable& table);

// Mean over items of agreeing annotator pairs / r(r-1)/2.
double average_observed_agreement(const RatingTable& table);

enum class AgreementBand { BelowModerate, Moderate, Substantial, Perfect };

std::string_view to_string(AgreementBand band);

// [0.41, 0.61) moderate, [0.61, 0.81) substantial, [0.81, 1] perfect.
AgreementBand band(double kappa);

struct AgreementReport {
  double kappa = 0.0;
  double aoe = 0.0;
  std::size_t n_items = 0;
  std::size_t n_annotators = 0;
  AgreementBand band = AgreementBand::BelowModerate;
};

AgreementReport agreement_report(const RatingTable& table);

// TSV with a header row naming the annotators, then one row per item.
RatingTable parse_annotation_tsv(std::string_view content);
RatingTable load_annotation_tsv(const std::filesystem::path& path);

std::string format_agreement(const AgreementReport& report);
nlohmann::ordered_json to_json(const AgreementReport& report);

}  // namespace predelete
