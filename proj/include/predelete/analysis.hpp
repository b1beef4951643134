#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "predelete/corpus.hpp"

namespace predelete {

struct NamedSlice {
  std::string name;
  Corpus corpus;
};

struct AttributeRow {
  std::string slice;
  std::size_t n = 0;
  // Percent of records with the flag set, rounded to 3 decimals.
  double hashtags = 0.0;
  double urls = 0.0;
  double mentions = 0.0;
  double replies = 0.0;
  double retweets = 0.0;
};

struct AttributeReport {
  std::vector<AttributeRow> rows;
};

// Throws DataError naming the first empty slice.
AttributeReport attribute_distribution(const std::vector<NamedSlice>& slices);

// Non-deleted, deleted, and disinformative (any annotated HS/offensive/rumor/spam) slices.
std::vector<NamedSlice> standard_slices(const Corpus& corpus);

struct StatusCounts {
  std::array<std::size_t, kUserStatuses.size()> users{};
  std::size_t total() const;
};

// Unique users per disinformative category and user status. A user counts
// once under every category they posted at least once, and once overall.
// Records without a user_id count as their own anonymous user. A user's
// status is taken from their first record.
struct StatusReport {
  std::vector<std::pair<CategoryLabel, StatusCounts>> per_category;
  StatusCounts overall;
};

StatusReport user_status_breakdown(const Corpus& corpus);

// Exact-string counts of the `target` column over records of the given
// category, most frequent first, ties lexicographic.
std::vector<std::pair<std::string, std::size_t>> target_frequencies(const Corpus& corpus, CategoryLabel category);

std::string format_attribute_report(const AttributeReport& report);
std::string format_status_report(const StatusReport& report);
nlohmann::ordered_json to_json(const AttributeReport& report);
nlohmann::ordered_json to_json(const StatusReport& report);

}  // namespace predelete
