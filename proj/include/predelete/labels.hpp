#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "predelete/corpus.hpp"

namespace predelete {

// Ordered class names; the order is fixed at training time and persisted.
class LabelMap {
 public:
  LabelMap() = default;
  explicit LabelMap(std::vector<std::string> names);

  std::size_t size() const noexcept { return names_.size(); }
  const std::string& name(std::size_t index) const { return names_.at(index); }
  const std::vector<std::string>& names() const noexcept { return names_; }
  std::optional<std::size_t> index_of(std::string_view name) const;
  // Throws DataError for names outside the map.
  std::size_t require(std::string_view name) const;

  bool operator==(const LabelMap&) const = default;

 private:
  std::vector<std::string> names_;
};

// The three classification settings.
enum class Setting {
  Deletion,  // deleted vs not_deleted, all records with a known deletion label
  Disinfo,   // disinfo vs not_disinfo, manually labeled records only
  Reason,    // hate_speech / offensive / rumor / spam, manually labeled disinformative records
};

std::string_view to_string(Setting s);
std::optional<Setting> parse_setting(std::string_view s);

// deletion: [deleted, not_deleted]; disinfo: [disinfo, not_disinfo];
// reason: [hate_speech, offensive, rumor, spam].
LabelMap labels_for(Setting s);

// Gold class index of a record under a setting, or nullopt if the record does
// not take part in it.
std::optional<std::size_t> gold_label(const TweetRecord& r, Setting s);

// Records taking part in the setting, in corpus order.
Corpus select_for_setting(const Corpus& corpus, Setting s);

}  // namespace predelete
