#include "predelete/labels.hpp"

#include <unordered_set>

#include "predelete/error.hpp"

namespace predelete {

LabelMap::LabelMap(std::vector<std::string> names) : names_(std::move(names)) {
  std::unordered_set<std::string> seen;
  for (const auto& n : names_) {
    if (n.empty()) throw DataError("label names must be non-empty");
    if (!seen.insert(n).second) throw DataError("duplicate label name '" + n + "'");
  }
}

std::optional<std::size_t> LabelMap::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return i;
  return std::nullopt;
}

std::size_t LabelMap::require(std::string_view name) const {
  if (auto i = index_of(name)) return *i;
  throw DataError("unknown label '" + std::string(name) + "'");
}

std::string_view to_string(Setting s) {
  switch (s) {
    case Setting::Deletion: return "deletion";
    case Setting::Disinfo: return "disinfo";
    case Setting::Reason: return "reason";
  }
  return "deletion";
}

std::optional<Setting> parse_setting(std::string_view s) {
  for (auto v : {Setting::Deletion, Setting::Disinfo, Setting::Reason})
    if (to_string(v) == s) return v;
  return std::nullopt;
}

LabelMap labels_for(Setting s) {
  switch (s) {
    case Setting::Deletion: return LabelMap({"deleted", "not_deleted"});
    case Setting::Disinfo: return LabelMap({"disinfo", "not_disinfo"});
    case Setting::Reason: return LabelMap({"hate_speech", "offensive", "rumor", "spam"});
  }
  return {};
}

std::optional<std::size_t> gold_label(const TweetRecord& r, Setting s) {
  switch (s) {
    case Setting::Deletion:
      if (r.deletion_label == DeletionLabel::Deleted) return 0;
      if (r.deletion_label == DeletionLabel::NotDeleted) return 1;
      return std::nullopt;
    case Setting::Disinfo:
      if (r.label_source != LabelSource::Manual) return std::nullopt;
      if (r.category_label == CategoryLabel::NotDisinfo) return 1;
      if (is_disinformative(r.category_label)) return 0;
      return std::nullopt;
    case Setting::Reason:
      if (r.label_source != LabelSource::Manual) return std::nullopt;
      switch (r.category_label) {
        case CategoryLabel::HateSpeech: return 0;
        case CategoryLabel::Offensive: return 1;
        case CategoryLabel::Rumor: return 2;
        case CategoryLabel::Spam: return 3;
        default: return std::nullopt;
      }
  }
  return std::nullopt;
}

Corpus select_for_setting(const Corpus& corpus, Setting s) {
  return corpus.filter([s](const TweetRecord& r) { return gold_label(r, s).has_value(); },
                       corpus.provenance() + "#" + std::string(to_string(s)));
}

}  // namespace predelete
