#include "predelete/analysis.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <unordered_map>

#include "predelete/error.hpp"
#include "predelete/eval.hpp"

namespace predelete {

namespace {

constexpr std::array kReasonCategories{CategoryLabel::HateSpeech, CategoryLabel::Offensive, CategoryLabel::Rumor,
                                       CategoryLabel::Spam};

std::string user_key(const TweetRecord& r) { return r.user_id ? "u:" + *r.user_id : "r:" + r.id; }

double percent(std::size_t k, std::size_t n) {
  return round3(100.0 * static_cast<double>(k) / static_cast<double>(n));
}

}  // namespace

AttributeReport attribute_distribution(const std::vector<NamedSlice>& slices) {
  if (slices.empty()) throw DataError("attribute distribution needs at least one slice");
  AttributeReport report;
  for (const auto& slice : slices) {
    if (slice.corpus.empty()) throw DataError("slice '" + slice.name + "' is empty");
    std::array<std::size_t, 5> counts{};
    for (const auto& r : slice.corpus) {
      counts[0] += r.attributes.has_hashtag;
      counts[1] += r.attributes.has_url;
      counts[2] += r.attributes.has_mention;
      counts[3] += r.attributes.is_reply;
      counts[4] += r.attributes.is_retweet;
    }
    const auto n = slice.corpus.size();
    report.rows.push_back({slice.name, n, percent(counts[0], n), percent(counts[1], n), percent(counts[2], n),
                           percent(counts[3], n), percent(counts[4], n)});
  }
  return report;
}

std::vector<NamedSlice> standard_slices(const Corpus& corpus) {
  std::vector<NamedSlice> out;
  out.push_back({"non_deleted", corpus.filter([](const TweetRecord& r) {
                   return r.deletion_label == DeletionLabel::NotDeleted;
                 }, corpus.provenance() + "#non_deleted")});
  out.push_back({"deleted", corpus.filter([](const TweetRecord& r) {
                   return r.deletion_label == DeletionLabel::Deleted;
                 }, corpus.provenance() + "#deleted")});
  out.push_back({"disinformative", corpus.filter([](const TweetRecord& r) {
                   return is_disinformative(r.category_label);
                 }, corpus.provenance() + "#disinformative")});
  return out;
}

std::size_t StatusCounts::total() const {
  std::size_t t = 0;
  for (auto u : users) t += u;
  return t;
}

StatusReport user_status_breakdown(const Corpus& corpus) {
  std::unordered_map<std::string, UserStatus> status_of;
  std::map<CategoryLabel, std::map<std::string, UserStatus>> authors;
  std::map<std::string, UserStatus> overall;
  for (const auto& r : corpus) {
    const auto key = user_key(r);
    const auto status = status_of.emplace(key, r.user_status).first->second;
    if (!is_disinformative(r.category_label)) continue;
    authors[r.category_label].emplace(key, status);
    overall.emplace(key, status);
  }
  StatusReport report;
  for (auto c : kReasonCategories) {
    StatusCounts counts;
    for (const auto& [user, status] : authors[c]) ++counts.users[static_cast<std::size_t>(status)];
    report.per_category.emplace_back(c, counts);
  }
  for (const auto& [user, status] : overall) ++report.overall.users[static_cast<std::size_t>(status)];
  return report;
}

std::vector<std::pair<std::string, std::size_t>> target_frequencies(const Corpus& corpus, CategoryLabel category) {
  std::map<std::string, std::size_t> counts;
  for (const auto& r : corpus)
    if (r.category_label == category && r.target && !r.target->empty()) ++counts[*r.target];
  std::vector<std::pair<std::string, std::size_t>> out(counts.begin(), counts.end());
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  return out;
}

std::string format_attribute_report(const AttributeReport& report) {
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-16s %8s %9s %6s %9s %8s %9s\n", "slice", "n", "hashtags", "urls", "mentions",
                "replies", "retweets");
  out += buf;
  for (const auto& row : report.rows) {
    std::snprintf(buf, sizeof buf, "%-16s %8zu %8.0f%% %5.0f%% %8.0f%% %7.0f%% %8.0f%%\n", row.slice.c_str(), row.n,
                  row.hashtags, row.urls, row.mentions, row.replies, row.retweets);
    out += buf;
  }
  return out;
}

std::string format_status_report(const StatusReport& report) {
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-14s", "category");
  out += buf;
  for (auto s : kUserStatuses) {
    std::snprintf(buf, sizeof buf, " %16s", std::string(to_string(s)).c_str());
    out += buf;
  }
  out += "            total\n";
  auto row = [&](std::string_view name, const StatusCounts& counts) {
    std::snprintf(buf, sizeof buf, "%-14s", std::string(name).c_str());
    out += buf;
    const auto total = counts.total();
    for (auto u : counts.users) {
      const double share = total == 0 ? 0.0 : 100.0 * static_cast<double>(u) / static_cast<double>(total);
      std::snprintf(buf, sizeof buf, " %8zu (%4.0f%%)", u, share);
      out += buf;
    }
    std::snprintf(buf, sizeof buf, " %16zu\n", total);
    out += buf;
  };
  for (const auto& [category, counts] : report.per_category) row(to_string(category), counts);
  row("all", report.overall);
  return out;
}

nlohmann::ordered_json to_json(const AttributeReport& report) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& row : report.rows) {
    arr.push_back({{"slice", row.slice},
                   {"n", row.n},
                   {"hashtags", row.hashtags},
                   {"urls", row.urls},
                   {"mentions", row.mentions},
                   {"replies", row.replies},
                   {"retweets", row.retweets}});
  }
  return arr;
}

nlohmann::ordered_json to_json(const StatusReport& report) {
  auto counts_json = [](const StatusCounts& counts) {
    nlohmann::ordered_json j;
    for (std::size_t s = 0; s < kUserStatuses.size(); ++s) j[std::string(to_string(kUserStatuses[s]))] = counts.users[s];
    j["total"] = counts.total();
    return j;
  };
  nlohmann::ordered_json j;
  for (const auto& [category, counts] : report.per_category) j[std::string(to_string(category))] = counts_json(counts);
  j["all"] = counts_json(report.overall);
  return j;
}

}  // namespace predelete
