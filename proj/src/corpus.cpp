#include "predelete/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "predelete/error.hpp"

namespace predelete {

namespace {

template <typename E, std::size_t N>
std::optional<E> parse_enum(std::string_view s, const std::array<E, N>& values) {
  for (E v : values)
    if (to_string(v) == s) return v;
  return std::nullopt;
}

bool is_blank(std::string_view s) {
  return s.find_first_not_of(" \t\r\n\f\v") == std::string_view::npos;
}

constexpr std::array<std::string_view, 11> kRequiredColumns{
    "id",          "text",    "deletion_label", "category_label", "label_source", "has_hashtag",
    "has_url",     "has_mention", "is_reply",   "is_retweet",     "user_status"};
constexpr std::array<std::string_view, 2> kOptionalColumns{"user_id", "target"};

bool is_known_column(std::string_view c) {
  for (auto k : kRequiredColumns)
    if (k == c) return true;
  for (auto k : kOptionalColumns)
    if (k == c) return true;
  return false;
}

// Shared field decoding for both formats; throws std::invalid_argument with a reason.
struct FieldSink {
  TweetRecord rec;

  void set(std::string_view key, std::string_view value) {
    auto bad = [&](std::string_view what) {
      throw std::invalid_argument(std::string(what) + " value '" + std::string(value) + "' for " +
                                  std::string(key));
    };
    auto as_bool = [&]() {
      if (value == "true") return true;
      if (value == "false") return false;
      bad("invalid boolean");
      return false;
    };
    if (key == "id") {
      rec.id = value;
    } else if (key == "text") {
      rec.text = value;
    } else if (key == "deletion_label") {
      auto v = parse_deletion_label(value);
      if (!v) bad("unknown");
      rec.deletion_label = *v;
    } else if (key == "category_label") {
      auto v = parse_category_label(value);
      if (!v) bad("unknown");
      rec.category_label = *v;
    } else if (key == "label_source") {
      auto v = parse_label_source(value);
      if (!v) bad("unknown");
      rec.label_source = *v;
    } else if (key == "user_status") {
      auto v = parse_user_status(value);
      if (!v) bad("unknown");
      rec.user_status = *v;
    } else if (key == "has_hashtag") {
      rec.attributes.has_hashtag = as_bool();
    } else if (key == "has_url") {
      rec.attributes.has_url = as_bool();
    } else if (key == "has_mention") {
      rec.attributes.has_mention = as_bool();
    } else if (key == "is_reply") {
      rec.attributes.is_reply = as_bool();
    } else if (key == "is_retweet") {
      rec.attributes.is_retweet = as_bool();
    } else if (key == "user_id") {
      rec.user_id = std::string(value);
    } else if (key == "target") {
      rec.target = std::string(value);
    } else {
      throw std::invalid_argument("unknown field '" + std::string(key) + "'");
    }
  }
};

TweetRecord parse_jsonl_line(std::string_view line) {
  nlohmann::json obj;
  try {
    obj = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("malformed JSON: ") + e.what());
  }
  if (!obj.is_object()) throw std::invalid_argument("expected a JSON object");
  for (auto key : kRequiredColumns)
    if (!obj.contains(key)) throw std::invalid_argument("missing key '" + std::string(key) + "'");

  FieldSink sink;
  for (const auto& [key, value] : obj.items()) {
    if (!is_known_column(key)) throw std::invalid_argument("unknown key '" + key + "'");
    if (value.is_boolean()) {
      if (!key.starts_with("has_") && !key.starts_with("is_"))
        throw std::invalid_argument("key '" + key + "' must be a string");
      sink.set(key, value.get<bool>() ? "true" : "false");
    } else if (value.is_string()) {
      if (key.starts_with("has_") || key.starts_with("is_"))
        throw std::invalid_argument("key '" + key + "' must be a boolean");
      sink.set(key, value.get<std::string>());
    } else {
      throw std::invalid_argument("key '" + key + "' has unsupported JSON type");
    }
  }
  return std::move(sink.rec);
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  for (;;) {
    auto pos = line.find('\t', start);
    if (pos == std::string_view::npos) {
      cells.push_back(line.substr(start));
      return cells;
    }
    cells.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::vector<std::string_view> split_lines(std::string_view content) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < content.size()) {
    auto pos = content.find('\n', start);
    auto line = content.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return lines;
}

void fnv_mix(std::uint64_t& h, std::string_view s) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  h ^= 0x1f;
  h *= 0x100000001b3ULL;
}

}  // namespace

std::string_view to_string(DeletionLabel v) {
  switch (v) {
    case DeletionLabel::Deleted: return "deleted";
    case DeletionLabel::NotDeleted: return "not_deleted";
    case DeletionLabel::Unknown: return "unknown";
  }
  return "unknown";
}

std::string_view to_string(CategoryLabel v) {
  switch (v) {
    case CategoryLabel::NotDisinfo: return "not_disinfo";
    case CategoryLabel::HateSpeech: return "hate_speech";
    case CategoryLabel::Offensive: return "offensive";
    case CategoryLabel::Rumor: return "rumor";
    case CategoryLabel::Spam: return "spam";
    case CategoryLabel::Unlabeled: return "unlabeled";
  }
  return "unlabeled";
}

std::string_view to_string(LabelSource v) {
  switch (v) {
    case LabelSource::Manual: return "manual";
    case LabelSource::Weak: return "weak";
    case LabelSource::None: return "none";
  }
  return "none";
}

std::string_view to_string(UserStatus v) {
  switch (v) {
    case UserStatus::Suspended: return "suspended";
    case UserStatus::AccountDeleted: return "account_deleted";
    case UserStatus::ActivePrivate: return "active_private";
    case UserStatus::ActivePublic: return "active_public";
    case UserStatus::Unknown: return "unknown";
  }
  return "unknown";
}

std::optional<DeletionLabel> parse_deletion_label(std::string_view s) { return parse_enum(s, kDeletionLabels); }
std::optional<CategoryLabel> parse_category_label(std::string_view s) { return parse_enum(s, kCategoryLabels); }
std::optional<LabelSource> parse_label_source(std::string_view s) { return parse_enum(s, kLabelSources); }
std::optional<UserStatus> parse_user_status(std::string_view s) { return parse_enum(s, kUserStatuses); }

void validate_record(const TweetRecord& r) {
  if (r.id.empty()) throw DataError("record has an empty id");
  if (is_blank(r.text)) throw DataError("record '" + r.id + "' has empty text");
  if (r.category_label != CategoryLabel::Unlabeled && r.label_source == LabelSource::None)
    throw DataError("record '" + r.id + "' has category_label " + std::string(to_string(r.category_label)) +
                    " but label_source none");
  if (r.label_source == LabelSource::Weak && r.category_label != CategoryLabel::NotDisinfo)
    throw DataError("record '" + r.id + "' is weakly labeled as " + std::string(to_string(r.category_label)) +
                    "; weak labels may only be not_disinfo");
}

Corpus::Corpus(std::vector<TweetRecord> records, std::string provenance)
    : records_(std::move(records)), provenance_(std::move(provenance)) {
  by_id_.reserve(records_.size());
  for (std::size_t i = 0; i < records_.size(); ++i) {
    validate_record(records_[i]);
    if (!by_id_.emplace(records_[i].id, i).second)
      throw DataError("duplicate id '" + records_[i].id + "'");
  }
}

const TweetRecord* Corpus::find(std::string_view id) const {
  auto it = by_id_.find(std::string(id));
  return it == by_id_.end() ? nullptr : &records_[it->second];
}

std::uint64_t Corpus::fingerprint() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& r : records_) {
    fnv_mix(h, r.id);
    fnv_mix(h, r.text);
    fnv_mix(h, to_string(r.deletion_label));
    fnv_mix(h, to_string(r.category_label));
    fnv_mix(h, to_string(r.label_source));
  }
  return h;
}

std::optional<CorpusFormat> format_from_path(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  if (ext == ".jsonl" || ext == ".json") return CorpusFormat::Jsonl;
  if (ext == ".tsv") return CorpusFormat::Tsv;
  return std::nullopt;
}

std::string escape_tsv(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\t': out += "\\t"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      default: out += c;
    }
  }
  return out;
}

std::string unescape_tsv(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '\\') {
      out += s[i];
      continue;
    }
    if (i + 1 == s.size()) throw std::invalid_argument("dangling backslash escape");
    switch (s[++i]) {
      case '\\': out += '\\'; break;
      case 't': out += '\t'; break;
      case 'n': out += '\n'; break;
      case 'r': out += '\r'; break;
      default: throw std::invalid_argument(std::string("unknown escape \\") + s[i]);
    }
  }
  return out;
}

Corpus parse_corpus(std::string_view content, CorpusFormat format, std::string provenance) {
  auto lines = split_lines(content);
  std::vector<TweetRecord> records;
  std::unordered_map<std::string, std::size_t> seen;

  auto accept = [&](TweetRecord rec, std::size_t line_no) {
    try {
      validate_record(rec);
    } catch (const DataError& e) {
      throw ParseError(line_no, e.what());
    }
    if (auto [it, inserted] = seen.emplace(rec.id, line_no); !inserted)
      throw ParseError(line_no, "duplicate id '" + rec.id + "' (first seen on line " +
                                    std::to_string(it->second) + ")");
    records.push_back(std::move(rec));
  };

  if (format == CorpusFormat::Jsonl) {
    for (std::size_t i = 0; i < lines.size(); ++i) {
      if (is_blank(lines[i])) continue;
      TweetRecord rec;
      try {
        rec = parse_jsonl_line(lines[i]);
      } catch (const std::invalid_argument& e) {
        throw ParseError(i + 1, e.what());
      }
      accept(std::move(rec), i + 1);
    }
  } else {
    if (lines.empty() || lines[0].empty()) throw ParseError(1, "missing TSV header row");
    auto header = split_tabs(lines[0]);
    for (auto col : header)
      if (!is_known_column(col)) throw ParseError(1, "unknown column '" + std::string(col) + "'");
    for (auto req : kRequiredColumns)
      if (std::find(header.begin(), header.end(), req) == header.end())
        throw ParseError(1, "missing column '" + std::string(req) + "'");
    for (std::size_t i = 1; i < lines.size(); ++i) {
      if (lines[i].empty()) continue;
      auto cells = split_tabs(lines[i]);
      if (cells.size() != header.size())
        throw ParseError(i + 1, "expected " + std::to_string(header.size()) + " cells, found " +
                                    std::to_string(cells.size()));
      FieldSink sink;
      try {
        for (std::size_t c = 0; c < cells.size(); ++c) {
          auto value = unescape_tsv(cells[c]);
          // An empty optional cell means the field is absent.
          if (value.empty() && (header[c] == "user_id" || header[c] == "target")) continue;
          sink.set(header[c], value);
        }
      } catch (const std::invalid_argument& e) {
        throw ParseError(i + 1, e.what());
      }
      accept(std::move(sink.rec), i + 1);
    }
  }
  return Corpus(std::move(records), std::move(provenance));
}

Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open corpus file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_corpus(buf.str(), format, path.string());
}

std::string serialize_corpus(const Corpus& corpus, CorpusFormat format) {
  bool any_user = false;
  bool any_target = false;
  for (const auto& r : corpus) {
    any_user |= r.user_id.has_value();
    any_target |= r.target.has_value();
  }
  std::string out;
  if (format == CorpusFormat::Jsonl) {
    for (const auto& r : corpus) {
      nlohmann::ordered_json obj;
      obj["id"] = r.id;
      obj["text"] = r.text;
      obj["deletion_label"] = to_string(r.deletion_label);
      obj["category_label"] = to_string(r.category_label);
      obj["label_source"] = to_string(r.label_source);
      obj["has_hashtag"] = r.attributes.has_hashtag;
      obj["has_url"] = r.attributes.has_url;
      obj["has_mention"] = r.attributes.has_mention;
      obj["is_reply"] = r.attributes.is_reply;
      obj["is_retweet"] = r.attributes.is_retweet;
      obj["user_status"] = to_string(r.user_status);
      if (r.user_id) obj["user_id"] = *r.user_id;
      if (r.target) obj["target"] = *r.target;
      out += obj.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
      out += '\n';
    }
    return out;
  }

  for (std::size_t i = 0; i < kRequiredColumns.size(); ++i) {
    if (i) out += '\t';
    out += kRequiredColumns[i];
  }
  if (any_user) out += "\tuser_id";
  if (any_target) out += "\ttarget";
  out += '\n';
  auto flag = [](bool b) { return b ? "true" : "false"; };
  for (const auto& r : corpus) {
    out += escape_tsv(r.id);
    out += '\t';
    out += escape_tsv(r.text);
    out += '\t';
    out += to_string(r.deletion_label);
    out += '\t';
    out += to_string(r.category_label);
    out += '\t';
    out += to_string(r.label_source);
    for (bool b : {r.attributes.has_hashtag, r.attributes.has_url, r.attributes.has_mention,
                   r.attributes.is_reply, r.attributes.is_retweet}) {
      out += '\t';
      out += flag(b);
    }
    out += '\t';
    out += to_string(r.user_status);
    if (any_user) out += "\t" + escape_tsv(r.user_id.value_or(""));
    if (any_target) out += "\t" + escape_tsv(r.target.value_or(""));
    out += '\n';
  }
  return out;
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path, CorpusFormat format) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write corpus file " + path.string());
  out << serialize_corpus(corpus, format);
  if (!out) throw DataError("failed writing corpus file " + path.string());
}

Corpus apply_weak_labels(const Corpus& corpus, WeakLabelRule rule) {
  std::vector<TweetRecord> out(corpus.begin(), corpus.end());
  if (rule == WeakLabelRule::NonDeletedAsNotDisinfo) {
    for (auto& r : out) {
      if (r.deletion_label == DeletionLabel::NotDeleted && r.category_label == CategoryLabel::Unlabeled) {
        r.category_label = CategoryLabel::NotDisinfo;
        r.label_source = LabelSource::Weak;
      }
    }
  }
  return Corpus(std::move(out), corpus.provenance());
}

Corpus drop_duplicate_texts(const Corpus& corpus) {
  std::unordered_map<std::string_view, bool> seen;
  std::vector<TweetRecord> kept;
  for (const auto& r : corpus)
    if (seen.emplace(r.text, true).second) kept.push_back(r);
  return Corpus(std::move(kept), corpus.provenance());
}

std::vector<DistributionRow> distribution_report(const Corpus& corpus, DistributionAxis axis) {
  std::vector<DistributionRow> rows;
  auto tally = [&](const auto& values, auto field) {
    for (auto v : values) {
      std::size_t n = 0;
      for (const auto& r : corpus) n += field(r) == v;
      if (n == 0) continue;
      rows.push_back({std::string(to_string(v)), n, 100.0 * static_cast<double>(n) / static_cast<double>(corpus.size())});
    }
  };
  switch (axis) {
    case DistributionAxis::DeletionLabel:
      tally(kDeletionLabels, [](const TweetRecord& r) { return r.deletion_label; });
      break;
    case DistributionAxis::CategoryLabel:
      tally(kCategoryLabels, [](const TweetRecord& r) { return r.category_label; });
      break;
    case DistributionAxis::LabelSource:
      tally(kLabelSources, [](const TweetRecord& r) { return r.label_source; });
      break;
  }
  return rows;
}

}  // namespace predelete
