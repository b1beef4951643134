#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace predelete {

enum class DeletionLabel { Deleted, NotDeleted, Unknown };
enum class CategoryLabel { NotDisinfo, HateSpeech, Offensive, Rumor, Spam, Unlabeled };
enum class LabelSource { Manual, Weak, None };
enum class UserStatus { Suspended, AccountDeleted, ActivePrivate, ActivePublic, Unknown };

inline constexpr std::array kDeletionLabels{DeletionLabel::Deleted, DeletionLabel::NotDeleted,
                                            DeletionLabel::Unknown};
inline constexpr std::array kCategoryLabels{CategoryLabel::NotDisinfo, CategoryLabel::HateSpeech,
                                            CategoryLabel::Offensive,  CategoryLabel::Rumor,
                                            CategoryLabel::Spam,       CategoryLabel::Unlabeled};
inline constexpr std::array kLabelSources{LabelSource::Manual, LabelSource::Weak, LabelSource::None};
inline constexpr std::array kUserStatuses{UserStatus::Suspended, UserStatus::AccountDeleted,
                                          UserStatus::ActivePrivate, UserStatus::ActivePublic,
                                          UserStatus::Unknown};

// Wire names are lowercase snake-case.
std::string_view to_string(DeletionLabel v);
std::string_view to_string(CategoryLabel v);
std::string_view to_string(LabelSource v);
std::string_view to_string(UserStatus v);
std::optional<DeletionLabel> parse_deletion_label(std::string_view s);
std::optional<CategoryLabel> parse_category_label(std::string_view s);
std::optional<LabelSource> parse_label_source(std::string_view s);
std::optional<UserStatus> parse_user_status(std::string_view s);

// HS, offensive, rumor and spam are the "disinformative" categories.
constexpr bool is_disinformative(CategoryLabel c) {
  return c == CategoryLabel::HateSpeech || c == CategoryLabel::Offensive ||
         c == CategoryLabel::Rumor || c == CategoryLabel::Spam;
}

struct AttributeFlags {
  bool has_hashtag = false;
  bool has_url = false;
  bool has_mention = false;
  bool is_reply = false;
  bool is_retweet = false;

  bool operator==(const AttributeFlags&) const = default;
};

struct TweetRecord {
  std::string id;
  std::string text;
  DeletionLabel deletion_label = DeletionLabel::Unknown;
  CategoryLabel category_label = CategoryLabel::Unlabeled;
  LabelSource label_source = LabelSource::None;
  AttributeFlags attributes;
  UserStatus user_status = UserStatus::Unknown;
  // Optional columns: an opaque (pre-hashed) author id and a free-text target annotation.
  std::optional<std::string> user_id;
  std::optional<std::string> target;

  bool operator==(const TweetRecord&) const = default;
};

// Throws DataError describing the first violated record invariant.
void validate_record(const TweetRecord& r);

class Corpus {
 public:
  Corpus() = default;
  // Validates every record and id uniqueness.
  explicit Corpus(std::vector<TweetRecord> records, std::string provenance = {});

  const std::vector<TweetRecord>& records() const noexcept { return records_; }
  const std::string& provenance() const noexcept { return provenance_; }
  std::size_t size() const noexcept { return records_.size(); }
  bool empty() const noexcept { return records_.empty(); }
  const TweetRecord& operator[](std::size_t i) const { return records_[i]; }
  auto begin() const noexcept { return records_.begin(); }
  auto end() const noexcept { return records_.end(); }

  const TweetRecord* find(std::string_view id) const;

  // Keeps records matching pred, in order.
  template <typename Pred>
  Corpus filter(Pred pred, std::string provenance) const {
    std::vector<TweetRecord> kept;
    for (const auto& r : records_)
      if (pred(r)) kept.push_back(r);
    return Corpus(std::move(kept), std::move(provenance));
  }

  // 64-bit FNV-1a over ids, texts and labels in order.
  std::uint64_t fingerprint() const;

 private:
  std::vector<TweetRecord> records_;
  std::string provenance_;
  std::unordered_map<std::string, std::size_t> by_id_;
};

enum class CorpusFormat { Jsonl, Tsv };

std::optional<CorpusFormat> format_from_path(const std::filesystem::path& path);

Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format);
Corpus parse_corpus(std::string_view content, CorpusFormat format, std::string provenance = {});
std::string serialize_corpus(const Corpus& corpus, CorpusFormat format);
void save_corpus(const Corpus& corpus, const std::filesystem::path& path, CorpusFormat format);

// TSV cell escaping: backslash, tab, newline and carriage return.
std::string escape_tsv(std::string_view s);
std::string unescape_tsv(std::string_view s);

enum class WeakLabelRule { NonDeletedAsNotDisinfo };

// Non-deleted, unlabeled records become weakly-labeled not_disinfo.
Corpus apply_weak_labels(const Corpus& corpus, WeakLabelRule rule = WeakLabelRule::NonDeletedAsNotDisinfo);

// Drops records whose text repeats an earlier record's text.
Corpus drop_duplicate_texts(const Corpus& corpus);

enum class DistributionAxis { DeletionLabel, CategoryLabel, LabelSource };

struct DistributionRow {
  std::string value;
  std::size_t count = 0;
  double percent = 0.0;
};

// Rows for values with non-zero count, in enum order.
std::vector<DistributionRow> distribution_report(const Corpus& corpus, DistributionAxis axis);

// ---- splitting ----

struct Fraction {
  std::int64_t num = 0;
  std::int64_t den = 1;
};

// Parses "0.7", "7/10" or "1".
Fraction parse_fraction(std::string_view s);

enum class StratifyOn { DeletionLabel, CategoryLabel };

struct SplitSpec {
  std::array<Fraction, 3> fractions{Fraction{7, 10}, Fraction{1, 10}, Fraction{2, 10}};
  std::uint64_t seed = 42;
  StratifyOn stratify_on = StratifyOn::DeletionLabel;

  // Throws UsageError unless each fraction is in (0,1) and they sum to exactly 1.
  void validate() const;
};

struct SplitResult {
  Corpus train;
  Corpus dev;
  Corpus test;
  std::vector<std::string> warnings;
};

// Largest-remainder apportionment of n items over the three fractions; ties
// in the remainder go to the earlier part.
std::array<std::size_t, 3> apportion(std::size_t n, const std::array<Fraction, 3>& fractions);

SplitResult stratified_split(const Corpus& corpus, const SplitSpec& spec);

}  // namespace predelete
