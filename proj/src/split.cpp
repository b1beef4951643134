#include <algorithm>
#include <charconv>
#include <map>
#include <numeric>

#include "predelete/corpus.hpp"
#include "predelete/error.hpp"
#include "predelete/rng.hpp"

namespace predelete {

namespace {

Fraction reduced(std::int64_t num, std::int64_t den) {
  const auto g = std::gcd(num, den);
  return g == 0 ? Fraction{num, den} : Fraction{num / g, den / g};
}

std::int64_t parse_int(std::string_view s) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) throw UsageError("invalid fraction '" + std::string(s) + "'");
  return v;
}

}  // namespace

Fraction parse_fraction(std::string_view s) {
  if (s.empty()) throw UsageError("empty fraction");
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    const auto num = parse_int(s.substr(0, slash));
    const auto den = parse_int(s.substr(slash + 1));
    if (den <= 0) throw UsageError("fraction denominator must be positive in '" + std::string(s) + "'");
    return reduced(num, den);
  }
  const auto dot = s.find('.');
  if (dot == std::string_view::npos) return Fraction{parse_int(s), 1};
  const auto whole = s.substr(0, dot);
  const auto decimals = s.substr(dot + 1);
  if (decimals.empty() || decimals.size() > 12 || !std::all_of(decimals.begin(), decimals.end(), [](char c) {
        return c >= '0' && c <= '9';
      }))
    throw UsageError("invalid fraction '" + std::string(s) + "'");
  std::int64_t den = 1;
  for (std::size_t i = 0; i < decimals.size(); ++i) den *= 10;
  const std::int64_t w = whole.empty() ? 0 : parse_int(whole);
  return reduced(w * den + parse_int(decimals), den);
}

void SplitSpec::validate() const {
  std::int64_t common = 1;
  for (const auto& f : fractions) {
    if (f.den <= 0 || f.num <= 0 || f.num >= f.den)
      throw UsageError("split fractions must each lie strictly between 0 and 1");
    common = std::lcm(common, f.den);
  }
  std::int64_t total = 0;
  for (const auto& f : fractions) total += f.num * (common / f.den);
  if (total != common) throw UsageError("split fractions must sum to exactly 1");
}

std::array<std::size_t, 3> apportion(std::size_t n, const std::array<Fraction, 3>& fractions) {
  std::int64_t common = 1;
  for (const auto& f : fractions) common = std::lcm(common, f.den);

  std::array<std::size_t, 3> sizes{};
  std::array<__int128, 3> remainders{};
  std::size_t assigned = 0;
  for (std::size_t p = 0; p < 3; ++p) {
    const __int128 quota = static_cast<__int128>(n) * fractions[p].num * (common / fractions[p].den);
    sizes[p] = static_cast<std::size_t>(quota / common);
    remainders[p] = quota % common;
    assigned += sizes[p];
  }
  std::array<std::size_t, 3> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainders[a] > remainders[b]; });
  for (std::size_t k = 0; assigned < n; ++k, ++assigned) ++sizes[order[k % 3]];
  return sizes;
}

SplitResult stratified_split(const Corpus& corpus, const SplitSpec& spec) {
  spec.validate();
  if (corpus.empty()) throw DataError("cannot split an empty corpus: no strata");

  // Stratum key is the enum's ordinal; std::map keeps strata in enum order.
  std::map<int, std::vector<std::size_t>> strata;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& r = corpus[i];
    int key = 0;
    if (spec.stratify_on == StratifyOn::DeletionLabel) {
      if (r.deletion_label == DeletionLabel::Unknown)
        throw DataError("record '" + r.id + "' has unknown deletion_label and cannot be stratified");
      key = static_cast<int>(r.deletion_label);
    } else {
      if (r.category_label == CategoryLabel::Unlabeled)
        throw DataError("record '" + r.id + "' has unlabeled category_label and cannot be stratified");
      key = static_cast<int>(r.category_label);
    }
    strata[key].push_back(i);
  }

  SplitResult result;
  std::array<std::vector<std::size_t>, 3> members;
  for (auto& [key, indices] : strata) {
    if (indices.size() < 3) {
      const std::string name(spec.stratify_on == StratifyOn::DeletionLabel
                                 ? to_string(static_cast<DeletionLabel>(key))
                                 : to_string(static_cast<CategoryLabel>(key)));
      result.warnings.push_back("stratum '" + name + "' has only " + std::to_string(indices.size()) +
                                " record(s); some parts receive none of it");
    }
    Rng rng(mix_seed(spec.seed, static_cast<std::uint64_t>(key)));
    shuffle(std::span<std::size_t>(indices), rng);
    const auto sizes = apportion(indices.size(), spec.fractions);
    std::size_t pos = 0;
    for (std::size_t p = 0; p < 3; ++p) {
      members[p].insert(members[p].end(), indices.begin() + static_cast<std::ptrdiff_t>(pos),
                        indices.begin() + static_cast<std::ptrdiff_t>(pos + sizes[p]));
      pos += sizes[p];
    }
  }

  const std::array<const char*, 3> part_names{"train", "dev", "test"};
  std::array<Corpus, 3> parts;
  for (std::size_t p = 0; p < 3; ++p) {
    std::sort(members[p].begin(), members[p].end());
    std::vector<TweetRecord> records;
    records.reserve(members[p].size());
    for (auto i : members[p]) records.push_back(corpus[i]);
    parts[p] = Corpus(std::move(records), corpus.provenance() + "#" + part_names[p] + "/seed=" +
                                              std::to_string(spec.seed));
  }
  result.train = std::move(parts[0]);
  result.dev = std::move(parts[1]);
  result.test = std::move(parts[2]);
  return result;
}

}  // namespace predelete
