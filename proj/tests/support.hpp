#pragma once

#include <cstdlib>
#include <filesystem>
#include <iterator>
#include <string>
#include <string_view>
#include <vector>

#include "predelete/corpus.hpp"
#include "predelete/rng.hpp"

namespace testsupport {

using namespace predelete;

inline TweetRecord record(std::string id, std::string text, DeletionLabel deletion,
                          CategoryLabel category = CategoryLabel::Unlabeled) {
  TweetRecord r;
  r.id = std::move(id);
  r.text = std::move(text);
  r.deletion_label = deletion;
  r.category_label = category;
  r.label_source = category == CategoryLabel::Unlabeled ? LabelSource::None : LabelSource::Manual;
  return r;
}

class TempDir {
 public:
  TempDir() {
    std::string pattern = (std::filesystem::temp_directory_path() / "predelete-test-XXXXXX").string();
    if (!mkdtemp(pattern.data())) throw std::runtime_error("mkdtemp failed");
    path_ = pattern;
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

// Four reason classes in proportions 40/25/15/20. Every document carries two
// or three of its class's ten marker words among 8-14 shared noise words.
inline Corpus synthetic_reason_corpus(std::size_t n, std::uint64_t seed) {
  constexpr CategoryLabel kClasses[] = {CategoryLabel::HateSpeech, CategoryLabel::Offensive, CategoryLabel::Rumor,
                                        CategoryLabel::Spam};
  constexpr const char* kPrefix[] = {"hs", "off", "rum", "spm"};
  Rng rng(seed);
  std::vector<TweetRecord> records;
  for (std::size_t i = 0; i < n; ++i) {
    const auto u = uniform_below(rng, 100);
    const std::size_t c = u < 40 ? 0 : u < 65 ? 1 : u < 80 ? 2 : 3;
    std::vector<std::string> words;
    const auto noise = 8 + uniform_below(rng, 7);
    for (std::uint64_t k = 0; k < noise; ++k) words.push_back("w" + std::to_string(uniform_below(rng, 300)));
    const auto markers = 2 + uniform_below(rng, 2);
    for (std::uint64_t k = 0; k < markers; ++k) {
      const auto pos = uniform_below(rng, words.size() + 1);
      words.insert(words.begin() + static_cast<std::ptrdiff_t>(pos),
                   std::string(kPrefix[c]) + "mark" + std::to_string(uniform_below(rng, 10)));
    }
    std::string text;
    for (const auto& w : words) text += (text.empty() ? "" : " ") + w;
    records.push_back(record("s" + std::to_string(i), text, DeletionLabel::Deleted, kClasses[c]));
  }
  return Corpus(std::move(records), "synthetic");
}

// Random UTF-8 mixing whitespace, Arabic marks, URL and mention fragments
// and arbitrary code points.
inline std::string random_unicode(Rng& rng) {
  static const char32_t kPool[] = {U' ', U'\t', U'\n', U'@', U'#', U'_', U'.', U':', U'/', U'a', U'Z', U'0',
                                   0x00A0, 0x0640, 0x064E, 0x0651, 0x0627, 0x0623, 0x0629, 0x0660, 0x061F,
                                   0x200C, 0x200D, 0x2003, 0x1F600, 0x0301, 0x00E9, 0xFF21, 0x3000};
  static const std::string_view kSnippets[] = {"http://", "https://", "t.co/", "HTTP://", "@u", "#tag"};
  std::string s;
  const auto len = uniform_below(rng, 40);
  for (std::uint64_t i = 0; i < len; ++i) {
    const auto pick = uniform_below(rng, 10);
    char32_t c;
    if (pick < 3) {
      c = kPool[uniform_below(rng, std::size(kPool))];
    } else if (pick == 3) {
      s += kSnippets[uniform_below(rng, std::size(kSnippets))];
      continue;
    } else {
      do c = static_cast<char32_t>(1 + uniform_below(rng, 0x10FFFF));
      while (c >= 0xD800 && c <= 0xDFFF);
    }
    if (c < 0x80) {
      s += static_cast<char>(c);
    } else if (c < 0x800) {
      s += static_cast<char>(0xC0 | (c >> 6));
      s += static_cast<char>(0x80 | (c & 0x3F));
    } else if (c < 0x10000) {
      s += static_cast<char>(0xE0 | (c >> 12));
      s += static_cast<char>(0x80 | ((c >> 6) & 0x3F));
      s += static_cast<char>(0x80 | (c & 0x3F));
    } else {
      s += static_cast<char>(0xF0 | (c >> 18));
      s += static_cast<char>(0x80 | ((c >> 12) & 0x3F));
      s += static_cast<char>(0x80 | ((c >> 6) & 0x3F));
      s += static_cast<char>(0x80 | (c & 0x3F));
    }
  }
  return s;
}

}  // namespace testsupport
