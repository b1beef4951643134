#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace predelete {

struct NormalizationConfig {
  bool replace_urls = true;
  bool replace_mentions = true;
  bool strip_hash_symbol = true;
  bool strip_non_alphanumeric = true;
  std::string url_token = "URL";
  std::string user_token = "USER";
  // Off by default; neither is part of the reference pipeline.
  bool lowercase = false;
  bool normalize_arabic = false;

  // Throws UsageError if a replacement token is empty or contains whitespace.
  void validate() const;
  bool operator==(const NormalizationConfig&) const = default;
};

using TokenSequence = std::vector<std::string>;

// Rules run in a fixed order:
//   1. URL spans (http://, https://, bare t.co/) -> url_token
//   2. @-mentions -> user_token
//   3. '#' deleted
//   4. anything that is not a letter (L*), decimal digit (Nd) or space -> ' ';
//      combining marks (M*) are deleted outright
//   5. whitespace runs collapsed, ends trimmed
// Replacement tokens are never touched by rules 3-4. Invalid UTF-8 bytes are
// read as U+FFFD.
std::string normalize(std::string_view text, const NormalizationConfig& config = {});

// Splits on Unicode whitespace.
TokenSequence tokenize(std::string_view text);

inline TokenSequence preprocess(std::string_view text, const NormalizationConfig& config) {
  return tokenize(normalize(text, config));
}

}  // namespace predelete
