#include "predelete/textprep.hpp"

#include <unicode/uchar.h>
#include <unicode/utf8.h>

#include "predelete/error.hpp"

namespace predelete {

namespace {

using CodePoints = std::u32string;

CodePoints decode(std::string_view text) {
  CodePoints out;
  out.reserve(text.size());
  const auto* s = reinterpret_cast<const uint8_t*>(text.data());
  const auto length = static_cast<int32_t>(text.size());
  int32_t i = 0;
  while (i < length) {
    UChar32 c;
    U8_NEXT(s, i, length, c);
    out.push_back(c < 0 ? char32_t{0xFFFD} : static_cast<char32_t>(c));
  }
  return out;
}

void append_utf8(std::string& out, char32_t c) {
  uint8_t buf[U8_MAX_LENGTH];
  int32_t n = 0;
  U8_APPEND_UNSAFE(buf, n, static_cast<UChar32>(c));
  out.append(reinterpret_cast<const char*>(buf), static_cast<std::size_t>(n));
}

bool is_alnum(char32_t c) {
  return (U_GET_GC_MASK(static_cast<UChar32>(c)) & (U_GC_L_MASK | U_GC_ND_MASK)) != 0;
}

bool is_mark(char32_t c) { return (U_GET_GC_MASK(static_cast<UChar32>(c)) & U_GC_M_MASK) != 0; }

bool is_space(char32_t c) { return u_isUWhiteSpace(static_cast<UChar32>(c)) != 0; }

bool is_mention_char(char32_t c) { return c == U'_' || is_alnum(c); }

char32_t ascii_lower(char32_t c) { return (c >= U'A' && c <= U'Z') ? c + 32 : c; }

bool starts_with_ci(const CodePoints& cps, std::size_t pos, std::u32string_view prefix) {
  if (cps.size() - pos < prefix.size()) return false;
  for (std::size_t k = 0; k < prefix.size(); ++k)
    if (ascii_lower(cps[pos + k]) != prefix[k]) return false;
  return true;
}

// Text is carried as a sequence of raw spans and already-substituted tokens.
struct Piece {
  bool is_token = false;
  CodePoints raw;
  const std::string* token = nullptr;
};

std::vector<Piece> replace_urls(const CodePoints& cps, const std::string& token) {
  std::vector<Piece> out(1);
  std::size_t i = 0;
  while (i < cps.size()) {
    const bool boundary = i == 0 || !is_alnum(cps[i - 1]);
    if (boundary && (starts_with_ci(cps, i, U"http://") || starts_with_ci(cps, i, U"https://") ||
                     starts_with_ci(cps, i, U"t.co/"))) {
      while (i < cps.size() && !is_space(cps[i])) ++i;
      out.push_back({true, {}, &token});
      out.emplace_back();
      continue;
    }
    out.back().raw.push_back(cps[i++]);
  }
  return out;
}

std::vector<Piece> replace_mentions(std::vector<Piece> pieces, const std::string& token) {
  std::vector<Piece> out;
  for (auto& piece : pieces) {
    if (piece.is_token) {
      out.push_back(std::move(piece));
      continue;
    }
    const auto& cps = piece.raw;
    out.emplace_back();
    std::size_t i = 0;
    while (i < cps.size()) {
      const bool boundary = i == 0 || !is_mention_char(cps[i - 1]);
      if (cps[i] == U'@' && boundary && i + 1 < cps.size() && is_mention_char(cps[i + 1])) {
        ++i;
        while (i < cps.size() && is_mention_char(cps[i])) ++i;
        out.push_back({true, {}, &token});
        out.emplace_back();
        continue;
      }
      out.back().raw.push_back(cps[i++]);
    }
  }
  return out;
}

char32_t normalize_arabic_letter(char32_t c) {
  switch (c) {
    case 0x0622:  // alef with madda
    case 0x0623:  // alef with hamza above
    case 0x0625:  // alef with hamza below
    case 0x0671:  // alef wasla
      return 0x0627;
    case 0x0629: return 0x0647;  // teh marbuta -> heh
    case 0x0649: return 0x064A;  // alef maksura -> yeh
    default: return c;
  }
}

bool has_whitespace(std::string_view s) {
  for (char32_t c : decode(s))
    if (is_space(c)) return true;
  return false;
}

}  // namespace

void NormalizationConfig::validate() const {
  for (const auto* token : {&url_token, &user_token}) {
    if (token->empty()) throw UsageError("normalization replacement tokens must be non-empty");
    if (has_whitespace(*token))
      throw UsageError("normalization replacement token '" + *token + "' contains whitespace");
  }
}

std::string normalize(std::string_view text, const NormalizationConfig& config) {
  const CodePoints cps = decode(text);

  std::vector<Piece> pieces;
  if (config.replace_urls) {
    pieces = replace_urls(cps, config.url_token);
  } else {
    pieces.push_back({false, cps, nullptr});
  }
  if (config.replace_mentions) pieces = replace_mentions(std::move(pieces), config.user_token);

  std::string joined;
  joined.reserve(text.size() + 8);
  for (const auto& piece : pieces) {
    if (piece.is_token) {
      joined += ' ';
      joined += *piece.token;
      joined += ' ';
      continue;
    }
    for (char32_t c : piece.raw) {
      if (config.strip_hash_symbol && c == U'#') continue;
      if (config.strip_non_alphanumeric) {
        if (is_mark(c)) continue;
        if (!is_alnum(c)) c = U' ';
      }
      if (config.lowercase) c = static_cast<char32_t>(u_tolower(static_cast<UChar32>(c)));
      if (config.normalize_arabic) c = normalize_arabic_letter(c);
      append_utf8(joined, c);
    }
  }

  std::string out;
  out.reserve(joined.size());
  bool pending_space = false;
  for (char32_t c : decode(joined)) {
    if (is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out += ' ';
    pending_space = false;
    append_utf8(out, c);
  }
  return out;
}

TokenSequence tokenize(std::string_view text) {
  TokenSequence tokens;
  std::string current;
  for (char32_t c : decode(text)) {
    if (is_space(c)) {
      if (!current.empty()) tokens.push_back(std::move(current));
      current.clear();
    } else {
      append_utf8(current, c);
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

}  // namespace predelete
