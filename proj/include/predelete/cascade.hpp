#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "predelete/bundle.hpp"

namespace predelete {

struct CascadeThresholds {
  // The positive class (deleted / disinfo) wins when its score minus the
  // negative class score exceeds the threshold. 0 reproduces argmax.
  double deletion = 0.0;
  double disinfo = 0.0;
};

class CascadeBundle {
 public:
  // Throws ModelError if a bundle's label map is not the fixed class set of
  // its stage.
  CascadeBundle(ModelBundle deletion, ModelBundle disinfo, ModelBundle reason, CascadeThresholds thresholds = {});

  const ModelBundle& deletion() const noexcept { return deletion_; }
  const ModelBundle& disinfo() const noexcept { return disinfo_; }
  const ModelBundle& reason() const noexcept { return reason_; }
  const CascadeThresholds& thresholds() const noexcept { return thresholds_; }
  // Hash over the three bundle fingerprints.
  const std::string& fingerprint() const noexcept { return fingerprint_; }

 private:
  ModelBundle deletion_;
  ModelBundle disinfo_;
  ModelBundle reason_;
  CascadeThresholds thresholds_;
  std::string fingerprint_;
};

// Plain key=value lines: deletion_bundle, disinfo_bundle, reason_bundle
// (relative paths resolve against the manifest's directory), and optional
// deletion_threshold, disinfo_threshold. '#' starts a comment line.
struct CascadeManifest {
  std::filesystem::path deletion_bundle;
  std::filesystem::path disinfo_bundle;
  std::filesystem::path reason_bundle;
  CascadeThresholds thresholds;
};

CascadeManifest parse_manifest(std::string_view content, const std::filesystem::path& base_dir);
CascadeManifest load_manifest(const std::filesystem::path& path);
std::string serialize_manifest(const CascadeManifest& manifest);
CascadeBundle load_cascade(const std::filesystem::path& manifest_path);

struct StageVerdict {
  std::string label;
  double score = 0.0;  // the chosen class's raw score
  bool operator==(const StageVerdict&) const = default;
};

struct CascadeWarning {
  std::string code;
  std::string message;
  bool operator==(const CascadeWarning&) const = default;
};

struct CheckResult {
  StageVerdict deletion;
  StageVerdict disinfo;
  std::optional<StageVerdict> reason;
  std::vector<CascadeWarning> warnings;
  bool operator==(const CheckResult&) const = default;
};

// Stages 1 and 2 always run on the input text; stage 3 only when stage 2
// says disinfo. Throws DataError("empty text") when the text is blank.
CheckResult check(std::string_view text, const CascadeBundle& cascade);

bool is_blank(std::string_view text);

// {"deletion": {...}, "disinfo": {...}, "reason": {...} | null, "warnings": [...]}
nlohmann::ordered_json to_json(const CheckResult& result);

// Hand-weighted cascade with a two-term vocabulary: a hate speech trigger and
// a spam trigger. Margins are exact:
//   trigger alone    -> deleted +1, disinfo +1, hate_speech +1
//   spam term alone  -> deleted -1, disinfo +1, spam +1
//   neither          -> deleted -1, disinfo -1
CascadeBundle fixture_cascade();
inline constexpr std::string_view kFixtureHateText = "those people are vermin";
inline constexpr std::string_view kFixtureSpamText = "free giveaway click now";
inline constexpr std::string_view kFixtureBenignText = "lovely weather in the park today";

// Writes the three fixture bundles and a manifest into dir; returns the manifest path.
std::filesystem::path write_fixture_cascade(const std::filesystem::path& dir);

}  // namespace predelete
