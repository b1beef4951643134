#include "predelete/cascade.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "predelete/error.hpp"

namespace predelete {

namespace {

void require_labels(const ModelBundle& bundle, Setting setting, std::string_view stage) {
  const auto expected = labels_for(setting);
  if (bundle.labels != expected) {
    std::string got;
    for (const auto& n : bundle.labels.names()) got += (got.empty() ? "" : ",") + n;
    std::string want;
    for (const auto& n : expected.names()) want += (want.empty() ? "" : ",") + n;
    throw ModelError(std::string(stage) + " bundle has labels [" + got + "], expected [" + want + "]");
  }
  bundle.validate();
}

StageVerdict binary_stage(const ModelBundle& bundle, std::string_view text, std::string_view positive,
                          double threshold) {
  const auto pred = bundle.predict_text(text);
  const auto pos = bundle.labels.require(positive);
  const auto neg = 1 - pos;
  const double margin = pred.scores[pos] - pred.scores[neg];
  const bool positive_wins = margin > threshold || (margin == threshold && pos < neg);
  const auto chosen = positive_wins ? pos : neg;
  return {bundle.labels.name(chosen), pred.scores[chosen]};
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_threshold(std::string_view value, std::size_t line) {
  double v = 0.0;
  const auto* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v))
    throw ParseError(line, "threshold '" + std::string(value) + "' is not a finite number");
  return v;
}

}  // namespace

CascadeBundle::CascadeBundle(ModelBundle deletion, ModelBundle disinfo, ModelBundle reason,
                             CascadeThresholds thresholds)
    : deletion_(std::move(deletion)),
      disinfo_(std::move(disinfo)),
      reason_(std::move(reason)),
      thresholds_(thresholds) {
  require_labels(deletion_, Setting::Deletion, "deletion");
  require_labels(disinfo_, Setting::Disinfo, "disinfo");
  require_labels(reason_, Setting::Reason, "reason");
  if (!std::isfinite(thresholds_.deletion) || !std::isfinite(thresholds_.disinfo))
    throw UsageError("cascade thresholds must be finite");
  fingerprint_ =
      hex64(fnv1a64(deletion_.fingerprint + ":" + disinfo_.fingerprint + ":" + reason_.fingerprint));
}

CascadeManifest parse_manifest(std::string_view content, const std::filesystem::path& base_dir) {
  CascadeManifest m;
  bool seen_del = false, seen_dis = false, seen_rea = false;
  std::istringstream in{std::string(content)};
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(line_no, "expected key=value");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    auto path = [&](bool& seen) {
      if (seen) throw ParseError(line_no, "duplicate key '" + std::string(key) + "'");
      if (value.empty()) throw ParseError(line_no, "empty path for '" + std::string(key) + "'");
      seen = true;
      std::filesystem::path p{std::string(value)};
      return p.is_absolute() ? p : base_dir / p;
    };
    if (key == "deletion_bundle") m.deletion_bundle = path(seen_del);
    else if (key == "disinfo_bundle") m.disinfo_bundle = path(seen_dis);
    else if (key == "reason_bundle") m.reason_bundle = path(seen_rea);
    else if (key == "deletion_threshold") m.thresholds.deletion = parse_threshold(value, line_no);
    else if (key == "disinfo_threshold") m.thresholds.disinfo = parse_threshold(value, line_no);
    else throw ParseError(line_no, "unknown manifest key '" + std::string(key) + "'");
  }
  if (!seen_del) throw DataError("manifest is missing deletion_bundle");
  if (!seen_dis) throw DataError("manifest is missing disinfo_bundle");
  if (!seen_rea) throw DataError("manifest is missing reason_bundle");
  return m;
}

CascadeManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open manifest " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_manifest(buf.str(), path.parent_path());
}

std::string serialize_manifest(const CascadeManifest& manifest) {
  std::ostringstream out;
  out.precision(17);
  out << "deletion_bundle=" << manifest.deletion_bundle.string() << "\n"
      << "disinfo_bundle=" << manifest.disinfo_bundle.string() << "\n"
      << "reason_bundle=" << manifest.reason_bundle.string() << "\n"
      << "deletion_threshold=" << manifest.thresholds.deletion << "\n"
      << "disinfo_threshold=" << manifest.thresholds.disinfo << "\n";
  return out.str();
}

CascadeBundle load_cascade(const std::filesystem::path& manifest_path) {
  const auto m = load_manifest(manifest_path);
  return CascadeBundle(load_bundle(m.deletion_bundle), load_bundle(m.disinfo_bundle), load_bundle(m.reason_bundle),
                       m.thresholds);
}

bool is_blank(std::string_view text) {
  return text.find_first_not_of(" \t\n\r\f\v") == std::string_view::npos;
}

CheckResult check(std::string_view text, const CascadeBundle& cascade) {
  if (is_blank(text)) throw DataError("empty text");
  CheckResult r;
  r.deletion = binary_stage(cascade.deletion(), text, "deleted", cascade.thresholds().deletion);
  r.disinfo = binary_stage(cascade.disinfo(), text, "disinfo", cascade.thresholds().disinfo);
  if (r.disinfo.label == "disinfo") {
    const auto& bundle = cascade.reason();
    const auto pred = bundle.predict_text(text);
    r.reason = StageVerdict{bundle.labels.name(pred.label), pred.scores[pred.label]};
  }
  if (r.deletion.label == "deleted")
    r.warnings.push_back({"DELETE_RISK", "This post resembles posts that were later deleted."});
  if (r.reason) {
    const auto& l = r.reason->label;
    if (l == "hate_speech") r.warnings.push_back({"WARN_HS", "This post may contain hate speech."});
    else if (l == "offensive") r.warnings.push_back({"WARN_OFFENSIVE", "This post may be offensive."});
    else if (l == "rumor") r.warnings.push_back({"WARN_RUMOR", "This post may spread a rumor."});
    else r.warnings.push_back({"WARN_SPAM", "This post looks like spam."});
  }
  return r;
}

nlohmann::ordered_json to_json(const CheckResult& result) {
  auto verdict = [](const StageVerdict& v) { return nlohmann::ordered_json{{"label", v.label}, {"score", v.score}}; };
  nlohmann::ordered_json j;
  j["deletion"] = verdict(result.deletion);
  j["disinfo"] = verdict(result.disinfo);
  j["reason"] = result.reason ? verdict(*result.reason) : nlohmann::ordered_json(nullptr);
  auto warnings = nlohmann::ordered_json::array();
  for (const auto& w : result.warnings) warnings.push_back({{"code", w.code}, {"message", w.message}});
  j["warnings"] = warnings;
  return j;
}

}  // namespace predelete
