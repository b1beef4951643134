#include "predelete/agreement.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "predelete/error.hpp"
#include "predelete/eval.hpp"

namespace predelete {

RatingTable::RatingTable(std::vector<std::vector<std::uint32_t>> counts, std::vector<std::string> categories)
    : counts_(std::move(counts)), categories_(std::move(categories)) {
  if (counts_.empty()) throw DataError("agreement table has no items");
  n_categories_ = counts_.front().size();
  if (n_categories_ == 0) throw DataError("agreement table has no categories");
  if (!categories_.empty() && categories_.size() != n_categories_)
    throw DataError("agreement table category names do not match its width");
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    if (counts_[i].size() != n_categories_)
      throw DataError("agreement table is ragged: item " + std::to_string(i) + " has " +
                      std::to_string(counts_[i].size()) + " categories");
    const auto r = std::accumulate(counts_[i].begin(), counts_[i].end(), std::uint32_t{0});
    if (i == 0) raters_ = r;
    if (r != raters_)
      throw DataError("agreement table is ragged: item " + std::to_string(i) + " has " + std::to_string(r) +
                      " ratings, expected " + std::to_string(raters_));
  }
  if (raters_ < 2) throw DataError("agreement needs at least two annotators per item");
  if (categories_.empty())
    for (std::size_t j = 0; j < n_categories_; ++j) categories_.push_back("c" + std::to_string(j));
}

RatingTable RatingTable::from_annotations(std::span<const std::vector<std::string>> rows) {
  std::map<std::string, std::size_t> index;
  for (const auto& row : rows)
    for (const auto& label : row) index.emplace(label, 0);
  std::vector<std::string> categories;
  for (auto& [name, idx] : index) {
    idx = categories.size();
    categories.push_back(name);
  }
  std::vector<std::vector<std::uint32_t>> counts;
  counts.reserve(rows.size());
  for (const auto& row : rows) {
    std::vector<std::uint32_t> c(categories.size(), 0);
    for (const auto& label : row) ++c[index.at(label)];
    counts.push_back(std::move(c));
  }
  return RatingTable(std::move(counts), std::move(categories));
}

double fleiss_kappa(const RatingTable& table) {
  const auto n = static_cast<double>(table.n_items());
  const auto r = static_cast<std::uint64_t>(table.n_raters());
  std::vector<std::uint64_t> column(table.n_categories(), 0);
  double p_bar = 0.0;
  for (std::size_t i = 0; i < table.n_items(); ++i) {
    std::uint64_t sum_sq = 0;
    for (std::size_t j = 0; j < table.n_categories(); ++j) {
      const std::uint64_t c = table.at(i, j);
      sum_sq += c * c;
      column[j] += c;
    }
    p_bar += static_cast<double>(sum_sq - r) / static_cast<double>(r * (r - 1));
  }
  p_bar /= n;

  const auto total = static_cast<std::uint64_t>(table.n_items()) * r;
  double p_e = 0.0;
  bool single_category = false;
  for (auto c : column) {
    if (c == total) single_category = true;
    const double p = static_cast<double>(c) / static_cast<double>(total);
    p_e += p * p;
  }
  if (single_category) {
    if (p_bar == 1.0) return 1.0;
    throw DataError("kappa is undefined: expected agreement is 1 but observed agreement is not");
  }
  return (p_bar - p_e) / (1.0 - p_e);
}

double average_observed_agreement(const RatingTable& table) {
  const std::uint64_t r = table.n_raters();
  const std::uint64_t pairs = r * (r - 1) / 2;
  double sum = 0.0;
  for (std::size_t i = 0; i < table.n_items(); ++i) {
    std::uint64_t agreeing = 0;
    for (std::size_t j = 0; j < table.n_categories(); ++j) {
      const std::uint64_t c = table.at(i, j);
      if (c > 1) agreeing += c * (c - 1) / 2;
    }
    sum += static_cast<double>(agreeing) / static_cast<double>(pairs);
  }
  return sum / static_cast<double>(table.n_items());
}

std::string_view to_string(AgreementBand b) {
  switch (b) {
    case AgreementBand::BelowModerate: return "below_moderate";
    case AgreementBand::Moderate: return "moderate";
    case AgreementBand::Substantial: return "substantial";
    case AgreementBand::Perfect: return "perfect";
  }
  return "below_moderate";
}

AgreementBand band(double kappa) {
  if (kappa >= 0.81) return AgreementBand::Perfect;
  if (kappa >= 0.61) return AgreementBand::Substantial;
  if (kappa >= 0.41) return AgreementBand::Moderate;
  return AgreementBand::BelowModerate;
}

AgreementReport agreement_report(const RatingTable& table) {
  AgreementReport rep;
  rep.kappa = fleiss_kappa(table);
  rep.aoe = average_observed_agreement(table);
  rep.n_items = table.n_items();
  rep.n_annotators = table.n_raters();
  rep.band = band(rep.kappa);
  return rep;
}

RatingTable parse_annotation_tsv(std::string_view content) {
  std::vector<std::vector<std::string>> rows;
  std::size_t width = 0;
  std::size_t line_no = 0;
  std::istringstream in{std::string(content)};
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::size_t start = 0;
    for (;;) {
      auto pos = line.find('\t', start);
      cells.push_back(line.substr(start, pos == std::string::npos ? std::string::npos : pos - start));
      if (pos == std::string::npos) break;
      start = pos + 1;
    }
    if (width == 0) {
      width = cells.size();
      if (width < 2) throw ParseError(line_no, "annotation header must name at least two annotators");
      continue;
    }
    if (cells.size() != width)
      throw ParseError(line_no, "expected " + std::to_string(width) + " annotations, found " +
                                    std::to_string(cells.size()));
    for (const auto& c : cells)
      if (c.empty()) throw ParseError(line_no, "empty annotation cell");
    rows.push_back(std::move(cells));
  }
  if (width == 0) throw ParseError(1, "missing annotation header row");
  if (rows.empty()) throw DataError("annotation file has no items");
  return RatingTable::from_annotations(rows);
}

RatingTable load_annotation_tsv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open annotation file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_annotation_tsv(buf.str());
}

std::string format_agreement(const AgreementReport& report) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "items=%zu annotators=%zu kappa=%.3f aoe=%.3f band=%s\n", report.n_items,
                report.n_annotators, round3(report.kappa), round3(report.aoe),
                std::string(to_string(report.band)).c_str());
  return buf;
}

nlohmann::ordered_json to_json(const AgreementReport& report) {
  nlohmann::ordered_json j;
  j["kappa"] = report.kappa;
  j["aoe"] = report.aoe;
  j["n_items"] = report.n_items;
  j["n_annotators"] = report.n_annotators;
  j["band"] = to_string(report.band);
  return j;
}

}  // namespace predelete
