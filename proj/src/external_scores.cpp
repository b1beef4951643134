#include "predelete/external_scores.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "predelete/error.hpp"

namespace predelete {

namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) return out;
    start = pos + 1;
  }
}

}  // namespace

std::vector<Prediction> parse_external_scores(std::string_view content, const LabelMap& labels,
                                              std::span<const std::string> expected_ids) {
  auto lines = split(content, '\n');
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  for (auto& l : lines)
    if (!l.empty() && l.back() == '\r') l.remove_suffix(1);
  if (lines.empty()) throw ParseError(1, "missing header row");

  const auto header = split(lines[0], '\t');
  if (header.empty() || header[0] != "id") throw ParseError(1, "first column must be 'id'");
  if (header.size() != labels.size() + 1)
    throw ParseError(1, "expected " + std::to_string(labels.size()) + " score columns, found " +
                            std::to_string(header.size() - 1));
  std::vector<std::size_t> column_class(header.size(), 0);
  std::vector<bool> seen(labels.size(), false);
  for (std::size_t c = 1; c < header.size(); ++c) {
    if (!header[c].starts_with("score_")) throw ParseError(1, "column '" + std::string(header[c]) + "' lacks score_ prefix");
    const auto idx = labels.index_of(header[c].substr(6));
    if (!idx) throw ParseError(1, "column '" + std::string(header[c]) + "' names an unknown label");
    if (seen[*idx]) throw ParseError(1, "column '" + std::string(header[c]) + "' is repeated");
    seen[*idx] = true;
    column_class[c] = *idx;
  }

  std::vector<Prediction> out;
  out.reserve(expected_ids.size());
  for (std::size_t row = 0; row < expected_ids.size(); ++row) {
    const std::size_t line_no = row + 2;
    if (row + 1 >= lines.size())
      throw ParseError(line_no, "missing score row for id '" + expected_ids[row] + "'");
    const auto cells = split(lines[row + 1], '\t');
    if (cells.size() != header.size())
      throw ParseError(line_no, "expected " + std::to_string(header.size()) + " cells, found " +
                                    std::to_string(cells.size()));
    if (cells[0] != expected_ids[row])
      throw ParseError(line_no, "id '" + std::string(cells[0]) + "' does not match expected id '" +
                                    expected_ids[row] + "'");
    std::vector<double> scores(labels.size(), 0.0);
    for (std::size_t c = 1; c < cells.size(); ++c) {
      const std::string cell(cells[c]);
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (cell.empty() || end != cell.c_str() + cell.size() || !std::isfinite(v))
        throw ParseError(line_no, "invalid score '" + cell + "'");
      scores[column_class[c]] = v;
    }
    out.push_back(prediction_from_scores(std::move(scores)));
  }
  if (lines.size() > expected_ids.size() + 1)
    throw ParseError(expected_ids.size() + 2, "more score rows than evaluation records");
  return out;
}

std::vector<Prediction> external_scores(const std::filesystem::path& path, const LabelMap& labels,
                                        std::span<const std::string> expected_ids) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open scores file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_external_scores(buf.str(), labels, expected_ids);
}

}  // namespace predelete
