#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "predelete/labels.hpp"
#include "predelete/models.hpp"

namespace predelete {

// Scores produced outside this toolkit (e.g. by a fine-tuned transformer),
// one TSV row per evaluation record in corpus order:
//
//   id <TAB> score_<class> <TAB> ...
//
// Score columns may come in any order but must name exactly the classes of
// `labels`. Errors report the first offending line.
std::vector<Prediction> parse_external_scores(std::string_view content, const LabelMap& labels,
                                              std::span<const std::string> expected_ids);
std::vector<Prediction> external_scores(const std::filesystem::path& path, const LabelMap& labels,
                                        std::span<const std::string> expected_ids);

}  // namespace predelete
