#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace tvf::eval {

enum class OverlapMetric { bleu4, rouge_l };

[[nodiscard]] OverlapMetric parse_overlap_metric(std::string_view s);

// Both metrics tokenize by lowercasing and keeping runs of [a-z0-9].

/// Sentence-level BLEU-4, uniform weights, one reference. Higher-order
/// precisions (n >= 2) are smoothed by adding one to numerator and
/// denominator; the unigram precision is not smoothed and a hypothesis with no
/// unigram match scores 0.
[[nodiscard]] double bleu4(const std::vector<std::string>& reference, const std::vector<std::string>& hypothesis);

/// LCS-based F-measure (beta = 1); 0 when either side has no tokens.
[[nodiscard]] double rouge_l(const std::vector<std::string>& reference, const std::vector<std::string>& hypothesis);

/// Tokenizes both strings and applies the metric with gt as the reference.
[[nodiscard]] double text_overlap(std::string_view gt, std::string_view pred, OverlapMetric metric);

} // namespace tvf::eval
