#pragma once

#include <vector>

#include "tvf/core/types.hpp"

namespace tvf::eval {

inline constexpr double kDefaultIouThreshold = 0.75;

/// Intersection over union with area = (x2-x1)(y2-y1); 0 for disjoint or touching boxes.
[[nodiscard]] double iou(const NormBox& a, const NormBox& b) noexcept;

struct MatchCounts {
    long tp = 0;
    long fp = 0;
    long fn = 0;

    MatchCounts& operator+=(const MatchCounts& o) noexcept {
        tp += o.tp;
        fp += o.fp;
        fn += o.fn;
        return *this;
    }
    bool operator==(const MatchCounts&) const = default;
};

// One-to-one matching where a pair is admissible iff IoU >= t (and, label-aware,
// the lowercased labels are equal). Pairs are first taken greedily by
// descending IoU, then augmenting paths grow the matching until no admissible
// pair can be added, so tp is the largest achievable number of matches.
[[nodiscard]] MatchCounts match_boxes(const std::vector<NormBox>& pred, const std::vector<NormBox>& gt,
                                      double t = kDefaultIouThreshold);
[[nodiscard]] MatchCounts match_boxes(const VisualAnnotation& pred, const VisualAnnotation& gt,
                                      double t = kDefaultIouThreshold, bool label_aware = false);

struct PrfScores {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;

    bool operator==(const PrfScores&) const = default;
};

/// P, R and F1 from pooled counts: 1/1/1 when there are neither predictions nor
/// ground-truth boxes, 0/0/0 when exactly one side is empty.
[[nodiscard]] PrfScores prf_from_counts(const MatchCounts& c) noexcept;

/// Micro-averaged over instances (counts pooled before dividing).
[[nodiscard]] PrfScores visual_f1(const std::vector<std::vector<NormBox>>& preds,
                                  const std::vector<std::vector<NormBox>>& gts, double t = kDefaultIouThreshold);

} // namespace tvf::eval
