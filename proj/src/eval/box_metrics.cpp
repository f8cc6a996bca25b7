#include "tvf/eval/box_metrics.hpp"

#include <algorithm>
#include <functional>
#include <tuple>

#include "tvf/core/text.hpp"
#include "tvf/error.hpp"

namespace tvf::eval {

namespace {

// Matching on an explicit admissibility matrix: greedy seed, then Kuhn's
// augmenting paths from every unmatched prediction.
long max_matching(std::size_t np, std::size_t ng, const std::vector<std::vector<double>>& score,
                  const std::vector<std::vector<bool>>& ok) {
    std::vector<std::tuple<double, std::size_t, std::size_t>> pairs;
    for (std::size_t p = 0; p < np; ++p) {
        for (std::size_t g = 0; g < ng; ++g) {
            if (ok[p][g]) pairs.emplace_back(score[p][g], p, g);
        }
    }
    std::stable_sort(pairs.begin(), pairs.end(),
                     [](const auto& a, const auto& b) { return std::get<0>(a) > std::get<0>(b); });

    constexpr std::size_t kNone = static_cast<std::size_t>(-1);
    std::vector<std::size_t> pred_of(ng, kNone);
    std::vector<std::size_t> gt_of(np, kNone);
    long matched = 0;
    for (const auto& [s, p, g] : pairs) {
        if (gt_of[p] == kNone && pred_of[g] == kNone) {
            gt_of[p] = g;
            pred_of[g] = p;
            ++matched;
        }
    }

    std::vector<bool> seen;
    std::function<bool(std::size_t)> augment = [&](std::size_t p) {
        for (std::size_t g = 0; g < ng; ++g) {
            if (!ok[p][g] || seen[g]) continue;
            seen[g] = true;
            if (pred_of[g] == kNone || augment(pred_of[g])) {
                gt_of[p] = g;
                pred_of[g] = p;
                return true;
            }
        }
        return false;
    };
    for (std::size_t p = 0; p < np; ++p) {
        if (gt_of[p] != kNone) continue;
        seen.assign(ng, false);
        if (augment(p)) ++matched;
    }
    return matched;
}

MatchCounts counts(long tp, std::size_t np, std::size_t ng) {
    return MatchCounts{tp, static_cast<long>(np) - tp, static_cast<long>(ng) - tp};
}

} // namespace

double iou(const NormBox& a, const NormBox& b) noexcept {
    const std::int64_t iw = std::min(a.x2(), b.x2()) - std::max(a.x1(), b.x1());
    const std::int64_t ih = std::min(a.y2(), b.y2()) - std::max(a.y1(), b.y1());
    if (iw <= 0 || ih <= 0) return 0.0;
    const std::int64_t inter = iw * ih;
    const std::int64_t uni = a.area() + b.area() - inter;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

MatchCounts match_boxes(const std::vector<NormBox>& pred, const std::vector<NormBox>& gt, double t) {
    require(t > 0.0 && t <= 1.0, "IoU threshold must lie in (0, 1]");
    std::vector<std::vector<double>> score(pred.size(), std::vector<double>(gt.size()));
    std::vector<std::vector<bool>> ok(pred.size(), std::vector<bool>(gt.size()));
    for (std::size_t p = 0; p < pred.size(); ++p) {
        for (std::size_t g = 0; g < gt.size(); ++g) {
            score[p][g] = iou(pred[p], gt[g]);
            ok[p][g] = score[p][g] >= t;
        }
    }
    return counts(max_matching(pred.size(), gt.size(), score, ok), pred.size(), gt.size());
}

MatchCounts match_boxes(const VisualAnnotation& pred, const VisualAnnotation& gt, double t, bool label_aware) {
    if (!label_aware) return match_boxes(pred.norm_boxes(), gt.norm_boxes(), t);
    require(t > 0.0 && t <= 1.0, "IoU threshold must lie in (0, 1]");
    const auto& pb = pred.boxes();
    const auto& gb = gt.boxes();
    std::vector<std::vector<double>> score(pb.size(), std::vector<double>(gb.size()));
    std::vector<std::vector<bool>> ok(pb.size(), std::vector<bool>(gb.size()));
    for (std::size_t p = 0; p < pb.size(); ++p) {
        for (std::size_t g = 0; g < gb.size(); ++g) {
            score[p][g] = iou(pb[p].box, gb[g].box);
            ok[p][g] = score[p][g] >= t && text::to_lower(pb[p].label) == text::to_lower(gb[g].label);
        }
    }
    return counts(max_matching(pb.size(), gb.size(), score, ok), pb.size(), gb.size());
}

PrfScores prf_from_counts(const MatchCounts& c) noexcept {
    const long n_pred = c.tp + c.fp;
    const long n_gt = c.tp + c.fn;
    if (n_pred == 0 && n_gt == 0) return {1.0, 1.0, 1.0};
    if (n_pred == 0 || n_gt == 0) return {0.0, 0.0, 0.0};
    PrfScores s;
    s.precision = static_cast<double>(c.tp) / static_cast<double>(n_pred);
    s.recall = static_cast<double>(c.tp) / static_cast<double>(n_gt);
    s.f1 = (s.precision + s.recall) > 0.0 ? 2.0 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
    return s;
}

PrfScores visual_f1(const std::vector<std::vector<NormBox>>& preds, const std::vector<std::vector<NormBox>>& gts,
                    double t) {
    if (preds.size() != gts.size()) fail(ErrorCode::LengthMismatch, "prediction and ground-truth lists differ in length");
    MatchCounts total;
    for (std::size_t i = 0; i < preds.size(); ++i) total += match_boxes(preds[i], gts[i], t);
    return prf_from_counts(total);
}

} // namespace tvf::eval
