#include "tvf/eval/text_overlap.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "tvf/core/text.hpp"
#include "tvf/error.hpp"

namespace tvf::eval {

namespace {

using Ngram = std::vector<std::string>;

std::map<Ngram, long> ngram_counts(const std::vector<std::string>& tokens, std::size_t n) {
    std::map<Ngram, long> out;
    if (tokens.size() < n) return out;
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
        ++out[Ngram(tokens.begin() + static_cast<long>(i), tokens.begin() + static_cast<long>(i + n))];
    }
    return out;
}

} // namespace

OverlapMetric parse_overlap_metric(std::string_view s) {
    const auto v = text::to_lower(s);
    if (v == "bleu4" || v == "bleu-4" || v == "bleu") return OverlapMetric::bleu4;
    if (v == "rougel" || v == "rouge-l" || v == "rouge_l") return OverlapMetric::rouge_l;
    fail(ErrorCode::InvalidArgument, "unknown overlap metric '" + std::string(s) + "'");
}

double bleu4(const std::vector<std::string>& reference, const std::vector<std::string>& hypothesis) {
    if (hypothesis.empty() || reference.empty()) return 0.0;
    double log_sum = 0.0;
    for (std::size_t n = 1; n <= 4; ++n) {
        const auto hyp = ngram_counts(hypothesis, n);
        const auto ref = ngram_counts(reference, n);
        long clipped = 0;
        long total = 0;
        for (const auto& [g, c] : hyp) {
            total += c;
            if (auto it = ref.find(g); it != ref.end()) clipped += std::min(c, it->second);
        }
        const long denom = std::max(1L, total);
        double p;
        if (n == 1) {
            if (clipped == 0) return 0.0;
            p = static_cast<double>(clipped) / static_cast<double>(denom);
        } else {
            p = static_cast<double>(clipped + 1) / static_cast<double>(denom + 1);
        }
        log_sum += 0.25 * std::log(p);
    }
    const double c = static_cast<double>(hypothesis.size());
    const double r = static_cast<double>(reference.size());
    const double bp = c > r ? 1.0 : std::exp(1.0 - r / c);
    return bp * std::exp(log_sum);
}

double rouge_l(const std::vector<std::string>& reference, const std::vector<std::string>& hypothesis) {
    if (reference.empty() || hypothesis.empty()) return 0.0;
    std::vector<std::size_t> prev(hypothesis.size() + 1, 0);
    std::vector<std::size_t> cur(hypothesis.size() + 1, 0);
    for (std::size_t i = 1; i <= reference.size(); ++i) {
        for (std::size_t j = 1; j <= hypothesis.size(); ++j) {
            cur[j] = reference[i - 1] == hypothesis[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
        }
        std::swap(prev, cur);
    }
    const double lcs = static_cast<double>(prev[hypothesis.size()]);
    const double precision = lcs / static_cast<double>(hypothesis.size());
    const double recall = lcs / static_cast<double>(reference.size());
    return precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
}

double text_overlap(std::string_view gt, std::string_view pred, OverlapMetric metric) {
    require(!text::is_blank(gt) && !text::is_blank(pred), "texts must be non-empty");
    const auto ref = text::alnum_tokens(gt);
    const auto hyp = text::alnum_tokens(pred);
    return metric == OverlapMetric::bleu4 ? bleu4(ref, hyp) : rouge_l(ref, hyp);
}

} // namespace tvf::eval
