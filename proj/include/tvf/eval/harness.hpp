#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tvf/clients/backends.hpp"
#include "tvf/core/types.hpp"
#include "tvf/error.hpp"
#include "tvf/eval/box_metrics.hpp"
#include "tvf/grounder/grounder.hpp"

namespace tvf::eval {

enum class EvalMode { end_to_end, two_step };

[[nodiscard]] std::string_view to_string(EvalMode m) noexcept;
/// Accepts end-to-end / end_to_end and two-step / two_step.
[[nodiscard]] EvalMode parse_eval_mode(std::string_view s);

struct EvalQueries {
    std::string binary = "Does this image entail the description {text}?";
    std::string feedback = "Describe the misalignments between the image and the text: {text}";

    bool operator==(const EvalQueries&) const = default;
};

/// Replaces every {text} in `query` with the caption.
[[nodiscard]] std::string render_query(std::string_view query, std::string_view caption);

struct ParsedPrediction {
    std::optional<std::string> feedback;
    std::optional<std::string> text_cue;
    std::optional<VisualAnnotation> visual;
    bool parse_ok = false;
    std::string raw;
};

/// Full target string (feedback | cue | boxes). Never throws.
[[nodiscard]] ParsedPrediction parse_prediction(std::string_view raw);

/// Lowercase, punctuation stripped; "yes" -> true, "no" -> false, else nullopt.
[[nodiscard]] std::optional<bool> parse_yes_no(std::string_view answer);

/// Mean correctness; unparseable answers count as wrong. Throws LengthMismatch.
[[nodiscard]] double binary_accuracy(const std::vector<std::string>& preds, const std::vector<bool>& labels);

/// score_entailment(premise = gt, hypothesis = pred).
[[nodiscard]] double feedback_nli(std::string_view gt, std::string_view pred, NliBackend& nli);

/// Grounds each " and "-separated part of the predicted cue and concatenates.
/// Throws NoDetection when no part yields a box.
[[nodiscard]] VisualAnnotation two_step_ground(std::string_view text_cue_pred, const ImageRef& image,
                                               GroundingBackend& grounding,
                                               const grounder::GroundingOptions& options = {});

struct InstanceMetrics {
    std::string id;
    bool misaligned = false;
    std::string binary_answer;
    bool binary_correct = false;
    // Present for misaligned instances only.
    std::optional<std::string> feedback_answer;
    std::optional<bool> parse_ok;
    std::optional<double> feedback_nli;
    std::optional<double> text_nli;
    std::optional<MatchCounts> visual_counts;
    std::optional<PrfScores> visual;
};

struct AggregateMetrics {
    double feedback_nli_mean = 0.0;
    double text_nli_mean = 0.0;
    double f1_at_075 = 0.0;
    double visual_precision = 0.0;
    double visual_recall = 0.0;
    double binary_accuracy = 0.0;
    double parse_failure_rate = 0.0;
    std::size_t n = 0;           // instances evaluated
    std::size_t n_feedback = 0;  // misaligned instances queried for feedback
    std::size_t n_parse_failed = 0;
};

struct MetricReport {
    std::vector<InstanceMetrics> per_instance;  // input order
    AggregateMetrics aggregate;
    bool complete = true;
    std::string error;  // first backend error when incomplete
};

/// Recomputes the aggregate from per-instance rows.
[[nodiscard]] AggregateMetrics aggregate(const std::vector<InstanceMetrics>& rows);

struct EvalOptions {
    EvalMode mode = EvalMode::end_to_end;
    EvalQueries queries{};
    double iou_threshold = kDefaultIouThreshold;
    bool label_aware = false;
    grounder::GroundingOptions grounding{};
    int workers = 1;
};

// Raised when a backend fails mid-run; carries every finished instance.
class EvaluationAborted : public Error {
public:
    EvaluationAborted(const Error& cause, MetricReport partial);
    [[nodiscard]] const MetricReport& partial() const noexcept { return partial_; }

private:
    MetricReport partial_;
};

/// Binary query for every instance; feedback query for misaligned ones, parsed
/// as a full target (end_to_end) or as "feedback | cue" with the cue grounded
/// (two_step). `grounding` may be null in end_to_end mode.
[[nodiscard]] MetricReport evaluate_model(const std::vector<BenchmarkInstance>& instances, VlmBackend& vlm,
                                          NliBackend& nli, GroundingBackend* grounding, const EvalOptions& options = {});

[[nodiscard]] nlohmann::ordered_json report_to_json(const MetricReport& report);

/// One row per instance; empty cells for metrics that do not apply.
void write_report_csv(std::ostream& out, const MetricReport& report);

} // namespace tvf::eval
