#include "tvf/eval/harness.hpp"

#include <cstdio>
#include <mutex>

#include "tvf/core/records_json.hpp"
#include "tvf/core/target.hpp"
#include "tvf/core/text.hpp"
#include "tvf/util/parallel.hpp"

namespace tvf::eval {

namespace {

using Json = nlohmann::ordered_json;

std::string fmt6(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

std::string csv_cell(std::string_view s) {
    if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

// "feedback | cue" (any further fields ignored) for the two-step protocol.
std::optional<std::pair<std::string, std::string>> parse_feedback_and_cue(std::string_view raw) {
    const auto fields = text::split(text::trim(raw), kFieldSeparator);
    if (fields.size() < 2) return std::nullopt;
    const auto fb = text::trim(fields[0]);
    const auto cue = text::trim(fields[1]);
    if (fb.empty() || cue.empty()) return std::nullopt;
    return std::pair{std::string(fb), std::string(cue)};
}

VisualAnnotation gt_visual(const BenchmarkInstance& inst) {
    return inst.gt_visual.value_or(VisualAnnotation{});
}

InstanceMetrics evaluate_instance(const BenchmarkInstance& inst, VlmBackend& vlm, NliBackend& nli,
                                  GroundingBackend* grounding, const EvalOptions& o) {
    InstanceMetrics m;
    m.id = inst.id;
    m.misaligned = !inst.alignment_label;
    m.binary_answer = vlm.query_vlm(inst.image, render_query(o.queries.binary, inst.caption));
    const auto yn = parse_yes_no(m.binary_answer);
    m.binary_correct = yn.has_value() && *yn == inst.alignment_label;
    if (!m.misaligned) return m;

    const std::string answer = vlm.query_vlm(inst.image, render_query(o.queries.feedback, inst.caption));
    m.feedback_answer = answer;
    const VisualAnnotation gt = gt_visual(inst);

    std::optional<std::string> fb;
    std::optional<std::string> cue;
    VisualAnnotation pred;
    bool ok = false;
    if (o.mode == EvalMode::end_to_end) {
        auto p = parse_prediction(answer);
        if (p.parse_ok) {
            ok = true;
            fb = p.feedback;
            cue = p.text_cue;
            pred = *p.visual;
        }
    } else if (auto parts = parse_feedback_and_cue(answer)) {
        ok = true;
        fb = parts->first;
        cue = parts->second;
        require(grounding != nullptr, "two-step evaluation needs a grounding backend");
        try {
            pred = two_step_ground(*cue, inst.image, *grounding, o.grounding);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::NoDetection) throw;
        }
    }

    m.parse_ok = ok;
    if (ok) {
        m.feedback_nli = inst.gt_feedback ? feedback_nli(*inst.gt_feedback, *fb, nli) : 0.0;
        m.text_nli = inst.gt_misalignment_in_text ? feedback_nli(*inst.gt_misalignment_in_text, *cue, nli) : 0.0;
    } else {
        m.feedback_nli = 0.0;
        m.text_nli = 0.0;
    }
    m.visual_counts = match_boxes(pred, gt, o.iou_threshold, o.label_aware);
    m.visual = prf_from_counts(*m.visual_counts);
    return m;
}

template <typename T>
Json opt(const std::optional<T>& v) {
    return v ? Json(*v) : Json(nullptr);
}

} // namespace

std::string_view to_string(EvalMode m) noexcept {
    return m == EvalMode::end_to_end ? "end-to-end" : "two-step";
}

EvalMode parse_eval_mode(std::string_view s) {
    if (s == "end-to-end" || s == "end_to_end") return EvalMode::end_to_end;
    if (s == "two-step" || s == "two_step") return EvalMode::two_step;
    fail(ErrorCode::InvalidArgument, "mode must be end-to-end or two-step, not '" + std::string(s) + "'");
}

std::string render_query(std::string_view query, std::string_view caption) {
    std::string out;
    constexpr std::string_view key = "{text}";
    std::size_t i = 0;
    while (i < query.size()) {
        if (query.compare(i, key.size(), key) == 0) {
            out += caption;
            i += key.size();
        } else {
            out += query[i++];
        }
    }
    return out;
}

ParsedPrediction parse_prediction(std::string_view raw) {
    ParsedPrediction p;
    p.raw = std::string(raw);
    try {
        auto t = parse_target(text::trim(raw));
        p.feedback = std::move(t.feedback);
        p.text_cue = std::move(t.text_cue);
        p.visual = std::move(t.visual);
        p.parse_ok = true;
    } catch (const Error&) {
        p.parse_ok = false;
    }
    return p;
}

std::optional<bool> parse_yes_no(std::string_view answer) {
    std::string kept;
    for (char c : text::to_lower(answer)) {
        if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == ' ' || c == '\t' || c == '\n') kept.push_back(c);
    }
    const auto v = text::collapse_whitespace(kept);
    if (v == "yes") return true;
    if (v == "no") return false;
    return std::nullopt;
}

double binary_accuracy(const std::vector<std::string>& preds, const std::vector<bool>& labels) {
    if (preds.size() != labels.size()) fail(ErrorCode::LengthMismatch, "predictions and labels differ in length");
    if (preds.empty()) return 0.0;
    std::size_t correct = 0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        const auto yn = parse_yes_no(preds[i]);
        correct += (yn && *yn == labels[i]) ? 1 : 0;
    }
    return static_cast<double>(correct) / static_cast<double>(preds.size());
}

double feedback_nli(std::string_view gt, std::string_view pred, NliBackend& nli) {
    require(!text::is_blank(gt) && !text::is_blank(pred), "texts must be non-empty");
    return nli.score_entailment(gt, pred);
}

VisualAnnotation two_step_ground(std::string_view text_cue_pred, const ImageRef& image, GroundingBackend& grounding,
                                 const grounder::GroundingOptions& options) {
    require(!text::is_blank(text_cue_pred), "predicted cue must be non-empty");
    VisualAnnotation out;
    for (auto part : text::split(text_cue_pred, kBoxJoiner)) {
        const auto label = text::trim(part);
        if (label.empty()) continue;
        try {
            out = out.concat(grounder::ground_label(label, image, grounding, options));
        } catch (const Error& e) {
            if (e.code() != ErrorCode::NoDetection) throw;
        }
    }
    if (out.empty()) fail(ErrorCode::NoDetection, "no box for any part of '" + std::string(text_cue_pred) + "'");
    return out;
}

AggregateMetrics aggregate(const std::vector<InstanceMetrics>& rows) {
    AggregateMetrics a;
    a.n = rows.size();
    std::size_t binary_ok = 0;
    double fb_sum = 0.0;
    double text_sum = 0.0;
    std::size_t n_text = 0;
    MatchCounts counts;
    for (const auto& r : rows) {
        binary_ok += r.binary_correct ? 1 : 0;
        if (r.feedback_nli) {
            fb_sum += *r.feedback_nli;
            ++a.n_feedback;
        }
        if (r.text_nli) {
            text_sum += *r.text_nli;
            ++n_text;
        }
        if (r.parse_ok && !*r.parse_ok) ++a.n_parse_failed;
        if (r.visual_counts) counts += *r.visual_counts;
    }
    a.binary_accuracy = a.n ? static_cast<double>(binary_ok) / static_cast<double>(a.n) : 0.0;
    a.feedback_nli_mean = a.n_feedback ? fb_sum / static_cast<double>(a.n_feedback) : 0.0;
    a.text_nli_mean = n_text ? text_sum / static_cast<double>(n_text) : 0.0;
    a.parse_failure_rate = a.n_feedback ? static_cast<double>(a.n_parse_failed) / static_cast<double>(a.n_feedback) : 0.0;
    const auto prf = prf_from_counts(counts);
    a.f1_at_075 = prf.f1;
    a.visual_precision = prf.precision;
    a.visual_recall = prf.recall;
    return a;
}

EvaluationAborted::EvaluationAborted(const Error& cause, MetricReport partial)
    : Error(cause.code(), std::string("evaluation aborted: ") + cause.what()), partial_(std::move(partial)) {}

MetricReport evaluate_model(const std::vector<BenchmarkInstance>& instances, VlmBackend& vlm, NliBackend& nli,
                            GroundingBackend* grounding, const EvalOptions& options) {
    if (options.mode == EvalMode::two_step) require(grounding != nullptr, "two-step evaluation needs a grounding backend");
    std::vector<std::optional<InstanceMetrics>> rows(instances.size());
    try {
        util::parallel_for(instances.size(), options.workers, [&](std::size_t i) {
            rows[i] = evaluate_instance(instances[i], vlm, nli, grounding, options);
        });
    } catch (const Error& e) {
        MetricReport partial;
        for (auto& r : rows) {
            if (r) partial.per_instance.push_back(std::move(*r));
        }
        partial.aggregate = aggregate(partial.per_instance);
        partial.complete = false;
        partial.error = e.what();
        throw EvaluationAborted(e, std::move(partial));
    }
    MetricReport report;
    for (auto& r : rows) report.per_instance.push_back(std::move(*r));
    report.aggregate = aggregate(report.per_instance);
    return report;
}

Json report_to_json(const MetricReport& report) {
    Json rows = Json::array();
    for (const auto& r : report.per_instance) {
        Json row;
        row["id"] = r.id;
        row["misaligned"] = r.misaligned;
        row["binary_answer"] = r.binary_answer;
        row["binary_correct"] = r.binary_correct;
        row["feedback_answer"] = opt(r.feedback_answer);
        row["parse_ok"] = opt(r.parse_ok);
        row["feedback_nli"] = opt(r.feedback_nli);
        row["text_nli"] = opt(r.text_nli);
        if (r.visual_counts) {
            row["visual_tp"] = r.visual_counts->tp;
            row["visual_fp"] = r.visual_counts->fp;
            row["visual_fn"] = r.visual_counts->fn;
        } else {
            row["visual_tp"] = nullptr;
            row["visual_fp"] = nullptr;
            row["visual_fn"] = nullptr;
        }
        row["visual_prec"] = r.visual ? Json(r.visual->precision) : Json(nullptr);
        row["visual_rec"] = r.visual ? Json(r.visual->recall) : Json(nullptr);
        row["visual_f1"] = r.visual ? Json(r.visual->f1) : Json(nullptr);
        rows.push_back(std::move(row));
    }
    const auto& a = report.aggregate;
    Json agg;
    agg["feedback_nli_mean"] = a.feedback_nli_mean;
    agg["text_nli_mean"] = a.text_nli_mean;
    agg["f1_at_075"] = a.f1_at_075;
    agg["visual_precision"] = a.visual_precision;
    agg["visual_recall"] = a.visual_recall;
    agg["binary_accuracy"] = a.binary_accuracy;
    agg["parse_failure_rate"] = a.parse_failure_rate;
    agg["n"] = a.n;
    agg["n_feedback"] = a.n_feedback;
    agg["n_parse_failed"] = a.n_parse_failed;
    Json out;
    out["complete"] = report.complete;
    if (!report.complete) out["error"] = report.error;
    out["aggregate"] = std::move(agg);
    out["per_instance"] = std::move(rows);
    return out;
}

void write_report_csv(std::ostream& out, const MetricReport& report) {
    out << "id,misaligned,binary_correct,parse_ok,feedback_nli,text_nli,visual_prec,visual_rec,visual_f1\n";
    auto num = [](const std::optional<double>& v) { return v ? fmt6(*v) : std::string(); };
    for (const auto& r : report.per_instance) {
        out << csv_cell(r.id) << ',' << (r.misaligned ? 1 : 0) << ',' << (r.binary_correct ? 1 : 0) << ','
            << (r.parse_ok ? (*r.parse_ok ? "1" : "0") : "") << ',' << num(r.feedback_nli) << ',' << num(r.text_nli)
            << ',' << (r.visual ? fmt6(r.visual->precision) : "") << ',' << (r.visual ? fmt6(r.visual->recall) : "")
            << ',' << (r.visual ? fmt6(r.visual->f1) : "") << '\n';
    }
}

} // namespace tvf::eval
