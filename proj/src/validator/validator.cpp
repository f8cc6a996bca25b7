#include "tvf/validator/validator.hpp"

#include <cmath>
#include <cstdio>

#include "tvf/core/text.hpp"
#include "tvf/error.hpp"
#include "tvf/util/parallel.hpp"

namespace tvf::validator {

namespace {

void check_score(double s, const char* what) {
    if (!(s >= 0.0 && s <= 1.0)) fail(ErrorCode::InvalidArgument, std::string(what) + " outside [0,1]");
}

void check_sorted(const std::vector<double>& g, const char* name) {
    if (g.empty()) fail(ErrorCode::EmptyInput, std::string(name) + " is empty");
    for (std::size_t i = 1; i < g.size(); ++i) {
        if (!(g[i - 1] <= g[i])) fail(ErrorCode::InvalidArgument, std::string(name) + " must be sorted ascending");
    }
}

std::string fmt4(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

} // namespace

std::string feedback_premise(std::string_view original, std::string_view contradiction) {
    std::string p = "EXPECTED CAPTION: ";
    p += contradiction;
    p += " . ACTUAL CAPTION: ";
    p += original;
    return p;
}

double score_contradiction(std::string_view original, std::string_view contradiction, NliBackend& nli) {
    require(!text::is_blank(original) && !text::is_blank(contradiction), "captions must be non-empty");
    return nli.score_entailment(original, contradiction);
}

double score_feedback(std::string_view original, std::string_view contradiction, std::string_view feedback,
                      NliBackend& nli) {
    require(!text::is_blank(original) && !text::is_blank(contradiction), "captions must be non-empty");
    require(!text::is_blank(feedback), "feedback must be non-empty");
    return nli.score_entailment(feedback_premise(original, contradiction), feedback);
}

Verdict apply_filter(double contradiction_score, double feedback_score, const Thresholds& t) {
    check_score(contradiction_score, "contradiction score");
    check_score(feedback_score, "feedback score");
    const bool contradiction_ok = contradiction_score < t.contradiction;
    const bool feedback_ok = feedback_score > t.feedback;
    if (contradiction_ok && feedback_ok) return Verdict::keep;
    if (!contradiction_ok && !feedback_ok) return Verdict::reject_both;
    return contradiction_ok ? Verdict::reject_feedback : Verdict::reject_contradiction;
}

ValidationScores validate(const ScoreInput& in, NliBackend& nli, const Thresholds& t) {
    ValidationScores s;
    s.contradiction_score = score_contradiction(in.original, in.contradiction, nli);
    s.feedback_score = score_feedback(in.original, in.contradiction, in.feedback, nli);
    s.verdict = apply_filter(s.contradiction_score, s.feedback_score, t);
    return s;
}

std::vector<ValidationScores> validate_batch(const std::vector<ScoreInput>& inputs, NliBackend& nli,
                                             const Thresholds& t, int workers) {
    std::vector<ValidationScores> out(inputs.size());
    util::parallel_for(inputs.size(), workers, [&](std::size_t i) { out[i] = validate(inputs[i], nli, t); });
    return out;
}

RetentionGrid sweep_thresholds(const std::vector<ValidationScores>& scored, const std::vector<double>& grid_c,
                               const std::vector<double>& grid_f) {
    if (scored.empty()) fail(ErrorCode::EmptyInput, "no scores to sweep");
    check_sorted(grid_c, "grid_c");
    check_sorted(grid_f, "grid_f");
    RetentionGrid g{grid_c, grid_f, {}};
    g.retention.assign(grid_c.size(), std::vector<double>(grid_f.size(), 0.0));
    for (std::size_t i = 0; i < grid_c.size(); ++i) {
        for (std::size_t j = 0; j < grid_f.size(); ++j) {
            std::size_t kept = 0;
            for (const auto& s : scored) {
                kept += (s.contradiction_score < grid_c[i] && s.feedback_score > grid_f[j]) ? 1 : 0;
            }
            g.retention[i][j] = static_cast<double>(kept) / static_cast<double>(scored.size());
        }
    }
    return g;
}

void write_heatmap_csv(std::ostream& out, const RetentionGrid& grid) {
    out << "tau_c\\tau_f";
    for (double f : grid.grid_f) out << ',' << fmt4(f);
    out << '\n';
    for (std::size_t i = 0; i < grid.grid_c.size(); ++i) {
        out << fmt4(grid.grid_c[i]);
        for (double v : grid.retention[i]) out << ',' << fmt4(v);
        out << '\n';
    }
}

std::vector<double> linear_grid(double start, double stop, double step) {
    require(step > 0.0, "grid step must be positive");
    require(start <= stop, "grid start must not exceed stop");
    std::vector<double> g;
    for (long k = 0;; ++k) {
        const double v = start + static_cast<double>(k) * step;
        if (v > stop + 1e-9) break;
        g.push_back(std::round(v * 1e9) / 1e9);
    }
    return g;
}

} // namespace tvf::validator
