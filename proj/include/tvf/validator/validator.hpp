#pragma once

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "tvf/clients/backends.hpp"
#include "tvf/core/types.hpp"

namespace tvf::validator {

struct Thresholds {
    double contradiction = 0.25;  // keep only strictly below
    double feedback = 0.75;       // keep only strictly above

    bool operator==(const Thresholds&) const = default;
};

/// "EXPECTED CAPTION: {contradiction} . ACTUAL CAPTION: {original}"
[[nodiscard]] std::string feedback_premise(std::string_view original, std::string_view contradiction);

/// Entailment of the contradiction given the original caption.
[[nodiscard]] double score_contradiction(std::string_view original, std::string_view contradiction, NliBackend& nli);

/// Entailment of the feedback given the EXPECTED/ACTUAL premise.
[[nodiscard]] double score_feedback(std::string_view original, std::string_view contradiction,
                                    std::string_view feedback, NliBackend& nli);

/// Scores in [0,1] (InvalidArgument otherwise). Strict on both sides.
[[nodiscard]] Verdict apply_filter(double contradiction_score, double feedback_score, const Thresholds& t = {});

struct ScoreInput {
    std::string original;
    std::string contradiction;
    std::string feedback;
};

/// Both scores plus the verdict for one generation.
[[nodiscard]] ValidationScores validate(const ScoreInput& in, NliBackend& nli, const Thresholds& t = {});

/// Batch form; output order matches input order. `workers` > 1 scores concurrently.
[[nodiscard]] std::vector<ValidationScores> validate_batch(const std::vector<ScoreInput>& inputs, NliBackend& nli,
                                                           const Thresholds& t = {}, int workers = 1);

struct RetentionGrid {
    std::vector<double> grid_c;
    std::vector<double> grid_f;
    std::vector<std::vector<double>> retention;  // [i][j] for (grid_c[i], grid_f[j])
};

/// Fraction kept under every (τ_c, τ_f). Throws EmptyInput on no scores or an
/// empty grid, InvalidArgument on an unsorted grid.
[[nodiscard]] RetentionGrid sweep_thresholds(const std::vector<ValidationScores>& scored,
                                             const std::vector<double>& grid_c, const std::vector<double>& grid_f);

/// Header row "tau_c\tau_f" then the τ_f values; one row per τ_c; 4 decimals.
void write_heatmap_csv(std::ostream& out, const RetentionGrid& grid);

/// start, start+step, ..., up to and including `stop` (within 1e-9).
[[nodiscard]] std::vector<double> linear_grid(double start, double stop, double step);

} // namespace tvf::validator
