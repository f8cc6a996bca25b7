#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "tvf/candidates/tagger.hpp"
#include "tvf/clients/backends.hpp"
#include "tvf/core/types.hpp"
#include "tvf/genpipe/generation.hpp"
#include "tvf/genpipe/templates.hpp"
#include "tvf/grounder/grounder.hpp"
#include "tvf/validator/validator.hpp"

namespace tvf::dataset {

// Every unit lands in exactly one bucket:
//   input = emitted + parse_failed + rejected_contradiction + rejected_feedback + grounded_failed
// A generation failing both NLI checks is counted under rejected_contradiction.
struct RunStats {
    std::size_t input = 0;
    std::size_t emitted = 0;
    std::size_t parse_failed = 0;
    std::size_t rejected_contradiction = 0;
    std::size_t rejected_feedback = 0;
    std::size_t grounded_failed = 0;
    // "stage:ErrorCode" -> count, for the failures behind the buckets above.
    std::map<std::string, std::size_t> diagnostics;

    [[nodiscard]] bool reconciles() const noexcept;
    [[nodiscard]] std::size_t failed() const noexcept { return input - emitted; }
    [[nodiscard]] nlohmann::ordered_json to_json() const;

    bool operator==(const RunStats&) const = default;
};

struct PipelineBackends {
    LlmBackend* llm = nullptr;
    NliBackend* nli = nullptr;
    GroundingBackend* grounding = nullptr;
    TaggerBackend* tagger = nullptr;
};

struct PipelineOptions {
    std::uint64_t sampling_seed = 0;
    int negatives_per_pair = 1;
    int workers = 1;
    validator::Thresholds thresholds{};
    grounder::GroundingOptions grounding{};
    genpipe::GenerationOptions generation{};
    const candidates::Lexicon* lexicon = nullptr;  // builtin() when null
};

struct PipelineResult {
    std::vector<TrainingRecord> records;  // input order
    RunStats stats;
};

/// Unit k (1-based) of pair i is seeded with derive_seed(sampling_seed, i, k)
/// and gets id pair.id, or pair.id + "-n" + k when k > 1. Per-unit failures are
/// counted, never thrown. Throws ConfigError up front when a backend is missing
/// or a pair's dataset has no template.
[[nodiscard]] PipelineResult run_pipeline(const std::vector<AlignedPair>& pairs, const PipelineBackends& backends,
                                          const PipelineOptions& options = {});

} // namespace tvf::dataset
