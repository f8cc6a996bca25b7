#include "tvf/dataset/pipeline.hpp"

#include <optional>
#include <set>

#include "tvf/candidates/candidates.hpp"
#include "tvf/error.hpp"
#include "tvf/util/parallel.hpp"
#include "tvf/util/random.hpp"

namespace tvf::dataset {

namespace {

enum class Outcome { emitted, parse_failed, rejected_contradiction, rejected_feedback, grounded_failed };

struct UnitResult {
    Outcome outcome = Outcome::parse_failed;
    std::optional<TrainingRecord> record;
    std::string diagnostic;  // "stage:Code"
};

std::string diag(std::string_view stage, const Error& e) {
    return std::string(stage) + ":" + std::string(error_code_name(e.code()));
}

UnitResult run_unit(const AlignedPair& pair, std::string id, std::uint64_t seed, const PipelineBackends& b,
                    const PipelineOptions& o, const candidates::Lexicon& lexicon) {
    UnitResult out;
    const char* stage = "tag";
    GenerationRecord gen;
    try {
        const auto tokens = candidates::tag_caption(pair.caption, *b.tagger);
        stage = "sample";
        const auto cands = candidates::extract_candidates(pair.caption, tokens, lexicon);
        const auto cand = candidates::sample_candidate(cands, seed);
        stage = "generate";
        gen = genpipe::generate_misalignment(pair, cand, *b.llm, o.generation);
    } catch (const Error& e) {
        out.diagnostic = diag(stage, e);
        return out;
    }

    ValidationScores scores;
    try {
        scores = validator::validate({pair.caption, gen.contradiction_caption, gen.feedback}, *b.nli, o.thresholds);
    } catch (const Error& e) {
        out.diagnostic = diag("validate", e);
        return out;
    }
    switch (scores.verdict) {
        case Verdict::keep: break;
        case Verdict::reject_contradiction:
        case Verdict::reject_both:
            out.outcome = Outcome::rejected_contradiction;
            return out;
        case Verdict::reject_feedback:
            out.outcome = Outcome::rejected_feedback;
            return out;
    }

    VisualAnnotation visual;
    try {
        visual = grounder::ground_label(gen.caption_cue, pair.image, *b.grounding, o.grounding);
    } catch (const Error& e) {
        out.outcome = Outcome::grounded_failed;
        out.diagnostic = diag("ground", e);
        return out;
    }

    TrainingRecord rec;
    rec.id = std::move(id);
    rec.source_dataset = pair.source_dataset;
    rec.image = pair.image;
    rec.positive_caption = pair.caption;
    rec.negative_caption = gen.contradiction_caption;
    rec.misalignment_type = gen.misalignment_type;
    rec.feedback = gen.feedback;
    rec.misalignment_in_text = gen.contradiction_cue;
    rec.visual = std::move(visual);
    rec.validation = scores;
    out.outcome = Outcome::emitted;
    out.record = std::move(rec);
    return out;
}

} // namespace

bool RunStats::reconciles() const noexcept {
    return input == emitted + parse_failed + rejected_contradiction + rejected_feedback + grounded_failed;
}

nlohmann::ordered_json RunStats::to_json() const {
    nlohmann::ordered_json j;
    j["input"] = input;
    j["emitted"] = emitted;
    j["parse_failed"] = parse_failed;
    j["rejected_contradiction"] = rejected_contradiction;
    j["rejected_feedback"] = rejected_feedback;
    j["grounded_failed"] = grounded_failed;
    j["diagnostics"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : diagnostics) j["diagnostics"][k] = v;
    return j;
}

PipelineResult run_pipeline(const std::vector<AlignedPair>& pairs, const PipelineBackends& backends,
                            const PipelineOptions& options) {
    if (!backends.llm || !backends.nli || !backends.grounding || !backends.tagger) {
        fail(ErrorCode::ConfigError, "pipeline needs llm, nli, grounding and tagger backends");
    }
    if (options.negatives_per_pair < 1) fail(ErrorCode::ConfigError, "negatives_per_pair must be at least 1");
    const auto& templates =
        options.generation.templates ? *options.generation.templates : genpipe::TemplateRegistry::builtin();
    std::set<std::string> datasets;
    for (const auto& p : pairs) datasets.insert(p.source_dataset);
    for (const auto& d : datasets) {
        for (auto t : kAllMisalignmentTypes) {
            if (!templates.contains(d, to_string(t))) {
                fail(ErrorCode::ConfigError,
                     "no " + std::string(to_string(t)) + " template for dataset '" + d + "'");
            }
        }
    }
    const auto& lexicon = options.lexicon ? *options.lexicon : candidates::Lexicon::builtin();

    const auto k_per = static_cast<std::size_t>(options.negatives_per_pair);
    const std::size_t n_units = pairs.size() * k_per;
    std::vector<UnitResult> results(n_units);
    util::parallel_for(n_units, options.workers, [&](std::size_t u) {
        const std::size_t i = u / k_per;
        const std::size_t k = u % k_per + 1;
        const auto& pair = pairs[i];
        std::string id = k == 1 ? pair.id : pair.id + "-n" + std::to_string(k);
        results[u] = run_unit(pair, std::move(id), util::derive_seed(options.sampling_seed, i, k), backends, options,
                              lexicon);
    });

    PipelineResult out;
    out.stats.input = n_units;
    for (auto& r : results) {
        switch (r.outcome) {
            case Outcome::emitted:                ++out.stats.emitted; break;
            case Outcome::parse_failed:           ++out.stats.parse_failed; break;
            case Outcome::rejected_contradiction: ++out.stats.rejected_contradiction; break;
            case Outcome::rejected_feedback:      ++out.stats.rejected_feedback; break;
            case Outcome::grounded_failed:        ++out.stats.grounded_failed; break;
        }
        if (!r.diagnostic.empty()) ++out.stats.diagnostics[r.diagnostic];
        if (r.record) out.records.push_back(std::move(*r.record));
    }
    return out;
}

} // namespace tvf::dataset
