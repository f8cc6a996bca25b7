#include "tvf/cli/cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>

#include "tvf/cli/mock_server.hpp"
#include "tvf/core/records_json.hpp"
#include "tvf/core/target.hpp"
#include "tvf/core/text.hpp"
#include "tvf/dataset/config.hpp"
#include "tvf/dataset/manifest.hpp"
#include "tvf/dataset/pipeline.hpp"
#include "tvf/error.hpp"
#include "tvf/eval/correlate.hpp"
#include "tvf/eval/harness.hpp"
#include "tvf/eval/text_overlap.hpp"
#include "tvf/grounder/grounder.hpp"
#include "tvf/review/review_server.hpp"
#include "tvf/review/review_store.hpp"
#include "tvf/util/parallel.hpp"
#include "tvf/validator/validator.hpp"

namespace tvf::cli {

namespace {

using json_io::Json;
namespace fs = std::filesystem;

// Raised for problems in the invocation itself; maps to kExitUsage.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::ifstream open_in(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) fail(ErrorCode::ConfigError, "cannot read " + p.string());
    return in;
}

std::ofstream open_out(const fs::path& p) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::ConfigError, "cannot write " + p.string());
    return out;
}

Json read_json_file(const fs::path& p) {
    auto in = open_in(p);
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        fail(ErrorCode::SchemaError, p.string() + ": " + e.what());
    }
}

std::vector<Json> read_jsonl_file(const fs::path& p) {
    auto in = open_in(p);
    std::vector<Json> out;
    json_io::read_jsonl(in, [&](const Json& j, long) { out.push_back(j); });
    return out;
}

void write_json_file(const fs::path& p, const Json& j) {
    auto out = open_out(p);
    out << j.dump(2) << '\n';
}

bool over_threshold(std::size_t failed, std::size_t total, double threshold) {
    if (total == 0) return false;
    return static_cast<double>(failed) / static_cast<double>(total) > threshold;
}

// Shared settings of every subcommand.
struct Common {
    std::string config_path;
    int workers = 0;  // 0: take from config

    dataset::PipelineConfig load() const {
        auto c = config_path.empty() ? dataset::PipelineConfig{} : dataset::PipelineConfig::load(config_path);
        if (workers > 0) c.workers = workers;
        return c;
    }
};

genpipe::GenerationOptions generation_options(const dataset::PipelineConfig& c, const dataset::Resources& r) {
    genpipe::GenerationOptions g;
    g.decoding = c.decoding;
    g.retries = c.generation_retries;
    g.templates = r.templates.get();
    return g;
}

// ---- ingest ---------------------------------------------------------------

struct IngestArgs {
    std::string manifest;
    std::string out;
};

int cmd_ingest(const Common& common, const IngestArgs& a, std::ostream& out) {
    const auto config = common.load();
    const auto manifest = dataset::load_manifest(a.manifest);
    const auto res = dataset::Resources::from_config(config);
    std::shared_ptr<LlmBackend> llm;
    if (manifest.caption_style == dataset::CaptionStyle::localized_narrative) {
        llm = dataset::Backends::from_config(config).llm_;
    }
    const auto pairs = dataset::ingest(manifest, llm.get(), generation_options(config, res), config.workers);
    auto f = open_out(a.out);
    json_io::write_jsonl(f, pairs);
    out << "ingested " << pairs.size() << " pairs from " << manifest.dataset_name << '\n';
    return kExitOk;
}

// ---- generate -------------------------------------------------------------

struct GenerateArgs {
    std::string input;
    std::string manifest;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<int> negatives;
    double fail_threshold = 1.0;
};

int cmd_generate(const Common& common, const GenerateArgs& a, std::ostream& out) {
    auto config = common.load();
    if (a.seed) config.sampling_seed = *a.seed;
    if (a.negatives) config.negatives_per_pair = *a.negatives;
    config.validate();
    const auto res = dataset::Resources::from_config(config);
    const auto backends = dataset::Backends::from_config(config);
    const auto gen_opts = generation_options(config, res);

    std::vector<AlignedPair> pairs;
    if (!a.input.empty()) {
        auto in = open_in(a.input);
        pairs = json_io::read_aligned_pairs(in);
    } else {
        const auto manifest = dataset::load_manifest(a.manifest);
        LlmBackend* llm =
            manifest.caption_style == dataset::CaptionStyle::localized_narrative ? &backends.llm() : nullptr;
        pairs = dataset::ingest(manifest, llm, gen_opts, config.workers);
    }

    dataset::PipelineBackends pb{&backends.llm(), &backends.nli(), &backends.grounding(), &backends.tagger()};
    dataset::PipelineOptions po;
    po.sampling_seed = config.sampling_seed;
    po.negatives_per_pair = config.negatives_per_pair;
    po.workers = config.workers;
    po.thresholds = config.thresholds;
    po.grounding = config.grounding;
    po.generation = gen_opts;
    po.lexicon = res.lexicon.get();
    const auto result = dataset::run_pipeline(pairs, pb, po);

    {
        auto f = open_out(a.out);
        json_io::write_jsonl(f, result.records);
    }
    write_json_file(a.out + ".stats.json", result.stats.to_json());
    const auto& s = result.stats;
    out << "input " << s.input << ", emitted " << s.emitted << ", parse_failed " << s.parse_failed
        << ", rejected_contradiction " << s.rejected_contradiction << ", rejected_feedback " << s.rejected_feedback
        << ", grounded_failed " << s.grounded_failed << '\n';
    return over_threshold(s.failed(), s.input, a.fail_threshold) ? kExitRecordFailures : kExitOk;
}

// ---- validate -------------------------------------------------------------

struct ValidateArgs {
    std::string input;
    std::string out;
    std::optional<double> tau_c;
    std::optional<double> tau_f;
};

int cmd_validate(const Common& common, const ValidateArgs& a, std::ostream& out) {
    auto config = common.load();
    if (a.tau_c) config.thresholds.contradiction = *a.tau_c;
    if (a.tau_f) config.thresholds.feedback = *a.tau_f;
    config.validate();
    const auto backends = dataset::Backends::from_config(config);

    const auto rows = read_jsonl_file(a.input);
    std::vector<validator::ScoreInput> inputs;
    for (const auto& j : rows) {
        inputs.push_back({json_io::string_field(j, "original"), json_io::string_field(j, "contradiction"),
                          json_io::string_field(j, "feedback")});
    }
    const auto scores = validator::validate_batch(inputs, backends.nli(), config.thresholds, config.workers);
    auto f = open_out(a.out);
    std::size_t kept = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        Json j = rows[i];
        j["contradiction_score"] = scores[i].contradiction_score;
        j["feedback_score"] = scores[i].feedback_score;
        j["verdict"] = std::string(to_string(scores[i].verdict));
        kept += scores[i].verdict == Verdict::keep ? 1 : 0;
        f << json_io::to_jsonl_line(j) << '\n';
    }
    out << "kept " << kept << " of " << rows.size() << '\n';
    return kExitOk;
}

// ---- sweep ----------------------------------------------------------------

struct SweepArgs {
    std::string input;
    std::string out;
    double step = 0.05;
};

int cmd_sweep(const SweepArgs& a, std::ostream& out) {
    if (!(a.step > 0.0 && a.step <= 1.0)) throw UsageError("--step must lie in (0,1]");
    std::vector<ValidationScores> scores;
    for (const auto& j : read_jsonl_file(a.input)) {
        ValidationScores s;
        s.contradiction_score = json_io::number_field(j, "contradiction_score");
        s.feedback_score = json_io::number_field(j, "feedback_score");
        scores.push_back(s);
    }
    const auto grid = validator::linear_grid(0.0, 1.0, a.step);
    const auto result = validator::sweep_thresholds(scores, grid, grid);
    auto f = open_out(a.out);
    validator::write_heatmap_csv(f, result);
    out << "swept " << scores.size() << " scores over " << grid.size() << "x" << grid.size() << " thresholds\n";
    return kExitOk;
}

// ---- ground ---------------------------------------------------------------

struct GroundArgs {
    std::string input;
    std::string out;
    double fail_threshold = 1.0;
};

int cmd_ground(const Common& common, const GroundArgs& a, std::ostream& out) {
    const auto config = common.load();
    const auto backends = dataset::Backends::from_config(config);
    auto& grounding = backends.grounding();
    const auto rows = read_jsonl_file(a.input);

    struct Job {
        ImageRef image;
        std::vector<std::string> labels;
    };
    std::vector<Job> jobs;
    for (const auto& j : rows) {
        Job job{json_io::image_from_json(json_io::field(j, "image")), {}};
        if (j.contains("labels")) {
            for (const auto& l : json_io::field(j, "labels")) {
                if (!l.is_string()) fail(ErrorCode::SchemaError, "'labels' entries must be strings");
                job.labels.push_back(l.get<std::string>());
            }
        } else {
            job.labels.push_back(json_io::string_field(j, "label"));
        }
        jobs.push_back(std::move(job));
    }

    std::vector<Json> results(rows.size());
    util::parallel_for(rows.size(), config.workers, [&](std::size_t i) {
        Json r = rows[i];
        try {
            r["visual"] = json_io::to_json(grounder::ground_cues(jobs[i].labels, jobs[i].image, grounding,
                                                                 config.grounding));
        } catch (const Error& e) {
            r["visual"] = nullptr;
            r["error"] = {{"code", error_code_name(e.code())}, {"message", e.what()}};
        }
        results[i] = std::move(r);
    });

    auto f = open_out(a.out);
    std::size_t failed = 0;
    for (const auto& r : results) {
        failed += r["visual"].is_null() ? 1 : 0;
        f << json_io::to_jsonl_line(r) << '\n';
    }
    out << "grounded " << rows.size() - failed << " of " << rows.size() << '\n';
    return over_threshold(failed, rows.size(), a.fail_threshold) ? kExitRecordFailures : kExitOk;
}

// ---- export-train ---------------------------------------------------------

struct ExportTrainArgs {
    std::string input;
    std::string out;
    bool no_binary = false;
};

int cmd_export_train(const Common& common, const ExportTrainArgs& a, std::ostream& out) {
    const auto config = common.load();
    auto in = open_in(a.input);
    const auto records = json_io::read_training_records(in);
    auto f = open_out(a.out);
    std::size_t n = 0;
    auto emit = [&](const std::string& id, const std::string& uri, const std::string& query,
                    const std::string& target) {
        Json j;
        j["id"] = id;
        j["image_uri"] = uri;
        j["query"] = query;
        j["target"] = target;
        f << json_io::to_jsonl_line(j) << '\n';
        ++n;
    };
    for (const auto& r : records) {
        emit(r.id + "-feedback", r.image.uri, eval::render_query(config.queries.feedback, r.negative_caption),
             render_target(r.feedback, r.misalignment_in_text, r.visual));
        if (!a.no_binary) {
            emit(r.id + "-pos", r.image.uri, eval::render_query(config.queries.binary, r.positive_caption), "yes");
            emit(r.id + "-neg", r.image.uri, eval::render_query(config.queries.binary, r.negative_caption), "no");
        }
    }
    out << "wrote " << n << " training examples from " << records.size() << " records\n";
    return kExitOk;
}

// ---- evaluate -------------------------------------------------------------

struct EvaluateArgs {
    std::string input;
    std::string mode = "end-to-end";
    std::string out;
    std::string csv;
    bool label_aware = false;
};

void write_report(const eval::MetricReport& report, const EvaluateArgs& a) {
    write_json_file(a.out, eval::report_to_json(report));
    auto f = open_out(a.csv.empty() ? a.out + ".csv" : a.csv);
    eval::write_report_csv(f, report);
}

int cmd_evaluate(const Common& common, const EvaluateArgs& a, std::ostream& out, std::ostream& err) {
    const auto config = common.load();
    eval::EvalOptions opts;
    opts.mode = eval::parse_eval_mode(a.mode);
    opts.queries = config.queries;
    opts.label_aware = a.label_aware;
    opts.grounding = config.grounding;
    opts.workers = config.workers;
    const auto backends = dataset::Backends::from_config(config);
    GroundingBackend* grounding = opts.mode == eval::EvalMode::two_step ? &backends.grounding() : nullptr;

    auto in = open_in(a.input);
    const auto instances = json_io::read_benchmark_instances(in);
    try {
        const auto report = eval::evaluate_model(instances, backends.vlm(), backends.nli(), grounding, opts);
        write_report(report, a);
        const auto& g = report.aggregate;
        out << "n " << g.n << ", binary_accuracy " << g.binary_accuracy << ", feedback_nli " << g.feedback_nli_mean
            << ", text_nli " << g.text_nli_mean << ", f1@0.75 " << g.f1_at_075 << ", parse_failure_rate "
            << g.parse_failure_rate << '\n';
        return kExitOk;
    } catch (const eval::EvaluationAborted& e) {
        write_report(e.partial(), a);
        err << "evaluation aborted after " << e.partial().per_instance.size() << " of " << instances.size()
            << " instances: " << e.what() << "\npartial report written to " << a.out << '\n';
        return kExitRecordFailures;
    }
}

// ---- correlate ------------------------------------------------------------

struct CorrelateArgs {
    std::string agreement;
    std::string report;
    std::string benchmark;
    std::string metric = "feedback_nli";
    std::string question = "feedback";
    std::string out;
};

std::optional<double> json_number(const Json& row, const char* key) {
    if (!row.contains(key) || row.at(key).is_null()) return std::nullopt;
    return row.at(key).get<double>();
}

int cmd_correlate(const CorrelateArgs& a, std::ostream& out) {
    const auto question = eval::parse_agreement_question(a.question);
    std::vector<eval::HumanAgreement> agreements;
    for (const auto& j : read_jsonl_file(a.agreement)) {
        agreements.push_back({json_io::string_field(j, "instance_id"),
                              static_cast<int>(json_io::int_field(j, "feedback")),
                              static_cast<int>(json_io::int_field(j, "text")),
                              static_cast<int>(json_io::int_field(j, "visual"))});
    }
    const Json report = read_json_file(a.report);
    const Json& rows = json_io::field(report, "per_instance");

    std::map<std::string, double> scores;
    if (a.metric == "feedback_nli" || a.metric == "text_nli" || a.metric == "visual_f1") {
        for (const auto& row : rows) {
            // Rows without the metric (aligned instances) are left out.
            if (auto v = json_number(row, a.metric.c_str())) scores[json_io::string_field(row, "id")] = *v;
        }
    } else {
        const auto metric = eval::parse_overlap_metric(a.metric);
        if (a.benchmark.empty()) throw UsageError("--benchmark is required for text-overlap metrics");
        auto in = open_in(a.benchmark);
        std::map<std::string, std::string> gt;
        for (const auto& inst : json_io::read_benchmark_instances(in)) {
            if (inst.gt_feedback) gt[inst.id] = *inst.gt_feedback;
        }
        for (const auto& row : rows) {
            const auto id = json_io::string_field(row, "id");
            const auto it = gt.find(id);
            if (it == gt.end() || !row.contains("feedback_answer") || row["feedback_answer"].is_null()) continue;
            const bool parsed = row.contains("parse_ok") && row["parse_ok"].is_boolean() && row["parse_ok"].get<bool>();
            if (!parsed) {
                scores[id] = 0.0;
                continue;
            }
            const auto answer = row["feedback_answer"].get<std::string>();
            const auto fields = text::split(answer, kFieldSeparator);
            scores[id] = eval::text_overlap(it->second, text::trim(fields.front()), metric);
        }
    }

    const auto result = eval::correlate(agreements, scores, question);
    auto f = open_out(a.out);
    eval::write_correlation_csv(f, result);
    out << "spearman " << (result.spearman_defined ? std::to_string(result.spearman) : std::string("undefined"))
        << " over " << agreements.size() << " instances\n";
    return kExitOk;
}

// ---- review-serve ---------------------------------------------------------

struct ReviewArgs {
    std::string instances;
    std::string log;
    std::string host = "127.0.0.1";
    int port = 8080;
    std::string static_dir;
    std::vector<std::string> raters;
    std::string export_path;
    std::string agreement_path;
};

int cmd_review_serve(const ReviewArgs& a, std::ostream& out) {
    auto in = open_in(a.instances);
    auto instances = json_io::read_benchmark_instances(in);
    std::set<std::string> raters;
    for (const auto& r : a.raters) {
        for (auto part : text::split(r, ",")) {
            if (!text::is_blank(part)) raters.insert(std::string(text::trim(part)));
        }
    }
    review::ReviewStore store(std::move(instances), a.log, raters);

    if (!a.export_path.empty() || !a.agreement_path.empty()) {
        if (!a.export_path.empty()) {
            const auto ex = store.export_benchmark();
            auto f = open_out(a.export_path);
            json_io::write_jsonl(f, ex.accepted);
            out << "exported " << ex.accepted.size() << " of " << store.size() << " instances, acceptance rate "
                << ex.acceptance_rate << '\n';
        }
        if (!a.agreement_path.empty()) {
            auto f = open_out(a.agreement_path);
            const auto rows = store.agreement_rows();
            for (const auto& r : rows) {
                Json j;
                j["instance_id"] = r.instance_id;
                j["feedback"] = r.feedback;
                j["text"] = r.text;
                j["visual"] = r.visual;
                f << json_io::to_jsonl_line(j) << '\n';
            }
            out << "wrote agreement levels for " << rows.size() << " instances\n";
        }
        return kExitOk;
    }

    std::optional<fs::path> static_dir;
    if (!a.static_dir.empty()) static_dir = a.static_dir;
    review::ReviewServer server(store, static_dir);
    int port = a.port;
    if (port == 0) {
        port = server.bind_any_port(a.host);
        if (port < 0) fail(ErrorCode::ConfigError, "cannot bind " + a.host);
    }
    out << "review service listening on http://" << a.host << ":" << port << " with " << store.size()
        << " instances and " << store.verdict_count() << " verdicts" << std::endl;
    const bool ok = a.port == 0 ? server.listen_after_bind() : server.listen(a.host, port);
    if (!ok) fail(ErrorCode::ConfigError, "cannot listen on " + a.host + ":" + std::to_string(port));
    return kExitOk;
}

// ---- serve-mocks ----------------------------------------------------------

struct MocksArgs {
    std::vector<std::string> fixtures;
    std::string host = "127.0.0.1";
    int port = 8090;
};

int cmd_serve_mocks(const MocksArgs& a, std::ostream& out) {
    clients::MockFixtures fixtures;
    for (const auto& p : a.fixtures) fixtures.merge(clients::MockFixtures::load(p));
    MockServer server(fixtures);
    int port = a.port;
    if (port == 0) {
        port = server.bind_any_port(a.host);
        if (port < 0) fail(ErrorCode::ConfigError, "cannot bind " + a.host);
    }
    out << "mock backends listening on http://" << a.host << ":" << port << std::endl;
    const bool ok = a.port == 0 ? server.listen_after_bind() : server.listen(a.host, port);
    if (!ok) fail(ErrorCode::ConfigError, "cannot listen on " + a.host + ":" + std::to_string(port));
    return kExitOk;
}

bool is_usage_code(ErrorCode c) {
    switch (c) {
        case ErrorCode::ConfigError:
        case ErrorCode::SchemaError:
        case ErrorCode::InvalidArgument:
        case ErrorCode::UnknownTemplate:
        case ErrorCode::UnknownType:
            return true;
        default:
            return false;
    }
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Misalignment feedback dataset and evaluation toolkit", args.empty() ? "tvf" : args.front()};
    app.require_subcommand(1);
    app.fallthrough();

    Common common;
    app.add_option("--config", common.config_path, "JSON config file");
    app.add_option("--workers", common.workers, "Worker threads (overrides the config)")->check(CLI::PositiveNumber);

    IngestArgs ingest;
    auto* s_ingest = app.add_subcommand("ingest", "Turn a source manifest into aligned pairs");
    s_ingest->add_option("--manifest", ingest.manifest, "Manifest JSONL")->required();
    s_ingest->add_option("--out", ingest.out, "Aligned-pair JSONL")->required();

    GenerateArgs gen;
    auto* s_gen = app.add_subcommand("generate", "Generate validated, grounded training records");
    auto* gen_in = s_gen->add_option("--input", gen.input, "Aligned-pair JSONL");
    auto* gen_manifest = s_gen->add_option("--manifest", gen.manifest, "Manifest JSONL (ingested first)");
    gen_in->excludes(gen_manifest);
    s_gen->add_option("--out", gen.out, "TrainingRecord JSONL; stats go to <out>.stats.json")->required();
    s_gen->add_option("--seed", gen.seed, "Sampling seed (overrides the config)");
    s_gen->add_option("--negatives-per-pair", gen.negatives, "Negatives per pair")->check(CLI::PositiveNumber);
    s_gen->add_option("--fail-threshold", gen.fail_threshold, "Exit 1 when the failed fraction exceeds this")
        ->check(CLI::Range(0.0, 1.0));

    ValidateArgs val;
    auto* s_val = app.add_subcommand("validate", "Score contradictions and feedback with the NLI backend");
    s_val->add_option("--input", val.input, "JSONL with original, contradiction, feedback")->required();
    s_val->add_option("--out", val.out, "Scored JSONL")->required();
    s_val->add_option("--tau-c", val.tau_c, "Contradiction threshold")->check(CLI::Range(0.0, 1.0));
    s_val->add_option("--tau-f", val.tau_f, "Feedback threshold")->check(CLI::Range(0.0, 1.0));

    SweepArgs sweep;
    auto* s_sweep = app.add_subcommand("sweep", "Retention heatmap over threshold pairs");
    s_sweep->add_option("--input", sweep.input, "Scored JSONL from validate")->required();
    s_sweep->add_option("--out", sweep.out, "Heatmap CSV")->required();
    s_sweep->add_option("--step", sweep.step, "Grid step")->capture_default_str();

    GroundArgs ground;
    auto* s_ground = app.add_subcommand("ground", "Ground labels to normalized boxes");
    s_ground->add_option("--input", ground.input, "JSONL with image and label or labels")->required();
    s_ground->add_option("--out", ground.out, "JSONL with visual annotations")->required();
    s_ground->add_option("--fail-threshold", ground.fail_threshold, "Exit 1 when the failed fraction exceeds this")
        ->check(CLI::Range(0.0, 1.0));

    ExportTrainArgs ex;
    auto* s_ex = app.add_subcommand("export-train", "Write fine-tuning examples");
    s_ex->add_option("--input", ex.input, "TrainingRecord JSONL")->required();
    s_ex->add_option("--out", ex.out, "Examples JSONL")->required();
    s_ex->add_flag("--no-binary", ex.no_binary, "Skip the yes/no alignment examples");

    EvaluateArgs ev;
    auto* s_ev = app.add_subcommand("evaluate", "Evaluate a VLM on a benchmark");
    s_ev->add_option("--input", ev.input, "BenchmarkInstance JSONL")->required();
    s_ev->add_option("--mode", ev.mode, "end-to-end or two-step")
        ->check(CLI::IsMember({"end-to-end", "two-step", "end_to_end", "two_step"}));
    s_ev->add_option("--out", ev.out, "Report JSON")->required();
    s_ev->add_option("--csv", ev.csv, "Per-instance CSV (default <out>.csv)");
    s_ev->add_flag("--label-aware", ev.label_aware, "Only match boxes with equal labels");

    CorrelateArgs cor;
    auto* s_cor = app.add_subcommand("correlate", "Relate metric scores to human agreement");
    s_cor->add_option("--agreement", cor.agreement, "JSONL with instance_id, feedback, text, visual")->required();
    s_cor->add_option("--report", cor.report, "Report JSON from evaluate")->required();
    s_cor->add_option("--benchmark", cor.benchmark, "BenchmarkInstance JSONL (text-overlap metrics)");
    s_cor->add_option("--metric", cor.metric, "feedback_nli, text_nli, visual_f1, bleu4 or rouge_l")
        ->check(CLI::IsMember({"feedback_nli", "text_nli", "visual_f1", "bleu4", "rouge_l"}));
    s_cor->add_option("--question", cor.question, "feedback, text or visual")
        ->check(CLI::IsMember({"feedback", "text", "visual"}));
    s_cor->add_option("--out", cor.out, "Correlation CSV")->required();

    ReviewArgs rev;
    auto* s_rev = app.add_subcommand("review-serve", "Serve the rating API");
    s_rev->add_option("--instances", rev.instances, "Candidate BenchmarkInstance JSONL")->required();
    s_rev->add_option("--log", rev.log, "Verdict log (created if missing)")->required();
    s_rev->add_option("--host", rev.host, "Bind address");
    s_rev->add_option("--port", rev.port, "Port, 0 for any free port")->check(CLI::Range(0, 65535));
    s_rev->add_option("--static-dir", rev.static_dir, "Directory served at /");
    s_rev->add_option("--raters", rev.raters, "Registered rater ids (comma separated); empty admits anyone");
    s_rev->add_option("--export", rev.export_path, "Write the accepted instances and exit");
    s_rev->add_option("--export-agreement", rev.agreement_path, "Write per-instance agreement levels and exit");

    MocksArgs mocks;
    auto* s_mocks = app.add_subcommand("serve-mocks", "Serve fixture-backed mock backends over HTTP");
    s_mocks->add_option("--fixtures", mocks.fixtures, "Fixture JSON files")->required();
    s_mocks->add_option("--host", mocks.host, "Bind address");
    s_mocks->add_option("--port", mocks.port, "Port, 0 for any free port")->check(CLI::Range(0, 65535));

    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    if (args.empty()) argv.push_back("tvf");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
        if (s_gen->parsed() && gen.input.empty() && gen.manifest.empty()) {
            throw UsageError("generate needs --input or --manifest");
        }
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\nRun with --help for usage.\n";
        return kExitUsage;
    }

    try {
        if (s_ingest->parsed()) return cmd_ingest(common, ingest, out);
        if (s_gen->parsed()) return cmd_generate(common, gen, out);
        if (s_val->parsed()) return cmd_validate(common, val, out);
        if (s_sweep->parsed()) return cmd_sweep(sweep, out);
        if (s_ground->parsed()) return cmd_ground(common, ground, out);
        if (s_ex->parsed()) return cmd_export_train(common, ex, out);
        if (s_ev->parsed()) return cmd_evaluate(common, ev, out, err);
        if (s_cor->parsed()) return cmd_correlate(cor, out);
        if (s_rev->parsed()) return cmd_review_serve(rev, out);
        if (s_mocks->parsed()) return cmd_serve_mocks(mocks, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const Error& e) {
        err << "error: " << error_code_name(e.code()) << ": " << e.what() << '\n';
        return is_usage_code(e.code()) ? kExitUsage : kExitRecordFailures;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitRecordFailures;
    }
    err << "error: no subcommand\n";
    return kExitUsage;
}

int run_cli(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return run_cli(args, std::cout, std::cerr);
}

} // namespace tvf::cli
