#pragma once

#include <array>
#include <cstdio>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tvf/core/types.hpp"

namespace tvf::review {

// One rater's three judgments on one instance.
struct ReviewVerdict {
    std::string instance_id;
    std::string rater_id;
    bool feedback_ok = false;
    bool text_ok = false;
    bool visual_ok = false;
    std::string submitted_at;  // ISO-8601 UTC; stamped on submit when empty

    bool operator==(const ReviewVerdict&) const = default;
};

enum class Question { feedback, text, visual };

[[nodiscard]] std::string_view to_string(Question q) noexcept;
/// Throws InvalidArgument.
[[nodiscard]] Question parse_question(std::string_view s);

struct ReviewAggregate {
    std::string instance_id;
    int n_raters = 0;
    int yes_feedback = 0;
    int yes_text = 0;
    int yes_visual = 0;
    bool unanimous_all_yes = false;  // n_raters >= 3 and every answer yes

    [[nodiscard]] int yes_count(Question q) const noexcept;

    bool operator==(const ReviewAggregate&) const = default;
};

[[nodiscard]] nlohmann::ordered_json to_json(const ReviewVerdict& v);
/// All three booleans are required. Throws SchemaError.
[[nodiscard]] ReviewVerdict verdict_from_json(const nlohmann::ordered_json& j);
[[nodiscard]] nlohmann::ordered_json to_json(const ReviewAggregate& a);

struct ExportResult {
    std::vector<BenchmarkInstance> accepted;  // review_status = accepted, input order
    std::vector<BenchmarkInstance> rejected;  // review_status = rejected, input order
    double acceptance_rate = 0.0;             // accepted / all instances
};

struct AgreementHistogram {
    std::array<std::size_t, 4> counts{};  // instances with 0..3 yes votes
    std::size_t n_complete = 0;           // instances with exactly three verdicts
    std::size_t n_excluded = 0;           // instances with any other number
};

// Per-instance yes counts of complete (three-verdict) instances.
struct AgreementRow {
    std::string instance_id;
    int feedback = 0;
    int text = 0;
    int visual = 0;
};

inline constexpr int kRatersPerInstance = 3;

// Candidate instances plus an append-only JSONL verdict log. Opening replays
// the log; a torn final line (no trailing newline, unparseable) is cut off so
// later appends start on a clean line. Every submit reaches the file before
// the call returns. All methods are thread-safe.
class ReviewStore {
public:
    /// `raters` empty means any rater id is accepted. Throws SchemaError on a
    /// corrupt log line, UnknownInstance when the log names an unknown instance.
    ReviewStore(std::vector<BenchmarkInstance> instances, std::filesystem::path log_path,
                std::set<std::string> raters = {});
    ~ReviewStore();

    ReviewStore(const ReviewStore&) = delete;
    ReviewStore& operator=(const ReviewStore&) = delete;

    /// Unjudged-by-this-rater instance with the fewest verdicts among those with
    /// fewer than three; ties go to input order. Throws UnknownRater.
    [[nodiscard]] std::optional<BenchmarkInstance> assign_next(std::string_view rater_id) const;

    /// Appends to the log, replacing the rater's earlier verdict on that
    /// instance. Throws UnknownInstance, UnknownRater.
    ReviewAggregate submit_verdict(ReviewVerdict v);

    [[nodiscard]] ReviewAggregate aggregate(std::string_view instance_id) const;
    [[nodiscard]] std::vector<ReviewAggregate> aggregates() const;  // input order
    [[nodiscard]] const BenchmarkInstance& instance(std::string_view instance_id) const;
    [[nodiscard]] std::size_t size() const noexcept { return instances_.size(); }
    [[nodiscard]] std::size_t verdict_count() const;

    [[nodiscard]] ExportResult export_benchmark() const;
    [[nodiscard]] AgreementHistogram agreement_histogram(Question q) const;
    [[nodiscard]] std::vector<AgreementRow> agreement_rows() const;

private:
    std::size_t index_of(std::string_view instance_id) const;
    ReviewAggregate aggregate_locked(std::size_t idx) const;
    void check_rater(std::string_view rater_id) const;
    void replay();

    std::vector<BenchmarkInstance> instances_;
    std::map<std::string, std::size_t, std::less<>> index_;
    std::filesystem::path log_path_;
    std::set<std::string, std::less<>> raters_;
    // Effective verdict per rater, per instance.
    std::vector<std::map<std::string, ReviewVerdict>> verdicts_;
    std::size_t log_lines_ = 0;
    int fd_ = -1;
    mutable std::mutex mu_;
};

/// ReviewVerdict JSONL; instances are read as BenchmarkInstance JSONL.
void write_verdict_log(const std::filesystem::path& path, const std::vector<ReviewVerdict>& verdicts);

} // namespace tvf::review
