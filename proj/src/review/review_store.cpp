#include "tvf/review/review_store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <ctime>
#include <fstream>
#include <sstream>

#include "tvf/core/records_json.hpp"
#include "tvf/core/text.hpp"
#include "tvf/error.hpp"

namespace tvf::review {

namespace {

using json_io::Json;

std::string utc_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
    char out[40];
    std::snprintf(out, sizeof out, "%s.%03dZ", buf, static_cast<int>(ms));
    return out;
}

void write_all(int fd, const std::string& data, const std::filesystem::path& path) {
    const char* p = data.data();
    std::size_t left = data.size();
    while (left > 0) {
        const ssize_t n = ::write(fd, p, left);
        if (n < 0) {
            if (errno == EINTR) continue;
            fail(ErrorCode::ConfigError, "cannot append to " + path.string() + ": " + std::strerror(errno));
        }
        p += n;
        left -= static_cast<std::size_t>(n);
    }
}

} // namespace

std::string_view to_string(Question q) noexcept {
    switch (q) {
        case Question::feedback: return "feedback";
        case Question::text:     return "text";
        case Question::visual:   return "visual";
    }
    return "feedback";
}

Question parse_question(std::string_view s) {
    if (s == "feedback") return Question::feedback;
    if (s == "text") return Question::text;
    if (s == "visual") return Question::visual;
    fail(ErrorCode::InvalidArgument, "question must be feedback, text or visual, got '" + std::string(s) + "'");
}

int ReviewAggregate::yes_count(Question q) const noexcept {
    switch (q) {
        case Question::feedback: return yes_feedback;
        case Question::text:     return yes_text;
        case Question::visual:   return yes_visual;
    }
    return 0;
}

Json to_json(const ReviewVerdict& v) {
    Json j;
    j["instance_id"] = v.instance_id;
    j["rater_id"] = v.rater_id;
    j["feedback_ok"] = v.feedback_ok;
    j["text_ok"] = v.text_ok;
    j["visual_ok"] = v.visual_ok;
    j["submitted_at"] = v.submitted_at;
    return j;
}

ReviewVerdict verdict_from_json(const Json& j) {
    ReviewVerdict v;
    v.instance_id = json_io::string_field(j, "instance_id");
    v.rater_id = json_io::string_field(j, "rater_id");
    if (text::is_blank(v.instance_id) || text::is_blank(v.rater_id)) {
        fail(ErrorCode::SchemaError, "instance_id and rater_id must be non-empty");
    }
    v.feedback_ok = json_io::bool_field(j, "feedback_ok");
    v.text_ok = json_io::bool_field(j, "text_ok");
    v.visual_ok = json_io::bool_field(j, "visual_ok");
    if (j.contains("submitted_at") && !j.at("submitted_at").is_null()) {
        v.submitted_at = json_io::string_field(j, "submitted_at");
    }
    return v;
}

Json to_json(const ReviewAggregate& a) {
    Json j;
    j["instance_id"] = a.instance_id;
    j["n_raters"] = a.n_raters;
    j["yes_counts"] = {{"feedback", a.yes_feedback}, {"text", a.yes_text}, {"visual", a.yes_visual}};
    j["unanimous_all_yes"] = a.unanimous_all_yes;
    return j;
}

ReviewStore::ReviewStore(std::vector<BenchmarkInstance> instances, std::filesystem::path log_path,
                         std::set<std::string> raters)
    : instances_(std::move(instances)), log_path_(std::move(log_path)), raters_(raters.begin(), raters.end()) {
    for (std::size_t i = 0; i < instances_.size(); ++i) {
        if (!index_.emplace(instances_[i].id, i).second) {
            fail(ErrorCode::SchemaError, "duplicate instance id '" + instances_[i].id + "'");
        }
    }
    verdicts_.resize(instances_.size());
    replay();
    fd_ = ::open(log_path_.c_str(), O_WRONLY | O_APPEND | O_CREAT | O_CLOEXEC, 0644);
    if (fd_ < 0) fail(ErrorCode::ConfigError, "cannot open verdict log " + log_path_.string());
}

ReviewStore::~ReviewStore() {
    if (fd_ >= 0) ::close(fd_);
}

void ReviewStore::replay() {
    std::ifstream in(log_path_, std::ios::binary);
    if (!in) return;
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string data = buf.str();
    in.close();

    std::size_t pos = 0;
    long line_no = 0;
    while (pos < data.size()) {
        const std::size_t nl = data.find('\n', pos);
        const bool complete = nl != std::string::npos;
        std::string line = data.substr(pos, complete ? nl - pos : std::string::npos);
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!text::is_blank(line)) {
            ReviewVerdict v;
            try {
                v = verdict_from_json(Json::parse(line));
            } catch (const std::exception& e) {
                if (complete) {
                    throw Error(ErrorCode::SchemaError,
                                "verdict log line " + std::to_string(line_no) + ": " + e.what(), line_no);
                }
                // Torn write from a crash: drop it.
                std::filesystem::resize_file(log_path_, pos);
                return;
            }
            const auto it = index_.find(v.instance_id);
            if (it == index_.end()) {
                throw Error(ErrorCode::UnknownInstance, "verdict log line " + std::to_string(line_no) +
                                                            ": unknown instance '" + v.instance_id + "'",
                            line_no);
            }
            verdicts_[it->second][v.rater_id] = std::move(v);
            ++log_lines_;
        }
        if (!complete) {
            // Whole record but no newline; terminate it so the next append stays separate.
            std::ofstream(log_path_, std::ios::binary | std::ios::app) << '\n';
            return;
        }
        pos = nl + 1;
    }
}

std::size_t ReviewStore::index_of(std::string_view instance_id) const {
    const auto it = index_.find(instance_id);
    if (it == index_.end()) fail(ErrorCode::UnknownInstance, "unknown instance '" + std::string(instance_id) + "'");
    return it->second;
}

void ReviewStore::check_rater(std::string_view rater_id) const {
    if (text::is_blank(rater_id)) fail(ErrorCode::UnknownRater, "rater id is empty");
    if (!raters_.empty() && raters_.find(rater_id) == raters_.end()) {
        fail(ErrorCode::UnknownRater, "unknown rater '" + std::string(rater_id) + "'");
    }
}

ReviewAggregate ReviewStore::aggregate_locked(std::size_t idx) const {
    ReviewAggregate a;
    a.instance_id = instances_[idx].id;
    for (const auto& [_, v] : verdicts_[idx]) {
        ++a.n_raters;
        a.yes_feedback += v.feedback_ok ? 1 : 0;
        a.yes_text += v.text_ok ? 1 : 0;
        a.yes_visual += v.visual_ok ? 1 : 0;
    }
    a.unanimous_all_yes = a.n_raters >= kRatersPerInstance && a.yes_feedback == a.n_raters &&
                          a.yes_text == a.n_raters && a.yes_visual == a.n_raters;
    return a;
}

std::optional<BenchmarkInstance> ReviewStore::assign_next(std::string_view rater_id) const {
    check_rater(rater_id);
    std::lock_guard lock(mu_);
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < instances_.size(); ++i) {
        const auto& vs = verdicts_[i];
        if (vs.size() >= static_cast<std::size_t>(kRatersPerInstance)) continue;
        if (vs.find(std::string(rater_id)) != vs.end()) continue;
        if (!best || vs.size() < verdicts_[*best].size()) best = i;
    }
    if (!best) return std::nullopt;
    return instances_[*best];
}

ReviewAggregate ReviewStore::submit_verdict(ReviewVerdict v) {
    check_rater(v.rater_id);
    std::lock_guard lock(mu_);
    const std::size_t idx = index_of(v.instance_id);
    if (v.submitted_at.empty()) v.submitted_at = utc_now();
    write_all(fd_, json_io::to_jsonl_line(to_json(v)) + "\n", log_path_);
    ::fdatasync(fd_);
    verdicts_[idx][v.rater_id] = std::move(v);
    ++log_lines_;
    return aggregate_locked(idx);
}

ReviewAggregate ReviewStore::aggregate(std::string_view instance_id) const {
    std::lock_guard lock(mu_);
    return aggregate_locked(index_of(instance_id));
}

std::vector<ReviewAggregate> ReviewStore::aggregates() const {
    std::lock_guard lock(mu_);
    std::vector<ReviewAggregate> out;
    out.reserve(instances_.size());
    for (std::size_t i = 0; i < instances_.size(); ++i) out.push_back(aggregate_locked(i));
    return out;
}

const BenchmarkInstance& ReviewStore::instance(std::string_view instance_id) const {
    return instances_[index_of(instance_id)];
}

std::size_t ReviewStore::verdict_count() const {
    std::lock_guard lock(mu_);
    std::size_t n = 0;
    for (const auto& vs : verdicts_) n += vs.size();
    return n;
}

ExportResult ReviewStore::export_benchmark() const {
    std::lock_guard lock(mu_);
    ExportResult out;
    for (std::size_t i = 0; i < instances_.size(); ++i) {
        BenchmarkInstance inst = instances_[i];
        if (aggregate_locked(i).unanimous_all_yes) {
            inst.review_status = ReviewStatus::accepted;
            out.accepted.push_back(std::move(inst));
        } else {
            inst.review_status = ReviewStatus::rejected;
            out.rejected.push_back(std::move(inst));
        }
    }
    if (!instances_.empty()) {
        out.acceptance_rate = static_cast<double>(out.accepted.size()) / static_cast<double>(instances_.size());
    }
    return out;
}

AgreementHistogram ReviewStore::agreement_histogram(Question q) const {
    std::lock_guard lock(mu_);
    AgreementHistogram h;
    for (std::size_t i = 0; i < instances_.size(); ++i) {
        const auto a = aggregate_locked(i);
        if (a.n_raters != kRatersPerInstance) {
            ++h.n_excluded;
            continue;
        }
        ++h.n_complete;
        ++h.counts[static_cast<std::size_t>(a.yes_count(q))];
    }
    return h;
}

std::vector<AgreementRow> ReviewStore::agreement_rows() const {
    std::lock_guard lock(mu_);
    std::vector<AgreementRow> out;
    for (std::size_t i = 0; i < instances_.size(); ++i) {
        const auto a = aggregate_locked(i);
        if (a.n_raters != kRatersPerInstance) continue;
        out.push_back({a.instance_id, a.yes_feedback, a.yes_text, a.yes_visual});
    }
    return out;
}

void write_verdict_log(const std::filesystem::path& path, const std::vector<ReviewVerdict>& verdicts) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::ConfigError, "cannot write " + path.string());
    for (const auto& v : verdicts) out << json_io::to_jsonl_line(to_json(v)) << '\n';
}

} // namespace tvf::review
