#pragma once

#include <map>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace tvf::eval {

enum class AgreementQuestion { feedback, text, visual };

[[nodiscard]] std::string_view to_string(AgreementQuestion q) noexcept;
[[nodiscard]] AgreementQuestion parse_agreement_question(std::string_view s);

// Number of raters (out of three) answering yes, per question.
struct HumanAgreement {
    std::string instance_id;
    int feedback = 0;
    int text = 0;
    int visual = 0;

    [[nodiscard]] int level(AgreementQuestion q) const noexcept;
    bool operator==(const HumanAgreement&) const = default;
};

struct LevelMean {
    int level = 0;
    double mean = 0.0;
    std::size_t n = 0;

    bool operator==(const LevelMean&) const = default;
};

struct CorrelationResult {
    std::vector<LevelMean> levels;  // only levels with at least one instance, ascending
    double spearman = 0.0;
    bool spearman_defined = false;  // false when either side is constant or n < 2
};

/// Spearman's rho with average ranks for ties; nullopt-like (defined=false, 0) when undefined.
[[nodiscard]] std::pair<double, bool> spearman(const std::vector<double>& x, const std::vector<double>& y);

/// Groups instances by agreement level on `question` and averages their
/// scores. Throws MissingInstance when an agreement has no score, and
/// InvalidArgument for levels outside 0..3.
[[nodiscard]] CorrelationResult correlate(const std::vector<HumanAgreement>& agreements,
                                          const std::map<std::string, double>& scores,
                                          AgreementQuestion question);

/// "level,mean,n" rows followed by a "spearman,<rho>,<defined>" row.
void write_correlation_csv(std::ostream& out, const CorrelationResult& r);

} // namespace tvf::eval
