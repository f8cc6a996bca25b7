#include "tvf/eval/correlate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "tvf/error.hpp"

namespace tvf::eval {

namespace {

std::vector<double> average_ranks(const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(v.size());
    std::size_t i = 0;
    while (i < idx.size()) {
        std::size_t j = i;
        while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
        const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = r;
        i = j + 1;
    }
    return ranks;
}

} // namespace

std::string_view to_string(AgreementQuestion q) noexcept {
    switch (q) {
        case AgreementQuestion::feedback: return "feedback";
        case AgreementQuestion::text:     return "text";
        case AgreementQuestion::visual:   return "visual";
    }
    return "feedback";
}

AgreementQuestion parse_agreement_question(std::string_view s) {
    if (s == "feedback") return AgreementQuestion::feedback;
    if (s == "text") return AgreementQuestion::text;
    if (s == "visual") return AgreementQuestion::visual;
    fail(ErrorCode::InvalidArgument, "question must be feedback, text or visual, not '" + std::string(s) + "'");
}

int HumanAgreement::level(AgreementQuestion q) const noexcept {
    switch (q) {
        case AgreementQuestion::feedback: return feedback;
        case AgreementQuestion::text:     return text;
        case AgreementQuestion::visual:   return visual;
    }
    return feedback;
}

std::pair<double, bool> spearman(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) fail(ErrorCode::LengthMismatch, "spearman inputs differ in length");
    if (x.size() < 2) return {0.0, false};
    const auto rx = average_ranks(x);
    const auto ry = average_ranks(y);
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
    const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) return {0.0, false};
    return {sxy / std::sqrt(sxx * syy), true};
}

CorrelationResult correlate(const std::vector<HumanAgreement>& agreements, const std::map<std::string, double>& scores,
                            AgreementQuestion question) {
    std::vector<double> levels;
    std::vector<double> values;
    std::map<int, std::pair<double, std::size_t>> by_level;
    for (const auto& a : agreements) {
        auto it = scores.find(a.instance_id);
        if (it == scores.end()) fail(ErrorCode::MissingInstance, "no score for instance " + a.instance_id);
        const int lvl = a.level(question);
        if (lvl < 0 || lvl > 3) fail(ErrorCode::InvalidArgument, "agreement level must be 0..3");
        levels.push_back(lvl);
        values.push_back(it->second);
        auto& slot = by_level[lvl];
        slot.first += it->second;
        ++slot.second;
    }
    CorrelationResult r;
    for (const auto& [lvl, acc] : by_level) {
        r.levels.push_back(LevelMean{lvl, acc.first / static_cast<double>(acc.second), acc.second});
    }
    std::tie(r.spearman, r.spearman_defined) = spearman(levels, values);
    return r;
}

void write_correlation_csv(std::ostream& out, const CorrelationResult& r) {
    char buf[64];
    out << "level,mean,n\n";
    for (const auto& l : r.levels) {
        std::snprintf(buf, sizeof buf, "%.6f", l.mean);
        out << l.level << ',' << buf << ',' << l.n << '\n';
    }
    std::snprintf(buf, sizeof buf, "%.6f", r.spearman);
    out << "spearman," << buf << ',' << (r.spearman_defined ? "defined" : "undefined") << '\n';
}

} // namespace tvf::eval
