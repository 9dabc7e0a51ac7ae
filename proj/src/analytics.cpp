#include "infodelta/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>
#include <unordered_map>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "infodelta/csv.hpp"
#include "infodelta/error.hpp"
#include "json.hpp"

namespace infodelta {

double cross_correlation_lag0(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw Error(ErrorCode::LengthMismatch, "series of length " + std::to_string(a.size()) + " and " +
                                                   std::to_string(b.size()));
    }
    if (a.size() < 2) throw Error(ErrorCode::LengthMismatch, "correlation needs at least 2 aligned points");
    const auto n = static_cast<double>(a.size());
    double mean_a = 0.0, mean_b = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        mean_a += a[i];
        mean_b += b[i];
    }
    mean_a /= n;
    mean_b /= n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - mean_a;
        const double db = b[i] - mean_b;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (!(saa > 0.0) || !(sbb > 0.0)) throw Error(ErrorCode::ZeroVariance, "a series has zero variance");
    return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

std::string_view to_string(ScoreBucket bucket) {
    switch (bucket) {
        case ScoreBucket::Top: return "top";
        case ScoreBucket::High: return "high";
        case ScoreBucket::Moderate: return "moderate";
        case ScoreBucket::Caution: return "caution";
        case ScoreBucket::MaxCaution: return "max_caution";
    }
    return "max_caution";
}

ScoreBucket bucket_score(double score, FractionalScorePolicy policy) {
    if (!(score >= 0.0 && score <= 100.0)) {
        throw Error(ErrorCode::ScoreOutOfRange, "credibility score " + std::to_string(score) + " outside [0, 100]");
    }
    const double s = policy == FractionalScorePolicy::Nearest ? std::floor(score + 0.5) : score;
    if (s >= 100.0) return ScoreBucket::Top;
    if (s >= 75.0) return ScoreBucket::High;
    if (s >= 60.0) return ScoreBucket::Moderate;
    if (s >= 40.0) return ScoreBucket::Caution;
    return ScoreBucket::MaxCaution;
}

std::string normalize_domain(std::string_view url_or_host) {
    std::string s = csv::lower(csv::trim(url_or_host));
    if (auto scheme = s.find("://"); scheme != std::string::npos) s.erase(0, scheme + 3);
    if (auto end = s.find_first_of("/?#"); end != std::string::npos) s.erase(end);
    if (auto at = s.rfind('@'); at != std::string::npos) s.erase(0, at + 1);
    if (auto colon = s.find(':'); colon != std::string::npos) s.erase(colon);
    while (!s.empty() && s.back() == '.') s.pop_back();
    return s;
}

std::string_view to_string(AnomalyState state) {
    switch (state) {
        case AnomalyState::NonAnomaly: return "non_anomaly";
        case AnomalyState::NegativeAnomaly: return "negative_anomaly";
        case AnomalyState::PositiveAnomaly: return "positive_anomaly";
    }
    return "non_anomaly";
}

namespace {

AnomalyState state_of(const RegimeLabel& label) {
    switch (label.sign()) {
        case AnomalySign::Negative: return AnomalyState::NegativeAnomaly;
        case AnomalySign::Positive: return AnomalyState::PositiveAnomaly;
        case AnomalySign::None: break;
    }
    return AnomalyState::NonAnomaly;
}

}  // namespace

QualityReport quality_by_anomaly_state(std::span<const PostRecord> posts,
                                       const std::map<std::string, double>& ratings,
                                       std::span<const RegimeLabel> labels, std::optional<Date> window_start,
                                       FractionalScorePolicy policy) {
    std::map<Date, AnomalyState> state_by_date;
    for (const auto& label : labels) state_by_date[label.date] = state_of(label);

    QualityReport report;
    report.total_posts = posts.size();
    bool any_rated = false;
    for (const auto& post : posts) {
        if (window_start && post.date < *window_start) {
            ++report.excluded_before_window;
            continue;
        }
        auto rating = ratings.find(normalize_domain(post.domain));
        if (rating == ratings.end()) {
            ++report.excluded_unrated;
            continue;
        }
        any_rated = true;
        auto state = state_by_date.find(post.date);
        if (state == state_by_date.end()) {
            ++report.excluded_unlabelled;
            continue;
        }
        auto& row = report.platforms[post.platform].rows[static_cast<std::size_t>(state->second)];
        ++row.total;
        ++row.counts[static_cast<std::size_t>(bucket_score(rating->second, policy))];
        ++report.included;
    }
    if (!any_rated) throw Error(ErrorCode::EmptyJoin, "no post matches a rated domain");

    for (auto& [platform, table] : report.platforms) {
        for (auto& row : table.rows) {
            if (row.total == 0) continue;
            for (std::size_t b = 0; b < kBucketCount; ++b) {
                row.percent[b] = 100.0 * static_cast<double>(row.counts[b]) / static_cast<double>(row.total);
            }
        }
    }
    return report;
}

namespace {

std::vector<std::string> expect_header(std::istream& in, std::string_view expected, std::string_view what) {
    std::string line;
    if (!csv::read_line(in, line)) throw Error(ErrorCode::MalformedRow, std::string(what) + ": empty file");
    auto fields = csv::split(line);
    std::string joined;
    if (fields) {
        for (std::size_t i = 0; i < fields->size(); ++i) joined += (i ? "," : "") + csv::lower(csv::trim((*fields)[i]));
    }
    if (joined != expected) {
        throw Error(ErrorCode::MalformedRow, std::string(what) + " line 1: expected header `" +
                                                 std::string(expected) + "`");
    }
    return *fields;
}

}  // namespace

std::map<std::string, double> read_ratings_csv(std::istream& in) {
    expect_header(in, "domain,score", "ratings");
    std::map<std::string, double> ratings;
    std::string line;
    std::size_t line_no = 1;
    while (csv::read_line(in, line)) {
        ++line_no;
        if (csv::trim(line).empty()) continue;
        auto fields = csv::split(line);
        if (!fields || fields->size() != 2) {
            throw Error(ErrorCode::MalformedRow, "ratings line " + std::to_string(line_no) + ": expected 2 fields");
        }
        auto score = csv::parse_double((*fields)[1]);
        if (!score) {
            throw Error(ErrorCode::MalformedRow, "ratings line " + std::to_string(line_no) + ": bad score");
        }
        if (*score < 0.0 || *score > 100.0) {
            throw Error(ErrorCode::ScoreOutOfRange, "ratings line " + std::to_string(line_no));
        }
        ratings[normalize_domain((*fields)[0])] = *score;
    }
    return ratings;
}

std::vector<PostRecord> read_posts_csv(std::istream& in) {
    expect_header(in, "timestamp,domain,platform,region,topic", "posts");
    std::vector<PostRecord> posts;
    std::string line;
    std::size_t line_no = 1;
    while (csv::read_line(in, line)) {
        ++line_no;
        if (csv::trim(line).empty()) continue;
        auto fields = csv::split(line);
        if (!fields || fields->size() != 5) {
            throw Error(ErrorCode::MalformedRow, "posts line " + std::to_string(line_no) + ": expected 5 fields");
        }
        const std::string ts = csv::trim((*fields)[0]);
        auto date = parse_date(std::string_view(ts).substr(0, 10));
        if (!date || (ts.size() > 10 && ts[10] != 'T' && ts[10] != ' ')) {
            throw Error(ErrorCode::MalformedRow, "posts line " + std::to_string(line_no) + ": bad timestamp");
        }
        posts.push_back({*date, csv::trim((*fields)[1]), csv::trim((*fields)[2]), csv::trim((*fields)[3]),
                         csv::trim((*fields)[4])});
    }
    return posts;
}

void write_quality_csv(const QualityReport& report, std::ostream& out) {
    out << "platform,state,n_posts";
    for (std::size_t b = 0; b < kBucketCount; ++b) out << ',' << to_string(static_cast<ScoreBucket>(b));
    out << '\n';
    for (const auto& [platform, table] : report.platforms) {
        for (std::size_t s = 0; s < kStateCount; ++s) {
            const auto& row = table.rows[s];
            out << csv::escape(platform) << ',' << to_string(static_cast<AnomalyState>(s)) << ',' << row.total;
            for (double p : row.percent) fmt::print(out, ",{}", p);
            out << '\n';
        }
    }
}

void write_quality_json(const QualityReport& report, std::ostream& out) {
    using nlohmann::ordered_json;
    ordered_json j;
    j["total_posts"] = report.total_posts;
    j["included"] = report.included;
    j["excluded"] = {{"before_window", report.excluded_before_window},
                     {"unrated", report.excluded_unrated},
                     {"unlabelled", report.excluded_unlabelled}};
    ordered_json platforms = ordered_json::object();
    for (const auto& [platform, table] : report.platforms) {
        ordered_json rows = ordered_json::object();
        for (std::size_t s = 0; s < kStateCount; ++s) {
            const auto& row = table.rows[s];
            ordered_json r;
            r["n_posts"] = row.total;
            for (std::size_t b = 0; b < kBucketCount; ++b) {
                r[std::string(to_string(static_cast<ScoreBucket>(b)))] = row.percent[b];
            }
            rows[std::string(to_string(static_cast<AnomalyState>(s)))] = std::move(r);
        }
        platforms[platform] = std::move(rows);
    }
    j["platforms"] = std::move(platforms);
    out << j.dump(2) << '\n';
}

}  // namespace infodelta
