#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "infodelta/date.hpp"
#include "infodelta/regimes.hpp"

namespace infodelta {

// Pearson correlation of two aligned series (cross-correlation at lag 0).
double cross_correlation_lag0(std::span<const double> a, std::span<const double> b);

enum class ScoreBucket { Top, High, Moderate, Caution, MaxCaution };
inline constexpr std::size_t kBucketCount = 5;

std::string_view to_string(ScoreBucket bucket);

// How scores strictly between two integer-range buckets are placed.
enum class FractionalScorePolicy {
    LowerBucket,  // 74.5 -> Moderate, 99.9 -> High
    Nearest,      // round half up, then bucket: 74.5 -> High
};

// Top = 100, High = 75-99, Moderate = 60-74, Caution = 40-59, MaxCaution = 0-39.
ScoreBucket bucket_score(double score, FractionalScorePolicy policy = FractionalScorePolicy::LowerBucket);

// Lowercases and strips scheme, credentials, port, path, query and fragment.
std::string normalize_domain(std::string_view url_or_host);

struct CredibilityRating {
    std::string domain;
    double score = 0.0;
};

struct PostRecord {
    Date date;
    std::string domain;
    std::string platform;
    std::string region;
    std::string topic;
};

enum class AnomalyState { NonAnomaly, NegativeAnomaly, PositiveAnomaly };
inline constexpr std::size_t kStateCount = 3;

std::string_view to_string(AnomalyState state);

struct QualityRow {
    std::size_t total = 0;
    std::array<std::size_t, kBucketCount> counts{};
    std::array<double, kBucketCount> percent{};  // all zero when total == 0
};

struct QualityTable {
    std::array<QualityRow, kStateCount> rows{};  // indexed by AnomalyState
};

struct QualityReport {
    std::map<std::string, QualityTable> platforms;
    std::size_t total_posts = 0;
    std::size_t included = 0;
    std::size_t excluded_before_window = 0;
    std::size_t excluded_unrated = 0;
    std::size_t excluded_unlabelled = 0;
};

// Distribution of posts over credibility buckets for each anomaly state, per
// platform. Posts before window_start, from unrated domains, or on dates
// without a regime label are excluded and tallied.
QualityReport quality_by_anomaly_state(std::span<const PostRecord> posts,
                                       const std::map<std::string, double>& ratings,
                                       std::span<const RegimeLabel> labels, std::optional<Date> window_start,
                                       FractionalScorePolicy policy = FractionalScorePolicy::LowerBucket);

// Ratings CSV: header `domain,score`. Keys are normalized domains.
std::map<std::string, double> read_ratings_csv(std::istream& in);

// Posts CSV: header `timestamp,domain,platform,region,topic`; timestamp may
// carry a time suffix after the date (2021-01-05T10:00:00Z).
std::vector<PostRecord> read_posts_csv(std::istream& in);

void write_quality_csv(const QualityReport& report, std::ostream& out);
void write_quality_json(const QualityReport& report, std::ostream& out);

}  // namespace infodelta
