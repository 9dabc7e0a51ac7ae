#include "infodelta/regimes.hpp"

#include <algorithm>
#include <string>

#include "infodelta/error.hpp"

namespace infodelta {

std::string_view to_string(Regime regime) {
    switch (regime) {
        case Regime::Void: return "void";
        case Regime::Lack: return "lack";
        case Regime::Balance: return "balance";
        case Regime::Abundance: return "abundance";
        case Regime::Overabundance: return "overabundance";
    }
    return "balance";
}

std::string_view to_string(MacroState state) {
    return state == MacroState::Anomaly ? "anomaly" : "regular";
}

std::optional<Regime> parse_regime(std::string_view text) {
    for (Regime r : {Regime::Void, Regime::Lack, Regime::Balance, Regime::Abundance, Regime::Overabundance}) {
        if (to_string(r) == text) return r;
    }
    return std::nullopt;
}

std::vector<RegimeLabel> classify_regimes(const DeltaSeries& delta, const AnomalyResult& anomalies,
                                          double balance_epsilon) {
    if (!(balance_epsilon >= 0.0)) throw Error(ErrorCode::InvalidConfig, "balance epsilon must be >= 0");
    if (anomalies.size() != delta.size()) {
        throw Error(ErrorCode::TimestampMismatch, "anomaly result and delta differ in length");
    }
    if (!anomalies.dates.empty() && anomalies.dates != delta.dates()) {
        throw Error(ErrorCode::TimestampMismatch, "anomaly result and delta cover different dates");
    }
    std::vector<RegimeLabel> labels;
    labels.reserve(delta.size());
    for (std::size_t i = 0; i < delta.size(); ++i) {
        RegimeLabel label;
        label.date = delta.points[i].date;
        label.delta = delta.points[i].delta;
        label.epsilon = balance_epsilon;
        const double d = label.delta;
        if (anomalies.points[i].is_anomaly) {
            if (d == 0.0) {
                throw Error(ErrorCode::InvalidSeries,
                            "anomaly with zero delta at " + format_date(label.date) + "; run sign_anomalies first");
            }
            label.macro_state = MacroState::Anomaly;
            label.regime = d < 0.0 ? Regime::Void : Regime::Overabundance;
        } else if (d < -balance_epsilon) {
            label.regime = Regime::Lack;
        } else if (d > balance_epsilon) {
            label.regime = Regime::Abundance;
        } else {
            label.regime = Regime::Balance;
        }
        labels.push_back(label);
    }
    return labels;
}

std::vector<PersistenceRun> persistence_runs(std::span<const RegimeLabel> labels, int gap_tolerance,
                                             Resolution resolution) {
    if (gap_tolerance < 0) throw Error(ErrorCode::InvalidConfig, "gap tolerance must be >= 0");
    const long step = step_days(resolution);
    std::vector<PersistenceRun> runs;
    std::optional<PersistenceRun> open;
    for (const auto& label : labels) {
        const AnomalySign sign = label.sign();
        if (sign == AnomalySign::None) continue;
        if (open && open->sign == sign) {
            const long gap = days_between(open->end, label.date) / step - 1;
            if (gap <= gap_tolerance) {
                open->end = label.date;
                open->bridged_gaps += gap;
                open->length = days_between(open->start, open->end) / step + 1;
                continue;
            }
        }
        if (open) runs.push_back(*open);
        open = PersistenceRun{sign, label.date, label.date, 1, 0};
    }
    if (open) runs.push_back(*open);
    return runs;
}

PersistenceSummary persistence_summary(std::span<const PersistenceRun> runs) {
    PersistenceSummary out;
    double neg_total = 0.0;
    double pos_total = 0.0;
    for (const auto& run : runs) {
        SignSummary& s = run.sign == AnomalySign::Negative ? out.negative : out.positive;
        double& total = run.sign == AnomalySign::Negative ? neg_total : pos_total;
        ++s.count;
        total += static_cast<double>(run.length);
        s.max_length = std::max(s.max_length.value_or(0), run.length);
    }
    if (out.negative.count > 0) out.negative.mean_length = neg_total / static_cast<double>(out.negative.count);
    if (out.positive.count > 0) out.positive.mean_length = pos_total / static_cast<double>(out.positive.count);
    return out;
}

}  // namespace infodelta
