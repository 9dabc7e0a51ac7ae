#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "infodelta/anomaly.hpp"
#include "infodelta/date.hpp"
#include "infodelta/series.hpp"

namespace infodelta {

enum class Regime { Void, Lack, Balance, Abundance, Overabundance };
enum class MacroState { Regular, Anomaly };

std::string_view to_string(Regime regime);
std::string_view to_string(MacroState state);
std::optional<Regime> parse_regime(std::string_view text);

struct RegimeLabel {
    Date date;
    Regime regime = Regime::Balance;
    MacroState macro_state = MacroState::Regular;
    double delta = 0.0;
    double epsilon = 0.0;  // Balance half-width the label was computed with

    AnomalySign sign() const {
        if (regime == Regime::Void) return AnomalySign::Negative;
        if (regime == Regime::Overabundance) return AnomalySign::Positive;
        return AnomalySign::None;
    }
};

// Anomalous points become Void (delta < 0) or Overabundance (delta > 0);
// regular points are Lack below -epsilon, Abundance above epsilon, Balance otherwise.
std::vector<RegimeLabel> classify_regimes(const DeltaSeries& delta, const AnomalyResult& anomalies,
                                          double balance_epsilon = 0.5);

struct PersistenceRun {
    AnomalySign sign = AnomalySign::Negative;
    Date start;
    Date end;
    long length = 0;        // end - start + 1, in resolution units
    long bridged_gaps = 0;  // regular units absorbed inside the run
};

// Maximal same-sign anomalous runs. Stretches of at most gap_tolerance
// regular units between two same-sign anomalies are absorbed; a longer
// stretch or an opposite-sign anomaly ends the run.
std::vector<PersistenceRun> persistence_runs(std::span<const RegimeLabel> labels, int gap_tolerance = 2,
                                             Resolution resolution = Resolution::Daily);

struct SignSummary {
    std::size_t count = 0;
    std::optional<double> mean_length;
    std::optional<long> max_length;
};

struct PersistenceSummary {
    SignSummary negative;
    SignSummary positive;
};

PersistenceSummary persistence_summary(std::span<const PersistenceRun> runs);

}  // namespace infodelta
