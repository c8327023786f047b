#pragma once

#include "fsci/baseline.hpp"
#include "fsci/model.hpp"
#include "fsci/stats.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace fsci {

struct ExecutionOptions {
    unsigned threads = 1;
};

/// Runs fn(i) for i in [0, n) over up to `threads` workers. Each index is
/// visited exactly once; callers write results by index.
template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn);

// Group means ------------------------------------------------------------------

struct QuantileSummary {
    double min = 0.0;
    double p25 = 0.0;
    double median = 0.0;
    double p75 = 0.0;
    double max = 0.0;
};

struct CellMean {
    std::string cell;
    std::optional<double> mean; // empty when no weighted country falls in the cell
    std::size_t n = 0;
};

struct IndicatorMeans {
    std::string indicator;
    std::size_t n_values = 0;   // baseline countries (unweighted statistics)
    std::size_t n_weighted = 0; // countries with a resolved, positive weight
    std::optional<double> global_mean;
    std::optional<double> global_sd;
    std::optional<QuantileSummary> quantiles;
    std::vector<CellMean> cells; // grouping order
};

struct GroupMeansTable {
    GroupingScheme grouping;
    std::vector<IndicatorMeans> rows; // codebook order
    std::vector<std::string> warnings;

    const IndicatorMeans* find(std::string_view indicator) const;
};

/// Weighted mean/SD and unweighted quantiles per indicator, globally and per
/// grouping cell. Each baseline value is weighted by resolve_weight_series at its
/// own year; countries lacking a weight are dropped from the weighted statistics
/// only. Throws MissingWeightSeries.
GroupMeansTable group_weighted_means(const Baseline& baseline, const GroupingScheme& grouping,
                                     const IndicatorRegistry& registry, const Panel& weights,
                                     const ExecutionOptions& exec = {});

// Deviations -------------------------------------------------------------------

/// Below this magnitude a global mean is flagged as a small denominator.
inline constexpr double kSmallDenominator = 1.0;

/// s·(cell − global)/global × 100 with s = +1 for HigherBetter, −1 for LowerBetter.
/// Throws ZeroGlobalMean.
double percent_deviation(double cell_mean, double global_mean, Direction direction);

struct DeviationCell {
    std::string cell;
    std::size_t n = 0;
    std::optional<double> percent;
    std::optional<double> se_percent;
    std::optional<double> p_value;
    std::string star;
};

struct DeviationRow {
    std::string indicator;
    Direction direction = Direction::HigherBetter;
    std::optional<double> global_mean;
    bool small_denominator = false;
    std::vector<DeviationCell> cells; // grouping order; empty cells stay blank
    std::optional<stats::FTestResult> joint;
};

struct DeviationTable {
    GroupingScheme grouping;
    std::vector<DeviationRow> rows;
    std::vector<std::string> warnings;
};

/// Per indicator: demean by the global weighted mean, align sign with the desirable
/// direction, regress on grouping dummies with the indicator's weights (HC1), divide
/// by the global mean, and attach the cluster-robust joint F test.
DeviationTable deviation_table(const Baseline& baseline, const GroupingScheme& grouping,
                               const IndicatorRegistry& registry, const Panel& weights,
                               const ExecutionOptions& exec = {});

// Normalized distances ---------------------------------------------------------

struct NormalizedRow {
    std::string indicator;
    std::vector<std::optional<double>> values; // aligned with grouping cells
};

struct NormalizedDistanceTable {
    GroupingScheme grouping;
    std::vector<NormalizedRow> rows;
    std::vector<std::string> warnings;
};

/// (cell − global) / (max cell − min cell), sign-flipped for LowerBetter.
/// Indicators with fewer than two distinct cell means are left blank with a warning.
NormalizedDistanceTable normalized_distance_table(const GroupMeansTable& means, const IndicatorRegistry& registry);

// GDP relationship -------------------------------------------------------------

inline constexpr double kGdpDisplayCap = 100000.0;
inline constexpr std::size_t kMinCurvePoints = 3;

struct GdpPoint {
    std::string country;
    std::string cell;
    double gdp_per_capita = 0.0;
    double value = 0.0;
    double normalized = 0.0;
    bool display = true; // false above the display cap; still used for fitting
};

struct GdpCurvePoint {
    std::string cell;
    double gdp_per_capita = 0.0;
    double fitted = 0.0;
};

struct GdpRelation {
    std::string indicator;
    std::vector<GdpPoint> points;      // cell order, then ascending GDP
    std::vector<GdpCurvePoint> curve;  // cell order, then ascending GDP
};

struct GdpRelationSet {
    std::vector<GdpRelation> indicators;
    std::vector<std::string> warnings;
};

/// Country values normalized as (value − global weighted mean)/(max − min) over all
/// baseline countries, paired with each country's latest GDP per capita
/// (`_gdp_per_capita`), with a Loess curve per grouping cell holding ≥ 3 points.
GdpRelationSet gdp_relation_dataset(const Baseline& baseline, const Panel& panel, const IndicatorRegistry& registry,
                                    const GroupingScheme& grouping = GroupingScheme::region(),
                                    const stats::LoessOptions& loess = {}, const ExecutionOptions& exec = {});

// Resilience snapshot ----------------------------------------------------------

inline constexpr std::size_t kResilienceFields = 5;

struct ResilienceOptions {
    int window_start = 2012;
    int window_end = 2021;
    std::size_t min_exposure_years = 7;
    std::size_t top_k = 3;
    /// exposure, social capital, dietary sourcing flexibility, food price volatility, food supply variability
    std::array<std::string, kResilienceFields> fields = {"disaster_damage_ratio", "social_capital_index",
                                                         "dietary_sourcing_flexibility", "food_price_volatility",
                                                         "food_supply_variability"};
};

struct ResilienceValue {
    double value = 0.0;
    double size = 0.0;  // min-max over the subset, in [0, 1]
    double color = 0.0; // direction-adjusted (value − subset mean)/range, in [−1, 1]
};

struct ResilienceCountry {
    std::string country;
    std::size_t exposure_years = 0;
    double exposure_top_mean = 0.0; // before winsorizing
    std::array<ResilienceValue, kResilienceFields> fields{};
};

struct ResilienceSnapshot {
    std::vector<ResilienceCountry> countries; // ascending country code
    std::optional<double> exposure_cap;
    std::array<double, kResilienceFields> subset_means{};
    std::vector<std::string> warnings;
};

/// Subset: countries with ≥ min_exposure_years exposure observations in the window
/// and a baseline value for every other field. Exposure is the mean of the top-k
/// window values, winsorized at the subset's third-highest. Throws EmptySubset,
/// UnknownIndicator when a field id is not in the codebook.
ResilienceSnapshot resilience_snapshot(const Panel& panel, const Baseline& baseline,
                                       const ResilienceOptions& options = {});
ResilienceSnapshot resilience_snapshot(const Panel& panel, const ResilienceOptions& options = {});

} // namespace fsci

#include "fsci/detail/parallel.hpp"
