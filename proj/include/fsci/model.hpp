#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace fsci {

/// Earliest year a stored panel may hold.
inline constexpr int kMinPanelYear = 1960;

enum class Theme { Diets, Environment, Livelihoods, Governance, Resilience };
enum class Direction { HigherBetter, LowerBetter };
enum class IncomeGroup { Low, LowerMiddle, UpperMiddle, High };

enum class WeightKey {
    Population,
    Gdp,
    UrbanPopulation,
    LandArea,
    Cropland,
    AgriculturalLand2015,
    AgriculturalLand2010,
    AreaHarvested,
    ProducingAnimals,
    AnimalsSlaughtered,
    None,
};

std::string_view to_string(Theme theme) noexcept;
std::string_view to_string(Direction direction) noexcept;
std::string_view to_string(IncomeGroup group) noexcept;
std::string_view to_string(WeightKey key) noexcept;

// Parsers throw fsci::Error with the matching Unknown* code.
Theme parse_theme(std::string_view text);
Direction parse_direction(std::string_view text);
IncomeGroup parse_income_group(std::string_view text);
WeightKey parse_weight_key(std::string_view text);

/// +1 for HigherBetter, -1 for LowerBetter.
inline double direction_sign(Direction d) noexcept { return d == Direction::HigherBetter ? 1.0 : -1.0; }

/// Ids of the series that back weights and derived indicators. They live in the
/// panel like any indicator but need no codebook row.
namespace reserved {
inline constexpr std::string_view population = "_population";
inline constexpr std::string_view gdp = "_gdp"; // thousands of current USD
inline constexpr std::string_view urban_population = "_urban_population";
inline constexpr std::string_view land_area = "_land_area";
inline constexpr std::string_view cropland = "_cropland";
inline constexpr std::string_view agricultural_land = "_agricultural_land";
inline constexpr std::string_view area_harvested = "_area_harvested";
inline constexpr std::string_view producing_animals = "_producing_animals";
inline constexpr std::string_view animals_slaughtered = "_animals_slaughtered";
inline constexpr std::string_view gdp_per_capita = "_gdp_per_capita";
inline constexpr std::string_view disaster_damages = "_disaster_damages_kusd";
inline constexpr std::string_view sc_help = "_sc_help";
inline constexpr std::string_view sc_trust = "_sc_trust";
inline constexpr std::string_view sc_fin_conf = "_sc_fin_conf";
inline constexpr std::string_view sc_gov_conf = "_sc_gov_conf";
} // namespace reserved

inline bool is_reserved_series(std::string_view id) noexcept { return !id.empty() && id.front() == '_'; }

/// Reserved series backing a weight key; nullopt for WeightKey::None.
std::optional<std::string_view> weight_series_id(WeightKey key);

/// The fixed vintage used by the agricultural-land keys.
std::optional<int> fixed_weight_year(WeightKey key) noexcept;

struct Observation {
    std::string country;
    std::string indicator;
    int year = 0;
    double value = 0.0;

    friend bool operator==(const Observation&, const Observation&) = default;
};

struct IndicatorMeta {
    std::string id;
    std::string name;
    std::string unit;
    Theme theme = Theme::Diets;
    std::string domain;
    Direction direction = Direction::HigherBetter;
    WeightKey weight_key = WeightKey::None;
    bool value_added = false;

    friend bool operator==(const IndicatorMeta&, const IndicatorMeta&) = default;
};

/// Codebook: indicators in file order, unique ids.
class IndicatorRegistry {
public:
    void add(IndicatorMeta meta);

    const IndicatorMeta* find(std::string_view id) const;
    const IndicatorMeta& at(std::string_view id) const;
    bool contains(std::string_view id) const { return find(id) != nullptr; }

    const std::vector<IndicatorMeta>& items() const noexcept { return items_; }
    std::size_t size() const noexcept { return items_.size(); }
    bool empty() const noexcept { return items_.empty(); }

    friend bool operator==(const IndicatorRegistry& a, const IndicatorRegistry& b) { return a.items_ == b.items_; }

private:
    std::vector<IndicatorMeta> items_;
    std::unordered_map<std::string, std::size_t> index_;
};

/// The nine modified-M49 region labels, in report column order.
const std::array<std::string_view, 9>& region_labels() noexcept;
bool is_region_label(std::string_view label) noexcept;

struct CountryMeta {
    std::string iso3;
    std::string name;
    std::string region;
    IncomeGroup income_group = IncomeGroup::Low;
    bool un_member = true;

    friend bool operator==(const CountryMeta&, const CountryMeta&) = default;
};

class CountryTable {
public:
    void add(CountryMeta meta);

    const CountryMeta* find(std::string_view iso3) const;
    const CountryMeta& at(std::string_view iso3) const;

    const std::vector<CountryMeta>& items() const noexcept { return items_; }
    std::size_t size() const noexcept { return items_.size(); }

    friend bool operator==(const CountryTable& a, const CountryTable& b) { return a.items_ == b.items_; }

private:
    std::vector<CountryMeta> items_;
    std::unordered_map<std::string, std::size_t> index_;
};

enum class GroupingKind { Region, IncomeGroup, Global };

struct GroupingScheme {
    GroupingKind kind = GroupingKind::Global;
    std::vector<std::string> cells;

    static GroupingScheme region();
    static GroupingScheme income();
    static GroupingScheme global();

    /// Cell label of a country under this scheme.
    std::string_view cell_of(const CountryMeta& country) const;
    /// Position of a label in `cells`, or nullopt.
    std::optional<std::size_t> index_of(std::string_view label) const;
};

std::string_view to_string(GroupingKind kind) noexcept;

/// Year-ordered values of one (country, indicator) series.
using Series = std::map<int, double>;
using CellKey = std::pair<std::string, std::string>; // (country, indicator)

/// Long-format country-indicator-year panel. Filled by the loader, read-only afterwards.
class Panel {
public:
    Panel() = default;
    Panel(std::shared_ptr<const IndicatorRegistry> registry, std::shared_ptr<const CountryTable> countries);

    /// Validates and inserts one cell. Throws UnknownIndicator, UnknownCountry,
    /// UnparseableValue (non-finite), YearOutOfRange (year < 1960) or DuplicateCell.
    void insert(const Observation& obs);

    /// Deterministic union; re-checks uniqueness across both panels.
    Panel merged(const Panel& other) const;

    const Series* series(std::string_view country, std::string_view indicator) const;
    bool has_indicator(std::string_view indicator) const;

    const std::map<CellKey, Series>& cells() const noexcept { return cells_; }
    std::vector<Observation> observations() const;
    std::size_t size() const noexcept { return size_; }
    bool empty() const noexcept { return size_ == 0; }

    const IndicatorRegistry& registry() const { return *registry_; }
    const CountryTable& countries() const { return *countries_; }
    std::shared_ptr<const IndicatorRegistry> registry_ptr() const { return registry_; }
    std::shared_ptr<const CountryTable> countries_ptr() const { return countries_; }

    friend bool operator==(const Panel& a, const Panel& b) { return a.cells_ == b.cells_; }

private:
    std::shared_ptr<const IndicatorRegistry> registry_;
    std::shared_ptr<const CountryTable> countries_;
    std::map<CellKey, Series> cells_;
    std::map<std::string, std::size_t, std::less<>> indicator_counts_;
    std::size_t size_ = 0;
};

/// Weight for one country under an indicator's weighting key, as of `obs_year`.
/// None → 1.0. Fixed-vintage keys read their fixed year only. Otherwise the same
/// year, else the latest year ≤ obs_year, else the latest year on record.
/// Returns nullopt when the country has no usable weight value.
/// Throws MissingWeightSeries when the backing series is absent from the panel.
std::optional<double> resolve_weight_series(const IndicatorMeta& meta, const Panel& panel,
                                            std::string_view country, int obs_year);

} // namespace fsci
