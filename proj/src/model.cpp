#include "fsci/model.hpp"

#include "fsci/error.hpp"

#include <algorithm>
#include <cmath>

namespace fsci {

namespace {

constexpr std::array<std::string_view, 9> kRegions = {
    "Latin America & Caribbean",
    "Northern America & Europe",
    "Oceania",
    "Northern Africa & Western Asia",
    "Central Asia",
    "Eastern Asia",
    "South-eastern Asia",
    "Southern Asia",
    "Sub-Saharan Africa",
};

constexpr std::array<std::string_view, 4> kIncomeLabels = {"Low", "LowerMiddle", "UpperMiddle", "High"};

} // namespace

std::string_view to_string(Theme theme) noexcept {
    switch (theme) {
    case Theme::Diets: return "diets";
    case Theme::Environment: return "environment";
    case Theme::Livelihoods: return "livelihoods";
    case Theme::Governance: return "governance";
    case Theme::Resilience: return "resilience";
    }
    return "";
}

std::string_view to_string(Direction direction) noexcept {
    return direction == Direction::HigherBetter ? "higher" : "lower";
}

std::string_view to_string(IncomeGroup group) noexcept {
    return kIncomeLabels[static_cast<std::size_t>(group)];
}

std::string_view to_string(WeightKey key) noexcept {
    switch (key) {
    case WeightKey::Population: return "population";
    case WeightKey::Gdp: return "gdp";
    case WeightKey::UrbanPopulation: return "urban_population";
    case WeightKey::LandArea: return "land_area";
    case WeightKey::Cropland: return "cropland";
    case WeightKey::AgriculturalLand2015: return "agricultural_land_2015";
    case WeightKey::AgriculturalLand2010: return "agricultural_land_2010";
    case WeightKey::AreaHarvested: return "area_harvested";
    case WeightKey::ProducingAnimals: return "producing_animals";
    case WeightKey::AnimalsSlaughtered: return "animals_slaughtered";
    case WeightKey::None: return "none";
    }
    return "";
}

std::string_view to_string(GroupingKind kind) noexcept {
    switch (kind) {
    case GroupingKind::Region: return "region";
    case GroupingKind::IncomeGroup: return "income";
    case GroupingKind::Global: return "global";
    }
    return "";
}

Theme parse_theme(std::string_view text) {
    for (auto t : {Theme::Diets, Theme::Environment, Theme::Livelihoods, Theme::Governance, Theme::Resilience}) {
        if (to_string(t) == text) return t;
    }
    throw Error(ErrorCode::UnknownTheme, "'" + std::string(text) + "'");
}

Direction parse_direction(std::string_view text) {
    if (text == "higher") return Direction::HigherBetter;
    if (text == "lower") return Direction::LowerBetter;
    throw Error(ErrorCode::UnknownDirection, "'" + std::string(text) + "' (expected higher or lower)");
}

IncomeGroup parse_income_group(std::string_view text) {
    for (std::size_t i = 0; i < kIncomeLabels.size(); ++i) {
        if (kIncomeLabels[i] == text) return static_cast<IncomeGroup>(i);
    }
    throw Error(ErrorCode::UnknownIncomeGroup, "'" + std::string(text) + "'");
}

WeightKey parse_weight_key(std::string_view text) {
    for (int i = 0; i <= static_cast<int>(WeightKey::None); ++i) {
        const auto key = static_cast<WeightKey>(i);
        if (to_string(key) == text) return key;
    }
    throw Error(ErrorCode::UnknownWeightKey, "'" + std::string(text) + "'");
}

std::optional<std::string_view> weight_series_id(WeightKey key) {
    switch (key) {
    case WeightKey::Population: return reserved::population;
    case WeightKey::Gdp: return reserved::gdp;
    case WeightKey::UrbanPopulation: return reserved::urban_population;
    case WeightKey::LandArea: return reserved::land_area;
    case WeightKey::Cropland: return reserved::cropland;
    case WeightKey::AgriculturalLand2015:
    case WeightKey::AgriculturalLand2010: return reserved::agricultural_land;
    case WeightKey::AreaHarvested: return reserved::area_harvested;
    case WeightKey::ProducingAnimals: return reserved::producing_animals;
    case WeightKey::AnimalsSlaughtered: return reserved::animals_slaughtered;
    case WeightKey::None: return std::nullopt;
    }
    throw Error(ErrorCode::UnknownWeightKey, "enumerator " + std::to_string(static_cast<int>(key)));
}

std::optional<int> fixed_weight_year(WeightKey key) noexcept {
    if (key == WeightKey::AgriculturalLand2015) return 2015;
    if (key == WeightKey::AgriculturalLand2010) return 2010;
    return std::nullopt;
}

// IndicatorRegistry

void IndicatorRegistry::add(IndicatorMeta meta) {
    if (index_.contains(meta.id)) throw Error(ErrorCode::DuplicateIndicatorId, "'" + meta.id + "'");
    index_.emplace(meta.id, items_.size());
    items_.push_back(std::move(meta));
}

const IndicatorMeta* IndicatorRegistry::find(std::string_view id) const {
    const auto it = index_.find(std::string(id));
    return it == index_.end() ? nullptr : &items_[it->second];
}

const IndicatorMeta& IndicatorRegistry::at(std::string_view id) const {
    if (const auto* meta = find(id)) return *meta;
    throw Error(ErrorCode::UnknownIndicator, "'" + std::string(id) + "'");
}

// Countries

const std::array<std::string_view, 9>& region_labels() noexcept { return kRegions; }

bool is_region_label(std::string_view label) noexcept {
    return std::find(kRegions.begin(), kRegions.end(), label) != kRegions.end();
}

void CountryTable::add(CountryMeta meta) {
    if (index_.contains(meta.iso3)) throw Error(ErrorCode::DuplicateCountry, "'" + meta.iso3 + "'");
    if (!is_region_label(meta.region)) throw Error(ErrorCode::UnknownRegion, "'" + meta.region + "'");
    index_.emplace(meta.iso3, items_.size());
    items_.push_back(std::move(meta));
}

const CountryMeta* CountryTable::find(std::string_view iso3) const {
    const auto it = index_.find(std::string(iso3));
    return it == index_.end() ? nullptr : &items_[it->second];
}

const CountryMeta& CountryTable::at(std::string_view iso3) const {
    if (const auto* meta = find(iso3)) return *meta;
    throw Error(ErrorCode::UnknownCountry, "'" + std::string(iso3) + "'");
}

// Grouping

GroupingScheme GroupingScheme::region() {
    GroupingScheme g{GroupingKind::Region, {}};
    for (auto label : kRegions) g.cells.emplace_back(label);
    return g;
}

GroupingScheme GroupingScheme::income() {
    GroupingScheme g{GroupingKind::IncomeGroup, {}};
    for (auto label : kIncomeLabels) g.cells.emplace_back(label);
    return g;
}

GroupingScheme GroupingScheme::global() { return {GroupingKind::Global, {"Global"}}; }

std::string_view GroupingScheme::cell_of(const CountryMeta& country) const {
    switch (kind) {
    case GroupingKind::Region: return country.region;
    case GroupingKind::IncomeGroup: return to_string(country.income_group);
    case GroupingKind::Global: return cells.front();
    }
    return {};
}

std::optional<std::size_t> GroupingScheme::index_of(std::string_view label) const {
    const auto it = std::find(cells.begin(), cells.end(), label);
    if (it == cells.end()) return std::nullopt;
    return static_cast<std::size_t>(it - cells.begin());
}

// Panel

Panel::Panel(std::shared_ptr<const IndicatorRegistry> registry, std::shared_ptr<const CountryTable> countries)
    : registry_(std::move(registry)), countries_(std::move(countries)) {}

void Panel::insert(const Observation& obs) {
    if (!is_reserved_series(obs.indicator) && !registry_->contains(obs.indicator)) {
        throw Error(ErrorCode::UnknownIndicator, "'" + obs.indicator + "'");
    }
    if (!countries_->find(obs.country)) throw Error(ErrorCode::UnknownCountry, "'" + obs.country + "'");
    if (!std::isfinite(obs.value)) throw Error(ErrorCode::UnparseableValue, "non-finite value");
    if (obs.year < kMinPanelYear) {
        throw Error(ErrorCode::YearOutOfRange, "year " + std::to_string(obs.year) + " is before 1960");
    }
    auto& series = cells_[CellKey{obs.country, obs.indicator}];
    if (!series.emplace(obs.year, obs.value).second) {
        throw Error(ErrorCode::DuplicateCell,
                    obs.country + "," + obs.indicator + "," + std::to_string(obs.year));
    }
    ++indicator_counts_[obs.indicator];
    ++size_;
}

Panel Panel::merged(const Panel& other) const {
    Panel out(registry_, countries_);
    for (const auto* source : {this, &other}) {
        for (const auto& [key, series] : source->cells_) {
            for (const auto& [year, value] : series) out.insert({key.first, key.second, year, value});
        }
    }
    return out;
}

const Series* Panel::series(std::string_view country, std::string_view indicator) const {
    const auto it = cells_.find(CellKey{std::string(country), std::string(indicator)});
    return it == cells_.end() ? nullptr : &it->second;
}

bool Panel::has_indicator(std::string_view indicator) const {
    return indicator_counts_.find(indicator) != indicator_counts_.end();
}

std::vector<Observation> Panel::observations() const {
    std::vector<Observation> out;
    out.reserve(size_);
    for (const auto& [key, series] : cells_) {
        for (const auto& [year, value] : series) out.push_back({key.first, key.second, year, value});
    }
    return out;
}

std::optional<double> resolve_weight_series(const IndicatorMeta& meta, const Panel& panel,
                                            std::string_view country, int obs_year) {
    const auto series_id = weight_series_id(meta.weight_key);
    if (!series_id) return 1.0;
    if (!panel.has_indicator(*series_id)) {
        throw Error(ErrorCode::MissingWeightSeries,
                    "'" + std::string(*series_id) + "' needed by indicator '" + meta.id + "'");
    }
    const Series* series = panel.series(country, *series_id);
    if (!series || series->empty()) return std::nullopt;

    if (const auto fixed = fixed_weight_year(meta.weight_key)) {
        const auto it = series->find(*fixed);
        if (it == series->end()) return std::nullopt;
        return it->second;
    }
    // Latest year ≤ obs_year (covers the exact-year case), else latest on record.
    auto it = series->upper_bound(obs_year);
    if (it != series->begin()) return std::prev(it)->second;
    return series->rbegin()->second;
}

} // namespace fsci
