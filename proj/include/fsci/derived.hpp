#pragma once

#include "fsci/model.hpp"

#include <istream>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace fsci::derived {

/// Codebook ids the derivations write to.
inline constexpr std::string_view kDisasterDamageRatio = "disaster_damage_ratio";
inline constexpr std::string_view kSocialCapitalIndex = "social_capital_index";
inline constexpr std::string_view kMufppUrbanShare = "mufpp_urban_share";

/// rCSI cutoff applied upstream when the daily prevalence series is produced.
inline constexpr double kRcsiThreshold = 19.0;

/// Total disaster damages over GDP, ×100. Both in thousands of nominal USD.
/// Throws NonpositiveGDP; InvalidArgument for negative damages.
double disaster_damage_ratio(double total_damages_kusd, double gdp_kusd);

/// Geometric mean of four 0–100 components, reported on a 0–1 scale.
double social_capital_index(double help, double trust, double fin_conf, double gov_conf);

/// Daily shares of the population at or above the rCSI cutoff.
class DailySeries {
public:
    /// Throws InvalidSeries unless ordinals strictly increase and values lie in [0, 100].
    explicit DailySeries(std::vector<std::pair<int, double>> entries);

    const std::vector<std::pair<int, double>>& entries() const noexcept { return entries_; }

private:
    std::vector<std::pair<int, double>> entries_;
};

/// Highest daily prevalence of the year. Throws EmptySeries.
double rcsi_annual_prevalence(const DailySeries& days);

struct UrbanShare {
    double percent = 0.0;
    bool clamped = false; // city total exceeded the national figure
};

/// Share of national urban population living in signatory cities, clamped to 100.
/// Throws NonpositiveUrbanPop; InvalidArgument for a negative city population.
UrbanShare mufpp_urban_share(std::span<const double> signatory_city_pops, double national_urban_pop);

struct CityPopulation {
    std::string country;
    std::string city;
    double population = 0.0;
};

/// Side file with header `iso3,city,population`.
std::vector<CityPopulation> load_city_populations(std::istream& source);

struct Derivation {
    Panel panel;
    std::vector<std::string> warnings;
    std::size_t added = 0;
};

/// Adds derived indicators to a copy of `panel` from their reserved component
/// series. A target is produced only when its id is in the codebook, and observed
/// values always take precedence over derived ones.
///  - disaster_damage_ratio(country, year) from `_disaster_damages_kusd` and `_gdp`
///  - social_capital_index(country, year) from the four `_sc_*` components
///  - mufpp_urban_share(country, latest urban-population year) from `cities`
Derivation add_derived_indicators(const Panel& panel, std::span<const CityPopulation> cities = {});

} // namespace fsci::derived
