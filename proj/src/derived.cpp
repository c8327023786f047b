#include "fsci/derived.hpp"

#include "fsci/csv.hpp"
#include "fsci/error.hpp"
#include "fsci/stats.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>

namespace fsci::derived {

double disaster_damage_ratio(double total_damages_kusd, double gdp_kusd) {
    if (!(gdp_kusd > 0.0)) throw Error(ErrorCode::NonpositiveGDP, std::to_string(gdp_kusd));
    if (!(total_damages_kusd >= 0.0)) throw Error(ErrorCode::InvalidArgument, "damages must be nonnegative");
    return total_damages_kusd / gdp_kusd * 100.0;
}

double social_capital_index(double help, double trust, double fin_conf, double gov_conf) {
    const double components[] = {help, trust, fin_conf, gov_conf};
    for (double c : components) {
        if (c > 100.0) throw Error(ErrorCode::InvalidArgument, "social capital components are percentages");
    }
    return stats::geometric_mean(components) / 100.0;
}

DailySeries::DailySeries(std::vector<std::pair<int, double>> entries) : entries_(std::move(entries)) {
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        const double v = entries_[i].second;
        if (!(v >= 0.0 && v <= 100.0)) throw Error(ErrorCode::InvalidSeries, "daily prevalence outside [0, 100]");
        if (i > 0 && entries_[i].first <= entries_[i - 1].first) {
            throw Error(ErrorCode::InvalidSeries, "day ordinals must strictly increase");
        }
    }
}

double rcsi_annual_prevalence(const DailySeries& days) {
    const auto& e = days.entries();
    if (e.empty()) throw Error(ErrorCode::EmptySeries, "no daily observations");
    return std::max_element(e.begin(), e.end(), [](const auto& a, const auto& b) { return a.second < b.second; })
        ->second;
}

UrbanShare mufpp_urban_share(std::span<const double> signatory_city_pops, double national_urban_pop) {
    if (!(national_urban_pop > 0.0)) throw Error(ErrorCode::NonpositiveUrbanPop, std::to_string(national_urban_pop));
    double total = 0.0;
    for (double p : signatory_city_pops) {
        if (!(p >= 0.0)) throw Error(ErrorCode::InvalidArgument, "city population must be nonnegative");
        total += p;
    }
    const double share = total / national_urban_pop * 100.0;
    if (share > 100.0) return {100.0, true};
    return {share, false};
}

std::vector<CityPopulation> load_city_populations(std::istream& source) {
    std::vector<CityPopulation> out;
    csv::Reader reader(source);
    std::vector<std::string> fields;
    if (!reader.next(fields)) return out;
    if (fields.size() != 3 || csv::trim(fields[0]) != "iso3" || csv::trim(fields[1]) != "city" ||
        csv::trim(fields[2]) != "population") {
        throw Error(ErrorCode::MalformedCsv, "city file header must be 'iso3,city,population'");
    }
    while (reader.next(fields)) {
        if (fields.size() == 1 && csv::trim(fields[0]).empty()) continue;
        const auto where = "line " + std::to_string(reader.line()) + ": ";
        if (fields.size() != 3) throw Error(ErrorCode::MalformedRow, where + "expected 3 fields");
        const auto text = csv::trim(fields[2]);
        double pop = 0.0;
        const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), pop);
        if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(pop) || pop < 0.0) {
            throw Error(ErrorCode::UnparseableValue, where + "population '" + std::string(text) + "'");
        }
        out.push_back({std::string(csv::trim(fields[0])), fields[1], pop});
    }
    return out;
}

namespace {

bool observed(const Panel& panel, const std::string& country, std::string_view id, int year) {
    const auto* s = panel.series(country, id);
    return s && s->contains(year);
}

} // namespace

Derivation add_derived_indicators(const Panel& panel, std::span<const CityPopulation> cities) {
    const auto& registry = panel.registry();
    std::vector<Observation> extra;
    std::vector<std::string> warnings;

    for (const auto& country : panel.countries().items()) {
        const auto& iso = country.iso3;

        if (registry.contains(kDisasterDamageRatio)) {
            const auto* damages = panel.series(iso, reserved::disaster_damages);
            const auto* gdp = panel.series(iso, reserved::gdp);
            if (damages && gdp) {
                for (const auto& [year, value] : *damages) {
                    const auto g = gdp->find(year);
                    if (g == gdp->end() || observed(panel, iso, kDisasterDamageRatio, year)) continue;
                    if (!(g->second > 0.0)) {
                        warnings.push_back(iso + " " + std::to_string(year) + ": nonpositive GDP, damage ratio skipped");
                        continue;
                    }
                    extra.push_back({iso, std::string(kDisasterDamageRatio), year, disaster_damage_ratio(value, g->second)});
                }
            }
        }

        if (registry.contains(kSocialCapitalIndex)) {
            const Series* parts[] = {panel.series(iso, reserved::sc_help), panel.series(iso, reserved::sc_trust),
                                     panel.series(iso, reserved::sc_fin_conf), panel.series(iso, reserved::sc_gov_conf)};
            if (std::all_of(std::begin(parts), std::end(parts), [](const Series* s) { return s != nullptr; })) {
                for (const auto& [year, help] : *parts[0]) {
                    if (!parts[1]->contains(year) || !parts[2]->contains(year) || !parts[3]->contains(year)) continue;
                    if (observed(panel, iso, kSocialCapitalIndex, year)) continue;
                    try {
                        extra.push_back({iso, std::string(kSocialCapitalIndex), year,
                                         social_capital_index(help, parts[1]->at(year), parts[2]->at(year),
                                                              parts[3]->at(year))});
                    } catch (const Error& e) {
                        warnings.push_back(iso + " " + std::to_string(year) + ": social capital skipped (" + e.what() + ")");
                    }
                }
            }
        }
    }

    if (registry.contains(kMufppUrbanShare) && !cities.empty()) {
        std::map<std::string, std::vector<double>> by_country;
        for (const auto& c : cities) by_country[c.country].push_back(c.population);
        for (const auto& country : panel.countries().items()) {
            const auto* urban = panel.series(country.iso3, reserved::urban_population);
            if (!urban || urban->empty()) continue;
            const auto& [year, urban_pop] = *urban->rbegin();
            if (observed(panel, country.iso3, kMufppUrbanShare, year)) continue;
            const auto it = by_country.find(country.iso3);
            const std::vector<double> none;
            const auto& pops = it == by_country.end() ? none : it->second;
            if (!(urban_pop > 0.0)) {
                warnings.push_back(country.iso3 + ": nonpositive urban population, MUFPP share skipped");
                continue;
            }
            const auto share = mufpp_urban_share(pops, urban_pop);
            if (share.clamped) warnings.push_back(country.iso3 + ": signatory city population exceeds urban total; clamped to 100");
            extra.push_back({country.iso3, std::string(kMufppUrbanShare), year, share.percent});
        }
        for (const auto& [iso, pops] : by_country) {
            if (!panel.countries().find(iso)) warnings.push_back("city file: unknown country " + iso);
        }
    }

    Derivation out{Panel(panel.registry_ptr(), panel.countries_ptr()), std::move(warnings), 0};
    for (const auto& obs : panel.observations()) out.panel.insert(obs);
    for (const auto& obs : extra) {
        out.panel.insert(obs);
        ++out.added;
    }
    return out;
}

} // namespace fsci::derived
