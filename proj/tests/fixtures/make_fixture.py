#!/usr/bin/env python3
"""Writes the synthetic fixture under tests/fixtures/synthetic.

Fictional countries and values. Rerunning with the same seed rewrites identical files.
"""
import csv
import os
import random

SEED = 20240611
OUT = os.path.join(os.path.dirname(os.path.abspath(__file__)), "synthetic")

REGIONS = [
    "Latin America & Caribbean",
    "Northern America & Europe",
    "Oceania",
    "Northern Africa & Western Asia",
    "Central Asia",
    "Eastern Asia",
    "South-eastern Asia",
    "Southern Asia",
    "Sub-Saharan Africa",
]
INCOMES = ["Low", "LowerMiddle", "UpperMiddle", "High"]

# id, name, unit, theme, domain, direction, weight_key, value_added, base, spread, observed
INDICATORS = [
    ("cost_healthy_diet", "Cost of a healthy diet", "PPP dollar per person per day", "diets", "Food environments", "lower", "population", "false", 3.3, 0.8, True),
    ("pou", "Prevalence of undernourishment", "%", "diets", "Food security", "lower", "population", "false", 9.0, 6.0, True),
    ("upf_sales", "Ultra-processed food sales", "kg per capita", "diets", "Diet quality", "lower", "population", "false", 200.0, 150.0, True),
    ("ag_emissions_intensity", "Agricultural emissions per hectare", "kt CO2eq per 1000 ha", "environment", "Emissions", "lower", "agricultural_land_2015", "false", 1.2, 0.5, True),
    ("cropland_change", "Cropland change", "%", "environment", "Land use", "lower", "cropland", "false", 0.4, 0.9, True),
    ("ag_gdp_share", "Agriculture share of GDP", "%", "livelihoods", "Poverty and income", "lower", "gdp", "true", 6.0, 5.0, True),
    ("safe_water", "Safely managed drinking water", "%", "livelihoods", "Employment and services", "higher", "population", "false", 66.0, 20.0, True),
    ("gov_effectiveness", "Government effectiveness", "index", "governance", "Shared accountability", "higher", "none", "false", 0.0, 1.0, True),
    ("disaster_damage_ratio", "Damages from disasters", "% of GDP", "resilience", "Exposure", "lower", "none", "false", 0.3, 0.3, False),
    ("social_capital_index", "Social capital index", "index 0-1", "resilience", "Resilience capacities", "higher", "population", "false", 0.5, 0.1, False),
    ("dietary_sourcing_flexibility", "Dietary sourcing flexibility", "index", "resilience", "Resilience capacities", "higher", "population", "false", 60.0, 12.0, True),
    ("food_price_volatility", "Food price volatility", "index", "resilience", "Agility", "lower", "none", "false", 0.8, 0.4, True),
    ("food_supply_variability", "Food supply variability", "kcal per capita per day", "resilience", "Agility", "lower", "none", "false", 30.0, 15.0, True),
    ("mufpp_urban_share", "Urban population in signatory cities", "%", "governance", "Urban food policy", "higher", "urban_population", "false", 0.0, 0.0, False),
]


def code(i):
    letters = "ABCDEFGHIJKLMNOPQRSTUVWXYZ"
    return "Q" + letters[i // 26] + letters[i % 26]


def fmt(v, digits=4):
    s = f"{v:.{digits}f}"
    if "." in s:
        s = s.rstrip("0").rstrip(".")
    return "0" if s == "-0" else s


def main():
    rng = random.Random(SEED)
    os.makedirs(OUT, exist_ok=True)

    countries = []
    for i in range(45):
        region = REGIONS[i % len(REGIONS)]
        income = INCOMES[(i * 7 + i // 9) % len(INCOMES)]
        countries.append((code(i), f"Country {i + 1:02d}", region, income, "true"))
    # Two non-member territories: one well covered, one sparse.
    countries.append((code(45), "Territory A", "Oceania", "High", "false"))
    countries.append((code(46), "Territory B", "Latin America & Caribbean", "UpperMiddle", "false"))

    with open(os.path.join(OUT, "codebook.csv"), "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["indicator_id", "name", "unit", "theme", "domain", "direction", "weight_key", "value_added"])
        for ind in INDICATORS:
            w.writerow(ind[:8])

    with open(os.path.join(OUT, "countries.csv"), "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["iso3", "name", "region", "income_group", "un_member"])
        w.writerows(countries)

    rows = []
    income_rank = {g: k for k, g in enumerate(INCOMES)}
    region_shift = {r: rng.uniform(-1.0, 1.0) for r in REGIONS}

    for idx, (iso, _, region, income, member) in enumerate(countries):
        if iso == code(46):
            observed = [ind for ind in INDICATORS if ind[10]][:6]
        else:
            observed = [ind for ind in INDICATORS if ind[10]]
        if iso == code(45):
            observed = observed + [INDICATORS[8]]
        for ind in observed:
            ind_id, base, spread = ind[0], ind[8], ind[9]
            if rng.random() < 0.06 and iso != code(45):
                continue  # missing pair
            shift = region_shift[region] + (income_rank[income] - 1.5) * 0.5 * (1 if ind[5] == "higher" else -1)
            level = base + spread * (shift + rng.gauss(0, 0.4))
            if ind_id not in ("gov_effectiveness", "cropland_change"):
                level = max(level, 0.05 * base + 0.01)
            if rng.random() < 0.05:
                years = sorted(rng.sample(range(1990, 2000), 2))  # pre-2000 only
            elif rng.random() < 0.15:
                years = [rng.randint(1994, 1999), rng.randint(2003, 2012)]  # straddling
            else:
                last = rng.choice([2010, 2013, 2015, 2017, 2018, 2019, 2020, 2021])
                years = sorted(set([last] + [rng.randint(2000, last) for _ in range(rng.randint(0, 4))]))
            for y in years:
                rows.append((iso, ind_id, y, fmt(level * (1 + rng.gauss(0, 0.03)))))
        if idx == 3:
            rows.append((iso, "pou", 1955, "30"))  # dropped at load with a warning

        # Weight and component series.
        pop = rng.uniform(0.5, 200.0) * 1e6
        gdp = pop * rng.uniform(0.3, 60.0)  # thousands of USD
        if idx != 7:
            for y in range(2000, 2022):
                rows.append((iso, "_population", y, fmt(pop * (1 + 0.01 * (y - 2000)), 0)))
        for y in range(2000, 2022):
            rows.append((iso, "_gdp", y, fmt(gdp * (1 + 0.02 * (y - 2000)), 0)))
        for y in (2005, 2012, 2018):
            rows.append((iso, "_cropland", y, fmt(rng.uniform(10, 5000), 1)))
        for y in (2010, 2015):
            if idx == 11 and y == 2015:
                continue
            rows.append((iso, "_agricultural_land", y, fmt(rng.uniform(50, 20000), 1)))
        urban = pop * rng.uniform(0.2, 0.9)
        for y in (2015, 2020):
            rows.append((iso, "_urban_population", y, fmt(urban * (1 + 0.02 * (y - 2015)), 0)))
        gdppc = gdp * 1000 / pop
        if idx in (1, 10):
            gdppc = rng.uniform(105000, 130000)
        for y in (2016, 2019):
            rows.append((iso, "_gdp_per_capita", y, fmt(gdppc * (1 + 0.01 * (y - 2016)), 1)))
        if iso != code(46):
            exposure_years = [y for y in range(2012, 2022) if rng.random() < 0.8]
            for y in exposure_years:
                damages = gdp * rng.choice([0.0, 0.0005, 0.001, 0.003, 0.01, 0.05]) * rng.uniform(0.5, 1.5)
                rows.append((iso, "_disaster_damages_kusd", y, fmt(damages, 0)))
            if idx % 5 != 4:
                for comp in ("_sc_help", "_sc_trust", "_sc_fin_conf", "_sc_gov_conf"):
                    rows.append((iso, comp, 2019, fmt(rng.uniform(20, 90), 1)))

    rng.shuffle(rows)
    with open(os.path.join(OUT, "observations.csv"), "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["iso3", "indicator_id", "year", "value"])
        w.writerows(rows)

    with open(os.path.join(OUT, "cities.csv"), "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["iso3", "city", "population"])
        for i in range(0, 45, 4):
            for k in range(rng.randint(1, 3)):
                w.writerow([code(i), f"City {i}-{k}", fmt(rng.uniform(2e5, 4e6), 0)])

    with open(os.path.join(OUT, "run.conf"), "w") as f:
        f.write("# synthetic fixture run\n")
        f.write("codebook = codebook.csv\n")
        f.write("countries = countries.csv\n")
        f.write("observations = observations.csv\n")
        f.write("cities = cities.csv\n")
        f.write("min_year = 2000\n")
        f.write("groupings = region, income\n")
        f.write("loess_span = 0.75\n")
        f.write("loess_degree = 2\n")
        f.write("formats = csv, json\n")


if __name__ == "__main__":
    main()
