#include "fsci/analysis.hpp"

#include "fsci/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

namespace fsci {

namespace {

// Baseline values of one indicator with their grouping cells and resolved weights.
struct Sample {
    std::vector<double> all_values; // every baseline country
    std::vector<std::string> countries; // weighted countries
    std::vector<double> values;
    std::vector<double> weights;
    std::vector<std::string> cells;
};

Sample collect(const Baseline& baseline, const IndicatorMeta& meta, const Panel& panel,
               const GroupingScheme& grouping) {
    Sample s;
    for (const auto& [country, cell] : baseline.for_indicator(meta.id)) {
        s.all_values.push_back(cell.value);
        const auto* country_meta = panel.countries().find(country);
        if (!country_meta) continue;
        const auto weight = resolve_weight_series(meta, panel, country, cell.year);
        if (!weight || !(*weight > 0.0)) continue;
        s.countries.push_back(country);
        s.values.push_back(cell.value);
        s.weights.push_back(*weight);
        s.cells.emplace_back(grouping.cell_of(*country_meta));
    }
    return s;
}

std::vector<std::string> present_levels(const GroupingScheme& grouping, const std::vector<std::string>& cells) {
    std::set<std::string_view> seen(cells.begin(), cells.end());
    std::vector<std::string> out;
    for (const auto& c : grouping.cells) {
        if (seen.contains(c)) out.push_back(c);
    }
    return out;
}

std::vector<std::size_t> members_of(const std::vector<std::string>& cells, std::string_view cell) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (cells[i] == cell) idx.push_back(i);
    }
    return idx;
}

double subset_weighted_mean(const std::vector<double>& values, const std::vector<double>& weights,
                            const std::vector<std::size_t>& idx) {
    std::vector<double> v, w;
    for (auto i : idx) {
        v.push_back(values[i]);
        w.push_back(weights[i]);
    }
    return stats::weighted_mean(v, w);
}

} // namespace

const IndicatorMeans* GroupMeansTable::find(std::string_view indicator) const {
    for (const auto& row : rows) {
        if (row.indicator == indicator) return &row;
    }
    return nullptr;
}

GroupMeansTable group_weighted_means(const Baseline& baseline, const GroupingScheme& grouping,
                                     const IndicatorRegistry& registry, const Panel& weights,
                                     const ExecutionOptions& exec) {
    GroupMeansTable table{grouping, std::vector<IndicatorMeans>(registry.size()), {}};
    const auto& items = registry.items();
    parallel_for(items.size(), exec.threads, [&](std::size_t i) {
        const auto& meta = items[i];
        auto& row = table.rows[i];
        row.indicator = meta.id;
        const auto s = collect(baseline, meta, weights, grouping);
        row.n_values = s.all_values.size();
        row.n_weighted = s.values.size();
        if (!s.all_values.empty()) {
            static constexpr double probs[] = {0.0, 0.25, 0.5, 0.75, 1.0};
            const auto q = stats::quantiles(s.all_values, probs);
            row.quantiles = QuantileSummary{q[0], q[1], q[2], q[3], q[4]};
        }
        if (!s.values.empty()) row.global_mean = stats::weighted_mean(s.values, s.weights);
        if (s.values.size() >= 2) row.global_sd = stats::weighted_sd(s.values, s.weights);
        for (const auto& cell : grouping.cells) {
            CellMean cm{cell, std::nullopt, 0};
            const auto idx = members_of(s.cells, cell);
            cm.n = idx.size();
            if (!idx.empty()) cm.mean = subset_weighted_mean(s.values, s.weights, idx);
            row.cells.push_back(std::move(cm));
        }
    });
    for (const auto& row : table.rows) {
        if (row.n_values > row.n_weighted) {
            const auto k = row.n_values - row.n_weighted;
            table.warnings.push_back(row.indicator + ": " + std::to_string(k) + (k == 1 ? " country" : " countries") +
                                     " without a weight excluded from weighted statistics");
        }
    }
    return table;
}

double percent_deviation(double cell_mean, double global_mean, Direction direction) {
    if (global_mean == 0.0) throw Error(ErrorCode::ZeroGlobalMean, "percent deviation undefined");
    return direction_sign(direction) * (cell_mean - global_mean) / global_mean * 100.0;
}

DeviationTable deviation_table(const Baseline& baseline, const GroupingScheme& grouping,
                               const IndicatorRegistry& registry, const Panel& weights,
                               const ExecutionOptions& exec) {
    const auto& items = registry.items();
    DeviationTable table{grouping, std::vector<DeviationRow>(items.size()), {}};
    std::vector<std::vector<std::string>> row_warnings(items.size());

    parallel_for(items.size(), exec.threads, [&](std::size_t i) {
        const auto& meta = items[i];
        auto& row = table.rows[i];
        auto& warn = row_warnings[i];
        row.indicator = meta.id;
        row.direction = meta.direction;
        for (const auto& cell : grouping.cells) row.cells.push_back({cell, 0, {}, {}, {}, {}});

        const auto s = collect(baseline, meta, weights, grouping);
        for (const auto& c : s.cells) ++row.cells[*grouping.index_of(c)].n;
        if (s.values.empty()) return;

        const double global = stats::weighted_mean(s.values, s.weights);
        row.global_mean = global;
        row.small_denominator = std::abs(global) < kSmallDenominator;
        if (row.small_denominator) warn.push_back(meta.id + ": |global mean| below one unit; percent deviations unstable");
        if (global == 0.0) {
            warn.push_back(meta.id + ": global mean is zero; percent deviations undefined");
            return;
        }

        const double sign = direction_sign(meta.direction);
        std::vector<double> y(s.values.size());
        for (std::size_t j = 0; j < y.size(); ++j) y[j] = sign * (s.values[j] - global);
        const auto levels = present_levels(grouping, s.cells);

        try {
            const auto fit = stats::wls_group_fit(y, s.cells, s.weights, levels);
            for (const auto& est : fit.groups) {
                auto& cell = row.cells[*grouping.index_of(est.group)];
                cell.percent = est.coefficient / global * 100.0;
                cell.se_percent = est.se / std::abs(global) * 100.0;
                cell.p_value = est.p_value;
                cell.star = est.star;
            }
        } catch (const Error& e) {
            if (e.code() != ErrorCode::DegenerateDof) throw;
            warn.push_back(meta.id + ": too few observations for standard errors");
            for (const auto& level : levels) {
                auto& cell = row.cells[*grouping.index_of(level)];
                cell.percent = subset_weighted_mean(y, s.weights, members_of(s.cells, level)) / global * 100.0;
            }
            return;
        }
        row.joint = stats::cluster_robust_f(y, s.cells, s.weights);
    });

    for (auto& w : row_warnings) {
        for (auto& msg : w) table.warnings.push_back(std::move(msg));
    }
    return table;
}

NormalizedDistanceTable normalized_distance_table(const GroupMeansTable& means, const IndicatorRegistry& registry) {
    NormalizedDistanceTable table{means.grouping, {}, {}};
    for (const auto& row : means.rows) {
        NormalizedRow out{row.indicator, std::vector<std::optional<double>>(row.cells.size())};
        const auto* meta = registry.find(row.indicator);
        std::vector<double> present;
        for (const auto& c : row.cells) {
            if (c.mean) present.push_back(*c.mean);
        }
        const auto [lo, hi] = std::minmax_element(present.begin(), present.end());
        if (!meta || !row.global_mean || present.size() < 2 || !(*hi - *lo > 0.0)) {
            if (row.global_mean) table.warnings.push_back(row.indicator + ": fewer than two distinct cell means; no normalized distance");
            table.rows.push_back(std::move(out));
            continue;
        }
        const double range = *hi - *lo;
        const double sign = direction_sign(meta->direction);
        for (std::size_t i = 0; i < row.cells.size(); ++i) {
            if (row.cells[i].mean) out.values[i] = sign * (*row.cells[i].mean - *row.global_mean) / range;
        }
        table.rows.push_back(std::move(out));
    }
    return table;
}

GdpRelationSet gdp_relation_dataset(const Baseline& baseline, const Panel& panel, const IndicatorRegistry& registry,
                                    const GroupingScheme& grouping, const stats::LoessOptions& loess,
                                    const ExecutionOptions& exec) {
    GdpRelationSet out;
    if (!panel.has_indicator(reserved::gdp_per_capita)) {
        if (!baseline.cells.empty()) out.warnings.push_back("no GDP per capita series; GDP relation skipped");
        return out;
    }
    const auto& items = registry.items();
    std::vector<GdpRelation> rows(items.size());
    std::vector<std::vector<std::string>> row_warnings(items.size());
    std::vector<char> keep(items.size(), 0);

    parallel_for(items.size(), exec.threads, [&](std::size_t i) {
        const auto& meta = items[i];
        auto& warn = row_warnings[i];
        auto& rel = rows[i];
        rel.indicator = meta.id;
        const auto s = collect(baseline, meta, panel, grouping);
        if (s.values.empty()) return;
        const double center = stats::weighted_mean(s.values, s.weights);

        const auto entries = baseline.for_indicator(meta.id);
        std::vector<double> all;
        for (const auto& e : entries) all.push_back(e.second.value);
        std::vector<double> normalized;
        try {
            normalized = stats::min_max_normalize(all, center);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::ZeroRange) throw;
            warn.push_back(meta.id + ": constant across countries; no GDP relation rows");
            return;
        }

        for (std::size_t j = 0; j < entries.size(); ++j) {
            const auto& country = entries[j].first;
            const auto* cm = panel.countries().find(country);
            const auto* gdp = panel.series(country, reserved::gdp_per_capita);
            if (!cm || !gdp || gdp->empty()) continue;
            const double g = gdp->rbegin()->second;
            rel.points.push_back({country, std::string(grouping.cell_of(*cm)), g, entries[j].second.value,
                                  normalized[j], g <= kGdpDisplayCap});
        }
        std::sort(rel.points.begin(), rel.points.end(), [&](const GdpPoint& a, const GdpPoint& b) {
            const auto ia = *grouping.index_of(a.cell), ib = *grouping.index_of(b.cell);
            if (ia != ib) return ia < ib;
            if (a.gdp_per_capita != b.gdp_per_capita) return a.gdp_per_capita < b.gdp_per_capita;
            return a.country < b.country;
        });

        for (const auto& cell : grouping.cells) {
            std::vector<double> x, y;
            for (const auto& p : rel.points) {
                if (p.cell == cell) {
                    x.push_back(p.gdp_per_capita);
                    y.push_back(p.normalized);
                }
            }
            if (x.size() < kMinCurvePoints) continue;
            const auto fit = stats::loess(x, y, loess);
            if (fit.degenerate_points > 0) {
                warn.push_back(meta.id + " / " + cell + ": " + std::to_string(fit.degenerate_points) +
                               " degenerate Loess neighborhoods fell back to a weighted mean");
            }
            for (std::size_t j = 0; j < x.size(); ++j) rel.curve.push_back({cell, x[j], fit.fitted[j]});
        }
        keep[i] = 1;
    });

    for (std::size_t i = 0; i < items.size(); ++i) {
        for (auto& w : row_warnings[i]) out.warnings.push_back(std::move(w));
        if (keep[i]) out.indicators.push_back(std::move(rows[i]));
    }
    return out;
}

ResilienceSnapshot resilience_snapshot(const Panel& panel, const Baseline& baseline,
                                       const ResilienceOptions& options) {
    if (options.window_start > options.window_end) throw Error(ErrorCode::InvalidWindow, "resilience window");
    std::array<Direction, kResilienceFields> directions{};
    for (std::size_t f = 0; f < kResilienceFields; ++f) directions[f] = panel.registry().at(options.fields[f]).direction;

    std::vector<std::string> iso_codes;
    for (const auto& c : panel.countries().items()) iso_codes.push_back(c.iso3);
    std::sort(iso_codes.begin(), iso_codes.end());

    ResilienceSnapshot snap;
    for (const auto& iso : iso_codes) {
        const auto* series = panel.series(iso, options.fields[0]);
        if (!series) continue;
        std::vector<double> window;
        for (auto it = series->lower_bound(options.window_start);
             it != series->end() && it->first <= options.window_end; ++it) {
            window.push_back(it->second);
        }
        if (window.size() < options.min_exposure_years || window.empty()) continue;

        ResilienceCountry rc;
        rc.country = iso;
        rc.exposure_years = window.size();
        bool complete = true;
        for (std::size_t f = 1; f < kResilienceFields; ++f) {
            const auto* cell = baseline.find(iso, options.fields[f]);
            if (!cell) {
                complete = false;
                break;
            }
            rc.fields[f].value = cell->value;
        }
        if (!complete) continue;
        rc.exposure_top_mean = stats::top_k_mean(window, std::min(options.top_k, window.size()));
        rc.fields[0].value = rc.exposure_top_mean;
        snap.countries.push_back(std::move(rc));
    }
    if (snap.countries.empty()) throw Error(ErrorCode::EmptySubset, "no country qualifies for the resilience snapshot");

    const auto n = snap.countries.size();
    if (n >= 3) {
        std::vector<double> exposure;
        for (const auto& c : snap.countries) exposure.push_back(c.exposure_top_mean);
        const auto capped = stats::winsorize_upper_third(exposure);
        snap.exposure_cap = *std::max_element(capped.begin(), capped.end());
        for (std::size_t i = 0; i < n; ++i) snap.countries[i].fields[0].value = capped[i];
    } else {
        snap.warnings.push_back("resilience: fewer than three countries; exposure not winsorized");
    }

    for (std::size_t f = 0; f < kResilienceFields; ++f) {
        std::vector<double> v;
        for (const auto& c : snap.countries) v.push_back(c.fields[f].value);
        const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
        const double range = *hi - *lo;
        const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(n);
        snap.subset_means[f] = mean;
        const double sign = direction_sign(directions[f]);
        if (!(range > 0.0)) {
            snap.warnings.push_back("resilience: " + options.fields[f] + " has zero range over the subset; midpoint emitted");
        }
        for (auto& c : snap.countries) {
            auto& fv = c.fields[f];
            if (range > 0.0) {
                fv.size = (fv.value - *lo) / range;
                fv.color = sign * (fv.value - mean) / range;
            } else {
                fv.size = 0.5;
                fv.color = 0.0;
            }
        }
    }
    return snap;
}

ResilienceSnapshot resilience_snapshot(const Panel& panel, const ResilienceOptions& options) {
    return resilience_snapshot(panel, build_baseline(panel).baseline, options);
}

} // namespace fsci
