#include "fsci/error.hpp"
#include "fsci/ingestion.hpp"
#include "fsci/report.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

using fsci::report::Analysis;
using fsci::report::RunConfig;

struct Overrides {
    std::string config;
    std::string codebook, countries, observations, output, mapping, cities;
    std::optional<int> min_year, coverage_start, coverage_end, loess_degree;
    std::optional<double> loess_span;
    std::optional<unsigned> threads;
    std::vector<std::string> groups, formats;
};

void add_run_options(CLI::App& cmd, Overrides& o) {
    cmd.add_option("--config", o.config, "key = value config file");
    cmd.add_option("--codebook", o.codebook, "indicator codebook CSV");
    cmd.add_option("--countries", o.countries, "country table CSV");
    cmd.add_option("--observations", o.observations, "long-format observations CSV");
    cmd.add_option("-o,--output", o.output, "output bundle directory");
    cmd.add_option("--column-mapping", o.mapping, "header rename CSV (from,to)");
    cmd.add_option("--cities", o.cities, "signatory city populations CSV");
    cmd.add_option("--min-year", o.min_year, "earliest baseline year");
    cmd.add_option("--coverage-start", o.coverage_start, "first year of the coverage window");
    cmd.add_option("--coverage-end", o.coverage_end, "last year of the coverage window");
    cmd.add_option("--loess-span", o.loess_span, "Loess span in (0, 1]");
    cmd.add_option("--loess-degree", o.loess_degree, "Loess degree (1 or 2)");
    cmd.add_option("--threads", o.threads, "worker threads for per-indicator work");
    cmd.add_option("--group", o.groups, "grouping: region, income (repeatable)")
        ->check(CLI::IsMember({"region", "income"}));
    cmd.add_option("--format", o.formats, "output format: csv, json (repeatable)")
        ->check(CLI::IsMember({"csv", "json"}));
}

RunConfig resolve(const Overrides& o) {
    RunConfig cfg = o.config.empty() ? RunConfig{} : fsci::report::load_config_file(o.config);
    if (!o.codebook.empty()) cfg.codebook = o.codebook;
    if (!o.countries.empty()) cfg.countries = o.countries;
    if (!o.observations.empty()) cfg.observations = o.observations;
    if (!o.output.empty()) cfg.output_dir = o.output;
    if (!o.mapping.empty()) cfg.column_mapping = o.mapping;
    if (!o.cities.empty()) cfg.cities = o.cities;
    if (o.min_year) cfg.min_year = *o.min_year;
    if (o.coverage_start) cfg.coverage_start = *o.coverage_start;
    if (o.coverage_end) cfg.coverage_end = *o.coverage_end;
    if (o.loess_span) cfg.loess_span = *o.loess_span;
    if (o.loess_degree) cfg.loess_degree = *o.loess_degree;
    if (o.threads) cfg.threads = *o.threads;
    if (!o.groups.empty()) {
        cfg.groupings.clear();
        for (const auto& g : o.groups) {
            cfg.groupings.push_back(g == "region" ? fsci::GroupingKind::Region : fsci::GroupingKind::IncomeGroup);
        }
    }
    if (!o.formats.empty()) {
        cfg.formats.clear();
        for (const auto& f : o.formats) cfg.formats.push_back(fsci::report::parse_format(f));
    }
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Food systems indicator baseline and descriptive statistics"};
    app.set_version_flag("--version", std::string(fsci::report::engine_version()));
    app.require_subcommand(1);

    Overrides overrides;
    struct Command {
        const char* name;
        Analysis analysis;
        const char* help;
    };
    const Command commands[] = {
        {"baseline", Analysis::Baseline, "latest-observation baseline, dropped cells and vintage shares"},
        {"coverage", Analysis::Coverage, "observed years per country and indicator"},
        {"means", Analysis::Means, "weighted group means, indicator summary and normalized distances"},
        {"deviations", Analysis::Deviations, "percent deviations from the global mean with joint F tests"},
        {"gdp-relation", Analysis::GdpRelation, "normalized values against GDP per capita with Loess curves"},
        {"resilience", Analysis::Resilience, "resilience snapshot"},
        {"all", Analysis::All, "every table above"},
    };
    std::optional<Analysis> selected;
    for (const auto& c : commands) {
        auto* cmd = app.add_subcommand(c.name, c.help);
        add_run_options(*cmd, overrides);
        cmd->callback([&selected, a = c.analysis] { selected = a; });
    }

    std::string url;
    std::string cache_dir;
    long max_age_hours = 24;
    auto* fetch = app.add_subcommand("fetch", "download a source CSV into the local cache");
    fetch->add_option("url", url, "source URL")->required();
    fetch->add_option("--cache-dir", cache_dir, "cache directory (default: $FSCI_CACHE_DIR or .fsci-cache)");
    fetch->add_option("--max-age-hours", max_age_hours, "reuse cached copies younger than this")
        ->check(CLI::NonNegativeNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : fsci::report::kExitValidation;
    }

    if (fetch->parsed()) {
        try {
            const auto dir = cache_dir.empty() ? fsci::default_cache_dir() : std::filesystem::path(cache_dir);
            const auto r = fsci::fetch_source(url, dir, std::chrono::hours(max_age_hours));
            std::cout << r.path.string() << ' ' << r.sha256 << (r.from_cache ? " cached" : " fetched") << '\n';
            return 0;
        } catch (const std::exception& e) {
            std::cerr << e.what() << '\n';
            return fsci::report::kExitAnalysis;
        }
    }

    RunConfig cfg;
    try {
        cfg = resolve(overrides);
    } catch (const std::exception& e) {
        std::cerr << e.what() << '\n';
        return fsci::report::kExitValidation;
    }
    const auto result = fsci::report::run_pipeline(cfg, *selected);
    if (result.exit_code != 0) {
        std::cerr << result.message << '\n';
    } else {
        for (const auto& f : result.files) std::cout << (cfg.output_dir / f).string() << '\n';
    }
    return result.exit_code;
}
