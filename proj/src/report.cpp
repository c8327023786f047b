#include "fsci/report.hpp"

#include "fsci/baseline.hpp"
#include "fsci/csv.hpp"
#include "fsci/derived.hpp"
#include "fsci/error.hpp"
#include "fsci/hash.hpp"
#include "fsci/ingestion.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#ifndef FSCI_VERSION
#define FSCI_VERSION "0.0.0"
#endif

namespace fsci::report {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view engine_version() noexcept { return FSCI_VERSION; }

void Table::add_row(std::vector<Value> row) {
    if (row.size() != columns.size()) {
        throw Error(ErrorCode::InvalidArgument, name + ": row has " + std::to_string(row.size()) + " fields, expected " +
                                                    std::to_string(columns.size()));
    }
    rows.push_back(std::move(row));
}

std::string_view to_string(Format format) noexcept { return format == Format::Csv ? "csv" : "json"; }

Format parse_format(std::string_view text) {
    if (text == "csv") return Format::Csv;
    if (text == "json") return Format::Json;
    throw Error(ErrorCode::InvalidConfig, "unknown format '" + std::string(text) + "'");
}

std::string_view to_string(Analysis analysis) noexcept {
    switch (analysis) {
    case Analysis::Baseline: return "baseline";
    case Analysis::Coverage: return "coverage";
    case Analysis::Means: return "means";
    case Analysis::Deviations: return "deviations";
    case Analysis::GdpRelation: return "gdp-relation";
    case Analysis::Resilience: return "resilience";
    case Analysis::All: return "all";
    }
    return "all";
}

namespace {

std::string format_double(double v, int decimals) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[400];
    const auto res = decimals < 0 ? std::to_chars(buf, buf + sizeof buf, v)
                                  : std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, decimals);
    std::string out(buf, res.ptr);
    if (out.front() == '-' && out.find_first_not_of("-0.") == std::string::npos) out.erase(0, 1);
    return out;
}

} // namespace

std::string display(const Value& value, int decimals) {
    return std::visit(
        [&](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::monostate>) return {};
            else if constexpr (std::is_same_v<T, double>) return format_double(v, decimals);
            else if constexpr (std::is_same_v<T, std::int64_t>) return std::to_string(v);
            else return v;
        },
        value);
}

std::string render_csv(const Table& table) {
    std::string out;
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        if (c) out += ',';
        out += csv::escape(table.columns[c].name);
    }
    out += '\n';
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out += ',';
            out += csv::escape(display(row[c], table.columns[c].decimals));
        }
        out += '\n';
    }
    return out;
}

std::string render_json(const Table& table) {
    json doc;
    doc["name"] = table.name;
    doc["columns"] = json::array();
    for (const auto& c : table.columns) doc["columns"].push_back(c.name);
    doc["rows"] = json::array();
    doc["display"] = json::array();
    for (const auto& row : table.rows) {
        json raw = json::object();
        json shown = json::object();
        for (std::size_t c = 0; c < row.size(); ++c) {
            const auto& name = table.columns[c].name;
            std::visit(
                [&](const auto& v) {
                    using T = std::decay_t<decltype(v)>;
                    if constexpr (std::is_same_v<T, std::monostate>) raw[name] = nullptr;
                    else if constexpr (std::is_same_v<T, double>) raw[name] = std::isfinite(v) ? json(v) : json(nullptr);
                    else raw[name] = v;
                },
                row[c]);
            shown[name] = display(row[c], table.columns[c].decimals);
        }
        doc["rows"].push_back(std::move(raw));
        doc["display"].push_back(std::move(shown));
    }
    return doc.dump(2) + "\n";
}

namespace {

void write_file(const fs::path& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.close();
    if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

} // namespace

std::size_t emit_table(const Table& table, Format format, const fs::path& dir) {
    const auto bytes = format == Format::Csv ? render_csv(table) : render_json(table);
    write_file(dir / (table.name + "." + std::string(to_string(format))), bytes);
    return bytes.size();
}

// Config -----------------------------------------------------------------------

namespace {

[[noreturn]] void bad_config(const std::string& msg) { throw Error(ErrorCode::InvalidConfig, msg); }

std::vector<std::string> split_list(std::string_view text) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto comma = text.find(',', start);
        const auto piece = csv::trim(text.substr(start, comma == std::string_view::npos ? text.npos : comma - start));
        if (!piece.empty()) out.emplace_back(piece);
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
    T v{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        bad_config(std::string(key) + ": not a number: '" + std::string(text) + "'");
    }
    return v;
}

GroupingKind parse_grouping(std::string_view text) {
    if (text == "region") return GroupingKind::Region;
    if (text == "income") return GroupingKind::IncomeGroup;
    bad_config("unknown grouping '" + std::string(text) + "'");
}

std::string_view grouping_slug(GroupingKind kind) {
    switch (kind) {
    case GroupingKind::Region: return "region";
    case GroupingKind::IncomeGroup: return "income";
    case GroupingKind::Global: return "global";
    }
    return "global";
}

GroupingScheme scheme_for(GroupingKind kind) {
    switch (kind) {
    case GroupingKind::Region: return GroupingScheme::region();
    case GroupingKind::IncomeGroup: return GroupingScheme::income();
    case GroupingKind::Global: return GroupingScheme::global();
    }
    return GroupingScheme::global();
}

} // namespace

RunConfig load_config(std::istream& source, const fs::path& base_dir) {
    RunConfig cfg;
    auto resolve = [&](std::string_view v) {
        fs::path p{std::string(v)};
        return p.is_relative() && !base_dir.empty() ? base_dir / p : p;
    };
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(source, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto text = csv::trim(line);
        if (text.empty() || text.front() == '#') continue;
        const auto eq = text.find('=');
        if (eq == std::string_view::npos) bad_config("line " + std::to_string(line_no) + ": expected key = value");
        const auto key = std::string(csv::trim(text.substr(0, eq)));
        const auto value = csv::trim(text.substr(eq + 1));
        if (key == "codebook") cfg.codebook = resolve(value);
        else if (key == "countries") cfg.countries = resolve(value);
        else if (key == "observations") cfg.observations = resolve(value);
        else if (key == "output_dir") cfg.output_dir = resolve(value);
        else if (key == "column_mapping") cfg.column_mapping = resolve(value);
        else if (key == "cities") cfg.cities = resolve(value);
        else if (key == "min_year") cfg.min_year = parse_number<int>(key, value);
        else if (key == "coverage_start") cfg.coverage_start = parse_number<int>(key, value);
        else if (key == "coverage_end") cfg.coverage_end = parse_number<int>(key, value);
        else if (key == "loess_span") cfg.loess_span = parse_number<double>(key, value);
        else if (key == "loess_degree") cfg.loess_degree = parse_number<int>(key, value);
        else if (key == "threads") cfg.threads = parse_number<unsigned>(key, value);
        else if (key == "groupings") {
            cfg.groupings.clear();
            for (const auto& g : split_list(value)) cfg.groupings.push_back(parse_grouping(g));
        } else if (key == "formats") {
            cfg.formats.clear();
            for (const auto& f : split_list(value)) cfg.formats.push_back(parse_format(f));
        } else {
            bad_config("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        }
    }
    return cfg;
}

RunConfig load_config_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) bad_config("cannot read config file " + path.string());
    return load_config(in, path.parent_path());
}

void validate_config(const RunConfig& c) {
    if (c.min_year < kMinPanelYear || c.min_year > 2100) bad_config("min_year out of range [1960, 2100]");
    if (c.coverage_start < kMinPanelYear || c.coverage_end > 2100 || c.coverage_start > c.coverage_end) {
        bad_config("coverage window must satisfy 1960 <= start <= end <= 2100");
    }
    if (!(c.loess_span > 0.0 && c.loess_span <= 1.0)) bad_config("loess_span must lie in (0, 1]");
    if (c.loess_degree != 1 && c.loess_degree != 2) bad_config("loess_degree must be 1 or 2");
    if (c.threads < 1 || c.threads > 256) bad_config("threads must lie in [1, 256]");
    if (c.groupings.empty()) bad_config("no grouping selected");
    if (c.formats.empty()) bad_config("no output format selected");
    if (c.output_dir.empty()) bad_config("output_dir not set");
}

// Tables -----------------------------------------------------------------------

namespace {

constexpr int kMeanDecimals = 1;
constexpr int kPercentDecimals = 1;
constexpr int kPDecimals = 4;
constexpr int kShareDecimals = 4;
constexpr int kUnitDecimals = 4; // normalized quantities

Value opt(const std::optional<double>& v) { return v ? Value(*v) : Value(); }
Value integer(std::size_t v) { return Value(static_cast<std::int64_t>(v)); }
Value integer(int v) { return Value(static_cast<std::int64_t>(v)); }
Value text(std::string_view s) { return Value(std::string(s)); }

Table make_table(std::string name, std::vector<Column> columns) { return Table{std::move(name), std::move(columns), {}}; }

Table baseline_table(const Baseline& b) {
    auto t = make_table("baseline", {{"country"}, {"indicator"}, {"year"}, {"value"}});
    for (const auto& [key, cell] : b.cells) t.add_row({text(key.first), text(key.second), integer(cell.year), cell.value});
    return t;
}

Table dropped_table(const std::vector<DroppedCell>& dropped) {
    auto t = make_table("dropped_cells", {{"country"}, {"indicator"}, {"latest_year"}});
    for (const auto& d : dropped) t.add_row({text(d.country), text(d.indicator), integer(d.year)});
    return t;
}

Table vintage_table(const Baseline& b) {
    auto t = make_table("vintage", {{"band"}, {"share", kShareDecimals}});
    if (b.cells.empty()) return t;
    t.add_row({text("2017+"), b.vintage.recent});
    t.add_row({text("2010-2016"), b.vintage.middle});
    t.add_row({text("-2009"), b.vintage.early});
    return t;
}

Table coverage_table(const CoverageMatrix& m) {
    auto t = make_table("coverage", {{"country"}, {"indicator"}, {"years_observed"}});
    for (const auto& [key, n] : m.counts) t.add_row({text(key.first), text(key.second), integer(n)});
    return t;
}

Table summary_table(const GroupMeansTable& means, const IndicatorRegistry& registry) {
    auto t = make_table("indicator_summary",
                        {{"indicator"}, {"name"}, {"unit"}, {"direction"}, {"weighted_by"}, {"n"}, {"n_weighted"},
                         {"global_mean", kMeanDecimals}, {"global_sd", kMeanDecimals}, {"min", kMeanDecimals},
                         {"p25", kMeanDecimals}, {"median", kMeanDecimals}, {"p75", kMeanDecimals},
                         {"max", kMeanDecimals}});
    for (const auto& row : means.rows) {
        const auto& meta = registry.at(row.indicator);
        std::vector<Value> r{text(meta.id), text(meta.name), text(meta.unit), text(to_string(meta.direction)),
                             text(to_string(meta.weight_key)), integer(row.n_values), integer(row.n_weighted),
                             opt(row.global_mean), opt(row.global_sd)};
        if (row.quantiles) {
            const auto& q = *row.quantiles;
            for (double v : {q.min, q.p25, q.median, q.p75, q.max}) r.emplace_back(v);
        } else {
            r.resize(r.size() + 5);
        }
        t.add_row(std::move(r));
    }
    return t;
}

Table group_means_table(const GroupMeansTable& means, std::string_view slug) {
    auto t = make_table("group_means_" + std::string(slug), {{"indicator"}, {"cell"}, {"n"}, {"mean", kMeanDecimals}});
    for (const auto& row : means.rows) {
        for (const auto& c : row.cells) t.add_row({text(row.indicator), text(c.cell), integer(c.n), opt(c.mean)});
    }
    return t;
}

Table deviations_table(const DeviationTable& dev, std::string_view slug) {
    auto t = make_table("deviations_" + std::string(slug),
                        {{"indicator"}, {"direction"}, {"global_mean", kMeanDecimals}, {"small_denominator"},
                         {"cell"}, {"n"}, {"percent", kPercentDecimals}, {"se_percent", kPercentDecimals},
                         {"p_value", kPDecimals}, {"star"}});
    for (const auto& row : dev.rows) {
        for (const auto& c : row.cells) {
            t.add_row({text(row.indicator), text(to_string(row.direction)), opt(row.global_mean),
                       integer(row.small_denominator ? 1 : 0), text(c.cell), integer(c.n), opt(c.percent),
                       opt(c.se_percent), opt(c.p_value), text(c.star)});
        }
    }
    return t;
}

Table joint_f_table(const DeviationTable& dev, std::string_view slug) {
    auto t = make_table("joint_f_" + std::string(slug), {{"indicator"}, {"status"}, {"statistic", kPDecimals},
                                                          {"df_num"}, {"df_den"}, {"p_value", kPDecimals}});
    for (const auto& row : dev.rows) {
        if (!row.joint) continue;
        const auto& f = *row.joint;
        if (f.status == stats::FTestStatus::Computed) {
            t.add_row({text(row.indicator), text("computed"), f.statistic, f.df_num, f.df_den, f.p_value});
        } else {
            t.add_row({text(row.indicator), text("insufficient"), Value(), Value(), Value(), Value()});
        }
    }
    return t;
}

Table normalized_table(const NormalizedDistanceTable& nd, std::string_view slug) {
    auto t = make_table("normalized_distance_" + std::string(slug),
                        {{"indicator"}, {"cell"}, {"distance", kUnitDecimals}});
    for (const auto& row : nd.rows) {
        for (std::size_t i = 0; i < row.values.size(); ++i) {
            t.add_row({text(row.indicator), text(nd.grouping.cells[i]), opt(row.values[i])});
        }
    }
    return t;
}

Table gdp_points_table(const GdpRelationSet& set) {
    auto t = make_table("gdp_points", {{"indicator"}, {"country"}, {"cell"}, {"gdp_per_capita"}, {"value"},
                                       {"normalized", kUnitDecimals}, {"display"}});
    for (const auto& rel : set.indicators) {
        for (const auto& p : rel.points) {
            t.add_row({text(rel.indicator), text(p.country), text(p.cell), p.gdp_per_capita, p.value, p.normalized,
                       integer(p.display ? 1 : 0)});
        }
    }
    return t;
}

Table gdp_curves_table(const GdpRelationSet& set) {
    auto t = make_table("gdp_curves", {{"indicator"}, {"cell"}, {"gdp_per_capita"}, {"fitted", kUnitDecimals}});
    for (const auto& rel : set.indicators) {
        for (const auto& c : rel.curve) t.add_row({text(rel.indicator), text(c.cell), c.gdp_per_capita, c.fitted});
    }
    return t;
}

Table resilience_table(const std::optional<ResilienceSnapshot>& snap, const ResilienceOptions& opts) {
    std::vector<Column> cols{{"country"}, {"exposure_years"}, {"exposure_top_mean"}};
    for (const auto& f : opts.fields) {
        cols.push_back({f + "_value"});
        cols.push_back({f + "_size", kUnitDecimals});
        cols.push_back({f + "_color", kUnitDecimals});
    }
    auto t = make_table("resilience", std::move(cols));
    if (!snap) return t;
    for (const auto& c : snap->countries) {
        std::vector<Value> r{text(c.country), integer(c.exposure_years), c.exposure_top_mean};
        for (const auto& f : c.fields) {
            r.emplace_back(f.value);
            r.emplace_back(f.size);
            r.emplace_back(f.color);
        }
        t.add_row(std::move(r));
    }
    return t;
}

struct Note {
    std::string severity;
    std::size_t row = 0;
    std::string rule;
    std::string message;
};

Table validation_table(const std::vector<Note>& notes) {
    auto t = make_table("validation", {{"severity"}, {"row"}, {"rule"}, {"message"}});
    for (const auto& n : notes) t.add_row({text(n.severity), integer(n.row), text(n.rule), text(n.message)});
    return t;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path sibling(const fs::path& dir, std::string_view suffix) {
    auto p = dir;
    if (!p.has_filename()) p = p.parent_path();
    p += std::string(suffix);
    return p;
}

// Distinguishes validation from analysis failures inside run_pipeline.
struct ValidationFailure {
    std::string log;
};

bool wants(Analysis selected, Analysis table) { return selected == Analysis::All || selected == table; }

json settings_json(const RunConfig& c, Analysis analysis) {
    json s;
    s["analysis"] = to_string(analysis);
    s["min_year"] = c.min_year;
    s["coverage_start"] = c.coverage_start;
    s["coverage_end"] = c.coverage_end;
    s["groupings"] = json::array();
    for (auto g : c.groupings) s["groupings"].push_back(grouping_slug(g));
    s["formats"] = json::array();
    for (auto f : c.formats) s["formats"].push_back(to_string(f));
    s["loess_span"] = c.loess_span;
    s["loess_degree"] = c.loess_degree;
    const ResilienceOptions r;
    s["resilience"] = {{"window_start", r.window_start},
                       {"window_end", r.window_end},
                       {"min_exposure_years", r.min_exposure_years},
                       {"top_k", r.top_k}};
    return s;
}

void swap_into_place(const fs::path& staging, const fs::path& target) {
    const auto old = sibling(target, ".old");
    fs::remove_all(old);
    const bool had_target = fs::exists(target);
    if (had_target) fs::rename(target, old);
    try {
        fs::rename(staging, target);
    } catch (...) {
        if (had_target) fs::rename(old, target);
        throw;
    }
    fs::remove_all(old);
}

} // namespace

RunResult run_pipeline(const RunConfig& config, Analysis analysis) {
    RunResult result;
    const auto errors_log = sibling(config.output_dir.empty() ? fs::path("fsci-output") : config.output_dir,
                                    ".errors.log");
    auto fail = [&](int code, const std::string& log) {
        result.exit_code = code;
        result.files.clear();
        result.message = log.substr(0, log.find('\n'));
        try {
            write_file(errors_log, log.empty() || log.back() == '\n' ? log : log + "\n");
        } catch (const Error&) {
        }
        return result;
    };

    std::vector<Note> notes;
    std::vector<Table> tables;
    json inputs = json::object();
    fs::path staging;

    try {
        // Configuration and inputs: failures here are validation errors.
        std::shared_ptr<const IndicatorRegistry> registry;
        std::shared_ptr<const CountryTable> countries;
        Panel panel;
        std::vector<derived::CityPopulation> cities;
        try {
            validate_config(config);
            std::vector<std::pair<std::string, fs::path>> files{
                {"codebook", config.codebook}, {"countries", config.countries}, {"observations", config.observations}};
            if (config.column_mapping) files.emplace_back("column_mapping", *config.column_mapping);
            if (config.cities) files.emplace_back("cities", *config.cities);
            for (const auto& [role, path] : files) {
                if (path.empty()) throw Error(ErrorCode::InvalidConfig, role + " path not set");
                if (!fs::is_regular_file(path)) throw Error(ErrorCode::IoError, role + " not found: " + path.string());
            }

            std::map<std::string, std::string> contents;
            for (const auto& [role, path] : files) {
                contents[role] = read_file(path);
                inputs[path.filename().string()] = sha256_hex(contents[role]);
            }
            auto in = [&](const std::string& role) { return std::istringstream(contents.at(role)); };

            auto s = in("codebook");
            registry = std::make_shared<const IndicatorRegistry>(load_codebook(s));
            s = in("countries");
            countries = std::make_shared<const CountryTable>(load_countries(s));
            ColumnMapping mapping;
            if (config.column_mapping) {
                s = in("column_mapping");
                mapping = load_column_mapping(s);
            }
            if (config.cities) {
                s = in("cities");
                cities = derived::load_city_populations(s);
            }
            s = in("observations");
            auto load = load_panel(s, registry, countries, config.column_mapping ? &mapping : nullptr);
            if (!load.report.ok()) {
                std::string log;
                for (const auto& e : load.report.errors) {
                    log += "row " + std::to_string(e.row) + ": " + e.rule + ": " + e.message + "\n";
                }
                log += std::to_string(load.report.errors.size()) + " validation errors in " +
                       std::to_string(load.report.total_rows()) + " rows\n";
                throw ValidationFailure{log};
            }
            for (const auto& w : load.report.warnings) notes.push_back({"warning", w.row, w.rule, w.message});
            panel = std::move(load.panel);
        } catch (const Error& e) {
            throw ValidationFailure{e.what()};
        }

        // Analyses: failures here are analysis errors.
        auto derivation = derived::add_derived_indicators(panel, cities);
        for (auto& w : derivation.warnings) notes.push_back({"warning", 0, "derived", std::move(w)});
        panel = std::move(derivation.panel);

        const ExecutionOptions exec{config.threads};
        const auto built = build_baseline(panel, config.min_year);
        const auto& baseline = built.baseline;

        if (wants(analysis, Analysis::Baseline)) {
            tables.push_back(baseline_table(baseline));
            tables.push_back(dropped_table(built.dropped));
            tables.push_back(vintage_table(baseline));
        }
        if (wants(analysis, Analysis::Coverage)) {
            tables.push_back(coverage_table(coverage_matrix(panel, config.coverage_start, config.coverage_end)));
        }
        for (auto kind : config.groupings) {
            const auto scheme = scheme_for(kind);
            const auto slug = grouping_slug(kind);
            if (wants(analysis, Analysis::Means)) {
                const auto means = group_weighted_means(baseline, scheme, *registry, panel, exec);
                for (const auto& w : means.warnings) notes.push_back({"warning", 0, "means", w});
                if (kind == config.groupings.front()) tables.push_back(summary_table(means, *registry));
                tables.push_back(group_means_table(means, slug));
                const auto nd = normalized_distance_table(means, *registry);
                for (const auto& w : nd.warnings) notes.push_back({"warning", 0, "normalized_distance", w});
                tables.push_back(normalized_table(nd, slug));
            }
            if (wants(analysis, Analysis::Deviations)) {
                const auto dev = deviation_table(baseline, scheme, *registry, panel, exec);
                for (const auto& w : dev.warnings) notes.push_back({"warning", 0, "deviations", w});
                tables.push_back(deviations_table(dev, slug));
                tables.push_back(joint_f_table(dev, slug));
            }
        }
        if (wants(analysis, Analysis::GdpRelation)) {
            const auto set = gdp_relation_dataset(baseline, panel, *registry, GroupingScheme::region(),
                                                  stats::LoessOptions{config.loess_span, config.loess_degree}, exec);
            for (const auto& w : set.warnings) notes.push_back({"warning", 0, "gdp_relation", w});
            tables.push_back(gdp_points_table(set));
            tables.push_back(gdp_curves_table(set));
        }
        if (wants(analysis, Analysis::Resilience)) {
            const ResilienceOptions opts;
            std::optional<ResilienceSnapshot> snap;
            try {
                snap = resilience_snapshot(panel, baseline, opts);
                for (const auto& w : snap->warnings) notes.push_back({"warning", 0, "resilience", w});
            } catch (const Error& e) {
                if (e.code() != ErrorCode::EmptySubset && e.code() != ErrorCode::UnknownIndicator) throw;
                if (!panel.empty()) notes.push_back({"warning", 0, "resilience", e.what()});
            }
            tables.push_back(resilience_table(snap, opts));
        }
        std::vector<Note> unique_notes;
        for (auto& n : notes) {
            const bool seen = std::any_of(unique_notes.begin(), unique_notes.end(), [&](const Note& u) {
                return u.severity == n.severity && u.row == n.row && u.rule == n.rule && u.message == n.message;
            });
            if (!seen) unique_notes.push_back(std::move(n));
        }
        tables.push_back(validation_table(unique_notes));

        // Emission into a staging directory, then one rename.
        staging = sibling(config.output_dir, ".partial");
        fs::remove_all(staging);
        fs::create_directories(staging);
        json file_hashes = json::object();
        for (const auto& t : tables) {
            for (auto f : config.formats) {
                const auto name = t.name + "." + std::string(to_string(f));
                const auto bytes = f == Format::Csv ? render_csv(t) : render_json(t);
                write_file(staging / name, bytes);
                file_hashes[name] = sha256_hex(bytes);
            }
        }
        json manifest;
        manifest["version"] = engine_version();
        manifest["inputs"] = inputs;
        manifest["settings"] = settings_json(config, analysis);
        manifest["files"] = file_hashes;
        write_file(staging / "manifest.json", manifest.dump(2) + "\n");

        for (const auto& [name, hash] : file_hashes.items()) result.files.push_back(name);
        result.files.push_back("manifest.json");
        std::sort(result.files.begin(), result.files.end());

        if (const auto parent = config.output_dir.parent_path(); !parent.empty()) fs::create_directories(parent);
        swap_into_place(staging, config.output_dir);
        std::error_code ec;
        fs::remove(errors_log, ec);
        return result;
    } catch (const ValidationFailure& v) {
        return fail(kExitValidation, v.log);
    } catch (const std::exception& e) {
        if (!staging.empty()) {
            std::error_code ec;
            fs::remove_all(staging, ec);
        }
        return fail(kExitAnalysis, e.what());
    }
}

} // namespace fsci::report
