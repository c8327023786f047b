#include "fsci/ingestion.hpp"

#include "fsci/csv.hpp"
#include "fsci/error.hpp"
#include "fsci/hash.hpp"

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <unordered_map>

namespace fsci {

namespace {

const std::vector<std::string> kCodebookHeader = {"indicator_id", "name",      "unit",       "theme",
                                                  "domain",       "direction", "weight_key", "value_added"};
const std::vector<std::string> kCountryHeader = {"iso3", "name", "region", "income_group", "un_member"};
const std::vector<std::string> kPanelHeader = {"iso3", "indicator_id", "year", "value"};

std::string at_line(std::size_t line) { return "line " + std::to_string(line) + ": "; }

void expect_header(const std::vector<std::string>& got, const std::vector<std::string>& want, std::string_view what) {
    std::vector<std::string> trimmed;
    for (const auto& f : got) trimmed.emplace_back(csv::trim(f));
    if (trimmed != want) {
        std::string expected;
        for (const auto& w : want) expected += (expected.empty() ? "" : ",") + w;
        throw Error(ErrorCode::MalformedCsv, std::string(what) + " header must be '" + expected + "'");
    }
}

bool is_blank_record(const std::vector<std::string>& fields) {
    return fields.size() == 1 && csv::trim(fields[0]).empty();
}

bool parse_bool(std::string_view text, bool& out) {
    if (text == "true" || text == "1" || text == "TRUE" || text == "True") {
        out = true;
        return true;
    }
    if (text == "false" || text == "0" || text == "FALSE" || text == "False") {
        out = false;
        return true;
    }
    return false;
}

std::optional<double> parse_finite(std::string_view text) {
    text = csv::trim(text);
    if (text.empty()) return std::nullopt;
    if (text.front() == '+') text.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

std::optional<int> parse_year(std::string_view text) {
    text = csv::trim(text);
    int v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
    return v;
}

bool is_weight_series(std::string_view id) {
    for (int i = 0; i < static_cast<int>(WeightKey::None); ++i) {
        if (weight_series_id(static_cast<WeightKey>(i)) == id) return true;
    }
    return false;
}

} // namespace

IndicatorRegistry load_codebook(std::istream& source) {
    IndicatorRegistry registry;
    csv::Reader reader(source);
    std::vector<std::string> fields;
    if (!reader.next(fields)) return registry;
    expect_header(fields, kCodebookHeader, "codebook");

    while (reader.next(fields)) {
        if (is_blank_record(fields)) continue;
        const auto where = at_line(reader.line());
        if (fields.size() != kCodebookHeader.size()) {
            throw Error(ErrorCode::MalformedRow, where + "expected 8 fields, got " + std::to_string(fields.size()));
        }
        try {
            IndicatorMeta meta;
            meta.id = std::string(csv::trim(fields[0]));
            if (meta.id.empty()) throw Error(ErrorCode::MalformedRow, "empty indicator_id");
            if (is_reserved_series(meta.id)) {
                throw Error(ErrorCode::MalformedRow, "indicator ids starting with '_' are reserved");
            }
            meta.name = fields[1];
            meta.unit = fields[2];
            meta.theme = parse_theme(csv::trim(fields[3]));
            meta.domain = fields[4];
            meta.direction = parse_direction(csv::trim(fields[5]));
            meta.weight_key = parse_weight_key(csv::trim(fields[6]));
            if (!parse_bool(csv::trim(fields[7]), meta.value_added)) {
                throw Error(ErrorCode::MalformedRow, "value_added must be true or false");
            }
            registry.add(std::move(meta));
        } catch (const Error& e) {
            throw Error(e.code(), where + e.what());
        }
    }
    return registry;
}

CountryTable load_countries(std::istream& source) {
    CountryTable table;
    csv::Reader reader(source);
    std::vector<std::string> fields;
    if (!reader.next(fields)) return table;
    expect_header(fields, kCountryHeader, "country table");

    while (reader.next(fields)) {
        if (is_blank_record(fields)) continue;
        const auto where = at_line(reader.line());
        if (fields.size() != kCountryHeader.size()) {
            throw Error(ErrorCode::MalformedRow, where + "expected 5 fields, got " + std::to_string(fields.size()));
        }
        try {
            CountryMeta meta;
            meta.iso3 = std::string(csv::trim(fields[0]));
            if (meta.iso3.size() != 3) throw Error(ErrorCode::MalformedRow, "iso3 must have 3 characters");
            meta.name = fields[1];
            meta.region = std::string(csv::trim(fields[2]));
            meta.income_group = parse_income_group(csv::trim(fields[3]));
            if (!parse_bool(csv::trim(fields[4]), meta.un_member)) {
                throw Error(ErrorCode::MalformedRow, "un_member must be true or false");
            }
            table.add(std::move(meta));
        } catch (const Error& e) {
            throw Error(e.code(), where + e.what());
        }
    }
    return table;
}

ColumnMapping load_column_mapping(std::istream& source) {
    ColumnMapping mapping;
    csv::Reader reader(source);
    std::vector<std::string> fields;
    if (!reader.next(fields)) return mapping;
    expect_header(fields, {"from", "to"}, "column mapping");
    while (reader.next(fields)) {
        if (is_blank_record(fields)) continue;
        if (fields.size() != 2) throw Error(ErrorCode::MalformedRow, at_line(reader.line()) + "expected 2 fields");
        mapping[std::string(csv::trim(fields[0]))] = std::string(csv::trim(fields[1]));
    }
    return mapping;
}

std::set<std::string> territory_filter(const std::vector<Observation>& draft, const IndicatorRegistry& registry,
                                       const CountryTable& countries, ValidationReport* report) {
    std::set<std::string> retained;
    std::map<std::string, std::set<std::string>> seen;
    for (const auto& obs : draft) {
        const auto* country = countries.find(obs.country);
        if (!country || country->un_member) continue;
        auto& ids = seen[obs.country];
        if (registry.contains(obs.indicator)) ids.insert(obs.indicator);
    }
    const std::size_t denominator = registry.size();
    for (const auto& [iso3, ids] : seen) {
        // k ≥ 0.8·N, evaluated as 5k ≥ 4N so the boundary is exact.
        const bool keep = denominator > 0 && 5 * ids.size() >= 4 * denominator;
        if (keep) {
            retained.insert(iso3);
        } else if (report) {
            report->warnings.push_back({0, "territory-coverage",
                                        iso3 + " dropped: " + std::to_string(ids.size()) + " of " +
                                            std::to_string(denominator) + " indicators (< 80%)"});
        }
    }
    return retained;
}

PanelLoad load_panel(std::istream& source, std::shared_ptr<const IndicatorRegistry> registry,
                     std::shared_ptr<const CountryTable> countries, const ColumnMapping* mapping) {
    PanelLoad out{Panel(registry, countries), {}};
    auto& report = out.report;

    csv::Reader reader(source);
    std::vector<std::string> fields;
    if (!reader.next(fields)) return out;

    std::unordered_map<std::string, std::size_t> column;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        std::string name(csv::trim(fields[i]));
        if (mapping) {
            if (const auto it = mapping->find(name); it != mapping->end()) name = it->second;
        }
        column[name] = i;
    }
    for (const auto& name : kPanelHeader) {
        if (!column.contains(name)) {
            throw Error(ErrorCode::MalformedCsv, "observation file lacks column '" + name + "'");
        }
    }
    const std::size_t c_iso = column["iso3"], c_ind = column["indicator_id"], c_year = column["year"],
                      c_val = column["value"];
    const std::size_t width = fields.size();

    struct Candidate {
        std::size_t line;
        Observation obs;
    };
    std::vector<Candidate> candidates;

    auto reject = [&](std::size_t line, std::string rule, std::string message, bool error) {
        (error ? report.errors : report.warnings).push_back({line, std::move(rule), std::move(message)});
        ++report.rows_rejected;
    };

    while (reader.next(fields)) {
        const auto line = reader.line();
        if (is_blank_record(fields)) continue;
        if (fields.size() != width) {
            reject(line, "MalformedRow", "expected " + std::to_string(width) + " fields", true);
            continue;
        }
        Observation obs;
        obs.country = std::string(csv::trim(fields[c_iso]));
        obs.indicator = std::string(csv::trim(fields[c_ind]));
        const auto year = parse_year(fields[c_year]);
        const auto value = parse_finite(fields[c_val]);
        if (!year) {
            reject(line, "UnparseableValue", "year '" + fields[c_year] + "' is not an integer", true);
            continue;
        }
        if (!value) {
            reject(line, "UnparseableValue", "value '" + fields[c_val] + "' is not a finite number", true);
            continue;
        }
        obs.year = *year;
        obs.value = *value;
        if (!is_reserved_series(obs.indicator) && !registry->contains(obs.indicator)) {
            reject(line, "UnknownIndicator", "indicator '" + obs.indicator + "' is not in the codebook", true);
            continue;
        }
        if (!countries->find(obs.country)) {
            reject(line, "UnknownCountry", "country '" + obs.country + "' is not in the country table", true);
            continue;
        }
        if (obs.year < kMinPanelYear) {
            reject(line, "pre-1960", "year " + std::to_string(obs.year) + " is before 1960; row excluded", false);
            continue;
        }
        if (is_weight_series(obs.indicator) && obs.value < 0.0) {
            reject(line, "NegativeWeight", "weight series '" + obs.indicator + "' must be nonnegative", true);
            continue;
        }
        candidates.push_back({line, std::move(obs)});
    }

    std::vector<Observation> draft;
    draft.reserve(candidates.size());
    for (const auto& c : candidates) draft.push_back(c.obs);
    const auto retained = territory_filter(draft, *registry, *countries, &report);

    for (const auto& c : candidates) {
        const auto& meta = countries->at(c.obs.country);
        if (!meta.un_member && !retained.contains(c.obs.country)) {
            ++report.rows_rejected; // summarized once per territory by territory_filter
            continue;
        }
        try {
            out.panel.insert(c.obs);
            ++report.rows_accepted;
        } catch (const Error& e) {
            reject(c.line, std::string(to_string(e.code())), e.what(), true);
        }
    }
    return out;
}

// fetch_source

namespace {

struct UrlParts {
    std::string scheme_host_port;
    std::string path;
};

UrlParts split_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw Error(ErrorCode::NetworkError, "not an http(s) url: " + url);
    const auto scheme = url.substr(0, scheme_end);
    if (scheme != "http" && scheme != "https") throw Error(ErrorCode::NetworkError, "unsupported scheme: " + url);
    const auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_atomically(const std::filesystem::path& target, std::string_view bytes) {
    std::random_device rd;
    auto tmp = target;
    tmp += ".tmp" + std::to_string(rd());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::CacheWriteError, "cannot write " + tmp.string());
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw Error(ErrorCode::CacheWriteError, "short write to " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, target, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw Error(ErrorCode::CacheWriteError, "cannot rename into " + target.string());
    }
}

} // namespace

std::filesystem::path default_cache_dir() {
    if (const char* env = std::getenv("FSCI_CACHE_DIR"); env && *env) return env;
    return ".fsci-cache";
}

FetchResult fetch_source(const std::string& url, const std::filesystem::path& cache_dir,
                         std::chrono::seconds max_age) {
    namespace fs = std::filesystem;
    const auto parts = split_url(url);
    const auto stem = sha256_hex(url);
    const auto data_path = cache_dir / (stem + ".csv");
    const auto meta_path = cache_dir / (stem + ".meta");

    std::error_code ec;
    if (fs::exists(data_path, ec)) {
        const auto mtime = fs::last_write_time(data_path, ec);
        if (!ec) {
            const auto age = fs::file_time_type::clock::now() - mtime;
            if (age < max_age) return {data_path, sha256_file(data_path), true};
        }
    }

    fs::create_directories(cache_dir, ec);
    if (ec || !fs::is_directory(cache_dir)) throw Error(ErrorCode::CacheWriteError, "cannot create " + cache_dir.string());

    httplib::Client client(parts.scheme_host_port);
    client.set_connection_timeout(10);
    client.set_read_timeout(60);
    client.set_follow_location(true);
    const auto response = client.Get(parts.path);
    if (!response) {
        throw Error(ErrorCode::NetworkError, url + ": " + httplib::to_string(response.error()));
    }
    if (response->status < 200 || response->status >= 300) throw HttpStatusError(response->status, url);

    const auto digest = sha256_hex(response->body);
    write_atomically(data_path, response->body);
    write_atomically(meta_path, "url=" + url + "\nfetched_at=" + utc_timestamp() + "\nsha256=" + digest + "\n");
    return {data_path, digest, false};
}

} // namespace fsci
