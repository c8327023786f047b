#include "fsci/csv.hpp"
#include "fsci/error.hpp"
#include "fsci/report.hpp"

#include <doctest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include <unistd.h>

using namespace fsci;
using namespace fsci::report;
namespace fs = std::filesystem;

namespace {

bool threw(const std::function<void()>& fn, ErrorCode code) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code() == code;
    }
    return false;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

struct TempDir {
    fs::path path;
    TempDir() {
        static int counter = 0;
        path = fs::temp_directory_path() /
               ("fsci-report-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    csv::Reader reader(in);
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> fields;
    while (reader.next(fields)) rows.push_back(fields);
    return rows;
}

const char* kCodebook =
    "indicator_id,name,unit,theme,domain,direction,weight_key,value_added\n"
    "pou,Prevalence of undernourishment,%,diets,Food security,lower,population,false\n";

const char* kCountries =
    "iso3,name,region,income_group,un_member\n"
    "AAA,Alpha,Oceania,Low,true\n"
    "BBB,Beta,Oceania,High,true\n"
    "CCC,Gamma,Northern America & Europe,High,true\n"
    "DDD,Delta,Northern America & Europe,Low,true\n";

// Oceania 2.6, global 3.3 (population weighted).
const char* kObservations =
    "iso3,indicator_id,year,value\n"
    "AAA,pou,2019,2.0\n"
    "BBB,pou,2018,3.2\n"
    "CCC,pou,2019,3.9\n"
    "DDD,pou,2017,4.1\n"
    "AAA,_population,2019,1\n"
    "BBB,_population,2019,1\n"
    "CCC,_population,2019,1\n"
    "DDD,_population,2019,1\n";

RunConfig write_inputs(const fs::path& dir, const std::string& observations = kObservations) {
    spit(dir / "codebook.csv", kCodebook);
    spit(dir / "countries.csv", kCountries);
    spit(dir / "observations.csv", observations);
    RunConfig c;
    c.codebook = dir / "codebook.csv";
    c.countries = dir / "countries.csv";
    c.observations = dir / "observations.csv";
    c.output_dir = dir / "out";
    return c;
}

} // namespace

TEST_CASE("display forms") {
    CHECK(display(Value{}, 1).empty());
    CHECK(display(Value{21.21212}, 1) == "21.2");
    CHECK(display(Value{-0.04}, 1) == "0.0");
    CHECK(display(Value{-0.0}, -1) == "0");
    CHECK(display(Value{0.1}, -1) == "0.1");
    CHECK(display(Value{0.05}, 4) == "0.0500");
    CHECK(display(Value{std::numeric_limits<double>::infinity()}, 4) == "inf");
    CHECK(display(Value{-std::numeric_limits<double>::infinity()}, 4) == "-inf");
    CHECK(display(Value{std::nan("")}, 1) == "nan");
    CHECK(display(Value{std::int64_t{42}}, 1) == "42");
    CHECK(display(Value{std::string("x")}, 1) == "x");
    CHECK(display(Value{1e-300}, -1) == "1e-300");
}

TEST_CASE("CSV and JSON rendering") {
    Table t{"demo", {{"name"}, {"mean", 1}, {"count"}}, {}};
    t.add_row({std::string("a, b"), 2.64, std::int64_t{3}});
    t.add_row({std::string("q\"x"), Value{}, std::int64_t{0}});
    CHECK_THROWS_AS(t.add_row({std::string("short")}), Error);
    const auto csv = render_csv(t);
    CHECK(csv == "name,mean,count\n\"a, b\",2.6,3\n\"q\"\"x\",,0\n");
    CHECK(csv.find('\r') == std::string::npos);

    const Table empty{"empty", {{"a"}, {"b"}}, {}};
    CHECK(render_csv(empty) == "a,b\n");

    const auto js = render_json(t);
    CHECK(js.back() == '\n');
    const auto parsed = nlohmann::json::parse(js);
    CHECK(parsed.dump(2) + "\n" == js);
    CHECK(parsed["name"] == "demo");
    CHECK(parsed["rows"][0]["mean"] == 2.64);
    CHECK(parsed["rows"][1]["mean"].is_null());
    CHECK(parsed["display"][0]["mean"] == "2.6");
    CHECK(parsed["columns"].size() == 3);

    Table inf{"inf", {{"v", 4}}, {}};
    inf.add_row({std::numeric_limits<double>::infinity()});
    CHECK(nlohmann::json::parse(render_json(inf))["rows"][0]["v"].is_null());

    TempDir dir;
    const auto bytes = emit_table(t, Format::Json, dir.path);
    CHECK(bytes == js.size());
    const auto first = slurp(dir.path / "demo.json");
    emit_table(t, Format::Json, dir.path);
    CHECK(slurp(dir.path / "demo.json") == first);
    emit_table(t, Format::Csv, dir.path);
    CHECK(slurp(dir.path / "demo.csv") == csv);
}

TEST_CASE("format and analysis names") {
    CHECK(parse_format("csv") == Format::Csv);
    CHECK(parse_format("json") == Format::Json);
    CHECK(threw([] { parse_format("xml"); }, ErrorCode::InvalidConfig));
    CHECK(to_string(Analysis::GdpRelation) == "gdp-relation");
    CHECK(to_string(Format::Json) == "json");
}

TEST_CASE("configuration") {
    std::istringstream in(
        "# comment\n"
        "codebook = data/codebook.csv\n"
        "countries = /abs/countries.csv\n"
        "observations = obs.csv\n"
        "output_dir = out\n"
        "min_year = 2005\n"
        "groupings = income\n"
        "loess_span = 0.5\n"
        "loess_degree = 1\n"
        "formats = json\n"
        "threads = 4\n");
    const auto c = load_config(in, "/base");
    CHECK(c.codebook == fs::path("/base/data/codebook.csv"));
    CHECK(c.countries == fs::path("/abs/countries.csv"));
    CHECK(c.output_dir == fs::path("/base/out"));
    CHECK(c.min_year == 2005);
    CHECK(c.groupings == std::vector<GroupingKind>{GroupingKind::IncomeGroup});
    CHECK(c.loess_span == 0.5);
    CHECK(c.loess_degree == 1);
    CHECK(c.formats == std::vector<Format>{Format::Json});
    CHECK(c.threads == 4);

    auto bad = [](const std::string& text) {
        return threw(
            [&] {
                std::istringstream s(text);
                load_config(s);
            },
            ErrorCode::InvalidConfig);
    };
    CHECK(bad("colour = blue\n"));
    CHECK(bad("min_year = soon\n"));
    CHECK(bad("groupings = planet\n"));
    CHECK(bad("no equals sign\n"));

    RunConfig ok;
    ok.output_dir = "out";
    CHECK_NOTHROW(validate_config(ok));
    auto invalid = [&](const std::function<void(RunConfig&)>& change) {
        RunConfig c2 = ok;
        change(c2);
        return threw([&] { validate_config(c2); }, ErrorCode::InvalidConfig);
    };
    CHECK(invalid([](RunConfig& r) { r.loess_span = 0; }));
    CHECK(invalid([](RunConfig& r) { r.loess_span = 1.5; }));
    CHECK(invalid([](RunConfig& r) { r.loess_degree = 3; }));
    CHECK(invalid([](RunConfig& r) { r.coverage_start = 2022; }));
    CHECK(invalid([](RunConfig& r) { r.threads = 0; }));
    CHECK(invalid([](RunConfig& r) { r.groupings.clear(); }));
    CHECK(invalid([](RunConfig& r) { r.formats.clear(); }));
    CHECK(invalid([](RunConfig& r) { r.output_dir.clear(); }));

    TempDir dir;
    fs::create_directories(dir.path / "conf");
    spit(dir.path / "conf" / "run.conf", "codebook = cb.csv\noutput_dir = ../out\n");
    const auto from_file = load_config_file(dir.path / "conf" / "run.conf");
    CHECK(from_file.codebook == dir.path / "conf" / "cb.csv");
    CHECK_THROWS_AS(load_config_file(dir.path / "missing.conf"), Error);
}

TEST_CASE("run_pipeline: deviation table carries the closed-form percent") {
    TempDir dir;
    auto c = write_inputs(dir.path);
    c.groupings = {GroupingKind::Region};
    c.formats = {Format::Csv};
    const auto r = run_pipeline(c);
    REQUIRE(r.exit_code == kExitOk);
    CHECK(std::is_sorted(r.files.begin(), r.files.end()));
    CHECK(std::find(r.files.begin(), r.files.end(), "manifest.json") != r.files.end());
    const auto rows = read_csv(c.output_dir / "deviations_region.csv");
    REQUIRE(rows.size() == 10); // header + nine regions
    CHECK(rows[0] == std::vector<std::string>{"indicator", "direction", "global_mean", "small_denominator", "cell",
                                              "n", "percent", "se_percent", "p_value", "star"});
    bool found = false;
    for (const auto& row : rows) {
        if (row[4] != "Oceania") continue;
        found = true;
        CHECK(row[1] == "lower");
        CHECK(row[2] == "3.3");
        CHECK(row[5] == "2");
        CHECK(row[6] == "21.2");
        CHECK(row[8].size() == 6); // 4 decimals
    }
    CHECK(found);

    const auto manifest = nlohmann::json::parse(slurp(c.output_dir / "manifest.json"));
    CHECK(manifest.contains("version"));
    CHECK(manifest["inputs"].contains("observations.csv"));
    CHECK(manifest["inputs"]["observations.csv"].get<std::string>().size() == 64);
    CHECK(manifest["files"].contains("deviations_region.csv"));
    CHECK(manifest["settings"]["min_year"] == 2000);
    CHECK_FALSE(fs::exists(fs::path(c.output_dir.string() + ".partial")));
    CHECK_FALSE(fs::exists(fs::path(c.output_dir.string() + ".old")));
}

TEST_CASE("run_pipeline: single analysis") {
    TempDir dir;
    auto c = write_inputs(dir.path);
    c.formats = {Format::Csv};
    const auto r = run_pipeline(c, Analysis::Baseline);
    REQUIRE(r.exit_code == kExitOk);
    CHECK(fs::exists(c.output_dir / "baseline.csv"));
    CHECK_FALSE(fs::exists(c.output_dir / "deviations_region.csv"));
    const auto rows = read_csv(c.output_dir / "baseline.csv");
    CHECK(rows.size() == 5);
}

TEST_CASE("run_pipeline: failures") {
    SUBCASE("missing codebook") {
        TempDir dir;
        auto c = write_inputs(dir.path);
        c.codebook = dir.path / "nope.csv";
        const auto r = run_pipeline(c);
        CHECK(r.exit_code == kExitValidation);
        CHECK(r.files.empty());
        CHECK_FALSE(fs::exists(c.output_dir));
        const auto log = slurp(fs::path(c.output_dir.string() + ".errors.log"));
        CHECK(log.find("nope.csv") != std::string::npos);
    }
    SUBCASE("row errors are listed and the previous bundle survives") {
        TempDir dir;
        auto c = write_inputs(dir.path);
        REQUIRE(run_pipeline(c).exit_code == kExitOk);
        spit(c.output_dir / "marker.txt", "keep me");
        spit(dir.path / "observations.csv", std::string(kObservations) + "EEE,pou,2019,1\nAAA,pou,2010,abc\n");
        const auto r = run_pipeline(c);
        CHECK(r.exit_code == kExitValidation);
        CHECK(slurp(c.output_dir / "marker.txt") == "keep me");
        const auto log = slurp(fs::path(c.output_dir.string() + ".errors.log"));
        CHECK(log.find("row 10") != std::string::npos);
        CHECK(log.find("row 11") != std::string::npos);
        CHECK_FALSE(fs::exists(fs::path(c.output_dir.string() + ".partial")));

        // A good run afterwards replaces the bundle and clears the stale log.
        spit(dir.path / "observations.csv", kObservations);
        CHECK(run_pipeline(c).exit_code == kExitOk);
        CHECK_FALSE(fs::exists(c.output_dir / "marker.txt"));
        CHECK_FALSE(fs::exists(fs::path(c.output_dir.string() + ".errors.log")));
    }
    SUBCASE("bad settings") {
        TempDir dir;
        auto c = write_inputs(dir.path);
        c.loess_span = 2;
        CHECK(run_pipeline(c).exit_code == kExitValidation);
    }
}

TEST_CASE("run_pipeline: header-only observations give header-only tables") {
    TempDir dir;
    auto c = write_inputs(dir.path, "iso3,indicator_id,year,value\n");
    c.formats = {Format::Csv};
    const auto r = run_pipeline(c);
    REQUIRE(r.exit_code == kExitOk);
    for (const auto& name : {"baseline.csv", "coverage.csv", "vintage.csv", "resilience.csv", "gdp_points.csv"}) {
        const auto rows = read_csv(c.output_dir / name);
        CHECK(rows.size() == 1);
    }
}
