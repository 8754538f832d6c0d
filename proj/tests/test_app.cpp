#include "csl/app.hpp"
#include "csl/error.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace csl;
using namespace csl::app;
namespace fs = std::filesystem;

namespace {

std::string data_file(const std::string& name) {
    const char* dir = std::getenv("CSL_DATA_DIR");
    return std::string(dir ? dir : "data") + "/" + name;
}

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("csl_app_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ErrorKind kind_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "expected csl::Error";
    return ErrorKind::io;
}

Request request(const std::string& command, json sections = json::object(), std::optional<std::uint64_t> seed = 7) {
    Request r;
    r.command = command;
    Scenario s;
    s.sections = std::move(sections);
    r.scenario = s;
    r.seed = seed;
    return r;
}

const std::string& report_bytes(const Outcome& o) {
    for (const auto& a : o.artifacts)
        if (a.name == "report.json") return a.contents;
    throw std::logic_error("no report.json");
}

json small_route() {
    return {{"route", {{"calibration", {{"n", 60}}}, {"probe", {{"payments_per_amount", 200}}}}}};
}

} // namespace

TEST(Scenario, AcceptsMinimalAndFull) {
    const auto s = parse_scenario(json::parse(R"({"version":"csl-scenario/1","seed":3,"sections":{"macro":{}}})"));
    EXPECT_EQ(*s.seed, 3u);
    EXPECT_TRUE(s.sections.contains("macro"));
    EXPECT_FALSE(parse_scenario(json::object()).seed.has_value());
}

TEST(Scenario, RejectsUnknownKeysAndBadValues) {
    for (const char* text : {R"({"sead":1})", R"({"sections":{"riskk":{}}})", R"({"version":"csl-scenario/9"})",
                             R"({"seed":-1})", R"({"seed":"7"})", R"({"sections":[]})"})
        EXPECT_EQ(kind_of([&] { parse_scenario(json::parse(text)); }), ErrorKind::config) << text;
}

TEST(Scenario, UnknownKeyInsideSectionIsRejected) {
    EXPECT_EQ(kind_of([] { execute(request("macro", {{"macro", {{"fisher", {{"g_YY", 0.1}}}}}})); }), ErrorKind::config);
    EXPECT_EQ(kind_of([] { execute(request("macro", {{"macro", {{"mortgage", {{"years", "thirty"}}}}}})); }),
              ErrorKind::config);
}

TEST(Scenario, LoadFromFile) {
    const auto dir = scratch("load");
    write_file(dir / "s.json", R"({"seed": 11, "sections": {}})");
    EXPECT_EQ(*load_scenario((dir / "s.json").string()).seed, 11u);
    write_file(dir / "broken.json", "{not json");
    EXPECT_EQ(kind_of([&] { load_scenario((dir / "broken.json").string()); }), ErrorKind::config);
    EXPECT_EQ(kind_of([&] { load_scenario((dir / "missing.json").string()); }), ErrorKind::config);
}

TEST(Execute, ReportEnvelope) {
    const auto o = execute(request("macro", json::object(), std::nullopt));
    const auto& r = o.report;
    EXPECT_EQ(r["schema"], "csl-report/1");
    EXPECT_EQ(r["command"], "macro");
    EXPECT_TRUE(r["seed"].is_null());
    EXPECT_TRUE(r["inputs"]["scenario"].is_null());
    EXPECT_TRUE(r["inputs"]["data"].empty());
    std::vector<std::string> names = r["artifacts"];
    EXPECT_TRUE(std::is_sorted(names.begin(), names.end()));
    EXPECT_NE(std::find(names.begin(), names.end(), "report.json"), names.end());
    EXPECT_EQ(names.size(), o.artifacts.size());
    EXPECT_EQ(json::parse(report_bytes(o)), r);
}

TEST(Execute, MacroResults) {
    const auto res = execute(request("macro")).report["results"];
    EXPECT_LT(res["fisher"]["max_identity_residual"].get<double>(), 1e-12);
    EXPECT_NEAR(res["mortgage"]["final_multiplier"].get<double>(), 2.4936, 1e-3);
    EXPECT_NEAR(res["did"]["coefficient"].get<double>(), 4.145, 1e-12);
}

TEST(Execute, UnknownCommand) {
    EXPECT_EQ(kind_of([] { execute(request("bogus")); }), ErrorKind::config);
}

TEST(Execute, StochasticCommandNeedsSeed) {
    EXPECT_EQ(kind_of([] { execute(request("route", small_route(), std::nullopt)); }), ErrorKind::config);
    EXPECT_EQ(kind_of([] { execute(request("forensics", json::object(), std::nullopt)); }), ErrorKind::config);
}

TEST(Execute, SeedOverrideAndDeterminism) {
    auto req = request("route", small_route(), std::nullopt);
    req.scenario->seed = 5;
    const auto a = execute(req);
    EXPECT_EQ(a.report["seed"], 5);
    req.seed = 5;
    const auto b = execute(req);
    EXPECT_EQ(report_bytes(a), report_bytes(b));
    req.seed = 6;
    const auto c = execute(req);
    EXPECT_EQ(c.report["seed"], 6);
    EXPECT_NE(report_bytes(a), report_bytes(c));
}

TEST(Execute, NakamotoTableMatches) {
    const auto res = execute(request("nakamoto-table")).report["results"];
    EXPECT_TRUE(res["all_match"].get<bool>());
    EXPECT_EQ(res["ladder"].size(), 8u);
}

TEST(Execute, SecurityAttackCost) {
    const auto res = execute(request("security")).report["results"];
    EXPECT_EQ(res["attack_cost"]["units"], 1530000);
    EXPECT_NEAR(res["attack_cost"]["total"].get<double>() / 6.06e9, 1.0, 0.005);
}

TEST(Execute, RiskOnSampleData) {
    auto req = request("risk");
    req.data_paths = {data_file("sample_prices.csv")};
    const auto o = execute(req);
    EXPECT_EQ(o.report["inputs"]["data"][0], "sample_prices.csv");
    const auto& assets = o.report["results"]["assets"];
    ASSERT_TRUE(assets.contains("BTC"));
    EXPECT_GT(assets["BTC"]["annualized_vol"].get<double>(), 0.0);
    EXPECT_FALSE(assets["BTC"]["mvar_99"].is_null());
    std::vector<std::string> names = o.report["artifacts"];
    EXPECT_NE(std::find(names.begin(), names.end(), "drawdown.svg"), names.end());
}

TEST(Execute, RiskWithoutDataFails) {
    EXPECT_EQ(kind_of([] { execute(request("risk")); }), ErrorKind::io);
}

TEST(Execute, NonFiniteBecomesNull) {
    // A constant-size tape has a degenerate Hill tail (exponent +inf).
    const auto dir = scratch("flat");
    std::string csv = "timestamp,price,size\n";
    for (int i = 0; i < 600; ++i) csv += std::to_string(i) + ",100," + std::to_string(1 + i % 9) + "\n";
    write_file(dir / "flat.csv", csv);
    auto req = request("forensics");
    req.data_paths = {(dir / "flat.csv").string()};
    const auto o = execute(req);
    EXPECT_EQ(report_bytes(o).find("inf"), std::string::npos);
    EXPECT_EQ(report_bytes(o).find("NaN"), std::string::npos);
}

TEST(Run, WritesArtifactsAndReportsJson) {
    const auto dir = scratch("run_ok");
    auto req = request("macro");
    req.out_dir = (dir / "out").string();
    std::ostringstream out, err;
    ASSERT_EQ(run(req, out, err), kOk) << err.str();
    const auto written = read_file(dir / "out" / "report.json");
    EXPECT_EQ(json::parse(out.str()), json::parse(written));
    for (const auto& name : json::parse(written)["artifacts"]) EXPECT_TRUE(fs::exists(dir / "out" / name.get<std::string>()));
    for (const auto& e : fs::directory_iterator(dir / "out")) EXPECT_NE(e.path().filename().string().front(), '.');
}

TEST(Run, CsvFormat) {
    const auto dir = scratch("run_csv");
    auto req = request("throughput");
    req.out_dir = dir.string();
    req.format = "csv";
    std::ostringstream out, err;
    ASSERT_EQ(run(req, out, err), kOk);
    EXPECT_EQ(out.str().rfind("key,value\n", 0), 0u);
    EXPECT_NE(out.str().find("entries[0].name,Bitcoin"), std::string::npos);
}

TEST(Run, ExitCodes) {
    const auto dir = scratch("run_codes");
    std::ostringstream out, err;
    auto bad_format = request("macro");
    bad_format.out_dir = dir.string();
    bad_format.format = "xml";
    EXPECT_EQ(run(bad_format, out, err), kUsage);

    auto bad_section = request("macro", {{"macro", {{"nope", 1}}}});
    bad_section.out_dir = dir.string();
    EXPECT_EQ(run(bad_section, out, err), kScenario);

    write_file(dir / "bad.csv", "date,symbol,close\n2024-01-02,BTC,abc\n");
    auto bad_data = request("risk");
    bad_data.out_dir = (dir / "bad_out").string();
    bad_data.data_paths = {(dir / "bad.csv").string()};
    EXPECT_EQ(run(bad_data, out, err), kData);
    EXPECT_FALSE(fs::exists(dir / "bad_out" / "report.json"));

    auto missing = request("risk");
    missing.out_dir = dir.string();
    missing.data_paths = {(dir / "nope.csv").string()};
    EXPECT_EQ(run(missing, out, err), kData);

    auto domain = request("macro", {{"macro", {{"mortgage", {{"deflation_rate", 1.5}}}}}});
    domain.out_dir = dir.string();
    EXPECT_EQ(run(domain, out, err), kDomain);

    write_file(dir / "blocker", "x");
    auto unwritable = request("macro");
    unwritable.out_dir = (dir / "blocker").string();
    EXPECT_EQ(run(unwritable, out, err), kOutput);

    EXPECT_FALSE(fs::exists(dir / "report.json"));
}

TEST(Flatten, Paths) {
    const json j = {{"a", {{"b", {1, 2}}}}, {"s", "x,y"}};
    EXPECT_EQ(flatten_csv(j), "key,value\na.b[0],1\na.b[1],2\ns,\"x,y\"\n");
}

TEST(Commands, Listed) {
    const auto& c = commands();
    for (const char* name : {"risk", "garch", "security", "netgame", "route", "macro", "forensics", "tables", "chart"})
        EXPECT_NE(std::find(c.begin(), c.end(), name), c.end()) << name;
}
