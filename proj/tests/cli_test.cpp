#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <sstream>

#include "powerprov/cli.hpp"

using namespace powerprov;
namespace fs = std::filesystem;

namespace {

struct Outcome
{
    int code;
    std::string out;
    std::string err;
};

Outcome invoke(std::vector<std::string> args)
{
    args.insert(args.begin(), "powerprov");
    std::vector<const char*> argv;
    for (const auto& a : args)
        argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::main(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

class TempDir
{
public:
    TempDir() : path_(fs::temp_directory_path() / ("powerprov-cli-" + std::to_string(::getpid())))
    {
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }

    std::string write(const std::string& name, const std::string& text) const
    {
        const auto p = (path_ / name).string();
        write_file(p, text);
        return p;
    }

private:
    fs::path path_;
};

const char* four_event = "time,event,job_id\n0,init,a\n0,init,b\n1,depart,a\n2,depart,b\n3,arrive,c\n4,arrive,d\n5,end,\n";

} // namespace

TEST(Cli, DecomposeFourEventTrace)
{
    TempDir dir;
    const auto r = invoke({"decompose", dir.write("t.csv", four_event)});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = Json::parse(r.out);
    EXPECT_EQ(j["critical_times"], Json::parse("[0.0, 1.0, 4.0, 5.0]"));
    EXPECT_EQ(j["segments"][1]["type"], "IV");
}

TEST(Cli, DecomposeConstantTraceCsv)
{
    TempDir dir;
    const auto r = invoke({"--format", "csv", "decompose", dir.write("c.csv", "0,init,a\n4,end,\n")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out, "start,end,type,anchor\n0,4,I,1\n");
}

TEST(Cli, MissingFileNamesPath)
{
    const auto r = invoke({"offline", "/nonexistent/trace.csv"});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("/nonexistent/trace.csv"), std::string::npos);
}

TEST(Cli, ModelErrorsExitOne)
{
    TempDir dir;
    EXPECT_EQ(invoke({"offline", dir.write("s.csv", "1,arrive,a\n1,arrive,b\n")}).code, 1);
    EXPECT_EQ(invoke({"simulate", dir.write("f.csv", "1,arrive,a\n2,arrive,b\n"), "--fleet", "1"}).code, 1);
}

TEST(Cli, ConfigErrorsExitTwo)
{
    TempDir dir;
    const auto trace = dir.write("t.csv", four_event);
    EXPECT_EQ(invoke({"--config", dir.write("bad.json", R"({"trace": "x", "colour": 1})"), "offline"}).code, 2);
    EXPECT_EQ(invoke({"--config", dir.write("cost.json", R"({"cost": {"power": 1, "watts": 2}})"), "offline", trace})
                  .code,
              2);
    EXPECT_EQ(invoke({"--config", dir.write("broken.json", "{"), "offline", trace}).code, 2);
    EXPECT_EQ(invoke({"simulate", trace, "--policy", "A9"}).code, 2);
    EXPECT_EQ(invoke({"simulate", trace, "--alpha", "2"}).code, 2);
    EXPECT_EQ(invoke({"bogus"}).code, 2);
    EXPECT_EQ(invoke({}).code, 2);
}

TEST(Cli, HelpExitsZero)
{
    const auto r = invoke({"--help"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("sweep"), std::string::npos);
}

TEST(Cli, OfflineMatchesLibrary)
{
    TempDir dir;
    const auto trace = dir.write("t.csv", four_event);
    const auto r = invoke({"--beta-on", "0.25", "--beta-off", "0.25", "offline", trace});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_DOUBLE_EQ(Json::parse(r.out)["total"].get<double>(), 7.0);
    const auto fluid = invoke({"offline", dir.write("f.csv", "slot,load\n0,2\n1,0\n2,0\n3,0\n4,0\n5,0\n6,0\n7,2\n")});
    ASSERT_EQ(fluid.code, 0) << fluid.err;
    EXPECT_DOUBLE_EQ(Json::parse(fluid.out)["total"].get<double>(), 16.0);
}

TEST(Cli, ConfigFileSuppliesDefaultsAndFlagsOverride)
{
    TempDir dir;
    const auto trace = dir.write("t.csv", four_event);
    const auto cfg = dir.write("c.json", R"({"trace": ")" + trace + R"(", "cost": {"power": 1, "beta_on": 0.25, "beta_off": 0.25}})");
    EXPECT_DOUBLE_EQ(Json::parse(invoke({"--config", cfg, "offline"}).out)["total"].get<double>(), 7.0);
    EXPECT_DOUBLE_EQ(Json::parse(invoke({"--config", cfg, "--beta-on", "3", "--beta-off", "3", "offline"}).out)["total"]
                         .get<double>(),
                     10.0);
}

TEST(Cli, SimulateReportsOptimalForA0)
{
    TempDir dir;
    const auto r = invoke({"simulate", dir.write("t.csv", four_event), "--policy", "A0"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = Json::parse(r.out);
    EXPECT_DOUBLE_EQ(j["result"]["breakdown"]["total"].get<double>(), j["optimal_cost"].get<double>());
    EXPECT_EQ(j["result"]["migration_count"], 0);
}

TEST(Cli, RatioTable)
{
    const auto r = invoke({"--format", "csv", "ratio", "--b", "2,10000,5", "--k", "0,5"});
    ASSERT_EQ(r.code, 0) << r.err;
    std::istringstream lines(r.out);
    std::string header, row;
    std::getline(lines, header);
    EXPECT_EQ(header, "b,k,c");
    std::getline(lines, row);
    EXPECT_EQ(row.substr(0, 10), "2,0,1.3333");
    std::getline(lines, row);
    EXPECT_EQ(row, "2,5,1");
    std::getline(lines, row);
    EXPECT_EQ(row.substr(0, 8), "10000,0,");
    EXPECT_NEAR(std::stod(row.substr(8)), 1.5820, 1e-3);
    const auto j = Json::parse(invoke({"ratio", "--b", "2", "--k", "0", "--probs"}).out);
    EXPECT_EQ(j["rows"][0]["p"].size(), 2u);
}

TEST(Cli, SweepRowsAndDeterminism)
{
    TempDir dir;
    const auto synth = invoke({"--seed", "7", "--format", "csv", "synth", "--slots", "300"});
    ASSERT_EQ(synth.code, 0) << synth.err;
    const auto trace = dir.write("d.csv", synth.out);
    const std::vector<std::string> args = {"sweep",      trace,  "--policies", "A1,A2,DelayedOff", "--alphas",
                                           "0,0.5,1",    "--runs", "5",        "--noises",          "0,0.2"};
    const auto a = invoke(args);
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, invoke(args).out);
    const auto j = Json::parse(a.out);
    ASSERT_EQ(j["rows"].size(), 18u);
    for (const auto& row : j["rows"]) {
        EXPECT_GE(row["empirical_ratio"].get<double>(), 1.0 - 1e-9);
        EXPECT_NEAR(row["cost_reduction"].get<double>(),
                    1.0 - row["mean_cost"].get<double>() / row["static_cost"].get<double>(), 1e-12);
    }
}

TEST(Cli, SweepIndependentOfThreadCount)
{
    TempDir dir;
    const auto trace = dir.write("d.csv", invoke({"--format", "csv", "synth", "--slots", "200"}).out);
    const std::vector<std::string> args = {"sweep", trace, "--policies", "A2,A3", "--alphas", "0,0.25,0.5", "--runs", "4"};
    ::setenv("POWERPROV_THREADS", "1", 1);
    const auto one = invoke(args);
    ::setenv("POWERPROV_THREADS", "4", 1);
    const auto four = invoke(args);
    ::unsetenv("POWERPROV_THREADS");
    EXPECT_EQ(one.out, four.out);
}

TEST(Cli, RescaleAndSynth)
{
    TempDir dir;
    const auto trace = dir.write("l.csv", "slot,load\n0,1\n1,2\n2,3\n");
    const auto r = invoke({"rescale", trace, "--pmr", "2"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NEAR(Json::parse(r.out)["pmr"].get<double>(), 2.0, 1e-9);
    EXPECT_EQ(invoke({"rescale", trace, "--pmr", "9"}).code, 1);
    const auto brick = invoke({"--format", "csv", "synth", "--kind", "brick", "--jobs", "5"});
    ASSERT_EQ(brick.code, 0);
    EXPECT_NO_THROW(parse_event_trace(brick.out));
}
