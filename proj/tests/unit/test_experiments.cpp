#include "qmlab/experiments.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace qmlab;

namespace {

std::string csv_of(const ExperimentReport& r, const std::string& table) {
    for (const auto& t : r.tables)
        if (t.name == table) {
            std::ostringstream os;
            write_csv(t, os);
            return os.str();
        }
    return {};
}

const char* kSweep = R"(
[experiment]
id = sharpness-sweep
seed = 3
[example]
name = ex21
n = 2
k = 3
[sweep]
h_start = 2^-4
h_stop = 2^-8
[lp]
p = inf, 8
[quasimode]
max_order = 1
)";

int run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "qmlab");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    return cli_main(static_cast<int>(argv.size()), argv.data());
}

std::filesystem::path write_temp(const std::string& name, const std::string& text) {
    auto dir = std::filesystem::temp_directory_path() / "qmlab_unit";
    std::filesystem::create_directories(dir);
    std::ofstream(dir / name) << text;
    return dir / name;
}

}  // namespace

TEST_CASE("numbers in configs") {
    CHECK(parse_real("2^-4") == 0.0625);
    CHECK(parse_real("1/16") == 0.0625);
    CHECK(parse_real(" 0.5 ") == 0.5);
    CHECK(parse_real("1e-3") == 0.001);
    CHECK_THROWS_AS(parse_real("abc"), ConfigError);
    CHECK_THROWS_AS(parse_real(""), ConfigError);
    CHECK(format_real(0.1) == "0.10000000000000001");
    CHECK(format_real(1.0 / 0.0) == "inf");
}

TEST_CASE("config validation") {
    auto c = parse_config(kSweep);
    CHECK(c.experiment == "sharpness-sweep");
    CHECK(c.seed == 3);
    auto hs = c.h_sweep("sweep");
    REQUIRE(hs.size() == 5);
    CHECK(hs.back() == 1.0 / 256);
    CHECK(c.p_list("").size() == 2);
    CHECK_THROWS_AS(parse_config("[experiment]\nid = vdc\n[lp]\np = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[experiment]\nid = vdc\n[lp]\np = 3/2\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[experiment]\nid = nope\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[experiment]\nseed = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[experiment]\nid = vdc\n[sweep]\nh = 0.5, 0.5\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[experiment]\nid = vdc\n[sweep]\nh_start = 2^-6\nh_stop = 2^-4\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[experiment]\nid = contact-profile\n[symbols]\ndim = 2\np1 = x1 +\np2 = x1\n"),
                    ConfigError);
    CHECK_THROWS_AS(parse_config("[experiment\nid = vdc\n"), ConfigError);
}

TEST_CASE("delta curves") {
    auto r = run_experiment(parse_config("[experiment]\nid = delta-curves\n[delta]\nn = 2\nk = 1, 3\nsamples = 9\n"));
    CHECK(r.all_pass());
    REQUIRE(r.tables.size() == 1);
    CHECK(r.tables[0].rows.size() == 9 * 3);
    CHECK(r.tables[0].columns == std::vector<std::string>{"family", "n", "p", "k", "delta"});
}

TEST_CASE("identical configs give identical CSVs across thread counts") {
    const auto cfg = parse_config(kSweep);
    setenv("QMLAB_THREADS", "1", 1);
    auto a = run_experiment(cfg);
    setenv("QMLAB_THREADS", "3", 1);
    auto b = run_experiment(cfg);
    unsetenv("QMLAB_THREADS");
    CHECK(a.all_pass());
    for (const char* t : {"volumes", "quasimode", "norms", "slopes"}) {
        CHECK_FALSE(csv_of(a, t).empty());
        CHECK(csv_of(a, t) == csv_of(b, t));
    }
}

TEST_CASE("report files") {
    auto r = run_experiment(parse_config("[experiment]\nid = delta-curves\nseed = 42\n[delta]\nn = 3\nsamples = 5\n"));
    auto dir = std::filesystem::temp_directory_path() / "qmlab_unit" / "report";
    write_report(r, dir);
    std::ifstream is(dir / "report.json");
    std::stringstream ss;
    ss << is.rdbuf();
    const std::string j = ss.str();
    CHECK(j.find("\"schema_version\": 1") != std::string::npos);
    CHECK(j.find("\"seed\": 42") != std::string::npos);
    CHECK(j.find("\"measured\"") != std::string::npos);
    CHECK(std::filesystem::exists(dir / "delta.csv"));
}

TEST_CASE("command-line exit codes") {
    CHECK(run_cli({"list"}) == 0);
    CHECK(run_cli({"list", "vdc"}) == 0);
    CHECK(run_cli({"delta", "--family", "contact", "--n", "3", "--p", "inf", "--k", "1"}) == 0);
    CHECK(run_cli({"delta", "--family", "contact", "--n", "3", "--p", "1", "--k", "1"}) == 2);
    CHECK(run_cli({"run", "/nonexistent/config.cfg"}) == 2);
    CHECK(run_cli({"bogus"}) == 2);
    auto bad_p = write_temp("bad_p.cfg", "[experiment]\nid = sharpness-sweep\n[lp]\np = 1\n");
    CHECK(run_cli({"run", bad_p.string()}) == 2);
    // a target box far too small for the L^p tails
    auto tiny = write_temp("tiny.cfg",
                           "[experiment]\nid = sharpness-sweep\n[example]\nname = ex21\nn = 2\nk = 3\n[sweep]\n"
                           "h_start = 2^-4\nh_stop = 2^-8\n[lp]\np = 8\nmode = lp\nmargin = 0.5\n");
    const auto out = (std::filesystem::temp_directory_path() / "qmlab_unit" / "tiny").string();
    CHECK(run_cli({"run", tiny.string(), "--out", out}) == 3);
    auto p1 = write_temp("p1.txt", "x1 # flat\n"), p2 = write_temp("p2.txt", "x1 - x2^2 - x3^6\n");
    CHECK(run_cli({"contact", "--p1", p1.string(), "--p2", p2.string()}) == 0);
}
