// End-to-end checks of the smart-overlay binary: exit codes, reproducible
// outputs and the report figures. The binary path comes from
// SMART_OVERLAY_BIN (set by ctest).

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

std::string binary() {
    const char* env = std::getenv("SMART_OVERLAY_BIN");
    REQUIRE_MESSAGE(env != nullptr, "SMART_OVERLAY_BIN must point at the CLI binary");
    return env;
}

struct RunResult {
    int exit_code = -1;
    std::string output;
};

RunResult run_cli(const std::string& args, const fs::path& dir) {
    const fs::path out_file = dir / "cli_output.txt";
    const std::string cmd = binary() + " " + args + " > " + out_file.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    RunResult result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream in(out_file);
    std::stringstream ss;
    ss << in.rdbuf();
    result.output = ss.str();
    return result;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& p, const std::string& content) {
    std::ofstream out(p);
    out << content;
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("smart_cli_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    static int& counter() {
        static int c = 0;
        return c;
    }
};

const char* kGeneratorSpec = R"({
  "nodes": 5,
  "rounds": 30,
  "default_rtt_ms": 320.0,
  "jitter_pct": 2.0,
  "links": [
    {"src": 0, "dst": 1, "rtt_ms": 400.0},
    {"src": 0, "dst": 2, "rtt_ms": 100.0},
    {"src": 2, "dst": 1, "rtt_ms": 150.0}
  ],
  "outages": [{"src": 0, "dst": 3, "start": 5, "duration": 7}]
})";

std::string run_config_json(const std::string& out_dir) {
    return std::string(R"({
  "generator": )") +
           kGeneratorSpec + R"(,
  "generator_seed": 9,
  "pairs": [[0, 1]],
  "rounds": 30,
  "max_hops": 2,
  "oracle_max_hops": 2,
  "probing_budget": 4,
  "agent": {"beta": 0.8, "k_select": 2, "explore_prob": 0.05, "seed": 4},
  "out_dir": ")" +
           out_dir + R"("
})";
}

}  // namespace

TEST_CASE("generate is deterministic and reports the outage count") {
    TempDir dir;
    write_file(dir.path / "spec.json", kGeneratorSpec);
    auto res = run_cli("generate --spec " + (dir.path / "spec.json").string() + " --seed 7 --out " +
                           (dir.path / "a.csv").string(),
                       dir.path);
    CHECK(res.exit_code == 0);
    CHECK(res.output.find("5 nodes, 30 rounds, 600 samples, 7 lost") != std::string::npos);

    auto res2 = run_cli("generate --spec " + (dir.path / "spec.json").string() +
                            " --seed 7 --out " + (dir.path / "b.csv").string(),
                        dir.path);
    CHECK(res2.exit_code == 0);
    CHECK(slurp(dir.path / "a.csv") == slurp(dir.path / "b.csv"));

    auto res3 = run_cli("generate --spec " + (dir.path / "spec.json").string() +
                            " --seed 8 --out " + (dir.path / "c.csv").string(),
                        dir.path);
    CHECK(res3.exit_code == 0);
    CHECK(slurp(dir.path / "a.csv") != slurp(dir.path / "c.csv"));
}

TEST_CASE("generate exits 2 on a bad spec") {
    TempDir dir;
    write_file(dir.path / "bad.json", R"({"nodes": 1, "rounds": 5})");
    auto res = run_cli("generate --spec " + (dir.path / "bad.json").string() + " --out " +
                           (dir.path / "x.csv").string(),
                       dir.path);
    CHECK(res.exit_code == 2);

    auto missing = run_cli("generate --spec " + (dir.path / "nope.json").string() + " --out " +
                               (dir.path / "x.csv").string(),
                           dir.path);
    CHECK(missing.exit_code == 2);
}

TEST_CASE("import buckets a ping log against a topology") {
    TempDir dir;
    write_file(dir.path / "topo.json",
               R"([{"id":0,"name":"tokyo","lat":35.6,"lon":139.7},
                   {"id":1,"name":"santiago","lat":-33.4,"lon":-70.6}])");
    std::ostringstream log;
    log << "timestamp,src,dst,rtt_ms,success\n";
    for (int t = 0; t < 6; ++t) {
        log << 1000 + 120 * t << ",tokyo,santiago,401.2,1\n";
        if (t != 3) log << 1000 + 120 * t << ",santiago,tokyo,399.8,1\n";
    }
    write_file(dir.path / "pings.csv", log.str());

    auto res = run_cli("import --log " + (dir.path / "pings.csv").string() + " --topology " +
                           (dir.path / "topo.json").string() + " --out " +
                           (dir.path / "trace.csv").string(),
                       dir.path);
    CHECK(res.exit_code == 0);
    CHECK(res.output.find("11 records into 6 rounds") != std::string::npos);
    CHECK(res.output.find("1 gaps") != std::string::npos);

    auto bad = run_cli("import --log " + (dir.path / "pings.csv").string() + " --topology " +
                           (dir.path / "missing.json").string() + " --out " +
                           (dir.path / "trace.csv").string(),
                       dir.path);
    CHECK(bad.exit_code == 2);
}

TEST_CASE("run produces the full output set, reproducibly") {
    TempDir dir;
    const std::string out_a = (dir.path / "out_a").string();
    const std::string out_b = (dir.path / "out_b").string();
    write_file(dir.path / "run_a.json", run_config_json(out_a));
    write_file(dir.path / "run_b.json", run_config_json(out_b));

    auto res = run_cli("run --config " + (dir.path / "run_a.json").string(), dir.path);
    REQUIRE_MESSAGE(res.exit_code == 0, res.output);
    for (const char* name :
         {"reports.ndjson", "outcomes.ndjson", "aggregate.json", "hop_histogram.csv",
          "gap_cdf.csv", "rtd_timeseries_0-1.csv"}) {
        CHECK_MESSAGE(fs::exists(fs::path(out_a) / name), name);
    }

    auto res2 = run_cli("run --config " + (dir.path / "run_b.json").string(), dir.path);
    REQUIRE(res2.exit_code == 0);
    for (const char* name : {"reports.ndjson", "outcomes.ndjson", "aggregate.json",
                             "hop_histogram.csv", "gap_cdf.csv", "rtd_timeseries_0-1.csv"}) {
        CHECK(slurp(fs::path(out_a) / name) == slurp(fs::path(out_b) / name));
    }

    SUBCASE("aggregate has the full stats schema") {
        const std::string agg = slurp(fs::path(out_a) / "aggregate.json");
        for (const char* key :
             {"pct_nonoptimal_direct", "pct_nonoptimal_chosen", "avg_gap_direct",
              "avg_gap_chosen", "hop_histogram", "avg_gap_best2hop", "convergence_round",
              "counted_rounds"}) {
            CHECK_MESSAGE(agg.find(key) != std::string::npos, key);
        }
    }

    SUBCASE("report figures read back from the run") {
        auto hops = run_cli("report --reports " + out_a + "/reports.ndjson --figure hops",
                            dir.path);
        CHECK(hops.exit_code == 0);
        // the planted 250 ms alternate is optimal every round of this run
        CHECK(hops.output == "hops,percent\n1,0.000000\n2,100.000000\n");

        auto gap = run_cli("report --reports " + out_a + "/reports.ndjson --figure gap",
                           dir.path);
        CHECK(gap.exit_code == 0);
        CHECK(gap.output.rfind("gap_pct,cdf_direct,cdf_chosen\n", 0) == 0);

        auto ts = run_cli(
            "report --reports " + out_a + "/reports.ndjson --figure timeseries:0-1", dir.path);
        CHECK(ts.exit_code == 0);
        CHECK(ts.output.rfind("round,direct_ms,chosen_ms,optimal_ms\n", 0) == 0);

        auto unknown = run_cli(
            "report --reports " + out_a + "/reports.ndjson --figure timeseries:3-4", dir.path);
        CHECK(unknown.exit_code == 2);

        auto nonsense = run_cli(
            "report --reports " + out_a + "/reports.ndjson --figure sparkles", dir.path);
        CHECK(nonsense.exit_code == 2);
    }
}

TEST_CASE("run with zero rounds exits 2 cleanly") {
    TempDir dir;
    const std::string out_dir = (dir.path / "out").string();
    write_file(dir.path / "run.json", run_config_json(out_dir));
    auto res = run_cli("run --config " + (dir.path / "run.json").string() + " --rounds 0",
                       dir.path);
    CHECK(res.exit_code == 2);
    CHECK(slurp(fs::path(out_dir) / "reports.ndjson").empty());
}

TEST_CASE("run exits 2 on missing config") {
    TempDir dir;
    auto res = run_cli("run --config " + (dir.path / "nope.json").string(), dir.path);
    CHECK(res.exit_code == 2);
}

TEST_CASE("a fixed point that cannot converge exits 3") {
    TempDir dir;
    const std::string out_dir = (dir.path / "out").string();
    std::string config = run_config_json(out_dir);
    const auto pos = config.find("\"seed\": 4");
    REQUIRE(pos != std::string::npos);
    config.insert(pos, "\"max_iter\": 1, ");
    write_file(dir.path / "run.json", config);
    auto res = run_cli("run --config " + (dir.path / "run.json").string(), dir.path);
    CHECK(res.exit_code == 3);
    CHECK(res.output.find("numerical failure") != std::string::npos);
}

TEST_CASE("the environment variable supplies the default output dir") {
    TempDir dir;
    const std::string config = std::string(R"({
  "generator": )") + kGeneratorSpec + R"(,
  "generator_seed": 9,
  "pairs": [[0, 1]],
  "rounds": 30,
  "agent": {"beta": 0.8, "k_select": 2, "seed": 4}
})";
    write_file(dir.path / "run.json", config);

    const fs::path env_out = dir.path / "env_out";
    const std::string cmd = "SMART_OVERLAY_OUTDIR=" + env_out.string() + " " + binary() +
                            " run --config " + (dir.path / "run.json").string() +
                            " > /dev/null 2>&1";
    REQUIRE(std::system(cmd.c_str()) == 0);
    CHECK(fs::exists(env_out / "reports.ndjson"));
    CHECK(fs::exists(env_out / "aggregate.json"));
}

TEST_CASE("usage errors exit 2") {
    TempDir dir;
    auto res = run_cli("frobnicate", dir.path);
    CHECK(res.exit_code == 2);
    auto res2 = run_cli("generate", dir.path);
    CHECK(res2.exit_code == 2);
}
